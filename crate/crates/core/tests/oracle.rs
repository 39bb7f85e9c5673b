//! Off-grid cross-checks of the phase-space engine against the Fock oracle.

use cvpm_core::certify::{certify_point, CertificationPoint, Tolerances};
use cvpm_core::fock::XGrid;
use cvpm_core::{ChannelModel, ProbeSpec};

fn check(spec: ProbeSpec, model: ChannelModel, phi: f64) {
    let point = CertificationPoint { spec, model, phi };
    let r = certify_point(&point, &Tolerances::default(), &XGrid::default()).unwrap();
    assert!(r.passed(), "{point}: {r:?}");
}

#[test]
fn displaced_squeezed_unitary() {
    check(
        ProbeSpec::new(0.7, 0.3, 1.1).unwrap(),
        ChannelModel::unitary(0.8).unwrap(),
        0.05,
    );
}

#[test]
fn displaced_squeezed_random() {
    check(
        ProbeSpec::new(0.6, 0.8, 2.5).unwrap(),
        ChannelModel::random(0.3).unwrap(),
        0.2,
    );
}

#[test]
fn negative_disturbance() {
    check(
        ProbeSpec::new(0.5, 0.5, 0.0).unwrap(),
        ChannelModel::unitary(-0.6).unwrap(),
        0.1,
    );
}

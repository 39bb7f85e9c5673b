//! Locale-independent number formatting and CSV assembly.

use crate::error::CliError;

pub const SCHEMA_LINE: &str = "# cv-phase-metrology schema v1";

const SIG_DIGITS: i32 = 12;

/// `printf("%.12g")`: twelve significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |v| < 1e12`.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (SIG_DIGITS - 1 - exp) as usize, v);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rows of a CSV table with a fixed column schema.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Sorts rows lexicographically on the first `keys` columns.
    pub fn sort_by_keys(&mut self, keys: usize) {
        self.rows.sort_by(|a, b| {
            a[..keys]
                .iter()
                .zip(&b[..keys])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    /// Schema line, one `# key=value` line per setting, column header, rows.
    pub fn to_csv(&self, settings: &[(&str, String)]) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(SCHEMA_LINE);
        out.push('\n');
        for (k, v) in settings {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
                return Err(CliError::Numeric(format!(
                    "non-finite {} in row {:?}",
                    self.columns[bad], row
                )));
            }
            let fields: Vec<String> = row.iter().map(|&v| fmt_g(v)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

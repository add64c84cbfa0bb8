//! Text and CSV rendering of convergence tables.

use std::fmt::Write;

use crate::analysis::ConvergenceRow;

pub const CSV_HEADER: &str = "n,l2,l2_rate,h1,h1_rate";

/// Three significant digits with a two-digit signed exponent, e.g. `1.79e-02`.
pub fn sci3(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.2e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

fn rate_text(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.1}")).unwrap_or_else(|| "-".into())
}

/// Aligned table with one row per mesh.
pub fn convergence_text(title: &str, rows: &[ConvergenceRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(
        out,
        "{:>6}  {:>10}  {:>4}  {:>10}  {:>4}",
        "1/h", "L2 error", "r", "H1 error", "r"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:>6}  {:>10}  {:>4}  {:>10}  {:>4}",
            r.n,
            sci3(r.l2_error),
            rate_text(r.l2_rate),
            sci3(r.h1_error),
            rate_text(r.h1_rate)
        )
        .unwrap();
    }
    out
}

/// CSV with full precision; rates left empty where undefined.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let rate = |r: Option<f64>| r.map(|r| format!("{r:.16e}")).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{},{:.16e},{}",
            r.n,
            r.l2_error,
            rate(r.l2_rate),
            r.h1_error,
            rate(r.h1_rate)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format() {
        assert_eq!(sci3(1.79e-2), "1.79e-02");
        assert_eq!(sci3(0.0), "0.00e+00");
        assert_eq!(sci3(1234.0), "1.23e+03");
        assert_eq!(sci3(1.71e-15), "1.71e-15");
    }

    #[test]
    fn csv_round_trip() {
        let rows = [
            ConvergenceRow {
                n: 8,
                l2_error: 1.0 / 3.0,
                l2_rate: None,
                h1_error: 0.1,
                h1_rate: None,
            },
            ConvergenceRow {
                n: 16,
                l2_error: 1.0 / 12.0,
                l2_rate: Some(2.0),
                h1_error: 0.025,
                h1_rate: Some(2.0),
            },
        ];
        let csv = convergence_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(f[0], "8");
        assert_eq!(f[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(f[2], "");
        let f: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(f[2].parse::<f64>().unwrap(), 2.0);
        let text = convergence_text("t", &rows);
        assert!(text.contains("3.33e-01"));
        assert!(text.contains(" 2.0"));
    }
}

//! Deterministic number formatting and the stability summary table.

use std::fmt::Write as _;

use serde::Serialize;

use crate::models::ModelKind;
use crate::stability::{Classification, StabilityReport};

/// Significant digits in every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Scientific notation with 12 significant digits, e.g. `-1.23456789012e-3`.
/// Negative zero prints as zero.
pub fn sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    sci(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub model: ModelKind,
    pub lambda_star: f64,
    pub gamma_prime_sign: Sign,
    pub lambda2_sign: Sign,
    pub mu2_sign: Sign,
    pub classification: Classification,
}

impl TableRow {
    pub fn from_report(r: &StabilityReport) -> Self {
        Self {
            model: r.model,
            lambda_star: r.lambda_star,
            gamma_prime_sign: Sign::of(r.gamma_prime),
            lambda2_sign: Sign::of(r.lambda2),
            mu2_sign: Sign::of(r.mu2),
            classification: r.classification,
        }
    }
}

/// Expected `(model, gamma' sign, lambda2 sign, mu2 sign, classification)`.
pub const EXPECTED_TABLE: [(ModelKind, Sign, Sign, Sign, Classification); 4] = [
    (ModelKind::Polynomial, Sign::Positive, Sign::Negative, Sign::Positive, Classification::Stable),
    (ModelKind::SineGordon, Sign::Negative, Sign::Positive, Sign::Positive, Classification::Stable),
    (ModelKind::SinhGordon, Sign::Negative, Sign::Negative, Sign::Negative, Classification::Unstable),
    (ModelKind::Exponential, Sign::Positive, Sign::Positive, Sign::Negative, Classification::Unstable),
];

/// Human-readable differences between `rows` and the expected table.
pub fn table_mismatches(rows: &[TableRow]) -> Vec<String> {
    let mut out = Vec::new();
    for row in rows {
        let Some(&(_, gp, l2, mu2, class)) = EXPECTED_TABLE.iter().find(|e| e.0 == row.model) else {
            out.push(format!("{}: no expected row", row.model));
            continue;
        };
        let cmp = [
            ("gamma'", gp.symbol(), row.gamma_prime_sign.symbol()),
            ("lambda2", l2.symbol(), row.lambda2_sign.symbol()),
            ("mu2", mu2.symbol(), row.mu2_sign.symbol()),
        ];
        for (name, want, got) in cmp {
            if want != got {
                out.push(format!("{}: {name} sign expected {want}, got {got}", row.model));
            }
        }
        if class != row.classification {
            out.push(format!("{}: expected {class}, got {}", row.model, row.classification));
        }
    }
    out
}

pub const TABLE_HEADERS: [&str; 6] =
    ["model", "lambda_star", "gamma_prime_sign", "lambda2_sign", "mu2_sign", "classification"];

pub fn table_cells(row: &TableRow) -> Vec<String> {
    vec![
        row.model.to_string(),
        sci(row.lambda_star),
        row.gamma_prime_sign.symbol().into(),
        row.lambda2_sign.symbol().into(),
        row.mu2_sign.symbol().into(),
        row.classification.to_string(),
    ]
}

/// Comma-separated rows, header first, `\n` line endings. Cells containing
/// commas or quotes are quoted.
pub fn csv<S: AsRef<str>>(headers: &[S], rows: &[Vec<String>]) -> String {
    fn cell(s: &str) -> String {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
    let mut out = String::new();
    let head: Vec<String> = headers.iter().map(|h| cell(h.as_ref())).collect();
    out.push_str(&head.join(","));
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|c| cell(c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// GitHub-flavoured markdown table.
pub fn markdown<S: AsRef<str>>(headers: &[S], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let head: Vec<&str> = headers.iter().map(|h| h.as_ref()).collect();
    let _ = writeln!(out, "| {} |", head.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | ").replace('\n', " "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sci(1.0), "1.00000000000e0");
        assert_eq!(sci(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(sci(-0.0), "0.00000000000e0");
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn csv_and_markdown_layout() {
        let rows = vec![vec!["a".to_string(), "1,2".to_string()]];
        assert_eq!(csv(&["x", "y"], &rows), "x,y\na,\"1,2\"\n");
        assert_eq!(markdown(&["x", "y"], &rows), "| x | y |\n|---|---|\n| a | 1,2 |\n");
    }

    #[test]
    fn mismatches_are_reported() {
        let mut row = TableRow {
            model: ModelKind::SineGordon,
            lambda_star: 12.0,
            gamma_prime_sign: Sign::Negative,
            lambda2_sign: Sign::Positive,
            mu2_sign: Sign::Positive,
            classification: Classification::Stable,
        };
        assert!(table_mismatches(std::slice::from_ref(&row)).is_empty());
        row.mu2_sign = Sign::Negative;
        row.classification = Classification::Unstable;
        assert_eq!(table_mismatches(&[row]).len(), 2);
    }
}

//! Sampled solutions `u(t, ·)` on a grid, their `x,u` CSV form, and the
//! relative L² error between two of them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl SolutionField {
    pub fn new(t: f64, x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.len() != u.len() {
            return Err(Error::Dimension {
                context: "solution field",
                expected: x.len(),
                actual: u.len(),
            });
        }
        Ok(SolutionField { t, x, u })
    }

    pub fn from_fn(t: f64, x: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let u = x.iter().map(|&xi| f(xi)).collect();
        SolutionField { t, x, u }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Header `x,u`, one row per node, values with 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.len() + 1));
        out.push_str("x,u\n");
        for (&x, &u) in self.x.iter().zip(&self.u) {
            let _ = writeln!(out, "{},{}", format_sig(x, 9), format_sig(u, 9));
        }
        out
    }

    /// Parses the `x,u` format. The time is not stored in the file.
    pub fn from_csv(t: f64, text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Format {
            what: "solution CSV",
            detail,
        };
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,u" => {}
            other => return Err(bad(format!("expected header `x,u`, found {other:?}"))),
        }
        let (mut x, mut u) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| bad(format!("line {}: `{line}`", i + 2)))
            };
            x.push(parse(cols.next())?);
            u.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(bad(format!("line {}: too many columns", i + 2)));
            }
        }
        SolutionField::new(t, x, u)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path, t: f64) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SolutionField::from_csv(t, &text)
    }
}

/// `n` equispaced points on `[0, 1]` including both ends.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs both endpoints");
    let last = (n - 1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

/// `‖field − reference‖₂ / ‖reference‖₂` over the shared grid.
pub fn rel_error(field: &SolutionField, reference: &SolutionField) -> Result<f64> {
    if field.len() != reference.len() {
        return Err(Error::Dimension {
            context: "field comparison",
            expected: reference.len(),
            actual: field.len(),
        });
    }
    if let Some(row) = field
        .x
        .iter()
        .zip(&reference.x)
        .position(|(a, b)| a != b)
    {
        return Err(Error::GridMismatch {
            row,
            left: field.x[row],
            right: reference.x[row],
        });
    }
    let diff: f64 = field
        .u
        .iter()
        .zip(&reference.u)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let norm: f64 = reference.u.iter().map(|b| b * b).sum();
    if norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((diff / norm).sqrt())
}

/// Decimal rendering with `digits` significant digits, in the style of C's
/// `%.{digits}g` (trailing zeros dropped, exponent form for very large or
/// small magnitudes).
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

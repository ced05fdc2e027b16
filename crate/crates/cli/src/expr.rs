//! Parsers for command-line quantities.

use std::f64::consts::PI;

/// Parses an α value written as a plain number or a rational multiple of π:
/// `2.5`, `pi`, `-pi`, `3pi/2`, `1.1pi`, `3*pi/4`, `pi/8`.
pub fn parse_alpha(text: &str) -> Result<f64, String> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    if s.is_empty() {
        return Err("empty alpha value".into());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => {
            let d: f64 = d.parse().map_err(|_| format!("bad denominator in `{text}`"))?;
            if d == 0.0 || !d.is_finite() {
                return Err(format!("zero denominator in `{text}`"));
            }
            (n, d)
        }
        None => (s.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse::<f64>()
                    .map_err(|_| format!("bad multiple of pi in `{text}`"))?,
            };
            c * PI
        }
        None => num
            .parse::<f64>()
            .map_err(|_| format!("`{text}` is neither a number nor a multiple of pi"))?,
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

/// Parses a length into nanometres.
///
/// Accepts explicit units (`833nm`, `1um`, `1.25e-6m`). A bare number below
/// 1e-3 is read as metres (`1000e-9`), anything else as nanometres.
pub fn parse_length_nm(text: &str) -> Result<f64, String> {
    let s = text.trim().to_ascii_lowercase();
    let (digits, scale) = if let Some(d) = s.strip_suffix("nm") {
        (d, 1.0)
    } else if let Some(d) = s.strip_suffix("um").or_else(|| s.strip_suffix("µm")) {
        (d, 1e3)
    } else if let Some(d) = s.strip_suffix('m') {
        (d, 1e9)
    } else {
        let v: f64 = s.parse().map_err(|_| format!("bad length `{text}`"))?;
        (s.as_str(), if v.abs() < 1e-3 { 1e9 } else { 1.0 })
    };
    let v: f64 = digits.trim().parse().map_err(|_| format!("bad length `{text}`"))?;
    let nm = v * scale;
    if nm.is_finite() && nm > 0.0 {
        Ok(nm)
    } else {
        Err(format!("length must be positive, got `{text}`"))
    }
}

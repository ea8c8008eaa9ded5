//! Plain-text field files.
//!
//! ```text
//! L=<L> K=<K>
//! <k> <re> <im>      one line per mode, k = -K/2+1 ..= K/2
//! ```

use rustfft::num_complex::Complex64;

use super::field::Field;
use super::grid::{SpectralGrid, MAX_POINTS};
use crate::error::{Error, Result};

/// Relative Hermitian-symmetry tolerance accepted on input.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub fn write_field(field: &Field) -> String {
    let grid = field.grid();
    let mut out = format!("L={:.16e} K={}\n", grid.length(), grid.points());
    for k in grid.modes() {
        let c = field.coeff(k);
        out.push_str(&format!("{} {:.16e} {:.16e}\n", k, c.re, c.im));
    }
    out
}

fn parse_header(line: &str) -> Result<(f64, usize)> {
    let mut length = None;
    let mut points = None;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("L=") {
            length = Some(v.parse::<f64>().map_err(|e| Error::parse(1, format!("bad L: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("K=") {
            points = Some(v.parse::<usize>().map_err(|e| Error::parse(1, format!("bad K: {e}")))?);
        } else {
            return Err(Error::parse(1, format!("unexpected header token {tok:?}")));
        }
    }
    match (length, points) {
        (Some(l), Some(k)) => Ok((l, k)),
        _ => Err(Error::parse(1, "header must be \"L=<L> K=<K>\"")),
    }
}

pub fn read_field(text: &str) -> Result<Field> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let (length, points) = parse_header(header)?;
    if points > MAX_POINTS {
        return Err(Error::parse(1, format!("K={points} exceeds {MAX_POINTS}")));
    }
    let grid = SpectralGrid::new(length, points)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); points];
    let mut seen = vec![false; points];
    for (idx, line) in lines {
        let lineno = idx + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(lineno, "expected \"k re im\""));
        }
        let k: i64 = toks[0].parse().map_err(|e| Error::parse(lineno, format!("bad mode: {e}")))?;
        if k < grid.min_mode() || k > grid.nyquist() {
            return Err(Error::parse(lineno, format!("mode {k} outside lattice")));
        }
        let re: f64 = toks[1].parse().map_err(|e| Error::parse(lineno, format!("bad real part: {e}")))?;
        let im: f64 = toks[2].parse().map_err(|e| Error::parse(lineno, format!("bad imaginary part: {e}")))?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::parse(lineno, "non-finite coefficient"));
        }
        let i = grid.index_of(k);
        if seen[i] {
            return Err(Error::parse(lineno, format!("mode {k} repeated")));
        }
        seen[i] = true;
        coeffs[i] = Complex64::new(re, im);
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Parse { line: 0, msg: format!("mode {} missing", grid.mode_of(i)) });
    }
    if coeffs[points / 2] != Complex64::new(0.0, 0.0) {
        return Err(Error::Parse { line: 0, msg: "Nyquist coefficient must be zero".into() });
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = SYMMETRY_TOLERANCE * scale;
    let asym = (1..points / 2)
        .map(|i| (coeffs[i] - coeffs[points - i].conj()).norm())
        .chain(std::iter::once(coeffs[0].im.abs()))
        .fold(0.0, f64::max);
    if asym > tol {
        return Err(Error::Parse {
            line: 0,
            msg: format!("coefficients not Hermitian (deviation {asym:e})"),
        });
    }
    Field::from_coeffs(&grid, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = SpectralGrid::new(2.0 * PI, 16).unwrap();
        let f = Field::from_fn(&g, |x| x.cos() + 0.3 * (3.0 * x).sin() + 0.1);
        let text = write_field(&f);
        assert!(text.starts_with("L=6.2831853071795862e0 K=16\n"));
        let back = read_field(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(write_field(&back), text);
    }

    #[test]
    fn rejects_malformed_inputs() {
        let g = SpectralGrid::new(1.0, 8).unwrap();
        let good = write_field(&Field::from_fn(&g, |x| (2.0 * PI * x).cos()));
        assert!(read_field("").is_err());
        assert!(read_field("L=1 K=12\n").is_err());
        assert!(read_field("L=1\n").is_err());
        // missing a mode
        let short: String = good.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(read_field(&short).is_err());
        // duplicated mode
        let dup = format!("{good}0 0 0\n");
        assert!(read_field(&dup).is_err());
        // nonzero Nyquist
        let nyq = good.replace("\n4 0.0000000000000000e0 0.0000000000000000e0", "\n4 1 0");
        assert!(read_field(&nyq).is_err());
        // broken symmetry
        let asym = good.replace("\n1 ", "\n1 7");
        assert!(read_field(&asym).is_err());
        assert!(read_field(&good.replace("\n2 ", "\n2 nan ")).is_err());
    }
}

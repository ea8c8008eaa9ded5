use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Field, SpectralGrid};

/// Largest tolerated value of the profile at distance `L/2` from its centre.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Signed distance from `x0` to `x` on the torus, in `[-L/2, L/2)`.
fn periodic_offset(x: f64, x0: f64, length: f64) -> f64 {
    (x - x0 + length / 2.0).rem_euclid(length) - length / 2.0
}

/// `sqrt(2c) sech(sqrt(c) (x - x0))`, the travelling wave of speed `c`,
/// sampled then dealiased.
pub fn soliton(c: f64, x0: f64, grid: &SpectralGrid) -> Result<Field> {
    Ok(soliton_profile(c, x0, grid)?.dealias())
}

/// The sampled wave without dealiasing.
pub fn soliton_profile(c: f64, x0: f64, grid: &SpectralGrid) -> Result<Field> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidArgument(format!("soliton speed must be positive, got {c}")));
    }
    let tail = 1.0 / (c.sqrt() * grid.length() / 2.0).cosh();
    if tail >= TAIL_TOLERANCE {
        return Err(Error::Precondition(format!(
            "soliton tail {tail:e} at distance L/2 exceeds {TAIL_TOLERANCE:e}; enlarge the domain"
        )));
    }
    let amp = (2.0 * c).sqrt();
    let len = grid.length();
    Ok(Field::from_fn(grid, |x| amp / (c.sqrt() * periodic_offset(x, x0, len)).cosh()))
}

/// The soliton translated to time `t`.
pub fn soliton_at(c: f64, x0: f64, t: f64, grid: &SpectralGrid) -> Result<Field> {
    soliton(c, x0 + c * t, grid)
}

/// `(1/lambda) u(x/lambda)` on the stretched torus of length `lambda L`,
/// optionally refined to `points` collocation points by zero padding.
pub fn rescale(state: &Field, lambda: f64, points: Option<usize>) -> Result<Field> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must be >= 1, got {lambda}")));
    }
    let old = state.grid();
    let k = points.unwrap_or(old.points());
    if k < old.points() {
        return Err(Error::InvalidArgument(format!(
            "rescaled grid needs at least {} points, got {k}",
            old.points()
        )));
    }
    let grid = SpectralGrid::new(lambda * old.length(), k)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
    for mode in old.modes() {
        if mode != old.nyquist() {
            coeffs[grid.index_of(mode)] = state.coeff(mode) / lambda;
        }
    }
    Field::from_coeffs(&grid, coeffs)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imethod::{lambda_n, Unit};
use crate::spectral::{integral_of_product, Complex64, Field, SpectralGrid};

/// Real field with random coefficients on `1 <= |k| <= band` (and the mean),
/// magnitudes decaying like `amplitude / (1 + |k|)`.
pub fn random_band_limited(grid: &SpectralGrid, band: i64, amplitude: f64, seed: u64) -> Result<Field> {
    if band < 0 || band > grid.dealias_cutoff() {
        return Err(Error::InvalidArgument(format!(
            "band {band} outside 0..={} of the grid",
            grid.dealias_cutoff()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Complex64> = (0..=band)
        .map(|k| {
            let w = amplitude / (1.0 + k as f64);
            let re = rng.gen_range(-1.0..=1.0) * w;
            let im = if k == 0 { 0.0 } else { rng.gen_range(-1.0..=1.0) * w };
            Complex64::new(re, im)
        })
        .collect();
    Ok(Field::from_modes(grid, |k| if k <= band { coeffs[k as usize] } else { Complex64::new(0.0, 0.0) }))
}

/// `(L_n(1; f1..fn), (L/K) sum_j f1(x_j)...fn(x_j))`.
///
/// The two agree exactly when the combined band of the fields stays below the
/// grid size, so that no product mode aliases onto the mean.
pub fn plancherel_oracle(fields: &[&Field]) -> Result<(f64, f64)> {
    if !matches!(fields.len(), 2 | 3 | 4 | 6) {
        return Err(Error::InvalidArgument(format!("oracle arity must be 2, 3, 4 or 6, got {}", fields.len())));
    }
    Ok((lambda_n(&Unit, fields)?, integral_of_product(fields)?))
}

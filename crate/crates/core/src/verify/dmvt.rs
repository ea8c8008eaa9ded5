use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imethod::IMultiplierProfile;

/// Constant the second-difference ratio must stay below.
pub const DMVT_CONSTANT: f64 = 4.0;

/// Points in the scan of `[|xi|/2, 2|xi|]` for the supremum of `|f''|`.
pub const SCAN_POINTS: usize = 64;

fn sup_second_derivative(profile: &IMultiplierProfile, r: f64) -> f64 {
    let (lo, hi) = (0.5 * r, 2.0 * r);
    (0..SCAN_POINTS)
        .map(|i| profile.d2f_sq(lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64).abs())
        .fold(0.0, f64::max)
}

/// `|f(xi+lam+eta) - f(xi+lam) - f(xi+eta) + f(xi)| / (sup|f''| |lam| |eta|)`
/// for `f = m^2 xi^2`, the supremum scanned over `|zeta| ~ |xi|`.
///
/// The numerator is reduced by its rounding floor, so a second difference
/// indistinguishable from zero gives 0 even where `f''` vanishes.
pub fn check_dmvt(profile: &IMultiplierProfile, xi: f64, lam: f64, eta: f64) -> Result<f64> {
    if !(xi.is_finite() && lam.is_finite() && eta.is_finite()) || xi == 0.0 {
        return Err(Error::Precondition("xi must be nonzero and all arguments finite".into()));
    }
    if lam.abs().max(eta.abs()) > xi.abs() / 100.0 {
        return Err(Error::Precondition(format!(
            "offsets ({lam}, {eta}) exceed |xi|/100 = {}",
            xi.abs() / 100.0
        )));
    }
    let f = |x: f64| profile.f_sq(x);
    let values = [f(xi + lam + eta), f(xi + lam), f(xi + eta), f(xi)];
    let noise = 8.0 * f64::EPSILON * values.iter().map(|v| v.abs()).sum::<f64>();
    let num = ((values[0] - values[1] - values[2] + values[3]).abs() - noise).max(0.0);
    let den = sup_second_derivative(profile, xi.abs()) * lam.abs() * eta.abs();
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(if den == 0.0 { f64::INFINITY } else { num / den })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmvtScan {
    pub profile: IMultiplierProfile,
    pub seed: u64,
    pub sample_count: u64,
    pub max_ratio: f64,
    pub argmax: [f64; 3],
}

/// Random `(xi, lam, eta)` with `|xi|` log-uniform on `[N/4, 16N]`, so both
/// branches of `m` and the transition between them are visited.
pub fn dmvt_scan(profile: &IMultiplierProfile, samples: u64, seed: u64) -> Result<DmvtScan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = profile.cutoff;
    let (mut max_ratio, mut argmax) = (0.0, [0.0; 3]);
    for _ in 0..samples {
        let r = ((0.25 * n).ln() + rng.gen::<f64>() * 64f64.ln()).exp();
        let xi = if rng.gen::<bool>() { r } else { -r };
        let lam = rng.gen_range(-1.0..=1.0) * r / 100.0;
        let eta = rng.gen_range(-1.0..=1.0) * r / 100.0;
        let ratio = check_dmvt(profile, xi, lam, eta)?;
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = [xi, lam, eta];
        }
    }
    Ok(DmvtScan { profile: *profile, seed, sample_count: samples, max_ratio, argmax })
}

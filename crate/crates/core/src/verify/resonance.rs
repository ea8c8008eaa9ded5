use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imethod::{m4_raw, resonant_limit, IMultiplierProfile};

/// Relative offsets at which the raw ratio is sampled.
pub const OFFSETS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// Raw quartic ratio along `(a + h, -a, b, -b - h)`, `h = t max(|a|, |b|)`,
/// extrapolated to `t = 0` from the three offsets in [`OFFSETS`].
pub fn extrapolated_limit(profile: &IMultiplierProfile, a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    let raw: Vec<f64> = OFFSETS
        .iter()
        .map(|t| {
            let h = t * scale;
            m4_raw(&[a + h, -a, b, -b - h], profile)
        })
        .collect();
    // offsets shrink by 10: eliminate the O(h) then the O(h^2) term
    let r1 = (10.0 * raw[1] - raw[0]) / 9.0;
    let r2 = (10.0 * raw[2] - raw[1]) / 9.0;
    (100.0 * r2 - r1) / 99.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCheck {
    pub profile: IMultiplierProfile,
    pub seed: u64,
    pub pairs: u64,
    pub max_relative_error: f64,
    pub worst_pair: [f64; 2],
    pub below_cutoff: u64,
    pub above_cutoff: u64,
}

/// Whether the sampled offsets keep every entry on one smooth piece of `m`
/// and away from the doubly resonant set `a = +-b`.
fn admissible(profile: &IMultiplierProfile, a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    let reach = 2.0 * OFFSETS[0] * scale;
    let clear = |x: f64| profile.breakpoints().iter().all(|&k| (x.abs() - k).abs() > reach);
    clear(a) && clear(b) && (a.abs() - b.abs()).abs() > 1e-2 * scale
}

/// Compares the closed-form resonant value with the extrapolated raw ratio on
/// `pairs` random `(a, b)` with magnitudes log-uniform on `[N/8, 64N]`.
pub fn resonance_check(profile: &IMultiplierProfile, pairs: u64, seed: u64) -> Result<ResonanceCheck> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = profile.cutoff;
    let draw = |rng: &mut ChaCha8Rng| {
        let r = ((0.125 * n).ln() + rng.gen::<f64>() * 512f64.ln()).exp();
        if rng.gen::<bool>() {
            r
        } else {
            -r
        }
    };
    let mut out = ResonanceCheck {
        profile: *profile,
        seed,
        pairs,
        max_relative_error: 0.0,
        worst_pair: [0.0; 2],
        below_cutoff: 0,
        above_cutoff: 0,
    };
    let mut done = 0;
    while done < pairs {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        if !admissible(profile, a, b) {
            continue;
        }
        done += 1;
        for x in [a, b] {
            if x.abs() < n {
                out.below_cutoff += 1;
            } else {
                out.above_cutoff += 1;
            }
        }
        let exact = resonant_limit(profile, a, b);
        let err = (extrapolated_limit(profile, a, b) - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);
        if err > out.max_relative_error {
            out.max_relative_error = err;
            out.worst_pair = [a, b];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_agrees_with_extrapolation() {
        for p in [IMultiplierProfile::sharp(16.0, 0.5).unwrap(), IMultiplierProfile::blend(16.0, 0.3).unwrap()] {
            let r = resonance_check(&p, 200, 4).unwrap();
            assert!(r.max_relative_error < 1e-6, "{r:?}");
            assert!(r.below_cutoff > 0 && r.above_cutoff > 0);
        }
    }

    #[test]
    fn double_resonance_limit() {
        // b -> a along the resonant set
        let p = IMultiplierProfile::sharp(4.0, 0.5).unwrap();
        for a in [2.0f64, 9.0, -30.0] {
            let d: f64 = 1e-4 * a.abs();
            let near = [1.0, 0.1, 0.01].map(|t| resonant_limit(&p, a, a.abs() + t * d));
            let r1 = (10.0 * near[1] - near[0]) / 9.0;
            let r2 = (10.0 * near[2] - near[1]) / 9.0;
            let extrapolated = (100.0 * r2 - r1) / 99.0;
            let exact = resonant_limit(&p, a, -a);
            assert!((extrapolated - exact).abs() < 1e-8 * exact.abs(), "{a}: {extrapolated} {exact}");
        }
    }
}

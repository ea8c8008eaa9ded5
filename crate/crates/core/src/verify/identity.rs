use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x1^3 + x2^3 + x3^3 + x4^3 == -3 (x1 + x2)(x1 + x3)(x2 + x3)` in exact
/// integer arithmetic, for a quadruple summing to zero.
pub fn check_cubic_identity(q: [i64; 4]) -> Result<bool> {
    let w = q.map(i128::from);
    if w.iter().sum::<i128>() != 0 {
        return Err(Error::InvalidArgument(format!("quadruple {q:?} does not sum to zero")));
    }
    let cubes: i128 = w.iter().map(|x| x * x * x).sum();
    Ok(cubes == -3 * (w[0] + w[1]) * (w[0] + w[2]) * (w[1] + w[2]))
}

/// Summary of a randomized plus exhaustive sweep of the cubic identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySweep {
    pub random_samples: u64,
    pub lattice_radius: i64,
    pub lattice_samples: u64,
    pub failures: u64,
    pub first_failure: Option<[i64; 4]>,
}

/// Checks `samples` random quadruples with the first three entries uniform in
/// `[-bound, bound]`, then every lattice quadruple with all `|x_i| <= radius`.
pub fn identity_sweep(samples: u64, bound: i64, radius: i64, seed: u64) -> Result<IdentitySweep> {
    if bound <= 0 || radius < 0 {
        return Err(Error::InvalidArgument("bound must be positive and radius nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first_failure = None;
    let mut record = |q: [i64; 4]| -> Result<()> {
        if !check_cubic_identity(q)? {
            failures += 1;
            first_failure.get_or_insert(q);
        }
        Ok(())
    };
    for _ in 0..samples {
        let (a, b, c) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        record([a, b, c, -(a + b + c)])?;
    }
    let mut lattice_samples = 0;
    for a in -radius..=radius {
        for b in -radius..=radius {
            for c in -radius..=radius {
                let d = -(a + b + c);
                if d.abs() <= radius {
                    record([a, b, c, d])?;
                    lattice_samples += 1;
                }
            }
        }
    }
    Ok(IdentitySweep { random_samples: samples, lattice_radius: radius, lattice_samples, failures, first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_quadruples() {
        assert!(check_cubic_identity([1, 2, 3, -6]).unwrap());
        assert!(check_cubic_identity([5, -5, 7, -7]).unwrap());
        assert!(check_cubic_identity([1_000_000, 1_000_000, 1_000_000, -3_000_000]).unwrap());
        assert!(check_cubic_identity([1, 2, 3, 4]).is_err());
    }

    #[test]
    fn small_sweep() {
        let r = identity_sweep(1000, 1_000_000, 3, 1).unwrap();
        assert_eq!(r.failures, 0);
        // quadruples of [-3, 3]^3 whose forced fourth entry also lies in [-3, 3]
        assert_eq!(r.lattice_samples, 231);
    }
}

use super::profile::IMultiplierProfile;
use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

/// Below this normalised denominator `|xi12 xi13 xi23| / max|xi|^3` the
/// quartic multiplier switches from the raw ratio to its resonant limit.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

/// A point of the zero-sum hyperplane in `R^n`, `n` in {4, 6}.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTuple {
    xi: Vec<f64>,
}

impl FrequencyTuple {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.len() != 4 && xi.len() != 6 {
            return Err(Error::InvalidArgument(format!("tuple arity must be 4 or 6, got {}", xi.len())));
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("tuple entries must be finite".into()));
        }
        let scale = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let sum: f64 = xi.iter().sum();
        if sum.abs() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!("tuple does not sum to zero (sum {sum:e})")));
        }
        Ok(FrequencyTuple { xi })
    }

    /// Fill in the last entry so the tuple sums to zero.
    pub fn closing(mut head: Vec<f64>) -> Result<Self> {
        let last = -head.iter().sum::<f64>();
        head.push(last);
        Self::new(head)
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn arity(&self) -> usize {
        self.xi.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.xi.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `|xi_j|` sorted in decreasing order: `N_h1 >= N_h2 >= ...`.
    pub fn ordered_magnitudes(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.xi.iter().map(|x| x.abs()).collect();
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }
}

const GAUSS_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_2];
const GAUSS_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Mean of `g''` over `[lo, hi]` (0 <= lo < hi), by 8-point Gauss-Legendre on
/// each smooth piece; avoids the cancellation in `(g'(hi) - g'(lo)) / (hi - lo)`.
fn mean_d2g(p: &IMultiplierProfile, lo: f64, hi: f64) -> f64 {
    let mut cuts = vec![lo];
    cuts.extend(p.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, wt) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            total += wt * half * (p.d2g(mid + half * x) + p.d2g(mid - half * x));
        }
    }
    total / (hi - lo)
}

/// Closed-form value of the quartic multiplier on the resonant set
/// `(a, -a, b, -b)`.
///
/// Generic case `(g'(a) - g'(b)) / (3 (a^2 - b^2))`; for `|a| = |b|` the
/// limit `g''(a) / (6a)`; at the origin 1.
pub fn resonant_limit(p: &IMultiplierProfile, a: f64, b: f64) -> f64 {
    let (x, y) = (a.abs(), b.abs());
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return 1.0;
    }
    if hi == lo {
        return p.d2g(hi) / (6.0 * hi);
    }
    if hi - lo > 1e-2 * hi {
        (p.dg(hi) - p.dg(lo)) / (3.0 * (hi * hi - lo * lo))
    } else {
        mean_d2g(p, lo, hi) / (3.0 * (hi + lo))
    }
}

/// Pair sums `(xi12, xi13, xi23)` in the form symmetric under swapping each
/// pair with its complement.
fn pair_sums(xi: &[f64]) -> [f64; 3] {
    let [a, b, c, d] = [xi[0], xi[1], xi[2], xi[3]];
    [0.5 * ((a + b) - (c + d)), 0.5 * ((a + c) - (b + d)), 0.5 * ((b + c) - (a + d))]
}

/// `sum g(xi_j) / sum xi_j^3` with the denominator in factored form
/// `-3 xi12 xi13 xi23`; no resonance handling.
pub fn m4_raw(xi: &[f64], p: &IMultiplierProfile) -> f64 {
    let [p1, p2, p3] = pair_sums(xi);
    xi.iter().map(|&x| p.g(x)).sum::<f64>() / (-3.0 * p1 * p2 * p3)
}

fn m4_slice(xi: &[f64], p: &IMultiplierProfile) -> f64 {
    let scale = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 1.0;
    }
    let pairs = pair_sums(xi);
    let prod = pairs[0] * pairs[1] * pairs[2];
    if prod.abs() > RESONANCE_TOLERANCE * scale.powi(3) {
        return m4_raw(xi, p);
    }
    let nearest = (0..3).min_by(|&i, &j| pairs[i].abs().total_cmp(&pairs[j].abs())).expect("three pairings");
    let [x1, x2, x3, x4] = [xi[0], xi[1], xi[2], xi[3]];
    let (a, b) = match nearest {
        0 => ((x1 - x2) / 2.0, (x3 - x4) / 2.0),
        1 => ((x1 - x3) / 2.0, (x2 - x4) / 2.0),
        _ => ((x2 - x3) / 2.0, (x1 - x4) / 2.0),
    };
    resonant_limit(p, a, b)
}

fn require_arity(t: &FrequencyTuple, n: usize) -> Result<()> {
    if t.arity() == n {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("expected a {n}-tuple, got {}", t.arity())))
    }
}

/// Quartic multiplier `sum m^2(xi_j) xi_j^3 / sum xi_j^3`, extended to the
/// resonant set by continuity.
pub fn m4(t: &FrequencyTuple, p: &IMultiplierProfile) -> Result<f64> {
    require_arity(t, 4)?;
    Ok(m4_slice(t.xi(), p))
}

/// Sextic multiplier `M4(xi1, xi2, xi3, xi456) xi456`.
pub fn m6(t: &FrequencyTuple, p: &IMultiplierProfile) -> Result<f64> {
    require_arity(t, 6)?;
    let xi = t.xi();
    let grouped = xi[3] + xi[4] + xi[5];
    Ok(m4_slice(&[xi[0], xi[1], xi[2], grouped], p) * grouped)
}

pub fn m4_system(t: &FrequencyTuple, p: &IMultiplierProfile) -> Result<f64> {
    Ok(4.0 * m4(t, p)?)
}

pub fn m6_system(t: &FrequencyTuple, p: &IMultiplierProfile) -> Result<f64> {
    Ok(4.0 * m6(t, p)?)
}

/// `g`, `g'` and the double-resonance value tabulated on the integer lattice
/// `-R ..= R`, so multiplier sums never re-evaluate the profile.
#[derive(Clone, Debug)]
pub struct LatticeTable {
    profile: IMultiplierProfile,
    spacing: f64,
    range: i64,
    g: Vec<f64>,
    dg: Vec<f64>,
    double: Vec<f64>,
}

impl LatticeTable {
    /// Table covering `|k| <= K`, enough for grouped sums of three active modes.
    pub fn new(grid: &SpectralGrid, profile: &IMultiplierProfile) -> Self {
        let range = grid.points() as i64;
        let xi = |k: i64| grid.xi(k);
        let ks = -range..=range;
        LatticeTable {
            profile: *profile,
            spacing: grid.spacing(),
            range,
            g: ks.clone().map(|k| profile.g(xi(k))).collect(),
            dg: ks.clone().map(|k| profile.dg(xi(k))).collect(),
            double: ks.map(|k| if k == 0 { 1.0 } else { profile.d2g(xi(k)) / (6.0 * xi(k)) }).collect(),
        }
    }

    pub fn profile(&self) -> &IMultiplierProfile {
        &self.profile
    }

    fn at(&self, table: &[f64], k: i64) -> f64 {
        debug_assert!(k.abs() <= self.range);
        table[(k + self.range) as usize]
    }

    fn resonant(&self, a: i64, b: i64) -> f64 {
        let (a, b) = (a.abs(), b.abs());
        if a == b {
            return self.at(&self.double, a);
        }
        let (xa, xb) = (a as f64 * self.spacing, b as f64 * self.spacing);
        (self.at(&self.dg, a) - self.at(&self.dg, b)) / (3.0 * (xa * xa - xb * xb))
    }

    /// Quartic multiplier at lattice modes summing to zero. Resonances are
    /// detected exactly from integer pair sums.
    pub fn m4(&self, k: [i64; 4]) -> f64 {
        let (p12, p13, p23) = (k[0] + k[1], k[0] + k[2], k[1] + k[2]);
        if p12 == 0 {
            self.resonant(k[0], k[2])
        } else if p13 == 0 {
            self.resonant(k[0], k[1])
        } else if p23 == 0 {
            self.resonant(k[1], k[0])
        } else {
            let num: f64 = k.iter().map(|&q| self.at(&self.g, q)).sum();
            let h = self.spacing;
            num / (-3.0 * (p12 as f64 * h) * (p13 as f64 * h) * (p23 as f64 * h))
        }
    }

    /// `M4(k1, k2, k3, k456) xi456`.
    pub fn m6(&self, k: [i64; 6]) -> f64 {
        let grouped = k[3] + k[4] + k[5];
        if grouped == 0 {
            return 0.0;
        }
        self.m4([k[0], k[1], k[2], grouped]) * grouped as f64 * self.spacing
    }
}

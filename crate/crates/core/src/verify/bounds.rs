use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imethod::{m4, m6, FrequencyTuple, IMultiplierProfile};

/// Samples drawn from one deterministic stream.
pub const BLOCK_SIZE: u64 = 4096;

/// Largest magnitude sampled, in units of the cutoff.
pub const MAGNITUDE_CAP: f64 = 1e3;

/// Minimum sample count accepted by the samplers.
pub const MIN_SAMPLES: u64 = 10_000;

pub const HISTOGRAM_BINS: usize = 32;
const LOG_LO: f64 = -6.0;
const LOG_HI: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    AllLow,
    Mixed,
    AllHigh,
    NearResonant,
}

impl Stratum {
    pub const ALL: [Stratum; 4] = [Stratum::AllLow, Stratum::Mixed, Stratum::AllHigh, Stratum::NearResonant];
}

/// Ratios in 32 log-spaced bins on `[1e-6, 1e2]`; smaller ratios (including
/// zero) are counted in `below`, larger ones land in the last bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub below: u64,
}

impl Default for Histogram {
    fn default() -> Self {
        let step = (LOG_HI - LOG_LO) / HISTOGRAM_BINS as f64;
        Histogram {
            edges: (0..=HISTOGRAM_BINS).map(|i| 10f64.powf(LOG_LO + step * i as f64)).collect(),
            counts: vec![0; HISTOGRAM_BINS],
            below: 0,
        }
    }
}

impl Histogram {
    fn insert(&mut self, ratio: f64) {
        if !(ratio >= self.edges[0]) {
            self.below += 1;
            return;
        }
        let step = (LOG_HI - LOG_LO) / HISTOGRAM_BINS as f64;
        let mut bin = (((ratio.log10() - LOG_LO) / step).floor() as usize).min(HISTOGRAM_BINS - 1);
        // guard against log10 rounding across an edge
        while bin > 0 && ratio < self.edges[bin] {
            bin -= 1;
        }
        while bin + 1 < HISTOGRAM_BINS && ratio >= self.edges[bin + 1] {
            bin += 1;
        }
        self.counts[bin] += 1;
    }

    fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
    }

    /// Lower edge of the highest occupied bin.
    pub fn highest_occupied_edge(&self) -> Option<f64> {
        self.counts.iter().rposition(|&c| c > 0).map(|i| self.edges[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumSummary {
    pub stratum: Stratum,
    pub sample_count: u64,
    pub max_ratio: f64,
}

/// Empirical constant of a multiplier bound over stratified samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub multiplier: String,
    pub profile: IMultiplierProfile,
    pub seed: u64,
    pub sample_count: u64,
    pub max_ratio: f64,
    pub argmax_tuple: Vec<f64>,
    pub histogram: Histogram,
    pub strata: Vec<StratumSummary>,
}

impl BoundReport {
    pub fn stratum(&self, s: Stratum) -> &StratumSummary {
        self.strata.iter().find(|x| x.stratum == s).expect("every stratum is summarised")
    }
}

#[derive(Clone)]
struct Partial {
    count: u64,
    max_ratio: f64,
    argmax: Vec<f64>,
    histogram: Histogram,
    strata: Vec<(u64, f64)>,
}

impl Partial {
    fn new() -> Self {
        Partial { count: 0, max_ratio: 0.0, argmax: Vec::new(), histogram: Histogram::default(), strata: vec![(0, 0.0); 4] }
    }

    fn insert(&mut self, stratum: usize, xi: &[f64], ratio: f64) {
        self.count += 1;
        if ratio > self.max_ratio || self.argmax.is_empty() {
            self.max_ratio = ratio;
            self.argmax = xi.to_vec();
        }
        self.histogram.insert(ratio);
        let s = &mut self.strata[stratum];
        s.0 += 1;
        s.1 = s.1.max(ratio);
    }

    /// Associative merge; ties keep the earlier block's argmax.
    fn merge(mut self, other: Partial) -> Partial {
        if other.max_ratio > self.max_ratio || self.argmax.is_empty() {
            self.max_ratio = other.max_ratio;
            self.argmax = other.argmax;
        }
        self.count += other.count;
        self.histogram.merge(&other.histogram);
        for (a, b) in self.strata.iter_mut().zip(other.strata) {
            a.0 += b.0;
            a.1 = a.1.max(b.1);
        }
        self
    }
}

fn signed(rng: &mut ChaCha8Rng, x: f64) -> f64 {
    if rng.gen::<bool>() {
        x
    } else {
        -x
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn low(rng: &mut ChaCha8Rng, n: f64) -> f64 {
    rng.gen_range(-n..=n)
}

fn high(rng: &mut ChaCha8Rng, n: f64) -> f64 {
    let r = log_uniform(rng, n, MAGNITUDE_CAP * n);
    signed(rng, r)
}

/// `(a + h, -a, b, -b - h)` with `|h| < 1e-6 max(|a|, |b|)`, shuffled.
fn near_resonant_quadruple(rng: &mut ChaCha8Rng, n: f64) -> Vec<f64> {
    let r = log_uniform(rng, 0.1 * n, MAGNITUDE_CAP * n);
    let a = signed(rng, r);
    let r = log_uniform(rng, 0.1 * n, MAGNITUDE_CAP * n);
    let b = signed(rng, r);
    let h = rng.gen_range(-1.0..1.0) * 1e-6 * a.abs().max(b.abs());
    let mut q = vec![a + h, -a, b, -b - h];
    q.shuffle(rng);
    q
}

/// Free entries of a tuple of the given arity; the last is forced by the
/// zero-sum constraint.
fn draw(rng: &mut ChaCha8Rng, stratum: Stratum, arity: usize, n: f64) -> FrequencyTuple {
    let free = arity - 1;
    loop {
        let head: Vec<f64> = match stratum {
            Stratum::AllLow => (0..free).map(|_| low(rng, n)).collect(),
            Stratum::AllHigh => (0..free).map(|_| high(rng, n)).collect(),
            Stratum::Mixed => {
                (0..free).map(|_| if rng.gen::<bool>() { low(rng, n) } else { high(rng, n) }).collect()
            }
            Stratum::NearResonant => {
                let q = near_resonant_quadruple(rng, n);
                if arity == 4 {
                    return FrequencyTuple::new(q).expect("resonant quadruple sums to zero");
                }
                // split the grouped fourth entry into three
                let x4 = if rng.gen::<bool>() { low(rng, n) } else { high(rng, n) };
                let x5 = if rng.gen::<bool>() { low(rng, n) } else { high(rng, n) };
                vec![q[0], q[1], q[2], x4, x5, q[3] - x4 - x5]
                    .into_iter()
                    .take(free)
                    .collect()
            }
        };
        let closing = -head.iter().sum::<f64>();
        if stratum == Stratum::AllLow && closing.abs() > n {
            continue;
        }
        if let Ok(t) = FrequencyTuple::closing(head) {
            return t;
        }
    }
}

fn sample_bound(
    name: &str,
    arity: usize,
    profile: &IMultiplierProfile,
    samples: u64,
    seed: u64,
    ratio: impl Fn(&FrequencyTuple) -> f64 + Sync,
) -> Result<BoundReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("bound sampling needs at least {MIN_SAMPLES} samples")));
    }
    let n = profile.cutoff;
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let parts: Vec<Partial> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b));
            let mut part = Partial::new();
            let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            for i in 0..len {
                let si = ((b * BLOCK_SIZE + i) % 4) as usize;
                let t = draw(&mut rng, Stratum::ALL[si], arity, n);
                part.insert(si, t.xi(), ratio(&t));
            }
            part
        })
        .collect();
    let total = parts.into_iter().reduce(Partial::merge).unwrap_or_else(Partial::new);
    Ok(BoundReport {
        multiplier: name.to_string(),
        profile: *profile,
        seed,
        sample_count: total.count,
        max_ratio: total.max_ratio,
        argmax_tuple: total.argmax,
        histogram: total.histogram,
        strata: Stratum::ALL
            .iter()
            .zip(&total.strata)
            .map(|(&stratum, &(sample_count, max_ratio))| StratumSummary { stratum, sample_count, max_ratio })
            .collect(),
    })
}

/// `|M4| / m^2(N_h1)` for one tuple.
pub fn m4_bound_ratio(t: &FrequencyTuple, profile: &IMultiplierProfile) -> f64 {
    let top = t.max_abs();
    let m = profile.m(top);
    m4(t, profile).map(|v| v.abs() / (m * m)).unwrap_or(f64::NAN)
}

/// `|M6| / (m^2(N_h1) N_h1)` for one tuple; 0 at the origin.
pub fn m6_bound_ratio(t: &FrequencyTuple, profile: &IMultiplierProfile) -> f64 {
    let top = t.max_abs();
    if top == 0.0 {
        return 0.0;
    }
    let m = profile.m(top);
    m6(t, profile).map(|v| v.abs() / (m * m * top)).unwrap_or(f64::NAN)
}

/// Stratified sampling of the quartic bound.
pub fn bound_m4(profile: &IMultiplierProfile, samples: u64, seed: u64) -> Result<BoundReport> {
    sample_bound("m4", 4, profile, samples, seed, |t| m4_bound_ratio(t, profile))
}

/// Stratified sampling of the sextic bound.
pub fn bound_m6(profile: &IMultiplierProfile, samples: u64, seed: u64) -> Result<BoundReport> {
    sample_bound("m6", 6, profile, samples, seed, |t| m6_bound_ratio(t, profile))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> IMultiplierProfile {
        IMultiplierProfile::sharp(16.0, 0.5).unwrap()
    }

    #[test]
    fn low_stratum_ratio_is_one() {
        let r = bound_m4(&profile(), MIN_SAMPLES, 3).unwrap();
        let low = r.stratum(Stratum::AllLow);
        assert_eq!(low.sample_count, 2500);
        assert!((low.max_ratio - 1.0).abs() < 1e-6, "{}", low.max_ratio);
        assert_eq!(r.sample_count, MIN_SAMPLES);
        assert_eq!(r.histogram.counts.iter().sum::<u64>() + r.histogram.below, MIN_SAMPLES);
        assert!(r.max_ratio >= r.histogram.highest_occupied_edge().unwrap());
    }

    #[test]
    fn sextic_low_stratum_and_zero_grouping() {
        let p = profile();
        let t = FrequencyTuple::new(vec![3.0, -1.0, -2.0, 40.0, -25.0, -15.0]).unwrap();
        assert_eq!(m6_bound_ratio(&t, &p), 0.0);
        // below the cutoff M6 = xi456, and |xi456| <= 3 N_h1
        let t = FrequencyTuple::new(vec![3.0, -1.0, 2.0, 4.0, -5.0, -3.0]).unwrap();
        assert!((m6_bound_ratio(&t, &p) - 0.8).abs() < 1e-14);
        let r = bound_m6(&p, MIN_SAMPLES, 5).unwrap();
        let low = r.stratum(Stratum::AllLow).max_ratio;
        assert!(low <= 3.0 + 1e-9 && low > 1.0, "{low}");
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let p = profile();
        let a = bound_m4(&p, 20_000, 9).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| bound_m4(&p, 20_000, 9).unwrap());
        assert_eq!(a, b);
        assert!(bound_m4(&p, 10, 9).is_err());
    }

    #[test]
    fn near_resonant_stratum_has_no_spike() {
        let r = bound_m4(&profile(), 40_000, 11).unwrap();
        assert!(r.stratum(Stratum::NearResonant).max_ratio <= r.max_ratio);
        assert!(r.max_ratio.is_finite() && r.max_ratio < 10.0);
    }
}

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::multiplier::LatticeTable;
use crate::error::{Error, Result};
use crate::spectral::{Field, SpectralGrid};

/// Largest number of enumerated tuples (product of the supports of all but
/// the last field) a single sum may visit.
pub const MAX_TUPLES: u64 = 1 << 31;

/// Relative size of the imaginary residue tolerated by [`lambda_n`].
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// A symbol on the zero-sum hyperplane. `modes` are the integer lattice
/// indices and `xi` the matching physical frequencies.
pub trait Multiplier: Sync {
    fn value(&self, modes: &[i64], xi: &[f64]) -> f64;
}

impl<F> Multiplier for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, _modes: &[i64], xi: &[f64]) -> f64 {
        self(xi)
    }
}

/// The constant symbol 1.
pub struct Unit;

impl Multiplier for Unit {
    fn value(&self, _: &[i64], _: &[f64]) -> f64 {
        1.0
    }
}

/// Quartic multiplier read from a lattice table.
pub struct LatticeM4<'a>(pub &'a LatticeTable);

impl Multiplier for LatticeM4<'_> {
    fn value(&self, k: &[i64], _: &[f64]) -> f64 {
        self.0.m4([k[0], k[1], k[2], k[3]])
    }
}

/// Sextic multiplier read from a lattice table. With `active_cutoff` set,
/// tuples whose grouped mode `k4 + k5 + k6` lies outside the retained band
/// contribute nothing, which is what the truncated flow produces.
pub struct LatticeM6<'a> {
    pub table: &'a LatticeTable,
    pub active_cutoff: Option<i64>,
}

impl Multiplier for LatticeM6<'_> {
    fn value(&self, k: &[i64], _: &[f64]) -> f64 {
        if let Some(c) = self.active_cutoff {
            if (k[3] + k[4] + k[5]).abs() > c {
                return 0.0;
            }
        }
        self.table.m6([k[0], k[1], k[2], k[3], k[4], k[5]])
    }
}

/// Complex value of a multilinear sum together with the sum of term
/// magnitudes (the natural scale for rounding).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaSum {
    pub value: Complex64,
    pub magnitude: f64,
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Default)]
struct Partial {
    re: Compensated,
    im: Compensated,
    magnitude: f64,
}

fn pairwise(parts: &[(Complex64, f64)]) -> (Complex64, f64) {
    match parts.len() {
        0 => (Complex64::new(0.0, 0.0), 0.0),
        1 => parts[0],
        n => {
            let (a, b) = (pairwise(&parts[..n / 2]), pairwise(&parts[n / 2..]));
            (a.0 + b.0, a.1 + b.1)
        }
    }
}

struct Support {
    entries: Vec<(i64, f64, Complex64)>,
}

struct Walk<'a, M: ?Sized> {
    mult: &'a M,
    grid: &'a SpectralGrid,
    supports: &'a [Support],
    last: &'a Field,
    n: usize,
}

impl<M: Multiplier + ?Sized> Walk<'_, M> {
    fn descend(&self, depth: usize, modes: &mut [i64; 6], xi: &mut [f64; 6], prod: Complex64, ksum: i64, acc: &mut Partial) {
        if depth == self.n - 1 {
            let k = -ksum;
            if k < self.grid.min_mode() || k >= self.grid.nyquist() {
                return;
            }
            let c = self.last.coeff(k);
            if c.re == 0.0 && c.im == 0.0 {
                return;
            }
            modes[depth] = k;
            xi[depth] = self.grid.xi(k);
            let term = prod * c * self.mult.value(&modes[..self.n], &xi[..self.n]);
            acc.re.add(term.re);
            acc.im.add(term.im);
            acc.magnitude += term.norm();
            return;
        }
        for &(k, x, c) in &self.supports[depth].entries {
            modes[depth] = k;
            xi[depth] = x;
            self.descend(depth + 1, modes, xi, prod * c, ksum + k, acc);
        }
    }
}

/// `L * sum over k1 + ... + kn = 0 of M(xi) prod f_j^(k_j)`, complex valued.
///
/// The outer sum over `k1` runs in parallel; each partial is compensated and
/// the partials are combined pairwise in index order, so the result does not
/// depend on the number of threads.
pub fn lambda_sum<M: Multiplier + ?Sized>(mult: &M, fields: &[&Field]) -> Result<LambdaSum> {
    let n = fields.len();
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!("multilinear sums take 2..=6 fields, got {n}")));
    }
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let supports: Vec<Support> = fields[..n - 1]
        .iter()
        .map(|f| Support {
            entries: grid
                .modes()
                .filter_map(|k| {
                    let c = f.coeff(k);
                    (c.re != 0.0 || c.im != 0.0).then(|| (k, grid.xi(k), c))
                })
                .collect(),
        })
        .collect();
    let tuples = supports.iter().fold(1u64, |acc, s| acc.saturating_mul(s.entries.len() as u64));
    if tuples > MAX_TUPLES {
        return Err(Error::CostGuard(format!(
            "{n}-linear sum would visit {tuples} tuples (limit {MAX_TUPLES}); reduce the grid"
        )));
    }
    let walk = Walk { mult, grid, supports: &supports, last: fields[n - 1], n };
    let parts: Vec<(Complex64, f64)> = supports[0]
        .entries
        .par_iter()
        .map(|&(k, x, c)| {
            let mut modes = [0i64; 6];
            let mut xi = [0.0f64; 6];
            modes[0] = k;
            xi[0] = x;
            let mut acc = Partial::default();
            walk.descend(1, &mut modes, &mut xi, c, k, &mut acc);
            (Complex64::new(acc.re.total(), acc.im.total()), acc.magnitude)
        })
        .collect();
    let (value, magnitude) = pairwise(&parts);
    let l = grid.length();
    Ok(LambdaSum { value: value * l, magnitude: magnitude * l })
}

/// Real multilinear functional; the imaginary residue must be below
/// [`IMAGINARY_TOLERANCE`] relative to the term magnitudes.
pub fn lambda_n<M: Multiplier + ?Sized>(mult: &M, fields: &[&Field]) -> Result<f64> {
    let s = lambda_sum(mult, fields)?;
    if s.value.im.abs() > IMAGINARY_TOLERANCE * s.magnitude.max(f64::MIN_POSITIVE) {
        return Err(Error::CrossCheck(format!(
            "multilinear sum has imaginary part {:e} (term magnitude {:e})",
            s.value.im, s.magnitude
        )));
    }
    Ok(s.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cosine() -> Field {
        let g = SpectralGrid::new(2.0 * PI, 32).unwrap();
        Field::from_modes(&g, |k| Complex64::new(if k == 1 { 0.5 } else { 0.0 }, 0.0))
    }

    #[test]
    fn cosine_values() {
        let c = cosine();
        assert!((lambda_n(&Unit, &[&c, &c]).unwrap() - PI).abs() < 1e-14);
        assert!((lambda_n(&Unit, &[&c, &c, &c, &c]).unwrap() - 0.75 * PI).abs() < 1e-14);
        let xx = |xi: &[f64]| xi[0] * xi[1];
        assert!((lambda_n(&xx, &[&c, &c]).unwrap() + PI).abs() < 1e-14);
        assert_eq!(lambda_n(&Unit, &[&c, &c, &c]).unwrap(), 0.0);
    }

    #[test]
    fn odd_multiplier_is_imaginary() {
        let g = SpectralGrid::new(2.0 * PI, 16).unwrap();
        let f = Field::from_fn(&g, |x| (x + 0.3).sin() + 0.5 * (2.0 * x).cos());
        let odd = |xi: &[f64]| xi[0] + 2.0 * xi[1].powi(3);
        let s = lambda_sum(&odd, &[&f, &f, &f]).unwrap();
        assert!(s.value.re.abs() < 1e-13);
        assert!(lambda_n(&odd, &[&f, &f, &f]).is_err() || s.value.im.abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let c = cosine();
        assert!(lambda_n(&Unit, &[&c]).is_err());
        let other = Field::zeros(&SpectralGrid::new(PI, 32).unwrap());
        assert!(matches!(lambda_n(&Unit, &[&c, &other]), Err(Error::GridMismatch)));
        let g = SpectralGrid::new(2.0 * PI, 256).unwrap();
        let dense = Field::from_modes(&g, |k| Complex64::new(1.0 / (1.0 + k as f64), 0.1));
        let fs = vec![&dense; 6];
        assert!(matches!(lambda_sum(&Unit, &fs), Err(Error::CostGuard(_))));
    }

    #[test]
    fn independent_of_thread_count() {
        let g = SpectralGrid::new(2.0 * PI, 32).unwrap();
        let f = Field::from_modes(&g, |k| {
            if k.abs() <= 10 {
                Complex64::new((0.3 * k as f64).cos() / (1.0 + k as f64), 0.2 * (k as f64).sin())
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| lambda_n(&Unit, &[&f, &f, &f, &f]).unwrap())
        };
        let one = run(1);
        assert_eq!(one.to_bits(), run(3).to_bits());
        assert_eq!(one.to_bits(), run(8).to_bits());
    }
}

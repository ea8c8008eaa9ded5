use rustfft::num_complex::Complex64;

use super::grid::SpectralGrid;
use crate::error::{Error, Result};

/// A real periodic field stored by its Fourier coefficients.
///
/// Convention: `u_hat(k) = (1/L) * integral of u(x) exp(-i xi_k x)`, so that
/// `u(x) = sum_k u_hat(k) exp(i xi_k x)`. Coefficients are kept exactly
/// Hermitian and the Nyquist coefficient is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
}

/// Force exact Hermitian symmetry (averaging each conjugate pair) and clear
/// the Nyquist mode.
pub(crate) fn symmetrize(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    coeffs[0].im = 0.0;
    coeffs[n / 2] = Complex64::new(0.0, 0.0);
    for i in 1..n / 2 {
        let avg = (coeffs[i] + coeffs[n - i].conj()) * 0.5;
        coeffs[i] = avg;
        coeffs[n - i] = avg.conj();
    }
}

impl Field {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        Field { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.points()] }
    }

    /// Forward transform of `K` physical samples taken at `x_j = j L / K`.
    pub fn from_samples(grid: &SpectralGrid, samples: &[f64]) -> Result<Self> {
        let k = grid.points();
        if samples.len() != k {
            return Err(Error::LengthMismatch { expected: k, got: samples.len() });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        grid.forward().process(&mut buf);
        let scale = 1.0 / k as f64;
        for c in &mut buf {
            *c *= scale;
        }
        symmetrize(&mut buf);
        Ok(Field { grid: grid.clone(), coeffs: buf })
    }

    pub fn from_fn(grid: &SpectralGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.points()).map(|j| f(grid.x(j))).collect();
        Self::from_samples(grid, &samples).expect("sample count matches grid")
    }

    /// Build from coefficients in FFT order; symmetry is enforced.
    pub fn from_coeffs(grid: &SpectralGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::LengthMismatch { expected: grid.points(), got: coeffs.len() });
        }
        symmetrize(&mut coeffs);
        Ok(Field { grid: grid.clone(), coeffs })
    }

    /// Build from a mode-indexed coefficient function; only `k >= 0` is
    /// consulted, negative modes are filled by conjugation.
    pub fn from_modes(grid: &SpectralGrid, f: impl Fn(i64) -> Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
        for k in 0..grid.nyquist() {
            let c = f(k);
            coeffs[grid.index_of(k)] = c;
            if k > 0 {
                coeffs[grid.index_of(-k)] = c.conj();
            }
        }
        symmetrize(&mut coeffs);
        Field { grid: grid.clone(), coeffs }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Coefficients in FFT order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.grid.min_mode() || k > self.grid.nyquist() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[self.grid.index_of(k)]
    }

    /// Inverse transform back to the `K` collocation samples.
    pub fn samples(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        self.grid.inverse().process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Samples on the 2K zero-padded grid `x_j = j L / (2K)`.
    pub fn padded_samples(&self) -> Vec<f64> {
        let k = self.grid.points();
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * k];
        for mode in self.grid.modes() {
            buf[mode.rem_euclid(2 * k as i64) as usize] = self.coeff(mode);
        }
        self.grid.inverse_padded().process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Inverse of [`Field::padded_samples`]: transform 2K samples and keep the
    /// modes representable on this field's lattice.
    pub(crate) fn from_padded_samples(grid: &SpectralGrid, samples: &[f64]) -> Self {
        let k = grid.points();
        debug_assert_eq!(samples.len(), 2 * k);
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        grid.forward_padded().process(&mut buf);
        let scale = 1.0 / (2 * k) as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        for mode in grid.modes() {
            coeffs[grid.index_of(mode)] = buf[mode.rem_euclid(2 * k as i64) as usize] * scale;
        }
        symmetrize(&mut coeffs);
        Field { grid: grid.clone(), coeffs }
    }

    /// Apply `f(k, xi_k, coeff)` to every coefficient, then re-symmetrize.
    pub fn map_modes(&self, f: impl Fn(i64, f64, Complex64) -> Complex64) -> Field {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = self.grid.mode_of(i);
            *c = f(k, self.grid.xi(k), *c);
        }
        symmetrize(&mut coeffs);
        Field { grid: self.grid.clone(), coeffs }
    }

    /// Spectral derivative of order 1, 2 or 3.
    pub fn derivative(&self, order: u32) -> Result<Field> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidArgument(format!("derivative order {order} not in 1..=3")));
        }
        Ok(self.map_modes(|_, xi, c| c * Complex64::new(0.0, xi).powu(order)))
    }

    /// Two-thirds rule: zero every mode with `|k| > floor(K/3)`.
    pub fn dealias(&self) -> Field {
        let cutoff = self.grid.dealias_cutoff();
        self.map_modes(|k, _, c| if k.abs() > cutoff { Complex64::new(0.0, 0.0) } else { c })
    }

    pub fn is_dealiased(&self) -> bool {
        let cutoff = self.grid.dealias_cutoff();
        self.grid.modes().all(|k| k.abs() <= cutoff || self.coeff(k) == Complex64::new(0.0, 0.0))
    }

    /// `sqrt(L * sum_k (1 + |xi_k|)^(2s) |u_hat(k)|^2)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let xi = self.grid.xi(self.grid.mode_of(i));
                (1.0 + xi.abs()).powf(2.0 * s) * c.norm_sqr()
            })
            .sum();
        (self.grid.length() * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `sum_k |u_hat(k)|^2`, the discrete Parseval side of `(1/L) int |u|^2`.
    pub fn coefficient_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, a: f64) -> Field {
        Field { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect();
        Ok(Field { grid: self.grid.clone(), coeffs })
    }

    pub(crate) fn from_raw(grid: &SpectralGrid, coeffs: Vec<Complex64>) -> Field {
        Field { grid: grid.clone(), coeffs }
    }
}

/// A pair `(u, v)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub u: Field,
    pub v: Field,
}

impl FieldPair {
    pub fn new(u: Field, v: Field) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(FieldPair { u, v })
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.u.grid()
    }
}

/// `(L/K) * sum_j prod_i f_i(x_j)`: collocation quadrature of a product.
pub fn integral_of_product(fields: &[&Field]) -> Result<f64> {
    if !(2..=6).contains(&fields.len()) {
        return Err(Error::InvalidArgument(format!(
            "integral_of_product takes 2..=6 fields, got {}",
            fields.len()
        )));
    }
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let samples: Vec<Vec<f64>> = fields.iter().map(|f| f.samples()).collect();
    let sum: f64 = (0..grid.points()).map(|j| samples.iter().map(|s| s[j]).product::<f64>()).sum();
    Ok(grid.length() / grid.points() as f64 * sum)
}

/// Alias-free integral of a product of dealiased fields, using the 2K padded
/// grid (exact while `n * floor(K/3) < 2K`, i.e. for up to five factors).
pub fn padded_integral_of_product(fields: &[&Field]) -> Result<f64> {
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let samples: Vec<Vec<f64>> = fields.iter().map(|f| f.padded_samples()).collect();
    let m = 2 * grid.points();
    let sum: f64 = (0..m).map(|j| samples.iter().map(|s| s[j]).product::<f64>()).sum();
    Ok(grid.length() / m as f64 * sum)
}

/// Integral of a product of arbitrary fields, exact for trigonometric
/// polynomials: samples are taken on a grid of `M > n K / 2` points so the
/// product has no aliasing onto the mean.
pub fn exact_integral_of_product(fields: &[&Field]) -> Result<f64> {
    let grid = match fields.first() {
        Some(f) => f.grid(),
        None => return Err(Error::InvalidArgument("no fields given".into())),
    };
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let mut m = grid.points();
    while m <= fields.len() * grid.points() / 2 {
        m *= 2;
    }
    let inverse = rustfft::FftPlanner::new().plan_fft_inverse(m);
    let mut product = vec![1.0; m];
    for f in fields {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for k in grid.modes() {
            buf[k.rem_euclid(m as i64) as usize] = f.coeff(k);
        }
        inverse.process(&mut buf);
        for (p, c) in product.iter_mut().zip(&buf) {
            *p *= c.re;
        }
    }
    Ok(grid.length() / m as f64 * product.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid32() -> SpectralGrid {
        SpectralGrid::new(2.0 * PI, 32).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let f = Field::from_fn(&grid32(), f64::cos);
        for k in grid32().modes() {
            let expect = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((f.coeff(k) - Complex64::new(expect, 0.0)).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn constant_field() {
        let f = Field::from_fn(&grid32(), |_| 3.0);
        assert!(close(f.coeff(0).re, 3.0, 1e-14));
        assert!(grid32().modes().filter(|&k| k != 0).all(|k| f.coeff(k).norm() < 1e-14));
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            Field::from_samples(&grid32(), &[0.0; 31]),
            Err(Error::LengthMismatch { expected: 32, got: 31 })
        ));
    }

    #[test]
    fn derivatives_of_trig() {
        let g = grid32();
        let c = Field::from_fn(&g, f64::cos);
        let d1 = c.derivative(1).unwrap().samples();
        let d3 = c.derivative(3).unwrap().samples();
        let s2 = Field::from_fn(&g, |x| (2.0 * x).sin()).derivative(2).unwrap().samples();
        for j in 0..g.points() {
            let x = g.x(j);
            assert!(close(d1[j], -x.sin(), 1e-13));
            assert!(close(d3[j], x.sin(), 1e-11));
            assert!(close(s2[j], -4.0 * (2.0 * x).sin(), 1e-12));
        }
        assert!(c.derivative(0).is_err());
        assert!(c.derivative(4).is_err());
    }

    #[test]
    fn dealias_zeroes_top_third() {
        let g = grid32();
        let f = Field::from_modes(&g, |k| Complex64::new(1.0 / (1.0 + k as f64), 0.3));
        let d = f.dealias();
        for k in g.modes() {
            if k.abs() >= 11 {
                assert_eq!(d.coeff(k), Complex64::new(0.0, 0.0));
            } else if k.abs() < g.nyquist() {
                assert_eq!(d.coeff(k), f.coeff(k));
            }
        }
        assert_eq!(d.dealias(), d);
        let c = Field::from_modes(&g, |k| Complex64::new(if k == 1 { 0.5 } else { 0.0 }, 0.0));
        assert_eq!(c.dealias(), c);
    }

    #[test]
    fn sobolev_norms_of_cosine() {
        let c = Field::from_fn(&grid32(), f64::cos);
        assert!(close(c.sobolev_norm(0.0), PI.sqrt(), 1e-13));
        // L * 2 * (1+1)^2 * (1/4) = 4 pi
        assert!(close(c.sobolev_norm(1.0), 2.0 * PI.sqrt(), 1e-13));
        assert_eq!(Field::zeros(&grid32()).sobolev_norm(0.7), 0.0);
    }

    #[test]
    fn integrals_of_cosine_products() {
        let g = grid32();
        let c = Field::from_fn(&g, f64::cos);
        let z = Field::zeros(&g);
        assert!(close(integral_of_product(&[&c, &c]).unwrap(), PI, 1e-13));
        assert!(close(integral_of_product(&[&c, &c, &c, &c]).unwrap(), 0.75 * PI, 1e-13));
        assert_eq!(integral_of_product(&[&c, &z]).unwrap(), 0.0);
        let other = Field::zeros(&SpectralGrid::new(PI, 32).unwrap());
        assert!(matches!(integral_of_product(&[&c, &other]), Err(Error::GridMismatch)));
        assert!(integral_of_product(&[&c]).is_err());
    }

    #[test]
    fn padded_samples_match_collocation_samples() {
        let g = grid32();
        let f = Field::from_modes(&g, |k| Complex64::new((-(k as f64)).exp(), 0.1 * k as f64));
        let s = f.samples();
        let p = f.padded_samples();
        for j in 0..g.points() {
            assert!(close(s[j], p[2 * j], 1e-13));
        }
        let back = Field::from_padded_samples(&g, &p);
        assert!(back.sub(&f).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn exact_integral_handles_full_band() {
        let g = SpectralGrid::new(2.0 * PI, 8).unwrap();
        // cos(3x)^4 integrates to 3 pi / 4 but aliases on the K = 8 grid.
        let f = Field::from_fn(&g, |x| (3.0 * x).cos());
        let exact = exact_integral_of_product(&[&f, &f, &f, &f]).unwrap();
        assert!(close(exact, 0.75 * PI, 1e-13));
        let c = Field::from_fn(&g, f64::cos);
        assert!(close(exact_integral_of_product(&[&c, &c]).unwrap(), PI, 1e-13));
    }
}

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest collocation count accepted anywhere (also bounds parser allocations).
pub const MAX_POINTS: usize = 1 << 20;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_padded: Arc<dyn Fft<f64>>,
    inverse_padded: Arc<dyn Fft<f64>>,
}

/// Periodic domain `[0, L)` sampled at `K` collocation points.
///
/// Mode `k` ranges over `-K/2+1 ..= K/2` and carries the physical frequency
/// `xi_k = 2 pi k / L`. Coefficient storage uses FFT order: index `i` holds
/// mode `i` for `i <= K/2` and mode `i - K` otherwise.
#[derive(Clone)]
pub struct SpectralGrid {
    length: f64,
    points: usize,
    plans: Arc<Plans>,
}

impl SpectralGrid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 8, got {points}"
            )));
        }
        if points > MAX_POINTS {
            return Err(Error::InvalidGrid(format!("point count {points} exceeds {MAX_POINTS}")));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
            forward_padded: planner.plan_fft_forward(2 * points),
            inverse_padded: planner.plan_fft_inverse(2 * points),
        };
        Ok(SpectralGrid { length, points, plans: Arc::new(plans) })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Collocation point count `K`.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn nyquist(&self) -> i64 {
        (self.points / 2) as i64
    }

    /// Largest `|k|` kept by the two-thirds rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.points / 3) as i64
    }

    /// Number of modes surviving dealiasing, `2 floor(K/3) + 1`.
    pub fn active_mode_count(&self) -> usize {
        2 * self.dealias_cutoff() as usize + 1
    }

    pub fn min_mode(&self) -> i64 {
        -self.nyquist() + 1
    }

    /// All lattice modes in increasing order.
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        self.min_mode()..=self.nyquist()
    }

    pub fn active_modes(&self) -> impl Iterator<Item = i64> {
        let c = self.dealias_cutoff();
        -c..=c
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn xi(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.length
    }

    /// Largest physical frequency on the lattice (the Nyquist frequency).
    pub fn max_xi(&self) -> f64 {
        self.xi(self.nyquist())
    }

    pub fn max_active_xi(&self) -> f64 {
        self.xi(self.dealias_cutoff())
    }

    pub fn index_of(&self, k: i64) -> usize {
        debug_assert!(k >= self.min_mode() && k <= self.nyquist());
        k.rem_euclid(self.points as i64) as usize
    }

    pub fn mode_of(&self, index: usize) -> i64 {
        let k = index as i64;
        if k <= self.nyquist() {
            k
        } else {
            k - self.points as i64
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.length * j as f64 / self.points as f64
    }

    pub(crate) fn forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.plans.forward
    }

    pub(crate) fn inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.plans.inverse
    }

    pub(crate) fn forward_padded(&self) -> &Arc<dyn Fft<f64>> {
        &self.plans.forward_padded
    }

    pub(crate) fn inverse_padded(&self) -> &Arc<dyn Fft<f64>> {
        &self.plans.inverse_padded
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.length.to_bits() == other.length.to_bits()
    }
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pi_grid_has_integer_frequencies() {
        let g = SpectralGrid::new(2.0 * PI, 8).unwrap();
        let modes: Vec<i64> = g.modes().collect();
        assert_eq!(modes, vec![-3, -2, -1, 0, 1, 2, 3, 4]);
        for k in g.modes() {
            assert!((g.xi(k) - k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn spacing_follows_length() {
        let g = SpectralGrid::new(4.0 * PI, 16).unwrap();
        assert!((g.spacing() - 0.5).abs() < 1e-15);
        assert!((g.xi(3) - g.xi(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SpectralGrid::new(-1.0, 8).is_err());
        assert!(SpectralGrid::new(0.0, 8).is_err());
        assert!(SpectralGrid::new(f64::NAN, 8).is_err());
        assert!(SpectralGrid::new(1.0, 12).is_err());
        assert!(SpectralGrid::new(1.0, 4).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = SpectralGrid::new(1.0, 16).unwrap();
        for k in g.modes() {
            assert_eq!(g.mode_of(g.index_of(k)), k);
        }
        assert_eq!(g.dealias_cutoff(), 5);
        assert_eq!(g.active_mode_count(), 11);
    }
}

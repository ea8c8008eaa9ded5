use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `m` bridges the gap between `N` and `2N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// `min(1, (N/|xi|)^(1-s))`: continuous, kinked at `|xi| = N`.
    #[default]
    Sharp,
    /// Cubic Hermite bridge on `[N, 2N]`, continuously differentiable.
    Blend,
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProfileKind::Sharp => "sharp",
            ProfileKind::Blend => "blend",
        })
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(ProfileKind::Sharp),
            "blend" => Ok(ProfileKind::Blend),
            other => Err(Error::InvalidArgument(format!("unknown profile {other:?} (sharp|blend)"))),
        }
    }
}

/// The smoothing symbol `m`: 1 below the cutoff `N`, `(N/|xi|)^(1-s)` above
/// `2N`, even and nonincreasing in `|xi|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IMultiplierProfile {
    pub cutoff: f64,
    pub s: f64,
    pub kind: ProfileKind,
}

/// Value and first two derivatives of a radial function at `r >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Jet {
    f: f64,
    d1: f64,
    d2: f64,
}

impl IMultiplierProfile {
    pub fn new(cutoff: f64, s: f64, kind: ProfileKind) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidArgument(format!("cutoff N must be positive, got {cutoff}")));
        }
        if !(s > 0.25 && s < 1.0) {
            return Err(Error::InvalidArgument(format!("regularity s must lie in (1/4, 1), got {s}")));
        }
        Ok(IMultiplierProfile { cutoff, s, kind })
    }

    pub fn sharp(cutoff: f64, s: f64) -> Result<Self> {
        Self::new(cutoff, s, ProfileKind::Sharp)
    }

    pub fn blend(cutoff: f64, s: f64) -> Result<Self> {
        Self::new(cutoff, s, ProfileKind::Blend)
    }

    /// Radii where the profile is not twice differentiable.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            ProfileKind::Sharp => vec![self.cutoff],
            ProfileKind::Blend => vec![self.cutoff, 2.0 * self.cutoff],
        }
    }

    fn power_branch(&self, r: f64) -> Jet {
        let p = 1.0 - self.s;
        let f = (self.cutoff / r).powf(p);
        Jet { f, d1: -p * f / r, d2: p * (p + 1.0) * f / (r * r) }
    }

    fn hermite_bridge(&self, r: f64) -> Jet {
        let n = self.cutoff;
        let h = n;
        let t = (r - n) / h;
        let end = self.power_branch(2.0 * n);
        // endpoint data: (1, 0) at N and (end.f, end.d1) at 2N
        let (p0, m0, p1, m1) = (1.0, 0.0, end.f, end.d1 * h);
        let (t2, t3) = (t * t, t * t * t);
        let f = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let df = (6.0 * t2 - 6.0 * t) * p0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1;
        let ddf = (12.0 * t - 6.0) * p0 + (6.0 * t - 4.0) * m0 + (-12.0 * t + 6.0) * p1 + (6.0 * t - 2.0) * m1;
        Jet { f, d1: df / h, d2: ddf / (h * h) }
    }

    /// One-sided jet; `right` selects the branch to the right of a breakpoint.
    fn radial_jet(&self, r: f64, right: bool) -> Jet {
        let n = self.cutoff;
        let flat = Jet { f: 1.0, d1: 0.0, d2: 0.0 };
        match self.kind {
            ProfileKind::Sharp => {
                if r < n || (r == n && !right) {
                    flat
                } else {
                    self.power_branch(r)
                }
            }
            ProfileKind::Blend => {
                if r < n || (r == n && !right) {
                    flat
                } else if r < 2.0 * n || (r == 2.0 * n && !right) {
                    self.hermite_bridge(r)
                } else {
                    self.power_branch(r)
                }
            }
        }
    }

    /// Jet at radius `r`, averaging the one-sided derivatives at breakpoints.
    fn jet(&self, r: f64) -> Jet {
        if self.breakpoints().contains(&r) {
            let (a, b) = (self.radial_jet(r, false), self.radial_jet(r, true));
            Jet { f: a.f, d1: 0.5 * (a.d1 + b.d1), d2: 0.5 * (a.d2 + b.d2) }
        } else {
            self.radial_jet(r, false)
        }
    }

    pub fn m(&self, xi: f64) -> f64 {
        self.jet(xi.abs()).f
    }

    /// `dm/dxi` (odd in `xi`).
    pub fn dm(&self, xi: f64) -> f64 {
        xi.signum() * self.jet(xi.abs()).d1
    }

    /// `d^2 m / dxi^2` (even in `xi`).
    pub fn d2m(&self, xi: f64) -> f64 {
        self.jet(xi.abs()).d2
    }

    /// `g(xi) = m(xi)^2 xi^3`.
    pub fn g(&self, xi: f64) -> f64 {
        let m = self.m(xi);
        m * m * xi * xi * xi
    }

    /// `g'(xi)`, even in `xi`.
    pub fn dg(&self, xi: f64) -> f64 {
        let r = xi.abs();
        let j = self.jet(r);
        2.0 * j.f * j.d1 * r * r * r + 3.0 * j.f * j.f * r * r
    }

    /// `g''(xi)`, odd in `xi`.
    pub fn d2g(&self, xi: f64) -> f64 {
        xi.signum() * self.d2g_radial(xi.abs(), None)
    }

    /// `g''` at `r >= 0`, optionally from one side of a breakpoint.
    pub(crate) fn d2g_radial(&self, r: f64, right: Option<bool>) -> f64 {
        let j = match right {
            Some(side) => self.radial_jet(r, side),
            None => self.jet(r),
        };
        2.0 * (j.d1 * j.d1 + j.f * j.d2) * r * r * r + 12.0 * j.f * j.d1 * r * r + 6.0 * j.f * j.f * r
    }

    /// `f(xi) = m(xi)^2 xi^2`, the function controlled by the mean value bounds.
    pub fn f_sq(&self, xi: f64) -> f64 {
        let m = self.m(xi);
        m * m * xi * xi
    }

    /// `f''` for `f = m^2 xi^2`.
    pub fn d2f_sq(&self, xi: f64) -> f64 {
        let r = xi.abs();
        let j = self.jet(r);
        2.0 * (j.d1 * j.d1 + j.f * j.d2) * r * r + 8.0 * j.f * j.d1 * r + 2.0 * j.f * j.f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn branch_values() {
        let p = IMultiplierProfile::sharp(16.0, 0.5).unwrap();
        assert_eq!(p.m(8.0), 1.0);
        assert_eq!(p.m(16.0), 1.0);
        assert!((p.m(64.0) - 0.5).abs() < 1e-15);
        assert_eq!(p.m(-64.0), p.m(64.0));
        let b = IMultiplierProfile::blend(16.0, 0.5).unwrap();
        assert_eq!(b.m(8.0), 1.0);
        assert!((b.m(64.0) - 0.5).abs() < 1e-15);
        assert!((b.m(32.0) - p.m(32.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(IMultiplierProfile::sharp(0.0, 0.5).is_err());
        assert!(IMultiplierProfile::sharp(1.0, 0.25).is_err());
        assert!(IMultiplierProfile::sharp(1.0, 1.0).is_err());
        assert!("smooth".parse::<ProfileKind>().is_err());
        assert_eq!("blend".parse::<ProfileKind>().unwrap(), ProfileKind::Blend);
    }

    #[test]
    fn blend_is_monotone_and_c1() {
        for s in [0.3, 0.5, 0.9] {
            let b = IMultiplierProfile::blend(10.0, s).unwrap();
            let mut prev = 1.0;
            for i in 0..=400 {
                let x = 5.0 + i as f64 * 0.1;
                let v = b.m(x);
                assert!(v <= prev + 1e-15 && v > 0.0);
                prev = v;
            }
            for knot in [10.0, 20.0] {
                let l = fd(|x| b.m(x), knot - 1e-4, 1e-6);
                let r = fd(|x| b.m(x), knot + 1e-4, 1e-6);
                assert!((l - r).abs() < 1e-4, "s={s} knot={knot}");
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for prof in [IMultiplierProfile::sharp(4.0, 0.4).unwrap(), IMultiplierProfile::blend(4.0, 0.7).unwrap()] {
            for x in [-30.0, -6.5, -1.0, 0.7, 3.0, 5.5, 7.2, 12.0] {
                let h = 1e-5;
                assert!((prof.dm(x) - fd(|y| prof.m(y), x, h)).abs() < 1e-7, "{x}");
                assert!((prof.d2m(x) - fd(|y| prof.dm(y), x, h)).abs() < 1e-6, "{x}");
                assert!((prof.dg(x) - fd(|y| prof.g(y), x, h)).abs() < 1e-5 * (1.0 + x.abs().powi(2)));
                assert!((prof.d2g(x) - fd(|y| prof.dg(y), x, h)).abs() < 1e-5 * (1.0 + x.abs()));
                assert!((prof.d2f_sq(x) - fd(|y| fd(|z| prof.f_sq(z), y, 1e-3), x, 1e-3)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn kink_uses_average_of_sides() {
        let p = IMultiplierProfile::sharp(4.0, 0.5).unwrap();
        assert!((p.dm(4.0) - 0.5 * (-0.5 / 4.0)).abs() < 1e-15);
        assert_eq!(p.dm(0.0), 0.0);
    }
}

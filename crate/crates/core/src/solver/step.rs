use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Field, FieldPair, SpectralGrid};

/// Any coefficient above this magnitude is treated as blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Which right-hand side to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Flow {
    #[default]
    Nonlinear,
    /// Pure dispersion; the nonlinear term is switched off.
    Linear,
}

type Coeffs = Vec<Complex64>;

/// Half-step dispersion factors `exp(i xi^3 dt / 2)` in FFT order.
fn half_step_propagator(grid: &SpectralGrid, dt: f64) -> Coeffs {
    (0..grid.points())
        .map(|i| {
            let xi = grid.xi(grid.mode_of(i));
            Complex64::from_polar(1.0, xi * xi * xi * dt / 2.0)
        })
        .collect()
}

/// Coefficients of `-i xi P[f g h]` where the product is formed on the 2K
/// padded grid and `P` keeps `|k| <= floor(K/3)`.
fn cubic_flux(grid: &SpectralGrid, f: &[f64], g: &[f64], h: &[f64]) -> Coeffs {
    let prod: Vec<f64> = f.iter().zip(g).zip(h).map(|((a, b), c)| a * b * c).collect();
    let hat = Field::from_padded_samples(grid, &prod);
    let cutoff = grid.dealias_cutoff();
    (0..grid.points())
        .map(|i| {
            let k = grid.mode_of(i);
            if k.abs() > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -grid.xi(k)) * hat.coeffs()[i]
            }
        })
        .collect()
}

fn padded(grid: &SpectralGrid, c: &[Complex64]) -> Vec<f64> {
    Field::from_raw(grid, c.to_vec()).padded_samples()
}

fn hadamard(f: &[Complex64], v: &[Coeffs]) -> Vec<Coeffs> {
    v.iter().map(|c| c.iter().zip(f).map(|(a, b)| a * b).collect()).collect()
}

/// `x + a y`, componentwise.
fn axpy(x: &[Coeffs], a: f64, y: &[Coeffs]) -> Vec<Coeffs> {
    x.iter().zip(y).map(|(p, q)| p.iter().zip(q).map(|(s, t)| s + t * a).collect()).collect()
}

fn scaled(v: Vec<Coeffs>, a: f64) -> Vec<Coeffs> {
    v.into_iter().map(|c| c.into_iter().map(|z| z * a).collect()).collect()
}

/// One integrating-factor RK4 step for a vector of spectral components.
fn ifrk4(
    grid: &SpectralGrid,
    state: &[Coeffs],
    dt: f64,
    rhs: &dyn Fn(&[Coeffs]) -> Vec<Coeffs>,
) -> Vec<Coeffs> {
    let e = half_step_propagator(grid, dt);
    let e2: Coeffs = e.iter().map(|z| z * z).collect();
    let a = scaled(rhs(state), dt);
    let b = scaled(rhs(&hadamard(&e, &axpy(state, 0.5, &a))), dt);
    let c = scaled(rhs(&axpy(&hadamard(&e, state), 0.5, &b)), dt);
    let d = scaled(rhs(&axpy(&hadamard(&e2, state), 1.0, &hadamard(&e, &c))), dt);
    let bc = axpy(&b, 1.0, &c);
    let incr = axpy(&axpy(&hadamard(&e2, &a), 2.0, &hadamard(&e, &bc)), 1.0, &d);
    axpy(&hadamard(&e2, state), 1.0 / 6.0, &incr)
}

fn check_finite(coeffs: &[Coeffs], time: f64) -> Result<()> {
    for c in coeffs.iter().flatten() {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::StepFailure { time, reason: "non-finite coefficient".into() });
        }
        if c.norm() > BLOWUP_THRESHOLD {
            return Err(Error::StepFailure {
                time,
                reason: format!("coefficient magnitude {:e} above blow-up threshold", c.norm()),
            });
        }
    }
    Ok(())
}

fn require_dealiased(f: &Field) -> Result<()> {
    if f.is_dealiased() {
        Ok(())
    } else {
        Err(Error::Precondition("state must be dealiased before stepping".into()))
    }
}

fn finish(grid: &SpectralGrid, mut c: Coeffs) -> Field {
    crate::spectral::symmetrize(&mut c);
    let cutoff = grid.dealias_cutoff();
    for (i, z) in c.iter_mut().enumerate() {
        if grid.mode_of(i).abs() > cutoff {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    Field::from_raw(grid, c)
}

/// Signed-step mKdV update; `time` is the time reached, used in failures.
pub(crate) fn advance_mkdv(state: &Field, dt: f64, time: f64, flow: Flow) -> Result<Field> {
    require_dealiased(state)?;
    let grid = state.grid().clone();
    let rhs = |v: &[Coeffs]| -> Vec<Coeffs> {
        match flow {
            Flow::Linear => vec![vec![Complex64::new(0.0, 0.0); grid.points()]],
            Flow::Nonlinear => {
                let u = padded(&grid, &v[0]);
                vec![cubic_flux(&grid, &u, &u, &u)]
            }
        }
    };
    let out = ifrk4(&grid, &[state.coeffs().to_vec()], dt, &rhs);
    check_finite(&out, time)?;
    Ok(finish(&grid, out.into_iter().next().expect("one component")))
}

pub(crate) fn advance_system(state: &FieldPair, dt: f64, time: f64, flow: Flow) -> Result<FieldPair> {
    require_dealiased(&state.u)?;
    require_dealiased(&state.v)?;
    let grid = state.grid().clone();
    let rhs = |w: &[Coeffs]| -> Vec<Coeffs> {
        match flow {
            Flow::Linear => vec![vec![Complex64::new(0.0, 0.0); grid.points()]; 2],
            Flow::Nonlinear => {
                let u = padded(&grid, &w[0]);
                let v = padded(&grid, &w[1]);
                vec![cubic_flux(&grid, &u, &v, &v), cubic_flux(&grid, &u, &u, &v)]
            }
        }
    };
    let out = ifrk4(&grid, &[state.u.coeffs().to_vec(), state.v.coeffs().to_vec()], dt, &rhs);
    check_finite(&out, time)?;
    let mut it = out.into_iter();
    let u = finish(&grid, it.next().expect("u"));
    let v = finish(&grid, it.next().expect("v"));
    FieldPair::new(u, v)
}

fn require_positive(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")))
    }
}

/// One IF-RK4 step of `u_t + u_xxx + (u^3)_x = 0`.
pub fn step_mkdv(state: &Field, dt: f64) -> Result<Field> {
    require_positive(dt)?;
    advance_mkdv(state, dt, dt, Flow::Nonlinear)
}

/// One IF-RK4 step of `u_t + u_xxx + (u v^2)_x = 0`, `v_t + v_xxx + (u^2 v)_x = 0`.
pub fn step_system(state: &FieldPair, dt: f64) -> Result<FieldPair> {
    require_positive(dt)?;
    advance_system(state, dt, dt, Flow::Nonlinear)
}

/// `min(1e-3, 0.5 / (xi_max * max|u|^2))` over all components.
pub fn default_dt(fields: &[&Field]) -> f64 {
    let grid = fields[0].grid();
    let peak = fields
        .iter()
        .flat_map(|f| f.samples())
        .map(f64::abs)
        .fold(0.0, f64::max);
    let limit = 0.5 / (grid.max_xi() * peak * peak);
    if limit.is_finite() {
        limit.min(1e-3)
    } else {
        1e-3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(2.0 * PI, 32).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let z = Field::zeros(&grid());
        assert_eq!(step_mkdv(&z, 1e-3).unwrap(), z);
        let p = FieldPair::new(z.clone(), z.clone()).unwrap();
        assert_eq!(step_system(&p, 1e-3).unwrap(), p);
    }

    #[test]
    fn linear_flow_is_exact_phase_rotation() {
        let g = grid();
        let u = Field::from_fn(&g, |x| x.cos() + 0.5 * (2.0 * x).sin()).dealias();
        let dt = 0.01;
        let out = advance_mkdv(&u, dt, dt, Flow::Linear).unwrap();
        for k in g.active_modes() {
            let xi = g.xi(k);
            let expect = u.coeff(k) * Complex64::from_polar(1.0, xi * xi * xi * dt);
            assert!((out.coeff(k) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_dt_and_aliased_input() {
        let g = grid();
        let u = Field::from_fn(&g, f64::cos).dealias();
        assert!(step_mkdv(&u, 0.0).is_err());
        assert!(step_mkdv(&u, -1e-3).is_err());
        let rough = Field::from_modes(&g, |k| Complex64::new(if k == 14 { 1.0 } else { 0.0 }, 0.0));
        assert!(matches!(step_mkdv(&rough, 1e-3), Err(Error::Precondition(_))));
    }

    #[test]
    fn huge_data_reports_failure_time() {
        let g = grid();
        let u = Field::from_fn(&g, |x| 1e5 * x.cos()).dealias();
        match advance_mkdv(&u, 0.1, 0.7, Flow::Nonlinear) {
            Err(Error::StepFailure { time, .. }) => assert_eq!(time, 0.7),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn default_dt_caps_at_one_millisecond() {
        let g = grid();
        assert_eq!(default_dt(&[&Field::zeros(&g)]), 1e-3);
        let big = Field::from_fn(&g, |x| 10.0 * x.cos());
        let dt = default_dt(&[&big]);
        assert!((dt - 0.5 / (16.0 * 100.0)).abs() < 1e-12);
    }
}

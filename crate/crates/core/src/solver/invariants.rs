use super::evolve::{FlowState, Trajectory};
use crate::output::fmt_f64;
use crate::spectral::{exact_integral_of_product, Field};

/// Quartic coefficient that makes `1/2 |u_x|^2 - alpha |u|_4^4` conserved
/// under `u_t + u_xxx + (u^3)_x = 0`.
pub const ENERGY_ALPHA: f64 = 0.25;

/// Rejected candidate coefficient, kept for comparison runs.
pub const ENERGY_ALPHA_PRINTED: f64 = 1.0 / 12.0;

/// `1/2 |u|^2`.
pub fn mass(u: &Field) -> f64 {
    0.5 * u.l2_norm().powi(2)
}

/// `integral of u^4`, exact for band-limited data.
pub fn l4_power(u: &Field) -> f64 {
    exact_integral_of_product(&[u, u, u, u]).expect("single grid")
}

fn dx_norm_sq(u: &Field) -> f64 {
    u.derivative(1).expect("order 1").l2_norm().powi(2)
}

/// `1/2 |u_x|^2 - alpha integral u^4`.
pub fn energy(u: &Field, alpha: f64) -> f64 {
    0.5 * dx_norm_sq(u) - alpha * l4_power(u)
}

/// `integral (u^2 + v^2)`.
pub fn i1(u: &Field, v: &Field) -> f64 {
    u.l2_norm().powi(2) + v.l2_norm().powi(2)
}

/// `integral (u_x^2 + v_x^2 - u^2 v^2)`.
pub fn i2(u: &Field, v: &Field) -> f64 {
    dx_norm_sq(u) + dx_norm_sq(v) - exact_integral_of_product(&[u, u, v, v]).expect("single grid")
}

/// Per-snapshot conserved quantities. Single-equation runs fill `mass` and
/// `energy`; system runs fill `i1` and `i2`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub times: Vec<f64>,
    pub alpha: f64,
    pub mass: Option<Vec<f64>>,
    pub energy: Option<Vec<f64>>,
    pub i1: Option<Vec<f64>>,
    pub i2: Option<Vec<f64>>,
}

/// `max_t |q(t) - q(0)| / |q(0)|` (absolute when `q(0) = 0`).
pub fn relative_drift(series: &[f64]) -> f64 {
    let q0 = series[0];
    let scale = if q0 == 0.0 { 1.0 } else { q0.abs() };
    series.iter().map(|q| (q - q0).abs()).fold(0.0, f64::max) / scale
}

impl InvariantReport {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let cell = |col: &Option<Vec<f64>>, i: usize| col.as_ref().map(|v| fmt_f64(v[i])).unwrap_or_default();
        let mut out = String::from("t,mass,energy,i1,i2\n");
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(*t),
                cell(&self.mass, i),
                cell(&self.energy, i),
                cell(&self.i1, i),
                cell(&self.i2, i)
            ));
        }
        out
    }
}

pub fn invariants<S: FlowState>(traj: &Trajectory<S>, alpha: f64) -> InvariantReport {
    let mut report = InvariantReport {
        times: traj.times.clone(),
        alpha,
        mass: None,
        energy: None,
        i1: None,
        i2: None,
    };
    let comps: Vec<Vec<&Field>> = traj.states.iter().map(|s| s.components()).collect();
    if comps.first().map(|c| c.len()) == Some(2) {
        report.i1 = Some(comps.iter().map(|c| i1(c[0], c[1])).collect());
        report.i2 = Some(comps.iter().map(|c| i2(c[0], c[1])).collect());
    } else {
        report.mass = Some(comps.iter().map(|c| mass(c[0])).collect());
        report.energy = Some(comps.iter().map(|c| energy(c[0], alpha)).collect());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FieldPair, SpectralGrid};
    use std::f64::consts::PI;

    #[test]
    fn values_on_cosine() {
        let g = SpectralGrid::new(2.0 * PI, 32).unwrap();
        let c = Field::from_fn(&g, f64::cos);
        assert!((mass(&c) - PI / 2.0).abs() < 1e-13);
        assert!((l4_power(&c) - 0.75 * PI).abs() < 1e-13);
        assert!((energy(&c, 0.25) - (PI / 2.0 - 0.1875 * PI)).abs() < 1e-13);
        assert!((i1(&c, &c) - 2.0 * PI).abs() < 1e-13);
        assert!((i2(&c, &c) - (2.0 * PI - 0.75 * PI)).abs() < 1e-13);
    }

    #[test]
    fn report_columns_follow_equation() {
        let g = SpectralGrid::new(2.0 * PI, 16).unwrap();
        let c = Field::from_fn(&g, f64::cos);
        let t = Trajectory { times: vec![0.0], states: vec![c.clone()], dt: 1e-3 };
        let r = invariants(&t, ENERGY_ALPHA);
        assert!(r.mass.is_some() && r.i1.is_none());
        let csv = r.to_csv();
        assert!(csv.starts_with("t,mass,energy,i1,i2\n0.0000000000000000e0,"));
        assert!(csv.trim_end().ends_with(",,"));
        let p = Trajectory { times: vec![0.0], states: vec![FieldPair::new(c.clone(), c).unwrap()], dt: 1e-3 };
        let r = invariants(&p, ENERGY_ALPHA);
        assert!(r.mass.is_none() && r.i2.is_some());
        assert!(r.to_csv().lines().nth(1).unwrap().contains(",,,"));
    }

    #[test]
    fn drift_measure() {
        assert_eq!(relative_drift(&[2.0, 2.5, 1.0]), 0.5);
        assert_eq!(relative_drift(&[0.0, 1e-3]), 1e-3);
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imethod::{apply_i, e1, e1_system, ConstantsTable, IMultiplierProfile, ProfileKind};
use crate::output::fmt_f64;
use crate::solver::{evolve, Trajectory};
use crate::spectral::{Field, FieldPair};
use crate::verify::ModifiedEnergyState;

/// Largest grid on which the sweep evaluates the quartic functional.
pub const MAX_SWEEP_POINTS: usize = 64;

pub const DEFAULT_T_RUN: f64 = 1.0;

/// States whose first and second modified energies the sweep tracks.
pub trait DriftState: ModifiedEnergyState {
    fn first_energy(&self, profile: &IMultiplierProfile) -> Result<f64>;
    /// `||Iu||_{H^1}`, or the product norm for a pair.
    fn smoothed_h1(&self, profile: &IMultiplierProfile) -> f64;
}

impl DriftState for Field {
    fn first_energy(&self, profile: &IMultiplierProfile) -> Result<f64> {
        e1(self, profile)
    }

    fn smoothed_h1(&self, profile: &IMultiplierProfile) -> f64 {
        apply_i(self, profile).sobolev_norm(1.0)
    }
}

impl DriftState for FieldPair {
    fn first_energy(&self, profile: &IMultiplierProfile) -> Result<f64> {
        e1_system(self, profile)
    }

    fn smoothed_h1(&self, profile: &IMultiplierProfile) -> f64 {
        self.u.smoothed_h1(profile).hypot(self.v.smoothed_h1(profile))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    #[serde(rename = "N")]
    pub n: f64,
    pub e1_drift: f64,
    pub e2_drift: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub dt: f64,
    #[serde(rename = "T_run")]
    pub t_run: f64,
    pub s: f64,
    /// `e2_drift N^3 / ||I phi||_{H^1}^6`, the measured increment constant.
    pub increment_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSweep {
    pub rows: Vec<DriftRow>,
    /// Least-squares slope of `ln e2_drift` against `ln N`.
    pub fitted_slope: f64,
    /// Largest per-row increment constant.
    pub increment_constant: f64,
}

impl DriftSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,e1_drift,e2_drift,K,dt,T_run,s\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_f64(r.n),
                fmt_f64(r.e1_drift),
                fmt_f64(r.e2_drift),
                r.k,
                fmt_f64(r.dt),
                fmt_f64(r.t_run),
                fmt_f64(r.s)
            ));
        }
        out.push_str(&format!("# fitted_slope={}\n", fmt_f64(self.fitted_slope)));
        out
    }
}

/// Slope of the least-squares line through `(ln x, ln y)` over positive `y`;
/// NaN with fewer than two usable points.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn sup_drift(values: &[f64]) -> f64 {
    values.iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max)
}

/// Parameters of a drift sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub s: f64,
    pub cutoffs: Vec<f64>,
    pub t_run: f64,
    pub dt: f64,
    pub snapshot_every: u64,
    pub profile: ProfileKind,
    pub constants: ConstantsTable,
    /// Accept cutoffs at or above every resolved frequency, where `m = 1` on
    /// the whole band (control runs).
    #[serde(default)]
    pub allow_inactive_cutoffs: bool,
}

fn check_settings<S: DriftState>(initial: &S, cfg: &SweepSettings) -> Result<()> {
    let grid = initial.grid();
    if grid.points() > MAX_SWEEP_POINTS {
        return Err(Error::Precondition(format!("drift sweeps need K <= {MAX_SWEEP_POINTS}, got {}", grid.points())));
    }
    if cfg.cutoffs.is_empty() || cfg.cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("cutoff list must be nonempty and strictly increasing".into()));
    }
    for &n in &cfg.cutoffs {
        if !(n > 0.0 && (cfg.allow_inactive_cutoffs || n < grid.max_active_xi())) {
            return Err(Error::Precondition(format!(
                "cutoff {n} must lie in (0, {}) to be active on this grid",
                grid.max_active_xi()
            )));
        }
    }
    Ok(())
}

/// Evaluates the sweep on an existing trajectory.
pub fn drift_rows<S: DriftState>(traj: &Trajectory<S>, cfg: &SweepSettings) -> Result<DriftSweep> {
    let first = &traj.states[0];
    check_settings(first, cfg)?;
    let k = first.grid().points();
    let rows: Vec<DriftRow> = cfg
        .cutoffs
        .par_iter()
        .map(|&n| {
            let profile = IMultiplierProfile::new(n, cfg.s, cfg.profile)?;
            let mut e1s = Vec::with_capacity(traj.len());
            let mut e2s = Vec::with_capacity(traj.len());
            for state in &traj.states {
                e1s.push(state.first_energy(&profile)?);
                e2s.push(state.modified_energy(&profile, &cfg.constants)?);
            }
            let e2_drift = sup_drift(&e2s);
            Ok(DriftRow {
                n,
                e1_drift: sup_drift(&e1s),
                e2_drift,
                k,
                dt: traj.dt,
                t_run: cfg.t_run,
                s: cfg.s,
                increment_constant: e2_drift * n.powi(3) / first.smoothed_h1(&profile).powi(6),
            })
        })
        .collect::<Result<_>>()?;
    let fitted_slope = log_log_slope(&rows.iter().map(|r| (r.n, r.e2_drift)).collect::<Vec<_>>());
    let increment_constant = rows.iter().map(|r| r.increment_constant).fold(0.0, f64::max);
    Ok(DriftSweep { rows, fitted_slope, increment_constant })
}

/// Evolves `initial` once over `[0, t_run]` and records, for each cutoff, the
/// largest deviation of both modified energies from their initial values.
pub fn drift_sweep<S: DriftState>(initial: &S, cfg: &SweepSettings) -> Result<DriftSweep> {
    check_settings(initial, cfg)?;
    let traj = evolve(initial, cfg.t_run, cfg.dt, cfg.snapshot_every)?;
    drift_rows(&traj, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-2.5))).collect();
        assert!((log_log_slope(&pts) + 2.5).abs() < 1e-12);
        assert!(log_log_slope(&pts[..1]).is_nan());
    }

    #[test]
    fn csv_layout() {
        let sweep = DriftSweep {
            rows: vec![DriftRow {
                n: 4.0,
                e1_drift: 1.0,
                e2_drift: 0.5,
                k: 64,
                dt: 1e-3,
                t_run: 1.0,
                s: 0.5,
                increment_constant: 1.0,
            }],
            fitted_slope: f64::NAN,
            increment_constant: 1.0,
        };
        let csv = sweep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,e1_drift,e2_drift,K,dt,T_run,s");
        assert!(lines[1].starts_with("4.0000000000000000e0,1.0000000000000000e0,5.0000000000000000e-1,64,"));
        assert!(lines[2].starts_with("# fitted_slope="));
    }
}

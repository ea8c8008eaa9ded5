use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imethod::{
    lambda_sum, quadratic_part, quadratic_part_system, quartic_part, quartic_part_system, sextic_functional,
    sextic_functional_system, ConstantsTable, IMultiplierProfile,
};
use crate::solver::{advance_steps, Flow, FlowState};
use crate::spectral::{Field, FieldPair};

/// Floor of the denominator of the relative derivative mismatch.
pub const RATE_FLOOR: f64 = 1e-14;

/// Largest grid on which the sextic functional is evaluated.
pub const MAX_POINTS_SEXTIC: usize = 64;

/// Largest step accepted by the cancellation check.
pub const MAX_CANCELLATION_DT: f64 = 1e-4;

/// States carrying a second modified energy `Q - c4 P` whose predicted rate
/// is `-c6 S`.
pub trait ModifiedEnergyState: FlowState {
    /// Quadratic part `Q`.
    fn quadratic(&self, profile: &IMultiplierProfile) -> Result<f64>;
    /// Quartic functional `P`.
    fn quartic(&self, profile: &IMultiplierProfile) -> Result<f64>;
    /// Sextic functional `S`, the imaginary part of the odd sextic sum.
    fn sextic(&self, profile: &IMultiplierProfile) -> Result<f64>;
    /// Sum of the term magnitudes of the quartic part of `dQ/dt`.
    fn quartic_flux_scale(&self, profile: &IMultiplierProfile) -> Result<f64>;
    /// `(c4, c6)` for this kind of state.
    fn coefficients(constants: &ConstantsTable) -> (f64, f64);

    fn modified_energy(&self, profile: &IMultiplierProfile, constants: &ConstantsTable) -> Result<f64> {
        let (c4, _) = Self::coefficients(constants);
        Ok(self.quadratic(profile)? - c4 * self.quartic(profile)?)
    }

    fn predicted_rate(&self, profile: &IMultiplierProfile, constants: &ConstantsTable) -> Result<f64> {
        let (_, c6) = Self::coefficients(constants);
        Ok(-c6 * self.sextic(profile)?)
    }
}

fn flux<'a>(profile: &'a IMultiplierProfile) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |xi: &[f64]| xi.iter().map(|&x| profile.g(x)).sum::<f64>()
}

impl ModifiedEnergyState for Field {
    fn quadratic(&self, profile: &IMultiplierProfile) -> Result<f64> {
        quadratic_part(self, profile)
    }

    fn quartic(&self, profile: &IMultiplierProfile) -> Result<f64> {
        quartic_part(self, profile)
    }

    fn sextic(&self, profile: &IMultiplierProfile) -> Result<f64> {
        sextic_functional(self, profile)
    }

    fn quartic_flux_scale(&self, profile: &IMultiplierProfile) -> Result<f64> {
        Ok(0.25 * lambda_sum(&flux(profile), &[self; 4])?.magnitude)
    }

    fn coefficients(c: &ConstantsTable) -> (f64, f64) {
        (c.c4, c.c6)
    }
}

impl ModifiedEnergyState for FieldPair {
    fn quadratic(&self, profile: &IMultiplierProfile) -> Result<f64> {
        quadratic_part_system(self, profile)
    }

    fn quartic(&self, profile: &IMultiplierProfile) -> Result<f64> {
        quartic_part_system(self, profile)
    }

    fn sextic(&self, profile: &IMultiplierProfile) -> Result<f64> {
        sextic_functional_system(self, profile)
    }

    fn quartic_flux_scale(&self, profile: &IMultiplierProfile) -> Result<f64> {
        let (u, v) = (&self.u, &self.v);
        Ok(lambda_sum(&flux(profile), &[u, u, v, v])?.magnitude)
    }

    fn coefficients(c: &ConstantsTable) -> (f64, f64) {
        (c.c4_system, c.c6_system)
    }
}

fn require_small_grid<S: FlowState>(state: &S) -> Result<()> {
    if state.grid().points() > MAX_POINTS_SEXTIC {
        return Err(Error::Precondition(format!(
            "sextic checks need K <= {MAX_POINTS_SEXTIC}, got {}",
            state.grid().points()
        )));
    }
    Ok(())
}

/// Centered difference of `f` along the flow, one step each way.
fn centered<S: FlowState>(state: &S, dt: f64, flow: Flow, f: impl Fn(&S) -> Result<f64>) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let ahead = advance_steps(state, dt, 1, flow)?;
    let behind = advance_steps(state, -dt, 1, flow)?;
    Ok((f(&ahead)? - f(&behind)?) / (2.0 * dt))
}

/// Derivatives of the energy pieces at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRates {
    pub quadratic: f64,
    pub quartic: f64,
    pub sextic: f64,
}

/// `dQ/dt`, `dP/dt` by centered differences and the sextic functional.
pub fn energy_rates<S: ModifiedEnergyState>(state: &S, profile: &IMultiplierProfile, dt: f64) -> Result<EnergyRates> {
    require_small_grid(state)?;
    let ahead = advance_steps(state, dt, 1, Flow::Nonlinear)?;
    let behind = advance_steps(state, -dt, 1, Flow::Nonlinear)?;
    let d = |f: &dyn Fn(&S) -> Result<f64>| -> Result<f64> { Ok((f(&ahead)? - f(&behind)?) / (2.0 * dt)) };
    Ok(EnergyRates {
        quadratic: d(&|s: &S| s.quadratic(profile))?,
        quartic: d(&|s: &S| s.quartic(profile))?,
        sextic: state.sextic(profile)?,
    })
}

/// Residual of the quartic cancellation at `state`.
///
/// Along the nonlinear flow this is `|dE2/dt - (-c6 S)|`; along the free flow
/// it is `|dQ/dt|`, which vanishes identically. Both are divided by the term
/// magnitude of the quartic part of `dQ/dt`, the size the residual would have
/// if the quartic terms did not cancel.
pub fn quartic_cancellation<S: ModifiedEnergyState>(
    state: &S,
    profile: &IMultiplierProfile,
    dt: f64,
    constants: &ConstantsTable,
    flow: Flow,
) -> Result<f64> {
    require_small_grid(state)?;
    if dt > MAX_CANCELLATION_DT {
        return Err(Error::Precondition(format!("cancellation needs dt <= {MAX_CANCELLATION_DT}, got {dt}")));
    }
    let scale = state.quartic_flux_scale(profile)?.max(f64::MIN_POSITIVE);
    let d = match flow {
        Flow::Linear => centered(state, dt, flow, |s| s.quadratic(profile))?,
        Flow::Nonlinear => {
            let fd = centered(state, dt, flow, |s| s.modified_energy(profile, constants))?;
            fd - state.predicted_rate(profile, constants)?
        }
    };
    Ok(d.abs() / scale)
}

/// Least-squares fit of the quartic and sextic coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c4: f64,
    pub c6: f64,
    /// Worst residual `|dQ - c4 dP + c6 S|` relative to `|dQ|` over the fit set.
    pub max_relative_residual: f64,
    pub rates: Vec<EnergyRates>,
}

/// Fits `dQ/dt = c4 dP/dt - c6 S` over the given states.
pub fn calibrate<S: ModifiedEnergyState>(states: &[S], profile: &IMultiplierProfile, dt: f64) -> Result<Calibration> {
    if states.len() < 2 {
        return Err(Error::InvalidArgument("calibration needs at least two states".into()));
    }
    let rates: Vec<EnergyRates> = states.iter().map(|s| energy_rates(s, profile, dt)).collect::<Result<_>>()?;
    // normal equations for columns x = dP, y = -S against target dQ
    let (mut xx, mut xy, mut yy, mut xt, mut yt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in &rates {
        let (x, y, t) = (r.quartic, -r.sextic, r.quadratic);
        xx += x * x;
        xy += x * y;
        yy += y * y;
        xt += x * t;
        yt += y * t;
    }
    let det = xx * yy - xy * xy;
    if det.abs() <= 1e-12 * xx * yy {
        return Err(Error::Precondition("calibration data does not separate the two coefficients".into()));
    }
    let c4 = (xt * yy - yt * xy) / det;
    let c6 = (xx * yt - xy * xt) / det;
    let max_relative_residual = rates
        .iter()
        .map(|r| (r.quadratic - c4 * r.quartic + c6 * r.sextic).abs() / r.quadratic.abs().max(RATE_FLOOR))
        .fold(0.0, f64::max);
    Ok(Calibration { c4, c6, max_relative_residual, rates })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeMatch {
    pub dt: f64,
    pub finite_difference: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

/// `|(E2(dt) - E2(-dt)) / (2 dt) - rate| / max(|rate|, 1e-14)`.
pub fn e2_derivative_match<S: ModifiedEnergyState>(
    state: &S,
    profile: &IMultiplierProfile,
    dt: f64,
    constants: &ConstantsTable,
) -> Result<DerivativeMatch> {
    require_small_grid(state)?;
    let finite_difference = centered(state, dt, Flow::Nonlinear, |s| s.modified_energy(profile, constants))?;
    let predicted = state.predicted_rate(profile, constants)?;
    let relative_error = (finite_difference - predicted).abs() / predicted.abs().max(RATE_FLOOR);
    Ok(DerivativeMatch { dt, finite_difference, predicted, relative_error })
}

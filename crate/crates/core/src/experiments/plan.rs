use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Rescaling and iteration schedule extending a local solution to `[0, T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpPlan {
    pub s: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub theta: f64,
    pub c_margin: f64,
    pub epsilon: f64,
    /// `(3 - 12 s) / (1 + 2 s)`.
    pub exponent: f64,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub lambda: Option<f64>,
    /// Local existence time for rescaled data of size `epsilon`.
    pub delta: Option<f64>,
    pub steps: Option<u64>,
    pub feasible: bool,
}

impl GwpPlan {
    /// `T N^exponent`, the left side of the defining constraint.
    pub fn constraint_value(&self) -> Option<f64> {
        self.n.map(|n| self.t * (n as f64).powf(self.exponent))
    }
}

/// Largest cutoff whose cube fits in a `u64`.
pub const MAX_CUTOFF: u64 = 2_642_245;

/// Smallest cutoff `N` with `T N^((3-12s)/(1+2s)) <= c_margin`, and the
/// scaling `lambda = N^(2(1-s)/(1+2s))`, `N^3` iteration steps and local time
/// `epsilon^(-2/theta)` that go with it. Infeasible for `s <= 1/4`.
pub fn gwp_plan(s: f64, t: f64, theta: f64, c_margin: f64, epsilon: f64) -> Result<GwpPlan> {
    if !(s.is_finite() && s < 1.0 && s > 0.0) {
        return Err(Error::InvalidArgument(format!("s must lie in (0, 1), got {s}")));
    }
    if !(t > 0.0 && t.is_finite()) || !(c_margin > 0.0 && c_margin.is_finite()) {
        return Err(Error::InvalidArgument("T and c_margin must be positive".into()));
    }
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1/2], got {theta}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let exponent = (3.0 - 12.0 * s) / (1.0 + 2.0 * s);
    let mut plan = GwpPlan {
        s,
        t,
        theta,
        c_margin,
        epsilon,
        exponent,
        n: None,
        lambda: None,
        delta: None,
        steps: None,
        feasible: false,
    };
    if s <= 0.25 {
        return Ok(plan);
    }
    let estimate = (t / c_margin).powf(-1.0 / exponent).ceil();
    if !(estimate < MAX_CUTOFF as f64) {
        return Err(Error::InvalidArgument(format!("cutoff {estimate:e} is too large for an N^3 step count")));
    }
    let mut n = (estimate as u64).max(1);
    while t * (n as f64).powf(exponent) > c_margin {
        n += 1;
    }
    while n > 1 && t * ((n - 1) as f64).powf(exponent) <= c_margin {
        n -= 1;
    }
    let steps = n.checked_pow(3).ok_or_else(|| Error::InvalidArgument(format!("N = {n} overflows N^3")))?;
    plan.n = Some(n);
    plan.lambda = Some((n as f64).powf(2.0 * (1.0 - s) / (1.0 + 2.0 * s)));
    plan.delta = Some(epsilon.powf(-2.0 / theta));
    plan.steps = Some(steps);
    plan.feasible = true;
    Ok(plan)
}

/// Energy bookkeeping of the iteration: how many unit steps fit before the
/// modified energy doubles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLedger {
    #[serde(rename = "N")]
    pub n: u64,
    pub epsilon: f64,
    pub constant: f64,
    pub budget: f64,
    pub increment: f64,
    pub steps_to_double: f64,
    pub planned_steps: u64,
    pub safety_margin: f64,
    pub sufficient: bool,
}

/// Starting budget `epsilon^2`, per-step increment `C N^-3 epsilon^6`.
pub fn iteration_ledger(plan: &GwpPlan, epsilon: f64, constant: f64) -> Result<IterationLedger> {
    let (Some(n), Some(planned_steps), true) = (plan.n, plan.steps, plan.feasible) else {
        return Err(Error::Precondition("the ledger needs a feasible plan".into()));
    };
    if !(epsilon > 0.0 && constant > 0.0) {
        return Err(Error::InvalidArgument("epsilon and the increment constant must be positive".into()));
    }
    let budget = epsilon * epsilon;
    let increment = constant * (n as f64).powi(-3) * epsilon.powi(6);
    let steps_to_double = budget / increment;
    Ok(IterationLedger {
        n,
        epsilon,
        constant,
        budget,
        increment,
        steps_to_double,
        planned_steps,
        safety_margin: steps_to_double / planned_steps as f64,
        sufficient: steps_to_double >= planned_steps as f64,
    })
}

use super::step::{advance_mkdv, advance_system, Flow};
use crate::error::{Error, Result};
use crate::spectral::{Field, FieldPair, SpectralGrid};

/// States the integrator can advance: a single field (mKdV) or a pair
/// (coupled system).
pub trait FlowState: Clone + Send + Sync + Sized {
    /// Either `"mkdv"` or `"system"`.
    const EQUATION: &'static str;

    fn grid(&self) -> &SpectralGrid;
    fn components(&self) -> Vec<&Field>;
    fn from_components(fields: Vec<Field>) -> Result<Self>;
    /// Signed step; `time` is only used to label failures.
    fn advance(&self, dt: f64, time: f64, flow: Flow) -> Result<Self>;
}

impl FlowState for Field {
    const EQUATION: &'static str = "mkdv";

    fn grid(&self) -> &SpectralGrid {
        Field::grid(self)
    }

    fn components(&self) -> Vec<&Field> {
        vec![self]
    }

    fn from_components(mut fields: Vec<Field>) -> Result<Self> {
        if fields.len() != 1 {
            return Err(Error::LengthMismatch { expected: 1, got: fields.len() });
        }
        Ok(fields.remove(0))
    }

    fn advance(&self, dt: f64, time: f64, flow: Flow) -> Result<Self> {
        advance_mkdv(self, dt, time, flow)
    }
}

impl FlowState for FieldPair {
    const EQUATION: &'static str = "system";

    fn grid(&self) -> &SpectralGrid {
        FieldPair::grid(self)
    }

    fn components(&self) -> Vec<&Field> {
        vec![&self.u, &self.v]
    }

    fn from_components(fields: Vec<Field>) -> Result<Self> {
        match <[Field; 2]>::try_from(fields) {
            Ok([u, v]) => FieldPair::new(u, v),
            Err(f) => Err(Error::LengthMismatch { expected: 2, got: f.len() }),
        }
    }

    fn advance(&self, dt: f64, time: f64, flow: Flow) -> Result<Self> {
        advance_system(self, dt, time, flow)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub dt: f64,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory has at least one snapshot")
    }
}

/// Number of steps `t_end / dt`, which must be an integer to within 1e-9.
pub fn step_count(t_end: f64, dt: f64) -> Result<u64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be nonnegative, got {t_end}")));
    }
    let ratio = t_end / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end = {t_end} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(n as u64)
}

/// Advance `n` signed steps without recording snapshots.
pub fn advance_steps<S: FlowState>(state: &S, dt: f64, n: u64, flow: Flow) -> Result<S> {
    let mut s = state.clone();
    for i in 1..=n {
        s = s.advance(dt, i as f64 * dt, flow)?;
    }
    Ok(s)
}

/// Step from 0 to `t_end`, recording step 0, every `snapshot_every`-th step
/// and the final step.
pub fn evolve_with<S: FlowState>(
    state: &S,
    t_end: f64,
    dt: f64,
    snapshot_every: u64,
    flow: Flow,
) -> Result<Trajectory<S>> {
    if snapshot_every == 0 {
        return Err(Error::InvalidArgument("snapshot_every must be at least 1".into()));
    }
    let n = step_count(t_end, dt)?;
    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    let mut s = state.clone();
    for i in 1..=n {
        let t = i as f64 * dt;
        s = s.advance(dt, t, flow)?;
        if i % snapshot_every == 0 || i == n {
            times.push(t);
            states.push(s.clone());
        }
    }
    Ok(Trajectory { times, states, dt })
}

pub fn evolve<S: FlowState>(state: &S, t_end: f64, dt: f64, snapshot_every: u64) -> Result<Trajectory<S>> {
    evolve_with(state, t_end, dt, snapshot_every, Flow::Nonlinear)
}

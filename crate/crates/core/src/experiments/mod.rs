//! Drift sweeps, rescaling checks and the iteration planner.

mod drift;
mod plan;
mod rescaling;

pub use drift::{
    drift_rows, drift_sweep, log_log_slope, DriftRow, DriftState, DriftSweep, SweepSettings, DEFAULT_T_RUN,
    MAX_SWEEP_POINTS,
};
pub use plan::{gwp_plan, iteration_ledger, GwpPlan, IterationLedger, DEFAULT_EPSILON, DEFAULT_THETA, MAX_CUTOFF};
pub use rescaling::{rescaled_norm_check, RescaleRow, RescaleTable};

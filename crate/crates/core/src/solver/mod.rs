//! Time integration of the mKdV equation and the coupled system, exact
//! travelling waves, the scaling symmetry and conserved-quantity diagnostics.

mod evolve;
mod export;
mod invariants;
mod soliton;
mod step;

pub use evolve::{advance_steps, evolve, evolve_with, step_count, FlowState, Trajectory};
pub use export::{
    content_hash, load_trajectory, parse_manifest, write_trajectory, GridSpec, SnapshotEntry,
    TrajectoryManifest,
};
pub use invariants::{
    energy, i1, i2, invariants, l4_power, mass, relative_drift, InvariantReport, ENERGY_ALPHA,
    ENERGY_ALPHA_PRINTED,
};
pub use soliton::{rescale, soliton, soliton_at, soliton_profile, TAIL_TOLERANCE};
pub use step::{default_dt, step_mkdv, step_system, Flow, BLOWUP_THRESHOLD};

//! Numerical checks of the identities, bounds and energy algebra.

mod bounds;
mod cancellation;
mod dmvt;
mod identity;
mod plancherel;
mod report;
mod resonance;

pub use bounds::{
    bound_m4, bound_m6, m4_bound_ratio, m6_bound_ratio, BoundReport, Histogram, Stratum, StratumSummary, BLOCK_SIZE,
    HISTOGRAM_BINS, MAGNITUDE_CAP, MIN_SAMPLES,
};
pub use cancellation::{
    calibrate, e2_derivative_match, energy_rates, quartic_cancellation, Calibration, DerivativeMatch, EnergyRates,
    ModifiedEnergyState, MAX_CANCELLATION_DT, MAX_POINTS_SEXTIC, RATE_FLOOR,
};
pub use dmvt::{check_dmvt, dmvt_scan, DmvtScan, DMVT_CONSTANT, SCAN_POINTS};
pub use identity::{check_cubic_identity, identity_sweep, IdentitySweep};
pub use plancherel::{plancherel_oracle, random_band_limited};
pub use report::{CheckReport, VerificationSummary};
pub use resonance::{extrapolated_limit, resonance_check, ResonanceCheck, OFFSETS};

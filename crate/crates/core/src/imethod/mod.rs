//! Smoothing multiplier, multilinear functionals and modified energies.

mod constants;
mod energy;
mod lambda;
mod multiplier;
mod profile;

pub use constants::ConstantsTable;
pub use energy::{
    apply_i, e1, e1_system, e1_with, e2, e2_system, quadratic_part, quadratic_part_system, quartic_part,
    quartic_part_system, sextic_functional, sextic_functional_system, sextic_rate, sextic_rate_system,
    sextic_rate_system_printed, CROSS_CHECK_TOLERANCE,
};
pub use lambda::{lambda_n, lambda_sum, LambdaSum, LatticeM4, LatticeM6, Multiplier, Unit, IMAGINARY_TOLERANCE, MAX_TUPLES};
pub use multiplier::{
    m4, m4_raw, m4_system, m6, m6_system, resonant_limit, FrequencyTuple, LatticeTable, RESONANCE_TOLERANCE,
};
pub use profile::{IMultiplierProfile, ProfileKind};

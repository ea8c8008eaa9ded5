//! Fourier representation of real periodic fields.

mod field;
mod format;
mod grid;

pub use field::{exact_integral_of_product, integral_of_product, padded_integral_of_product, Field, FieldPair};
pub(crate) use field::symmetrize;
pub use format::{read_field, write_field};
pub use grid::{SpectralGrid, MAX_POINTS};

pub use rustfft::num_complex::Complex64;

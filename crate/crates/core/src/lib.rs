// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Component loops over 0..3 read better as index loops.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod ops;

pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralContext, SpectralField, SpectralScalar};
pub use grid::GridSpec;
pub mod dynamics;
pub mod timestepping;
pub mod diagnostics;
pub mod experiments;
pub mod oracle;
pub mod io;

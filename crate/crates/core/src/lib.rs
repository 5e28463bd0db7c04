//! Numerical kernel for the double-elliptic (Dell) integrable many-body
//! system: elliptic special functions, intertwining and Lax matrices,
//! determinant representations of the generating function of commuting
//! Hamiltonians, the p = 0 spectrum on symmetric polynomials, and the
//! classical Manakov triple with its conservation laws.

#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod elliptic;
pub mod error;
pub mod intertwiner;
pub mod lax;
pub mod linalg;
pub mod quantumops;
pub mod sampling;
pub mod spectrum;

pub use elliptic::{Modulus, SeriesControl};
pub use error::{KernelError, Result};
pub use intertwiner::{Positions, XiVariant};
pub use lax::{ModelParams, PhaseState};
pub use linalg::ComplexMatrix;
pub use spectrum::Partition;

pub type C64 = num_complex::Complex64;

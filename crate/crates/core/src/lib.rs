//! Classical simulation of two hidden-subgroup algorithms: Simon's algorithm
//! over `Z2^n`, read as a Clebsch-Gordan sieve, and an efficient algorithm
//! for a hidden involution in `D4^n` built from Clebsch-Gordan cascades and
//! phase doubling.
//!
//! Quantum states are tracked symbolically as two-term superpositions; the
//! [`kernel::dense`] module provides explicit state vectors for `n ≤ 2` to
//! check that model.

pub mod algorithms;
pub mod error;
pub mod gf2;
pub mod group;
pub mod kernel;
pub mod rep;

pub use algorithms::{
    solve_hidden_involution, simon_z2n, RecoveryResult, SimonResult, SolverConfig, StageAccounting, StageReport,
};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector, RowReduction};
pub use group::{D4Element, D4nElement, InvolutionLabel, Z2Vector, Z4Vector};
pub use kernel::{HiddenOracle, SimonOracle};

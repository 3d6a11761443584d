//! Algorithms that see only query answers and visible measurement data.

mod involution;
mod simon;

pub use involution::{
    solve_hidden_involution, stage_a_determine_t, stage_b_parity, stage_c_full_l, RecoveryResult, SolverConfig,
    StageAccounting, StageReport,
};
pub use simon::{simon_finish, simon_z2n, SimonResult};

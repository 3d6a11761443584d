//! Oracles and quantum-state simulation.
//!
//! Everything that can see a planted label lives here. Items outside this
//! module only get query answers, visible measurement data and counters.

pub mod coset;
pub mod dense;
pub mod oracle;

pub use coset::{
    analyze_flips, cg_cascade, collapse_and_recombine, hadamard_measure, phase_double_round, psi_pm_measure,
    sample_coset_state, sample_restricted_coset_state, simon_sample, CascadeRecord, CosetSample, DoublingStats,
    FlipAnalysis, PhaseCoefficients, PhaseDoubler, RoundOutcome, TwoTermState,
};
pub use dense::{cross_check, cross_check_oracle, dense_standard_method, CrossCheckReport, DenseOutcomeTable};
pub use oracle::{
    ancilla_for_even_class, ancilla_for_odd_class, extended_oracle, AncillaFunction, CosetTag, HiddenOracle,
    HiddenStructure, SimonOracle,
};

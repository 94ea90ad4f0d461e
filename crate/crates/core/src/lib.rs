//! 1-D pilot-wave dynamics of a particle between impenetrable walls.
//!
//! The crate covers the full chain from analytic square-well states to
//! statistical checks: eigenstates and superpositions ([`well`]), the
//! quantum potential, guidance velocity, and energy partition ([`pilot`]),
//! Crank–Nicolson time evolution ([`evolve`]), Bohmian trajectory
//! ensembles with Born-rule sampling and equivariance testing
//! ([`traject`]), and MeV·fm scale estimates for confined quarks
//! ([`units`]).

pub mod error;
pub mod evolve;
pub mod pilot;
pub mod traject;
pub mod units;
pub mod well;

pub use error::{Error, Result};
pub use evolve::{beat_period, crank_nicolson_step, evolve, EvolutionPlan, FrameSeries, Propagator};
pub use pilot::{
    energy_partition, guidance_velocity, polar_decompose, quantum_potential, EnergyPartition,
    PolarField, QuantumPotentialField, VelocityField,
};
pub use traject::{
    equivariance_test, integrate_trajectory, integrate_velocity_field, run_ensemble,
    run_ensemble_recorded,
    sample_initial_positions, Ensemble, KSResult, TabulatedFlow, Trajectory, VelocitySampler,
};
pub use units::{momentum_for_confinement, quark_report, relativistic_beta, QuarkReport, HBAR_C};
pub use well::{
    eigenenergy, eigenstate, paper_mode_to_standard, superpose, Grid1D, WaveFunction, WellSpec,
};

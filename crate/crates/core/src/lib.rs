//! Tunneling-optimal time-tables for adiabatic paths under dephasing.
//!
//! A path of Hamiltonians `H(q)`, `q ∈ [0, 1]`, is traversed on slow time
//! `s ∈ [0, 1]` by a monotone schedule `q(s)` while the state obeys
//! `ε dρ/ds = L_{q(s)}(ρ)` with a dephasing generator `L`. The crate provides
//!
//! - spectral frames and projection derivatives ([`spectral`]),
//! - paths and schedules ([`paths`]),
//! - dephasing generators and an exponential integrator ([`lindblad`]),
//! - the first-order tunneling functional and its minimizer ([`variational`]),
//! - zero-tunneling piecewise controls for unitary 2-level paths ([`zero_tunneling`]),
//! - the adiabatic Grover search case study ([`grover`]).
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.

pub mod error;
pub mod grover;
pub mod interp;
pub mod linalg;
pub mod lindblad;
pub mod paths;
pub mod quadrature;
pub mod scalar;
pub mod spectral;
pub mod variational;
pub mod zero_tunneling;

pub use error::{Error, Result};
pub use grover::{grover_bloch_speed, grover_gap, grover_path, grover_tau, scaling_experiment, GammaRule};
pub use lindblad::{
    adjoint_apply, dephasing_generator, evolve, general_dephasing_generator, lindblad_generator, witness_x,
    DephasingModel, DensityMatrix, EvolveConfig,
};
pub use paths::{bloch_path, linear_path, quarter_circle, schedule_from_grid, uniform_schedule, HamiltonianPath, PathKind};
pub use scalar::{CMatrix, Cx, Real};
pub use spectral::{spectral_frame, HermitianOperator, SpectralFrame};
pub use variational::{
    mass, mass_two_level, measured_tunneling, predicted_tunneling, tau_and_schedule, MassProfile, TunnelingReport,
};
pub use zero_tunneling::{construct, construct_with_offset, verify, PiecewiseControl};

pub type Matrix = CMatrix<f64>;
pub type Operator = spectral::HermitianOperator<f64>;
pub type Frame = spectral::SpectralFrame<f64>;
pub type Bloch = paths::BlochPath<f64>;
pub type Linear = paths::LinearPath<f64>;
pub type Custom = paths::CustomPath<f64>;
pub type Schedule = paths::Schedule<f64>;
pub type Density = lindblad::DensityMatrix<f64>;
pub type Dephasing = lindblad::DephasingModel<f64>;
pub type Generator = lindblad::Superoperator<f64>;
pub type Trajectory = lindblad::Trajectory<f64>;
pub type Profile = variational::MassProfile<f64>;
pub type Optimal = variational::OptimalSchedule<f64>;
pub type Report = variational::TunnelingReport<f64>;
pub type Control = zero_tunneling::PiecewiseControl<f64>;
pub type Scaling = grover::ScalingTable<f64>;

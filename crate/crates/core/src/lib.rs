//! Adaptive Galerkin subspaces whose basis functions are trained shallow
//! neural networks.
//!
//! Each iteration trains a single-hidden-layer network to maximize the
//! normalized weak residual of the current approximation, normalizes it in
//! the energy norm and adds it to the Galerkin basis. The maximized residual
//! doubles as an a-posteriori estimate of the energy error, which drives the
//! stopping test.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. IO, configuration files and the command-line front end live in
//! the companion `galerkin-nn-cli` crate.
#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

mod math;

pub mod catalog;
pub mod driver;
pub mod error;
pub mod features;
pub mod forms;
pub mod galerkin;
pub mod linalg;
pub mod network;
pub mod quadrature;
pub mod training;

pub use driver::{
    evaluate_solution, run_adaptive, stagnation_study, Clock, IterationRecord, NoClock, RunOptions,
    Schedules, SolverState, TerminationReason,
};
pub use error::{Error, Result};
pub use forms::{EnergyValue, ExactSolution, Jet, SampleBundle, VariationalProblem};
pub use network::{Activation, ActivationSpec, FieldSample, InitStrategy, ShallowNetwork};
pub use quadrature::{DomainTag, QuadratureRule};
pub use training::{augment_basis, eta, eta_gradient, AdamState, TrainConfig, TrainRecord};

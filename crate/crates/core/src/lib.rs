//! Spectral variational multiscale (VMS) solvers for 1D transient
//! advection-diffusion problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh_fem`]: meshes, P1 assembly, Dirichlet handling and the tridiagonal solver.
//! - [`spectral_kernels`]: element eigenpairs, closed-form mode integrals and the
//!   truncated spectral series that define the sub-grid closure.
//! - [`vms_full`]: the full spectral VMS stepper that carries sub-grid mode amplitudes.
//! - [`vms_feasible`]: the two-level feasible stepper assembled from kernel providers.
//! - [`offline_table`]: offline (P, S) kernel tables, persistence and online interpolation.
//! - [`baselines`]: Galerkin and the τ-stabilised steppers.
//! - [`analysis`]: error norms, reference solutions, presets and experiment drivers.
//! - [`cli`]: the command-line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod baselines;
pub mod cli;
mod error;
pub mod mesh_fem;
pub mod offline_table;
pub mod quadrature;
pub mod spectral_kernels;
pub mod vms_feasible;
pub mod vms_full;

pub use error::{Result, SvmsError};

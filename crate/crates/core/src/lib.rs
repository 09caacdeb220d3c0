//! Objectives, reformulations, projections and solvers for *sumscale*
//! problems: objectives whose parameters are only determined up to a scaling
//! constraint such as a fixed sum or a fixed sum of squares.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`problems`] defines the test objectives (products, multinomial
//!   negative log-likelihoods, Rayleigh quotients, Rosenbrock on the unit
//!   ball, a weighted sum of squares) together with the Moler test matrix.
//! * [`transforms`] turns constrained problems into unconstrained or
//!   box-bounded ones (leave-one-out, log parameters, spherical angles,
//!   masks) and compares solutions up to scale.
//! * [`projections`] holds the feasible-set projections used by the
//!   spectral projected gradient method.
//! * [`solvers`] contains the optimizers (SPG, BFGS variable metric,
//!   Polak-Ribiere conjugate gradient, Nelder-Mead), an equality-constrained
//!   QP solver, finite-difference gradients and KKT checks.
//! * [`oracle`] is a cyclic Jacobi eigensolver used to verify eigenvalue
//!   results independently of the optimizers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod matrix;
pub mod oracle;
pub mod problems;
pub mod projections;
pub mod solvers;
pub mod transforms;
pub(crate) mod vecops;

pub use error::{Error, Result};
pub use matrix::SymmetricMatrix;
pub use problems::Problem;
pub use projections::Projection;
pub use solvers::{ConvergenceCode, GradientMode, Method, SolveReport, SolverConfig};
pub use transforms::{CanonicalMode, MaskSpec, Reformulation};

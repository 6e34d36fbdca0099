//! Riemannian conjugate gradient with a scaled Dai-Yuan coefficient.
//!
//! The crate is organised bottom-up:
//!
//! * [`manifold`]: sphere, Stiefel and Euclidean manifolds with their
//!   retractions and differentiated retractions
//! * [`transport`]: differentiated-retraction, scaled and capped transports
//! * [`linesearch`]: weak and strong Wolfe searches along retraction curves
//! * [`cg`]: the solvers, their per-iteration records and identity checks
//! * [`problems`]: benchmark objectives and independent oracles
//! * [`batch`]: multi-seed solves and checks, parallel behind the
//!   `parallel` feature

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod cg;
pub mod error;
pub mod linalg;
pub mod linesearch;
pub mod manifold;
pub mod problems;
pub mod transport;

pub use cg::{solve, IterateRecord, Method, SolveOptions, SolveResult, Termination, WarmStart};
pub use error::{Error, Result};
pub use linesearch::WolfeParams;
pub use manifold::{Manifold, ManifoldKind, ManifoldPoint, TangentVector};
pub use problems::{Problem, SymmetricMatrix};

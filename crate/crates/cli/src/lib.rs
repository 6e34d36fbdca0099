//! Command-line harness for the `rcg` solvers.
//!
//! `rcg run` solves one seeded benchmark and writes its trace as CSV,
//! `rcg gradcheck` compares analytic and finite-difference gradients, and
//! `rcg compare` runs the scaled Dai-Yuan, Fletcher-Reeves and steepest
//! descent solvers from the same start.

pub mod commands;
pub mod config;
pub mod trace_csv;

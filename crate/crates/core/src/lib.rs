//! One-dimensional Helmholtz solvers built on the Bernoulli phase-fitted
//! (BPF) scheme, alongside classical and dispersion-corrected finite
//! differences, with tooling to check their analysis numerically.
//!
//! The model problem is `u'' + k²u = f` on `(0, L)` with impedance data
//! `u'(0) - iku(0) = g0` and `u'(L) + iku(L) = gL`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analysis;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod reference;
pub mod schemes;
pub mod trisolve;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use grid::{make_grid, restrict, sample, GridFunction, UniformGrid};
pub use numerics::{bernoulli, shifted_wavenumber, stability_constant_a0, theta, WaveParameters};
pub use reference::{Benchmark, ExactSolution, FineReferenceCache};
pub use schemes::{assemble, solve_scheme, HelmholtzProblem, SchemeKind, SchemeSolution};
pub use trisolve::{solve_tridiagonal, TridiagonalSystem};

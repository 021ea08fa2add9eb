//! Symmetric C⁰ interior penalty (C0IP) discretisation of the biharmonic
//! equation Δ²u = f with clamped boundary conditions, using quadratic
//! Lagrange elements and an automatic, edge-local penalty parameter.
//!
//! The crate covers the whole pipeline:
//!
//! - [`mesh`]: triangulations, edge topology, geometry and newest-vertex bisection;
//! - [`basis`]: P2 shape-function derivatives via barycentric coordinates;
//! - [`penalty`]: the edge-local penalty σ for triangles, variable degrees and rectangles;
//! - [`assembly`]: local matrices, global assembly and the restricted solve;
//! - [`analysis`]: the discrete stability eigenvalue and 1-norm condition estimates;
//! - [`estimator`]: the residual estimator and Dörfler marking;
//! - [`benchmarks`]: benchmark domains, exact singular solutions and energy errors;
//! - [`afem`]: the adaptive and uniform refinement loops;
//! - [`cli`]: the command-line front end.

pub mod afem;
pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod benchmarks;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod jet;
pub mod linsolve;
pub mod mesh;
pub mod penalty;
pub mod quadrature;
pub mod sparse;

pub use error::{Error, Result};

/// A point or vector in the plane.
pub type Point = [f64; 2];

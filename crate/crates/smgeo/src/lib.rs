//! Numerical geometry of singular minimal (α-minimal) hypersurfaces.
//!
//! A hypersurface immersed in the upper halfspace `g(q, u) > 0` of a fixed
//! unit direction `u` is *singular minimal* when its mean curvature satisfies
//! `n·H = α·g(ξ, u) / g(σ, u)`, the Euler–Lagrange equation of the potential
//! α-energy `∫ g(q, u)^α dM`. This crate provides the pieces needed to work
//! with that equation at desk scale:
//!
//! - [`geometry`]: curvature machinery for graphs `x_{n+1} = f(x_1..x_n)`
//!   (unit normal, fundamental forms, shape operator, mean curvature) and the
//!   generalized cross product in ℝ^{n+1};
//! - [`catenary`]: the one-dimensional α-catenary equation
//!   `f″/(1+f′²) = α/f`, solved by fixed-step RK4 and shooting;
//! - [`residuals`]: the singular-minimal residual `n·H − α·g(ξ,u)/g(σ,u)`
//!   for generic graphs, generalized cylinders, translation hypersurfaces,
//!   affine translation graphs, and generalized translation graphs;
//! - [`classify`]: numerical realization of the classification trichotomy
//!   (hyperplane / α-catenary cylinder / not singular minimal), plus a seeded
//!   falsification harness;
//! - [`minimize`]: a discrete potential α-energy over grid fields with
//!   Dirichlet boundary, its exact gradient, an Armijo-backtracking descent
//!   loop, and an Euler–Lagrange residual check for minimizers;
//! - [`specfile`] / [`fieldio`]: the JSON problem-spec schema and the CSV
//!   field format consumed by the `smgeo` command-line tool.
//!
//! All evaluators are pure functions and safe to call from multiple threads.

pub mod catenary;
pub mod classify;
pub mod error;
pub mod fieldio;
pub mod geometry;
pub mod linalg;
pub mod minimize;
pub mod residuals;
pub mod rng;
pub mod specfile;

pub use error::{Error, Result};

//! Numerics for the boundary-distance functional
//!
//! ```text
//! psi(xi) = integral over R^n \ Omega of |x - xi|^(-2n) dx
//! ```
//!
//! evaluated through its spherical reduction `psi = (1/n) * integral over S^(n-1) of rho(xi, w)^(-n)`,
//! where `rho` is the distance from `xi` to the boundary along `w`.
//!
//! * [`geometry`]: domains, ray exits, outward normals, complement intervals along rays.
//! * [`sphere_quadrature`]: rules on the unit sphere with deterministic reduction.
//! * [`functional`]: value, gradient and Hessian of `Phi(xi) = integral of f(rho)`.
//! * [`annulus_series`]: Gegenbauer series for concentric annuli and their critical radii.
//! * [`solver`]: damped Newton search for the unique minimizer on convex domains.
//! * [`oracle`]: brute-force Cartesian integration used to cross-check everything above.

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annulus_series;
mod error;
pub mod functional;
pub mod geometry;
pub mod oracle;
pub mod solver;
pub mod special;
pub mod sphere_quadrature;
pub(crate) mod vecops;

pub use error::{Error, Result};
pub use functional::{EvalResult, FunctionalSpec};
pub use geometry::{ComplementIntervals, Domain, DomainMetrics, RayExit, UnitDirection};
pub use solver::{CriticalPointReport, SolverConfig, Termination};
pub use sphere_quadrature::{RuleKind, SphericalRule};

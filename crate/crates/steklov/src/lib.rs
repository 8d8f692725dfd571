//! Spectral toolkit for the nonlinear Steklov boundary problem on the unit
//! ball `B^n` (`n >= 3`):
//!
//! ```text
//! Delta u = 0            in B^n,
//! du/dnu + a u = u^q     on S^{n-1},        a > 0,  1 < q <= n / (n - 2),
//! ```
//!
//! restricted to positive axisymmetric solutions `u = u(|x|, x_n/|x|)`.
//!
//! The crate provides, in dependency order:
//!
//! * [`basis`] — Gegenbauer spectral basis, Gauss quadrature for the surface
//!   measure, nodal analysis / coefficient synthesis;
//! * [`ball`] — harmonic extension, Dirichlet-to-Neumann map, energies,
//!   norms, the sharp trace inequality gap and the Rayleigh-type quotient;
//! * [`solver`] — damped Newton on the boundary equation, quotient
//!   minimization, bifurcation detection and branch continuation;
//! * [`identities`] — constant solutions, the closed-form critical family,
//!   the Pohozaev/Kazdan–Warner flux identity, mean curvature of conformal
//!   graphs, and a randomized trace-inequality verifier;
//! * [`halfspace`] — the Möbius map to the upper half-space, the transformed
//!   boundary equation, far-field asymptotics, and reflection probes;
//! * [`cli`] — reproducible experiment commands with manifests.
//!
//! Everything numeric is deterministic: randomness flows from explicit
//! seeds through `ChaCha8Rng`, and quadrature rules are built by the
//! Golub–Welsch eigenvalue method with exactly symmetrized nodes.

pub mod ball;
pub mod basis;
pub mod cli;
pub mod error;
pub mod halfspace;
pub mod identities;
pub mod solver;
#[cfg(test)]
pub(crate) mod testutil;

pub use basis::{
    analyze, basis_eval, basis_eval_all, basis_eval_all_with_derivative, basis_norms, build_rule,
    jacobi_moment, synthesize, synthesize_derivative, BoundaryFunction, QuadratureRule,
    SphereGeometry,
};
pub use error::{Error, Result};

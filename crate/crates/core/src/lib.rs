//! Computational harmonic analysis on Grushin spaces.
//!
//! The Grushin operator Δ_α = Δ_x + |x|^{2α} Δ_y on R^{n+m} degenerates on the
//! set {x = 0} but is homogeneous of degree two under the anisotropic dilations
//! δ_λ(x, y) = (λx, λ^{α+1}y). This crate builds the associated Grushin-harmonic
//! polynomial spaces exactly (arbitrary-precision rational arithmetic), evaluates
//! the closed-form norms, kernels and projector coefficients attached to them,
//! and provides numerical verification suites for the weighted estimates and
//! Carleman exponent tables that this structure supports.
//!
//! Module layout:
//! - [`ratpoly`]: exact multivariate rational polynomials, δ-grading, the Grushin
//!   and Euler operators, exact nullspaces and Gram–Schmidt.
//! - [`specfun`]: Jacobi/Gegenbauer evaluation and closed-form norm integrals.
//! - [`quadrature`]: Gauss–Jacobi rules, exact sphere monomial integrals, and the
//!   inner product on the gauge sphere Ω.
//! - [`harmonics`]: the Grushin-harmonic basis, dimensions, reproducing kernels,
//!   the addition formula and the projector P_k.
//! - [`fischer`]: the sl₂ shell structure, Proj coefficients, Fischer harness.
//! - [`estimates`]: Bernstein-type, connection-coefficient and weighted-projector
//!   bound checks.
//! - [`carleman`]: Carleman exponent tables, the spectral symbol, and a two-sided
//!   desk-scale evaluation of the Carleman inequality.

pub mod config;
pub mod ratpoly;
pub mod specfun;
pub mod quadrature;
pub mod harmonics;
pub mod fischer;
pub mod estimates;
pub mod carleman;

pub use config::GrushinConfig;
pub use ratpoly::{Monomial, Rational, RationalPolynomial};

//! Hermite–Padé laboratory: exact and high-precision machinery for diagonal
//! Padé and type-I Hermite–Padé polynomials of algebraic functions
//! `f(z) = ∏ (z − a_j)^{α_j}` with `Σ α_j = 0`, together with the geometry
//! (Stahl compact, Chebotarev point, equilibrium measure) and the asymptotic
//! objects (recovered differential equations, characteristic cubic, LG
//! approximations) that govern their zero distributions.
//!
//! The exact pipeline runs over `ℚ(√d)` with `d` a negative square-free
//! integer, so branch points like cube roots of unity stay exact end to end.
//! Floating work uses MPFR-backed complex numbers with explicit precision
//! tags ([`scalar::BigComplex`]).

pub mod approx;
pub mod asym;
pub mod geometry;
pub mod linalg;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod recurrence;
pub mod scalar;
pub mod series;
pub mod zeros;

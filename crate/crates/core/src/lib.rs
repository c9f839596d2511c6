//! Equivariant biharmonic maps between rotationally symmetric model spaces.
//!
//! A map `φ(r, θ) = (ρ(r), φ(θ))` between warped products
//! `dr² + σ(r)² g_S` and `dρ² + λ(ρ)² g_S`, driven by an eigenmap with energy
//! density `2k`, has tension `τ = F ∂_ρ` with
//!
//! ```text
//! F = ρ'' + (m−1)(σ'/σ)ρ' − 2k λλ'(ρ)/σ²
//! ```
//!
//! and is biharmonic iff `F'' + (m−1)(σ'/σ)F' − 2k (λλ')'(ρ)/σ² F = 0`.
//!
//! The crate evaluates these residuals ([`tension`]), provides the closed-form
//! Euclidean families and the conformal classification maps ([`closed_forms`]),
//! integrates and shoots the fourth-order system ([`solver`]), and evaluates the
//! second variation of the bienergy together with a discretised radial index
//! ([`variation`]). [`cli`] drives everything from JSON configs.

pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod jet;
pub mod profiles;
pub mod solver;
pub mod tension;
pub mod variation;

pub use error::{Error, Result};

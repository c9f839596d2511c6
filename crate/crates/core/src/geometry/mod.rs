//! Warped-product model spaces `[0, b) × S^{m-1}` with metric `dr² + f(r)² g_S`,
//! their radial curvature quantities, and unit sphere volumes.

mod quadrature;
mod warping;

pub use quadrature::{adaptive_quadrature, integrate, integrate_adaptive, quadrature, try_quadrature, MAX_PANELS};
pub use warping::{CustomWarping, WarpingFunction, WarpingKind};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A real interval whose ends may be open or closed; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub const fn half_open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: true }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    /// `[0, ∞)`
    pub const fn nonnegative() -> Self {
        Self::half_open(0.0, f64::INFINITY)
    }

    /// `(0, ∞)`
    pub const fn positive() -> Self {
        Self::open(0.0, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let lo_ok = if self.lo_open { x > self.lo } else { x >= self.lo };
        let hi_ok = if self.hi_open { x < self.hi } else { x <= self.hi };
        lo_ok && hi_ok
    }

    /// Strictly inside, away from both ends.
    pub fn contains_interior(&self, x: f64) -> bool {
        x.is_finite() && x > self.lo && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        let (hi, hi_open) = if self.hi < other.hi {
            (self.hi, self.hi_open)
        } else if other.hi < self.hi {
            (other.hi, other.hi_open)
        } else {
            (self.hi, self.hi_open || other.hi_open)
        };
        Interval { lo, hi, lo_open, hi_open }
    }

    pub(crate) fn check(&self, what: &'static str, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain { what, value: x, domain: self.to_string() })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        let close = if self.hi_open { ')' } else { ']' };
        let hi = if self.hi.is_infinite() { "inf".to_string() } else { fmt_num(self.hi) };
        write!(f, "{open}{},{hi}{close}", fmt_num(self.lo))
    }
}

fn fmt_num(x: f64) -> String {
    if x == std::f64::consts::PI {
        "pi".to_string()
    } else {
        format!("{x}")
    }
}

/// `M^m_f(o)`: dimension `m ≥ 2` and warping `f`.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    dimension: usize,
    warping: WarpingFunction,
}

impl ModelSpace {
    pub fn new(dimension: usize, warping: WarpingFunction) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::UnsupportedDimension { got: dimension, expected: 2 });
        }
        Ok(ModelSpace { dimension, warping })
    }

    pub fn euclidean(dimension: usize) -> Result<Self> {
        Self::new(dimension, WarpingFunction::flat())
    }

    pub fn sphere(dimension: usize) -> Result<Self> {
        Self::new(dimension, WarpingFunction::spherical())
    }

    pub fn hyperbolic(dimension: usize) -> Result<Self> {
        Self::new(dimension, WarpingFunction::hyperbolic())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.warping
    }
}

/// `f^(order)(r)`.
pub fn warp_eval(w: &WarpingFunction, r: f64, order: usize) -> Result<f64> {
    w.eval(r, order)
}

/// Radial curvature `K(r) = -f''(r)/f(r)` from the Jacobi equation `f'' + K f = 0`.
pub fn radial_curvature(w: &WarpingFunction, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain { what: "radius", value: r, domain: "(0,b)".into() });
    }
    let f = w.eval(r, 0)?;
    if f.abs() <= SINGULAR_WARP {
        return Err(Error::Singularity { r, what: "warping function" });
    }
    Ok(-w.eval(r, 2)? / f)
}

/// Scalar curvature of a 4-dimensional model at radius `rho`:
/// `6/λ² − 6λλ''/λ² − 6λ'²/λ²`.
pub fn target_scalar_curvature(target: &ModelSpace, rho: f64) -> Result<f64> {
    if target.dimension != 4 {
        return Err(Error::UnsupportedDimension { got: target.dimension, expected: 4 });
    }
    let w = &target.warping;
    let l0 = w.eval_target(rho, 0)?;
    if l0.abs() <= SINGULAR_WARP {
        return Err(Error::Singularity { r: rho, what: "target warping" });
    }
    let l1 = w.eval_target(rho, 1)?;
    let l2 = w.eval_target(rho, 2)?;
    let l0sq = l0 * l0;
    Ok(6.0 / l0sq - 6.0 * l0 * l2 / l0sq - 6.0 * l1 * l1 / l0sq)
}

/// `Vol(S^d) = 2π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_volume(d: usize) -> Result<f64> {
    if d < 1 {
        return Err(Error::Domain { what: "sphere dimension", value: d as f64, domain: "[1,inf)".into() });
    }
    let half = d + 1; // twice the Gamma argument
    let pi = std::f64::consts::PI;
    Ok(2.0 * pi.powf(half as f64 / 2.0) / gamma_half_integer(half))
}

/// `Γ(n/2)` for a positive integer `n`, by recursion from `Γ(1/2) = √π` and `Γ(1) = 1`.
fn gamma_half_integer(n: usize) -> f64 {
    let (mut x2, mut g) = if n % 2 == 0 { (2, 1.0) } else { (1, std::f64::consts::PI.sqrt()) };
    while x2 < n {
        g *= x2 as f64 / 2.0;
        x2 += 2;
    }
    g
}

/// Below this magnitude a warping value counts as a pole.
pub(crate) const SINGULAR_WARP: f64 = 1e-14;

//! Radial profiles `ρ(r)`, the eigenmap catalog, and the two map types built on
//! them: equivariant maps `(r, θ) ↦ (ρ(r), φ(θ))` and latitude maps
//! `θ ↦ (ρ₀, φ(θ))` from a round sphere.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Interval, ModelSpace};
use crate::solver::DenseProfile;

/// One term `c · r^p · (ln r)^j` of a closed-form profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: f64,
    pub exponent: f64,
    pub log_power: u32,
}

impl Term {
    pub fn power(coefficient: f64, exponent: f64) -> Self {
        Term { coefficient, exponent, log_power: 0 }
    }

    pub fn power_log(coefficient: f64, exponent: f64) -> Self {
        Term { coefficient, exponent, log_power: 1 }
    }

    fn eval(&self, r: f64, order: usize) -> f64 {
        eval_log_power(self.coefficient, self.exponent, self.log_power, r, order)
    }
}

fn pow(r: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        r.powi(p as i32)
    } else {
        r.powf(p)
    }
}

// d/dr c r^p ln^j r = c p r^{p-1} ln^j r + c j r^{p-1} ln^{j-1} r
fn eval_log_power(c: f64, p: f64, j: u32, r: f64, order: usize) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if order == 0 {
        let log = if j == 0 { 1.0 } else { r.ln().powi(j as i32) };
        return c * pow(r, p) * log;
    }
    let mut v = eval_log_power(c * p, p - 1.0, j, r, order - 1);
    if j > 0 {
        v += eval_log_power(c * j as f64, p - 1.0, j - 1, r, order - 1);
    }
    v
}

#[derive(Debug, Clone)]
enum Repr {
    Terms(Vec<Term>),
    Constant(f64),
    /// `2·arctan r`
    TwiceArctan,
    /// `2·artanh r` on `[0, 1)`
    TwiceArtanh,
    /// `(r−lo)²(hi−r)²·q(r)` on `[lo, hi]`, zero elsewhere; `q` in monomial coefficients.
    Bump {
        lo: f64,
        hi: f64,
        q: Vec<f64>,
    },
    /// `base + t·dir`
    Sum {
        base: Arc<RadialProfile>,
        dir: Arc<RadialProfile>,
        t: f64,
    },
    Numeric(Arc<DenseProfile>),
}

/// A scalar function of `r` with derivatives up to `max_order`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    repr: Repr,
    max_order: usize,
    domain: Interval,
}

/// Highest order supplied by closed-form profiles.
pub const CLOSED_FORM_ORDER: usize = 4;

impl RadialProfile {
    /// Sum of `c·r^p·(ln r)^j` terms on `(0, ∞)`.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyProfile);
        }
        Ok(RadialProfile { repr: Repr::Terms(terms), max_order: CLOSED_FORM_ORDER, domain: Interval::positive() })
    }

    pub fn constant(c: f64) -> Self {
        RadialProfile {
            repr: Repr::Constant(c),
            max_order: CLOSED_FORM_ORDER,
            domain: Interval::open(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `r ↦ 2 arctan r`, the radial part of inverse stereographic projection.
    pub fn twice_arctan() -> Self {
        RadialProfile { repr: Repr::TwiceArctan, max_order: CLOSED_FORM_ORDER, domain: Interval::nonnegative() }
    }

    /// `r ↦ 2 artanh r` on `[0, 1)`.
    pub fn twice_artanh() -> Self {
        RadialProfile { repr: Repr::TwiceArtanh, max_order: CLOSED_FORM_ORDER, domain: Interval::half_open(0.0, 1.0) }
    }

    /// `(r−lo)²(hi−r)²·q(r)` on `[lo, hi]` and zero outside; value and first
    /// derivative vanish at both ends. `q` holds monomial coefficients in `r`.
    pub fn bump(lo: f64, hi: f64, q: Vec<f64>) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("bump support [{lo}, {hi}] is empty")));
        }
        let q = if q.is_empty() { vec![1.0] } else { q };
        Ok(RadialProfile {
            repr: Repr::Bump { lo, hi, q },
            max_order: CLOSED_FORM_ORDER,
            domain: Interval::open(f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    pub(crate) fn numeric(dense: Arc<DenseProfile>, domain: Interval) -> Self {
        RadialProfile { repr: Repr::Numeric(dense), max_order: 2, domain }
    }

    /// Restricts the domain (e.g. to exclude a pole); the new domain must lie
    /// inside the old one.
    pub fn restricted(mut self, domain: Interval) -> Self {
        self.domain = self.domain.intersect(&domain);
        self
    }

    /// Caps the exposed derivative order (forces finite-difference paths downstream).
    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_order = self.max_order.min(order);
        self
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn terms(&self) -> Option<&[Term]> {
        match &self.repr {
            Repr::Terms(t) => Some(t),
            _ => None,
        }
    }

    /// Support of a bump profile.
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.repr {
            Repr::Bump { lo, hi, .. } => Some((*lo, *hi)),
            Repr::Constant(c) if *c == 0.0 => Some((0.0, 0.0)),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        match &self.repr {
            Repr::Numeric(_) => true,
            Repr::Sum { base, dir, .. } => base.is_numeric() || dir.is_numeric(),
            _ => false,
        }
    }

    /// `ρ^(order)(r)`.
    pub fn eval(&self, r: f64, order: usize) -> Result<f64> {
        if order > self.max_order {
            return Err(Error::UnsupportedOrder { order, max: self.max_order });
        }
        self.domain.check("profile radius", r)?;
        self.eval_inner(r, order)
    }

    fn eval_inner(&self, r: f64, order: usize) -> Result<f64> {
        Ok(match &self.repr {
            Repr::Terms(terms) => terms.iter().map(|t| t.eval(r, order)).sum(),
            Repr::Constant(c) => {
                if order == 0 {
                    *c
                } else {
                    0.0
                }
            }
            Repr::TwiceArctan => {
                let d = 1.0 + r * r;
                match order {
                    0 => 2.0 * r.atan(),
                    1 => 2.0 / d,
                    2 => -4.0 * r / (d * d),
                    3 => (12.0 * r * r - 4.0) / (d * d * d),
                    _ => 48.0 * r * (1.0 - r * r) / (d * d * d * d),
                }
            }
            Repr::TwiceArtanh => {
                let d = 1.0 - r * r;
                match order {
                    0 => 2.0 * r.atanh(),
                    1 => 2.0 / d,
                    2 => 4.0 * r / (d * d),
                    3 => (4.0 + 12.0 * r * r) / (d * d * d),
                    _ => 48.0 * r * (1.0 + r * r) / (d * d * d * d),
                }
            }
            Repr::Bump { lo, hi, q } => bump_eval(*lo, *hi, q, r, order),
            Repr::Sum { base, dir, t } => base.eval(r, order)? + t * dir.eval(r, order)?,
            Repr::Numeric(dense) => dense.eval(r, order)?,
        })
    }
}

fn bump_eval(lo: f64, hi: f64, q: &[f64], r: f64, order: usize) -> f64 {
    if r <= lo || r >= hi {
        return 0.0;
    }
    // u(s) = s²(w−s)² = w²s² − 2ws³ + s⁴, s = r − lo
    let s = r - lo;
    let w = hi - lo;
    let u = [
        s * s * (w - s) * (w - s),
        2.0 * w * w * s - 6.0 * w * s * s + 4.0 * s * s * s,
        2.0 * w * w - 12.0 * w * s + 12.0 * s * s,
        -12.0 * w + 24.0 * s,
        24.0,
    ];
    let qd = |k: usize| -> f64 {
        // k-th derivative of Σ q_i r^i by Horner on the differentiated coefficients
        let mut acc = 0.0;
        for i in (k..q.len()).rev() {
            let falling: f64 = (0..k).map(|j| (i - j) as f64).product();
            acc = acc * r + q[i] * falling;
        }
        acc
    };
    (0..=order).map(|j| binomial(order, j) * u[j] * qd(order - j)).sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Builds a closed-form profile from `(coefficient, exponent, log_flag)` triples;
/// a set flag means the term is `c·r^p·ln r`.
pub fn make_polynomial_profile(terms: &[(f64, f64, bool)]) -> Result<RadialProfile> {
    RadialProfile::from_terms(
        terms.iter().map(|&(c, p, log)| Term { coefficient: c, exponent: p, log_power: u32::from(log) }).collect(),
    )
}

pub fn profile_eval(p: &RadialProfile, r: f64, order: usize) -> Result<f64> {
    p.eval(r, order)
}

/// `r ↦ p(r) + t·v(r)` on the common domain, with the lower of the two orders.
pub fn perturb_profile(p: &RadialProfile, v: &RadialProfile, t: f64) -> RadialProfile {
    RadialProfile {
        max_order: p.max_order.min(v.max_order),
        domain: p.domain.intersect(&v.domain),
        repr: Repr::Sum { base: Arc::new(p.clone()), dir: Arc::new(v.clone()), t },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenmapKind {
    /// Identity of `S^d`.
    Identity,
    /// `z ↦ z^d` on `S¹`.
    Power,
    /// Hopf fibration `S³ → S²`.
    Hopf,
}

/// An eigenmap `S^{m-1} → S^{n-1}`, kept only through its energy density `2k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenmapDescriptor {
    pub name: String,
    pub kind: EigenmapKind,
    pub domain_sphere_dim: usize,
    pub target_sphere_dim: usize,
    /// `2k = |dφ|²`
    pub energy_density: f64,
}

impl EigenmapDescriptor {
    pub fn identity(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::Catalog(format!("identity({d})")));
        }
        Ok(EigenmapDescriptor {
            name: format!("identity({d})"),
            kind: EigenmapKind::Identity,
            domain_sphere_dim: d,
            target_sphere_dim: d,
            energy_density: d as f64,
        })
    }

    pub fn power(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::Catalog(format!("power({d})")));
        }
        Ok(EigenmapDescriptor {
            name: format!("power({d})"),
            kind: EigenmapKind::Power,
            domain_sphere_dim: 1,
            target_sphere_dim: 1,
            energy_density: (d * d) as f64,
        })
    }

    pub fn hopf() -> Self {
        EigenmapDescriptor {
            name: "hopf".into(),
            kind: EigenmapKind::Hopf,
            domain_sphere_dim: 3,
            target_sphere_dim: 2,
            energy_density: 8.0,
        }
    }

    /// True for the identity of `S^d` (the rotationally symmetric case).
    pub fn is_identity(&self) -> bool {
        matches!(self.kind, EigenmapKind::Identity)
            || (matches!(self.kind, EigenmapKind::Power) && self.energy_density == 1.0)
    }
}

/// Looks up `hopf`, `identity(d)` or `power(d)`.
pub fn eigenmap_catalog(name: &str) -> Result<EigenmapDescriptor> {
    let name = name.trim();
    if name == "hopf" {
        return Ok(EigenmapDescriptor::hopf());
    }
    let miss = || Error::Catalog(name.to_string());
    let (head, rest) = name.split_once('(').ok_or_else(miss)?;
    let arg = rest.strip_suffix(')').ok_or_else(miss)?;
    let d: usize = arg.trim().parse().map_err(|_| miss())?;
    match head.trim() {
        "identity" => EigenmapDescriptor::identity(d),
        "power" => EigenmapDescriptor::power(d),
        _ => Err(miss()),
    }
}

/// `φ(r, θ) = (ρ(r), φ(θ))` between model spaces.
#[derive(Debug, Clone)]
pub struct EquivariantMap {
    pub domain: ModelSpace,
    pub target: ModelSpace,
    pub eigenmap: EigenmapDescriptor,
    pub profile: RadialProfile,
}

impl EquivariantMap {
    pub fn new(
        domain: ModelSpace,
        target: ModelSpace,
        eigenmap: EigenmapDescriptor,
        profile: RadialProfile,
    ) -> Result<Self> {
        if eigenmap.domain_sphere_dim + 1 != domain.dimension() {
            return Err(Error::InvalidArgument(format!(
                "eigenmap {} acts on S^{} but the domain has dimension {}",
                eigenmap.name,
                eigenmap.domain_sphere_dim,
                domain.dimension()
            )));
        }
        if eigenmap.target_sphere_dim + 1 != target.dimension() {
            return Err(Error::InvalidArgument(format!(
                "eigenmap {} lands in S^{} but the target has dimension {}",
                eigenmap.name,
                eigenmap.target_sphere_dim,
                target.dimension()
            )));
        }
        Ok(EquivariantMap { domain, target, eigenmap, profile })
    }

    /// `m`
    pub fn m(&self) -> usize {
        self.domain.dimension()
    }

    /// `2k`
    pub fn energy_density(&self) -> f64 {
        self.eigenmap.energy_density
    }

    pub fn is_rotationally_symmetric(&self) -> bool {
        self.eigenmap.is_identity() && self.eigenmap.energy_density == (self.m() - 1) as f64
    }

    /// Same map with a different profile.
    pub fn with_profile(&self, profile: RadialProfile) -> Self {
        EquivariantMap { profile, ..self.clone() }
    }

    /// Checks that `ρ` stays inside the target warping domain on an `n`-point grid of `[a, b]`.
    pub fn check_range(&self, a: f64, b: f64, n: usize) -> Result<()> {
        let dom = self.target.warping().target_range();
        for i in 0..n.max(2) {
            let r = a + (b - a) * i as f64 / (n.max(2) - 1) as f64;
            let rho = self.profile.eval(r, 0)?;
            if !dom.contains(rho) {
                return Err(Error::Range { r, rho, domain: dom.to_string() });
            }
        }
        Ok(())
    }
}

/// `θ ↦ (ρ₀, φ(θ))` from the round unit sphere `S^d` into a model.
#[derive(Debug, Clone)]
pub struct LatitudeMap {
    pub domain_sphere_dim: usize,
    pub eigenmap: EigenmapDescriptor,
    pub rho0: f64,
    pub target: ModelSpace,
}

impl LatitudeMap {
    pub fn new(eigenmap: EigenmapDescriptor, rho0: f64, target: ModelSpace) -> Result<Self> {
        if eigenmap.target_sphere_dim + 1 != target.dimension() {
            return Err(Error::InvalidArgument(format!(
                "eigenmap {} lands in S^{} but the target has dimension {}",
                eigenmap.name,
                eigenmap.target_sphere_dim,
                target.dimension()
            )));
        }
        let dom = target.warping().domain();
        if !dom.contains_interior(rho0) {
            return Err(Error::Domain { what: "latitude rho0", value: rho0, domain: dom.to_string() });
        }
        Ok(LatitudeMap { domain_sphere_dim: eigenmap.domain_sphere_dim, eigenmap, rho0, target })
    }

    pub fn energy_density(&self) -> f64 {
        self.eigenmap.energy_density
    }
}

/// Either kind of map, for operations defined on both.
#[derive(Debug, Clone, Copy)]
pub enum MapRef<'a> {
    Equivariant(&'a EquivariantMap),
    Latitude(&'a LatitudeMap),
}

impl<'a> From<&'a EquivariantMap> for MapRef<'a> {
    fn from(m: &'a EquivariantMap) -> Self {
        MapRef::Equivariant(m)
    }
}

impl<'a> From<&'a LatitudeMap> for MapRef<'a> {
    fn from(m: &'a LatitudeMap) -> Self {
        MapRef::Latitude(m)
    }
}

impl fmt::Display for EigenmapDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (2k = {})", self.name, self.energy_density)
    }
}

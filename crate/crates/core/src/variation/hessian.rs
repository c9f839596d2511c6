//! Second variation of the bienergy into a space form of curvature `c`.
//!
//! For `V = v∂_ρ` along an equivariant biharmonic map the form reduces to
//!
//! ```text
//! Q(v) = Vol·∫ { (Lv)² − c·[T1 + T2 + T3 + T4] } σ^{m−1} dr
//! T1 = 2v²F²
//! T2 = −2v²·((ρ'F)' + (m−1)(σ'/σ)ρ'F)
//! T3 = −2vF·(ρ'v' + 2k·v·λλ'(ρ)/σ²)
//! T4 = 2vρ'·(vF)'
//! ```
//!
//! `Lv` is the radial Jacobi operator. The reduction uses `V ∥ τ` and the radial
//! forms of `div⟨dφ, τ⟩`, `Tr⟨dφ, ∇V⟩` and `⟨V, dφ(grad⟨V, τ⟩)⟩`.

use serde::Serialize;

use super::{bienergy_density, jacobi_of, latitude_tension, link_volume, VariationField};
use crate::error::{Error, Result};
use crate::geometry::{integrate, integrate_adaptive, sphere_volume};
use crate::profiles::{perturb_profile, EquivariantMap, LatitudeMap, RadialProfile};
use crate::tension::{check_interval, domain_warp, latitude_residuals, target_product, tension_jet, Tolerances};

const HESSIAN_TOL: f64 = 1e-12;

/// Fixed panel count per piece in [`hessian_fd_oracle`].
pub const ORACLE_PANELS: usize = 256;

const BIHARMONIC_PROBES: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct HessianReport {
    /// `terms[0] − c·(terms[1] + … + terms[4])`
    pub value: f64,
    /// `Vol·∫(Lv)²σ^{m−1}` followed by `Vol·∫Tᵢσ^{m−1}`, `i = 1..4`.
    pub terms: [f64; 5],
    pub curvature: f64,
    pub quadrature_panels: usize,
}

impl HessianReport {
    fn from_terms(terms: [f64; 5], c: f64, quadrature_panels: usize) -> Self {
        let value = terms[0] - c * (terms[1] + terms[2] + terms[3] + terms[4]);
        HessianReport { value, terms, curvature: c, quadrature_panels }
    }
}

pub(super) fn space_form_curvature(map: &EquivariantMap) -> Result<f64> {
    let w = map.target.warping();
    w.curvature_constant().ok_or_else(|| Error::UnsupportedTarget(format!("{} warping is not a space form", w.name())))
}

/// Checks the bitension on interior probe points of `[a, b]`.
pub(super) fn check_biharmonic(map: &EquivariantMap, a: f64, b: f64, tol: &Tolerances) -> Result<()> {
    let mut worst = 0.0f64;
    for i in 0..BIHARMONIC_PROBES {
        let r = a + (b - a) * (i as f64 + 0.5) / BIHARMONIC_PROBES as f64;
        worst = worst.max(crate::tension::bitension_residual(map, r)?.abs());
    }
    if worst > tol.tau_b {
        return Err(Error::Precondition(format!("map is not biharmonic on [{a}, {b}]: bitension {worst:e}")));
    }
    Ok(())
}

/// Coefficients of the bracket at `r`, shared with index assembly.
pub(super) struct Coefficients {
    pub weight: f64,
    pub f: f64,
    pub f1: f64,
    pub rho1: f64,
    /// `(ρ'F)' + (m−1)(σ'/σ)ρ'F`
    pub div: f64,
    /// `2k·λλ'(ρ)/σ²`
    pub pull: f64,
}

pub(super) fn coefficients(map: &EquivariantMap, r: f64) -> Result<Coefficients> {
    let [s0, s1, ..] = domain_warp(&map.domain, r)?;
    let p = &map.profile;
    let (rho, rho1, rho2) = (p.eval(r, 0)?, p.eval(r, 1)?, p.eval(r, 2)?);
    let [g, ..] = target_product(map, r, rho)?;
    let f = tension_jet(map, r)?;
    let m1 = (map.m() - 1) as f64;
    Ok(Coefficients {
        weight: s0.powi(map.m() as i32 - 1),
        f: f.v,
        f1: f.d1,
        rho1,
        div: rho2 * f.v + rho1 * f.d1 + m1 * s1 / s0 * rho1 * f.v,
        pull: map.energy_density() * g / (s0 * s0),
    })
}

/// The four bracketed integrands, polarised: `v = (v, v')`, `w = (w, w')`.
pub(super) fn bracket(k: &Coefficients, v: [f64; 2], w: [f64; 2]) -> [f64; 4] {
    let vw = v[0] * w[0];
    let sym = v[1] * w[0] + v[0] * w[1];
    [
        2.0 * vw * k.f * k.f,
        -2.0 * vw * k.div,
        -k.f * k.rho1 * sym - 2.0 * k.f * k.pull * vw,
        k.rho1 * k.f * sym + 2.0 * k.rho1 * k.f1 * vw,
    ]
}

/// `Q(v)` with its five contributions.
pub fn hessian_form(
    map: &EquivariantMap,
    v: &RadialProfile,
    a: f64,
    b: f64,
    tol: &Tolerances,
) -> Result<HessianReport> {
    let c = space_form_curvature(map)?;
    check_interval(map, a, b)?;
    VariationField::Radial(v.clone()).check_compact(a, b)?;
    check_biharmonic(map, a, b, tol)?;
    let (lo, hi) = match v.support() {
        Some((lo, hi)) => (lo.max(a), hi.min(b)),
        None => (a, b),
    };
    let vol = link_volume(map)?;
    if !(lo < hi) {
        return Ok(HessianReport::from_terms([0.0; 5], c, 0));
    }
    let (t, panels) = integrate_adaptive(
        |r| {
            let k = coefficients(map, r)?;
            let vv = [v.eval(r, 0)?, v.eval(r, 1)?, v.eval(r, 2)?];
            let lv = jacobi_of(map, r, vv)?;
            let br = bracket(&k, [vv[0], vv[1]], [vv[0], vv[1]]);
            Ok([lv * lv * k.weight, br[0] * k.weight, br[1] * k.weight, br[2] * k.weight, br[3] * k.weight])
        },
        lo,
        hi,
        HESSIAN_TOL,
    )?;
    Ok(HessianReport::from_terms(t.map(|x| vol * x), c, panels))
}

/// The same reduction along a latitude map for the constant field `v∂_ρ`,
/// integrated over the whole domain sphere (`σ ≡ 1`, `ρ' ≡ 0`).
pub fn latitude_hessian(map: &LatitudeMap, v: f64, tol: &Tolerances) -> Result<HessianReport> {
    let w = map.target.warping();
    let c = w
        .curvature_constant()
        .ok_or_else(|| Error::UnsupportedTarget(format!("{} warping is not a space form", w.name())))?;
    let res = latitude_residuals(map)?;
    if res.bitension.abs() > tol.tau_b {
        return Err(Error::Precondition(format!("latitude map is not biharmonic: bitension {:e}", res.bitension)));
    }
    let [g, g1, _] = w.product_derivatives(map.rho0)?;
    let two_k = map.energy_density();
    let f = latitude_tension(map)?;
    let lv = -two_k * g1 * v;
    let vol = sphere_volume(map.domain_sphere_dim)?;
    let terms = [lv * lv, 2.0 * v * v * f * f, 0.0, -2.0 * v * f * two_k * v * g, 0.0];
    Ok(HessianReport::from_terms(terms.map(|x| vol * x), c, 0))
}

fn fixed_bienergy(map: &EquivariantMap, pieces: &[(f64, f64)]) -> Result<f64> {
    let mut total = 0.0;
    for &(lo, hi) in pieces {
        if lo < hi {
            let [v] = integrate(|r| bienergy_density(map, r).map(|d| [d]), lo, hi, ORACLE_PANELS)?;
            total += v;
        }
    }
    Ok(0.5 * link_volume(map)? * total)
}

/// `(E₂(ρ+tv) − 2E₂(ρ) + E₂(ρ−tv))/t²` at `t` and `t/2`, combined by one
/// Richardson step. Quadrature is fixed (with breaks at the support of `v`) so
/// that the three energies share their rounding pattern.
pub fn hessian_fd_oracle(map: &EquivariantMap, v: &RadialProfile, a: f64, b: f64, t_step: f64) -> Result<f64> {
    if !(1e-4..=1e-2).contains(&t_step) {
        return Err(Error::Domain { what: "oracle step", value: t_step, domain: "[1e-4,1e-2]".into() });
    }
    space_form_curvature(map)?;
    check_interval(map, a, b)?;
    VariationField::Radial(v.clone()).check_compact(a, b)?;
    let pieces = match v.support() {
        Some((lo, hi)) => {
            let (lo, hi) = (lo.clamp(a, b), hi.clamp(a, b));
            vec![(a, lo), (lo, hi), (hi, b)]
        }
        None => vec![(a, b)],
    };
    let e0 = fixed_bienergy(map, &pieces)?;
    let second = |t: f64| -> Result<f64> {
        let plus = fixed_bienergy(&map.with_profile(perturb_profile(&map.profile, v, t)), &pieces)?;
        let minus = fixed_bienergy(&map.with_profile(perturb_profile(&map.profile, v, -t)), &pieces)?;
        Ok((plus - 2.0 * e0 + minus) / (t * t))
    };
    let coarse = second(t_step)?;
    let fine = second(0.5 * t_step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

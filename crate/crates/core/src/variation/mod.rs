//! Energies, the radial Jacobi operator and the second variation of the
//! bienergy, with a finite-difference oracle and a discretised radial index.

mod hessian;
mod index;
mod jacobi;

pub use hessian::{hessian_fd_oracle, hessian_form, latitude_hessian, HessianReport, ORACLE_PANELS};
pub use index::{stability_index, stability_index_with, IndexReport, INDEX_LABEL, MIN_INDEX_GRID};
pub use jacobi::{symmetric_eigenvalues, MAX_SWEEPS};

use crate::error::{Error, Result};
use crate::geometry::{integrate_adaptive, sphere_volume};
use crate::profiles::{EquivariantMap, LatitudeMap, MapRef, RadialProfile};
use crate::tension::{check_interval, domain_warp, target_product, tension_f, tension_jet};

/// Relative tolerance for energy-type integrals.
const ENERGY_TOL: f64 = 1e-13;

/// Tolerance on `v`, `v'` at the ends of the interval of integration.
pub const SUPPORT_TOL: f64 = 1e-12;

/// A variation field `V = v(r)∂_ρ`, or a constant multiple of `∂_ρ` along a latitude map.
#[derive(Debug, Clone)]
pub enum VariationField {
    Radial(RadialProfile),
    Constant(f64),
}

impl VariationField {
    /// Fails unless `v` and `v'` vanish (to [`SUPPORT_TOL`]) at `a` and `b`.
    pub fn check_compact(&self, a: f64, b: f64) -> Result<()> {
        let VariationField::Radial(v) = self else {
            return Ok(());
        };
        for x in [a, b] {
            let (v0, v1) = (v.eval(x, 0)?, v.eval(x, 1)?);
            if v0.abs() > SUPPORT_TOL || v1.abs() > SUPPORT_TOL {
                return Err(Error::Precondition(format!(
                    "variation must vanish with its derivative at r = {x} (v = {v0:e}, v' = {v1:e})"
                )));
            }
        }
        Ok(())
    }
}

/// `Vol(S^{m−1})` for the domain of `map`.
pub(crate) fn link_volume(map: &EquivariantMap) -> Result<f64> {
    sphere_volume(map.m() - 1)
}

/// `(Lv)(r) = v'' + (m−1)(σ'/σ)v' − 2k(λλ')'(ρ)/σ²·v`, so that `J(v∂_ρ) = −(Lv)∂_ρ`.
pub fn radial_jacobi(map: &EquivariantMap, v: &RadialProfile, r: f64) -> Result<f64> {
    jacobi_of(map, r, [v.eval(r, 0)?, v.eval(r, 1)?, v.eval(r, 2)?])
}

pub(crate) fn jacobi_of(map: &EquivariantMap, r: f64, v: [f64; 3]) -> Result<f64> {
    let [s0, s1, ..] = domain_warp(&map.domain, r)?;
    let rho = map.profile.eval(r, 0)?;
    let [_, g1, _] = target_product(map, r, rho)?;
    let m1 = (map.m() - 1) as f64;
    Ok(v[2] + m1 * s1 / s0 * v[1] - map.energy_density() * g1 / (s0 * s0) * v[0])
}

/// `E(φ) = ½·Vol(S^{m−1})·∫ₐᵇ (ρ'² + 2k·λ²(ρ)/σ²)·σ^{m−1} dr`
pub fn energy(map: &EquivariantMap, a: f64, b: f64) -> Result<f64> {
    check_interval(map, a, b)?;
    let vol = link_volume(map)?;
    let m1 = (map.m() - 1) as i32;
    let two_k = map.energy_density();
    let lw = map.target.warping();
    let ([v], _) = integrate_adaptive(
        |r| {
            let [s0, ..] = domain_warp(&map.domain, r)?;
            let rho = map.profile.eval(r, 0)?;
            target_product(map, r, rho)?;
            let lam = lw.eval_target(rho, 0)?;
            let d = map.profile.eval(r, 1)?;
            Ok([(d * d + two_k * lam * lam / (s0 * s0)) * s0.powi(m1)])
        },
        a,
        b,
        ENERGY_TOL,
    )?;
    Ok(0.5 * vol * v)
}

/// `E₂(φ) = ½∫|τ(φ)|²`: `½·Vol(S^{m−1})·∫ₐᵇ F²σ^{m−1}` for equivariant maps and
/// `½·F²·Vol(S^d)` over the whole sphere for latitude maps (`a`, `b` ignored).
pub fn bienergy(map: MapRef<'_>, a: f64, b: f64) -> Result<f64> {
    match map {
        MapRef::Equivariant(map) => {
            check_interval(map, a, b)?;
            let ([v], _) = integrate_adaptive(|r| bienergy_density(map, r).map(|d| [d]), a, b, ENERGY_TOL)?;
            Ok(0.5 * link_volume(map)? * v)
        }
        MapRef::Latitude(map) => {
            let f = latitude_tension(map)?;
            Ok(0.5 * f * f * sphere_volume(map.domain_sphere_dim)?)
        }
    }
}

/// `F²σ^{m−1}` at `r`.
pub(crate) fn bienergy_density(map: &EquivariantMap, r: f64) -> Result<f64> {
    let [s0, ..] = domain_warp(&map.domain, r)?;
    let f = tension_f(map, r)?;
    Ok(f * f * s0.powi(map.m() as i32 - 1))
}

pub(crate) fn latitude_tension(map: &LatitudeMap) -> Result<f64> {
    Ok(crate::tension::latitude_residuals(map)?.tension)
}

/// `d²E₂/dt²` along `V = τ(φ)`: `−4c·|τ|⁴·Vol(S^d)`, for latitude maps into a
/// space form (their domain is a closed round sphere and `|τ|²` is constant).
pub fn tau_variation_value(map: MapRef<'_>) -> Result<f64> {
    match map {
        MapRef::Latitude(map) => {
            let c = map.target.warping().curvature_constant().ok_or_else(|| {
                Error::UnsupportedTarget(format!("{} warping has no constant curvature", map.target.warping().name()))
            })?;
            let f = latitude_tension(map)?;
            let tau2 = f * f;
            Ok(-4.0 * c * tau2 * tau2 * sphere_volume(map.domain_sphere_dim)?)
        }
        MapRef::Equivariant(_) => Err(Error::Precondition(
            "the V = tau variation needs a closed domain with constant |tau|^2; only latitude maps qualify".into(),
        )),
    }
}

/// `Σ⟨dφ(eᵢ), ∇_{eᵢ}τ⟩ − (div⟨dφ, τ⟩ − |τ|²)` in radial form:
/// `ρ'F' + 2kFλλ'(ρ)/σ² − ((ρ'F)' + (m−1)(σ'/σ)ρ'F − F²)`. Zero for every map.
pub fn divergence_identity_check(map: &EquivariantMap, r: f64) -> Result<f64> {
    let f = tension_jet(map, r)?;
    let [s0, s1, ..] = domain_warp(&map.domain, r)?;
    let p = &map.profile;
    let (rho, d1, d2) = (p.eval(r, 0)?, p.eval(r, 1)?, p.eval(r, 2)?);
    let [g, ..] = target_product(map, r, rho)?;
    let m1 = (map.m() - 1) as f64;
    let lhs = d1 * f.d1 + map.energy_density() * f.v * g / (s0 * s0);
    let rhs = d2 * f.v + d1 * f.d1 + m1 * s1 / s0 * d1 * f.v - f.v * f.v;
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{classification_map, Classification};
    use crate::geometry::{ModelSpace, WarpingFunction};
    use crate::profiles::{EigenmapDescriptor, Term};
    use crate::tension::uniform_grid;
    use std::f64::consts::PI;

    fn flat4(profile: RadialProfile) -> EquivariantMap {
        EquivariantMap::new(
            ModelSpace::euclidean(4).unwrap(),
            ModelSpace::euclidean(4).unwrap(),
            EigenmapDescriptor::identity(3).unwrap(),
            profile,
        )
        .unwrap()
    }

    fn poly(terms: &[(f64, f64)]) -> RadialProfile {
        RadialProfile::from_terms(terms.iter().map(|&(c, p)| Term::power(c, p)).collect()).unwrap()
    }

    #[test]
    fn jacobi_examples() {
        let inv = classification_map(Classification::Inversion);
        assert!((radial_jacobi(&inv, &RadialProfile::constant(1.0), 1.0).unwrap() + 3.0).abs() < 1e-14);
        let id = flat4(poly(&[(1.0, 1.0)]));
        assert!(radial_jacobi(&id, &poly(&[(1.0, 1.0)]), 1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn tension_is_a_jacobi_field_for_biharmonic_maps() {
        for c in Classification::ALL {
            let map = classification_map(c);
            let (a, b) = c.benchmark_interval();
            for r in uniform_grid(a, b, 20) {
                let f = tension_jet(&map, r).unwrap();
                assert!(jacobi_of(&map, r, [f.v, f.d1, f.d2]).unwrap().abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn bienergy_examples() {
        let inv = classification_map(Classification::Inversion);
        let e2 = bienergy(MapRef::from(&inv), 1.0, 2.0).unwrap();
        assert!((e2 - 6.0 * PI * PI).abs() < 1e-10, "{e2}");
        let id = flat4(poly(&[(1.0, 1.0)]));
        assert!(bienergy(MapRef::from(&id), 1.0, 2.0).unwrap().abs() < 1e-20);
        let hopf = LatitudeMap::new(EigenmapDescriptor::hopf(), PI / 4.0, ModelSpace::sphere(3).unwrap()).unwrap();
        assert!((bienergy(MapRef::from(&hopf), 0.0, 0.0).unwrap() - 16.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn energy_examples() {
        let id = flat4(poly(&[(1.0, 1.0)]));
        assert!((energy(&id, 1.0, 2.0).unwrap() - 15.0 * PI * PI).abs() < 1e-10);
        let rho0 = 0.7;
        let constant = flat4(RadialProfile::constant(rho0));
        assert!((energy(&constant, 1.0, 2.0).unwrap() - 4.5 * PI * PI * rho0 * rho0).abs() < 1e-10);
        assert_eq!(energy(&flat4(RadialProfile::constant(0.0)), 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn tau_variation_examples() {
        let hopf = LatitudeMap::new(EigenmapDescriptor::hopf(), PI / 4.0, ModelSpace::sphere(3).unwrap()).unwrap();
        let v = tau_variation_value(MapRef::from(&hopf)).unwrap();
        assert!((v + 2048.0 * PI * PI).abs() <= 1e-8 * 2048.0 * PI * PI);
        let s4 = ModelSpace::sphere(4).unwrap();
        let lat = LatitudeMap::new(EigenmapDescriptor::identity(3).unwrap(), PI / 4.0, s4).unwrap();
        let v = tau_variation_value(MapRef::from(&lat)).unwrap();
        assert!((v + 40.5 * PI * PI).abs() <= 1e-8 * 40.5 * PI * PI);
        // the equator is a totally geodesic, hence harmonic, latitude
        let eq = LatitudeMap::new(EigenmapDescriptor::hopf(), PI / 2.0, ModelSpace::sphere(3).unwrap()).unwrap();
        assert!(tau_variation_value(MapRef::from(&eq)).unwrap().abs() < 1e-20);
        let inv = classification_map(Classification::Inversion);
        assert!(matches!(tau_variation_value(MapRef::from(&inv)), Err(Error::Precondition(_))));
    }

    #[test]
    fn divergence_identity_examples() {
        let inv = classification_map(Classification::Inversion);
        assert!(divergence_identity_check(&inv, 1.0).unwrap().abs() < 1e-10);
        let square = flat4(poly(&[(1.0, 2.0)]));
        assert!(divergence_identity_check(&square, 1.0).unwrap().abs() < 1e-10);
        let id = flat4(poly(&[(1.0, 1.0)]));
        assert!(divergence_identity_check(&id, 1.3).unwrap().abs() < 1e-12);
        let hy = ModelSpace::new(4, WarpingFunction::hyperbolic()).unwrap();
        let m = EquivariantMap::new(
            hy.clone(),
            hy,
            EigenmapDescriptor::identity(3).unwrap(),
            poly(&[(0.5, 1.0), (0.1, 3.0)]),
        )
        .unwrap();
        assert!(divergence_identity_check(&m, 0.8).unwrap().abs() < 1e-10);
    }

    #[test]
    fn compact_support_check() {
        let bump = VariationField::Radial(RadialProfile::bump(1.2, 1.8, vec![]).unwrap());
        assert!(bump.check_compact(1.0, 2.0).is_ok());
        assert!(bump.check_compact(1.5, 2.0).is_err());
        assert!(VariationField::Constant(1.0).check_compact(0.0, 1.0).is_ok());
    }
}

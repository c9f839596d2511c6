//! Tension field `F`, bitension residuals in both equivalent forms, the radial
//! Laplacian, conformality residuals, and grid reports with a
//! harmonic / proper-biharmonic verdict.
//!
//! Derivatives of `F` come from exact chain-rule expansion (jets) when the
//! profile carries four analytic derivatives, and from 5-point central
//! differences of `F` with step `max(1e-4, 1e-4·r)` otherwise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{ModelSpace, SINGULAR_WARP};
use crate::jet::Jet;
use crate::profiles::{EquivariantMap, LatitudeMap, RadialProfile};

/// Thresholds for the report verdict and the Morse-index count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// `F_sup ≤ tau_h` counts as harmonic.
    pub tau_h: f64,
    /// `bitension_sup ≤ tau_b` counts as biharmonic.
    pub tau_b: f64,
    /// Negative-eigenvalue threshold; `None` means `1e-6 · max|Q_ij|`.
    pub tol_index: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tau_h: 1e-8, tau_b: 1e-6, tol_index: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Harmonic,
    ProperBiharmonic,
    Neither,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Harmonic => "harmonic",
            Verdict::ProperBiharmonic => "proper_biharmonic",
            Verdict::Neither => "neither",
        }
    }
}

/// Pointwise residuals on a uniform grid plus their norms.
///
/// The `*_l2` norms are trapezoidal approximations of `(∫_a^b g² dr)^{1/2}`.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    pub tension: Vec<f64>,
    pub bitension: Vec<f64>,
    pub conformality: Option<Vec<f64>>,
    pub f_sup: f64,
    pub f_l2: f64,
    pub bitension_sup: f64,
    pub bitension_l2: f64,
    pub conformal_sup: Option<f64>,
    pub verdict: Verdict,
}

fn fd_step(r: f64) -> f64 {
    1e-4f64.max(1e-4 * r.abs())
}

struct Stencil {
    h: f64,
    points: [f64; 5],
}

impl Stencil {
    fn new(r: f64) -> Self {
        let h = fd_step(r);
        Stencil { h, points: [r - 2.0 * h, r - h, r, r + h, r + 2.0 * h] }
    }

    fn jet(&self, v: [f64; 5]) -> Jet {
        let h = self.h;
        Jet::new(
            v[2],
            (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h),
            (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h),
        )
    }
}

/// `[σ, σ', σ'', σ''']` at `r`, rejecting poles.
pub(crate) fn domain_warp(domain: &ModelSpace, r: f64) -> Result<[f64; 4]> {
    let w = domain.warping();
    let s0 = w.eval(r, 0)?;
    if s0.abs() <= SINGULAR_WARP {
        return Err(Error::Singularity { r, what: "domain warping" });
    }
    Ok([s0, w.eval(r, 1)?, w.eval(r, 2)?, w.eval(r, 3)?])
}

/// `[g, g', g'']` with `g = λλ'` at `ρ`, reporting a range error at `r` if `ρ`
/// leaves the target domain.
pub(crate) fn target_product(map: &EquivariantMap, r: f64, rho: f64) -> Result<[f64; 3]> {
    let w = map.target.warping();
    if !w.target_range().contains(rho) {
        return Err(Error::Range { r, rho, domain: w.target_range().to_string() });
    }
    w.product_derivatives(rho)
}

/// `Δα = α'' + (m−1)(σ'/σ)α'`
pub fn radial_laplacian(domain: &ModelSpace, alpha: &RadialProfile, r: f64) -> Result<f64> {
    let [s0, s1, ..] = domain_warp(domain, r)?;
    let m1 = (domain.dimension() - 1) as f64;
    Ok(alpha.eval(r, 2)? + m1 * s1 / s0 * alpha.eval(r, 1)?)
}

/// `F = ρ'' + (m−1)(σ'/σ)ρ' − 2k·λλ'(ρ)/σ²`, so that `τ(φ) = F ∂_ρ`.
pub fn tension_f(map: &EquivariantMap, r: f64) -> Result<f64> {
    let [s0, s1, ..] = domain_warp(&map.domain, r)?;
    let p = &map.profile;
    let rho = p.eval(r, 0)?;
    let [g, ..] = target_product(map, r, rho)?;
    let m1 = (map.m() - 1) as f64;
    Ok(p.eval(r, 2)? + m1 * s1 / s0 * p.eval(r, 1)? - map.energy_density() * g / (s0 * s0))
}

/// True when `F'` and `F''` come from analytic derivatives rather than differences.
pub fn uses_analytic_derivatives(map: &EquivariantMap) -> bool {
    map.profile.max_order() >= 4
}

struct AnalyticParts {
    sigma: Jet,
    ratio: Jet,
    rho_p: Jet,
    rho_pp: Jet,
    g_rho: Jet,
    g1: f64,
}

fn analytic_parts(map: &EquivariantMap, r: f64) -> Result<AnalyticParts> {
    let [s0, s1, s2, s3] = domain_warp(&map.domain, r)?;
    let p = &map.profile;
    let d: Vec<f64> = (0..=4).map(|k| p.eval(r, k)).collect::<Result<_>>()?;
    let [g, g1, g2] = target_product(map, r, d[0])?;
    let sigma = Jet::new(s0, s1, s2);
    let sigma_p = Jet::new(s1, s2, s3);
    let rho = Jet::new(d[0], d[1], d[2]);
    Ok(AnalyticParts {
        sigma,
        ratio: sigma_p / sigma,
        rho_p: Jet::new(d[1], d[2], d[3]),
        rho_pp: Jet::new(d[2], d[3], d[4]),
        g_rho: rho.compose(g, g1, g2),
        g1,
    })
}

fn fd_stencil(map: &EquivariantMap, r: f64) -> Result<Stencil> {
    let st = Stencil::new(r);
    let pd = map.profile.domain();
    let wd = map.domain.warping().domain();
    for &x in &st.points {
        if !pd.contains(x) || !wd.contains_interior(x) {
            return Err(Error::Stencil { r, h: st.h });
        }
    }
    Ok(st)
}

/// `(F, F', F'')` at `r`.
pub fn tension_jet(map: &EquivariantMap, r: f64) -> Result<Jet> {
    if uses_analytic_derivatives(map) {
        let a = analytic_parts(map, r)?;
        let m1 = (map.m() - 1) as f64;
        Ok(a.rho_pp + a.ratio * a.rho_p * m1 - (a.g_rho / a.sigma.square()) * map.energy_density())
    } else {
        let st = fd_stencil(map, r)?;
        let mut v = [0.0; 5];
        for (slot, &x) in v.iter_mut().zip(st.points.iter()) {
            *slot = tension_f(map, x)?;
        }
        Ok(st.jet(v))
    }
}

/// `F'' + (m−1)(σ'/σ)F' − 2k·(λλ')'(ρ)/σ²·F`; vanishes iff the map is biharmonic at `r`.
pub fn bitension_residual(map: &EquivariantMap, r: f64) -> Result<f64> {
    let f = tension_jet(map, r)?;
    let [s0, s1, ..] = domain_warp(&map.domain, r)?;
    let rho = map.profile.eval(r, 0)?;
    let [_, g1, _] = target_product(map, r, rho)?;
    let m1 = (map.m() - 1) as f64;
    Ok(f.d2 + m1 * s1 / s0 * f.d1 - map.energy_density() * g1 / (s0 * s0) * f.v)
}

/// `Δ²ρ − 2kΔ(λλ'(ρ)/σ²) − 2k(λλ')'(ρ)/σ²·(Δρ − 2kλλ'(ρ)/σ²)`
pub fn bitension_residual_alt(map: &EquivariantMap, r: f64) -> Result<f64> {
    let two_k = map.energy_density();
    let m1 = (map.m() - 1) as f64;
    let (lap_rho, q, s0, s1, g1) = if uses_analytic_derivatives(map) {
        let a = analytic_parts(map, r)?;
        let lap = a.rho_pp + a.ratio * a.rho_p * m1;
        let q = a.g_rho / a.sigma.square();
        (lap, q, a.sigma.v, a.sigma.d1, a.g1)
    } else {
        let st = fd_stencil(map, r)?;
        let mut lap = [0.0; 5];
        let mut q = [0.0; 5];
        for (i, &x) in st.points.iter().enumerate() {
            let [s0, ..] = domain_warp(&map.domain, x)?;
            let rho = map.profile.eval(x, 0)?;
            let [g, ..] = target_product(map, x, rho)?;
            lap[i] = radial_laplacian(&map.domain, &map.profile, x)?;
            q[i] = g / (s0 * s0);
        }
        let [s0, s1, ..] = domain_warp(&map.domain, r)?;
        let rho = map.profile.eval(r, 0)?;
        let [_, g1, _] = target_product(map, r, rho)?;
        (st.jet(lap), st.jet(q), s0, s1, g1)
    };
    let ratio = s1 / s0;
    let bilap_rho = lap_rho.d2 + m1 * ratio * lap_rho.d1;
    let lap_q = q.d2 + m1 * ratio * q.d1;
    Ok(bilap_rho - two_k * lap_q - two_k * g1 / (s0 * s0) * (lap_rho.v - two_k * q.v))
}

/// `|ρ'|σ − λ(ρ)`, zero iff the rotationally symmetric map is conformal at `r`.
pub fn conformality_residual(map: &EquivariantMap, r: f64) -> Result<f64> {
    if !map.eigenmap.is_identity() {
        return Err(Error::NotApplicable(format!(
            "conformality is defined for rotationally symmetric maps, not eigenmap {}",
            map.eigenmap.name
        )));
    }
    let [s0, ..] = domain_warp(&map.domain, r)?;
    let rho = map.profile.eval(r, 0)?;
    let lw = map.target.warping();
    if !lw.target_range().contains(rho) {
        return Err(Error::Range { r, rho, domain: lw.target_range().to_string() });
    }
    Ok(map.profile.eval(r, 1)?.abs() * s0 - lw.eval_target(rho, 0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatitudeResiduals {
    /// Constant tension `F = −2k·λλ'(ρ₀)`.
    pub tension: f64,
    /// `−2k·(λλ')'(ρ₀)·F`
    pub bitension: f64,
}

pub fn latitude_residuals(map: &LatitudeMap) -> Result<LatitudeResiduals> {
    let [g, g1, _] = map.target.warping().product_derivatives(map.rho0)?;
    let two_k = map.energy_density();
    let f = -two_k * g;
    Ok(LatitudeResiduals { tension: f, bitension: -two_k * g1 * f })
}

impl LatitudeResiduals {
    pub fn verdict(&self, tol: &Tolerances) -> Verdict {
        classify(self.tension.abs(), self.bitension.abs(), tol)
    }
}

fn classify(f_sup: f64, bitension_sup: f64, tol: &Tolerances) -> Verdict {
    if f_sup <= tol.tau_h {
        Verdict::Harmonic
    } else if bitension_sup <= tol.tau_b {
        Verdict::ProperBiharmonic
    } else {
        Verdict::Neither
    }
}

/// Uniform grid of `n` points on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect()
}

/// Checks `a < b`, both inside the domain interior (no poles) and the profile domain.
pub(crate) fn check_interval(map: &EquivariantMap, a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let wd = map.domain.warping().domain();
    let pd = map.profile.domain();
    for x in [a, b] {
        if !wd.contains_interior(x) {
            return Err(Error::Domain { what: "interval end", value: x, domain: wd.to_string() });
        }
        if !pd.contains(x) {
            return Err(Error::Domain { what: "interval end", value: x, domain: pd.to_string() });
        }
    }
    Ok(())
}

fn trapezoid_l2(grid: &[f64], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..grid.len() {
        let h = grid[i] - grid[i - 1];
        acc += 0.5 * h * (values[i] * values[i] + values[i - 1] * values[i - 1]);
    }
    acc.sqrt()
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Residuals of `map` on an `n`-point uniform grid of `[a, b]` (`n ≥ 8`).
pub fn residual_report(map: &EquivariantMap, a: f64, b: f64, n: usize, tol: &Tolerances) -> Result<ResidualReport> {
    residual_report_with(map, a, b, n, tol, Execution::default())
}

pub fn residual_report_with(
    map: &EquivariantMap,
    a: f64,
    b: f64,
    n: usize,
    tol: &Tolerances,
    exec: Execution,
) -> Result<ResidualReport> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("residual grid needs n >= 8, got {n}")));
    }
    check_interval(map, a, b)?;
    let grid = uniform_grid(a, b, n);
    let conformal = map.eigenmap.is_identity();
    let rows = exec.map(&grid, |&r| -> Result<(f64, f64, Option<f64>)> {
        let f = tension_f(map, r).map_err(|e| e.at(r))?;
        let bt = bitension_residual(map, r).map_err(|e| e.at(r))?;
        let c = if conformal { Some(conformality_residual(map, r).map_err(|e| e.at(r))?) } else { None };
        Ok((f, bt, c))
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<_>>()?;
    let tension: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let bitension: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let conformality: Option<Vec<f64>> = if conformal { rows.iter().map(|r| r.2).collect() } else { None };
    let f_sup = sup(&tension);
    let bitension_sup = sup(&bitension);
    Ok(ResidualReport {
        f_sup,
        f_l2: trapezoid_l2(&grid, &tension),
        bitension_sup,
        bitension_l2: trapezoid_l2(&grid, &bitension),
        conformal_sup: conformality.as_deref().map(sup),
        verdict: classify(f_sup, bitension_sup, tol),
        grid,
        tension,
        bitension,
        conformality,
    })
}

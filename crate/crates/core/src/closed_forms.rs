//! Closed-form Euclidean harmonic and biharmonic families, the Almansi split,
//! the three conformal proper-biharmonic maps in dimension four, and the
//! conformal-factor machinery that pins down their targets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{target_scalar_curvature, CustomWarping, Interval, ModelSpace, WarpingFunction};
use crate::jet::Jet;
use crate::profiles::{EigenmapDescriptor, EquivariantMap, RadialProfile, Term};
use crate::tension::{check_interval, conformality_residual, domain_warp, uniform_grid};

/// Roots of the indicial equation `p² + (m−2)p − 2k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    pub k_plus: f64,
    pub k_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, serde::Deserialize)]
pub struct FamilyCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl FamilyCoefficients {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        FamilyCoefficients { c1, c2, c3, c4 }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }
}

/// Threshold on `|m + 2k±|` below which the general biharmonic branch degenerates.
pub const DEGENERACY_TOL: f64 = 1e-9;

fn check_family_args(m: usize, energy_density: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::UnsupportedDimension { got: m, expected: 2 });
    }
    if !(energy_density > 0.0) || !energy_density.is_finite() {
        return Err(Error::InvalidArgument(format!("energy density 2k must be positive, got {energy_density}")));
    }
    Ok(())
}

/// `k± = (−(m−2) ± √((m−2)² + 4·(2k))) / 2`, taking the energy density `2k`.
pub fn euclidean_exponents(m: usize, energy_density: f64) -> Result<ExponentPair> {
    check_family_args(m, energy_density)?;
    let a = m as f64 - 2.0;
    let disc = (a * a + 4.0 * energy_density).sqrt();
    Ok(ExponentPair { k_plus: (-a + disc) / 2.0, k_minus: (-a - disc) / 2.0 })
}

/// `c1·r^{k+} + c2·r^{k−}`: every equivariant harmonic map `ℝ^m∖0 → ℝ^n∖0`.
pub fn harmonic_family(m: usize, energy_density: f64, c1: f64, c2: f64) -> Result<RadialProfile> {
    let e = euclidean_exponents(m, energy_density)?;
    RadialProfile::from_terms(vec![Term::power(c1, e.k_plus), Term::power(c2, e.k_minus)])
}

/// True for the logarithmic branch `m = 2, 2k = 1`.
pub fn is_log_branch(m: usize, energy_density: f64) -> bool {
    m == 2 && (energy_density - 1.0).abs() < 1e-12
}

fn general_denominators(m: usize, e: &ExponentPair) -> Result<(f64, f64)> {
    let dp = m as f64 + 2.0 * e.k_plus;
    let dm = m as f64 + 2.0 * e.k_minus;
    if dp.abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateFamily(format!("m + 2k+ = {dp:e} vanishes for m = {m}")));
    }
    if dm.abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateFamily(format!("m + 2k- = {dm:e} vanishes for m = {m}")));
    }
    Ok((dp, dm))
}

/// Every equivariant biharmonic map between punctured Euclidean spaces:
/// `c1/(2(m+2k+))·r^{k++2} + c2/(2(m+2k−))·r^{k−+2} + c3·r^{k+} + c4·r^{k−}`,
/// or `c1·r³ + c2·r ln r + c3·r + c4/r` when `m = 2, 2k = 1`.
pub fn biharmonic_family(m: usize, energy_density: f64, coeffs: &FamilyCoefficients) -> Result<RadialProfile> {
    let e = euclidean_exponents(m, energy_density)?;
    let FamilyCoefficients { c1, c2, c3, c4 } = *coeffs;
    if is_log_branch(m, energy_density) {
        return RadialProfile::from_terms(vec![
            Term::power(c1, 3.0),
            Term::power_log(c2, 1.0),
            Term::power(c3, 1.0),
            Term::power(c4, -1.0),
        ]);
    }
    let (dp, dm) = general_denominators(m, &e)?;
    RadialProfile::from_terms(vec![
        Term::power(c1 / (2.0 * dp), e.k_plus + 2.0),
        Term::power(c2 / (2.0 * dm), e.k_minus + 2.0),
        Term::power(c3, e.k_plus),
        Term::power(c4, e.k_minus),
    ])
}

/// Splits a biharmonic family member as `ρ = r²ρ₁ + ρ₂` with `ρ₁`, `ρ₂` harmonic (`m > 2`).
pub fn almansi_decompose(
    m: usize,
    energy_density: f64,
    coeffs: &FamilyCoefficients,
) -> Result<(RadialProfile, RadialProfile)> {
    if m <= 2 {
        return Err(Error::NotApplicable(format!(
            "the Almansi split needs m > 2 (m = {m}); r·ln r has no such decomposition"
        )));
    }
    let e = euclidean_exponents(m, energy_density)?;
    let (dp, dm) = general_denominators(m, &e)?;
    let rho1 = RadialProfile::from_terms(vec![
        Term::power(coeffs.c1 / (2.0 * dp), e.k_plus),
        Term::power(coeffs.c2 / (2.0 * dm), e.k_minus),
    ])?;
    let rho2 = RadialProfile::from_terms(vec![Term::power(coeffs.c3, e.k_plus), Term::power(coeffs.c4, e.k_minus)])?;
    Ok((rho1, rho2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// `x ↦ x/|x|²` on `ℝ⁴∖0`
    Inversion,
    /// Inverse stereographic projection `ℝ⁴ → S⁴`
    Stereographic,
    /// `B⁴ → H⁴`, `ρ = 2 artanh r`
    Hyperbolic,
}

impl Classification {
    pub const ALL: [Classification; 3] =
        [Classification::Inversion, Classification::Stereographic, Classification::Hyperbolic];

    pub fn name(&self) -> &'static str {
        match self {
            Classification::Inversion => "inversion",
            Classification::Stereographic => "stereographic",
            Classification::Hyperbolic => "hyperbolic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Interval on which the map is benchmarked.
    pub fn benchmark_interval(&self) -> (f64, f64) {
        match self {
            Classification::Hyperbolic => (0.25, 0.75),
            _ => (0.5, 2.0),
        }
    }

    /// `A` in `6A + 6c/u² + Scal = 0` for this map.
    pub fn expected_a(&self) -> f64 {
        match self {
            Classification::Inversion => 0.0,
            Classification::Stereographic => -2.0,
            Classification::Hyperbolic => 2.0,
        }
    }
}

/// The three conformal proper-biharmonic rotationally symmetric maps `ℝ⁴ ⊃ U → M⁴(c)`.
pub fn classification_map(which: Classification) -> EquivariantMap {
    let (target, profile) = match which {
        Classification::Inversion => {
            (WarpingFunction::flat(), RadialProfile::from_terms(vec![Term::power(1.0, -1.0)]).expect("non-empty"))
        }
        Classification::Stereographic => (WarpingFunction::spherical(), RadialProfile::twice_arctan()),
        Classification::Hyperbolic => (WarpingFunction::hyperbolic(), RadialProfile::twice_artanh()),
    };
    EquivariantMap::new(
        ModelSpace::euclidean(4).expect("dimension 4"),
        ModelSpace::new(4, target).expect("dimension 4"),
        EigenmapDescriptor::identity(3).expect("S^3"),
        profile,
    )
    .expect("consistent dimensions")
}

/// `r = e^t` (c = 0), `2 arctan e^t` (c = 1), `2 artanh e^t` (c = −1, needs `t < 0`).
pub fn conformal_change_of_variable(c: i32, t: f64) -> Result<f64> {
    match c {
        0 => Ok(t.exp()),
        1 => Ok(2.0 * t.exp().atan()),
        -1 => {
            if t >= 0.0 {
                Err(Error::Domain { what: "log-radius t for c = -1", value: t, domain: "(-inf,0)".into() })
            } else {
                Ok(2.0 * t.exp().atanh())
            }
        }
        _ => Err(Error::InvalidArgument(format!("curvature sign must be -1, 0 or 1, got {c}"))),
    }
}

/// Statistics of the constant `A` and the residual of `Δu − 3c·u = A·u³` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConformalFactorReport {
    pub grid: Vec<f64>,
    pub a_values: Vec<f64>,
    pub a_mean: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_spread: f64,
    pub residual_sup: f64,
    pub conformal_sup: f64,
}

/// Conformality tolerance for [`conformal_factor_residual`].
pub const CONFORMAL_TOL: f64 = 1e-8;

/// Recovers `A` pointwise from `6A + 6c/u² + Scal(ρ) = 0` with `u = λ(ρ)/σ`,
/// reports its spread, and checks `Δu − 3c·u − Ā·u³` with the grid mean `Ā`.
pub fn conformal_factor_residual(
    map: &EquivariantMap,
    c: f64,
    a: f64,
    b: f64,
    n: usize,
) -> Result<ConformalFactorReport> {
    if map.m() != 4 || map.target.dimension() != 4 {
        return Err(Error::UnsupportedDimension { got: map.m(), expected: 4 });
    }
    if !map.is_rotationally_symmetric() {
        return Err(Error::NotApplicable("conformal factor needs a rotationally symmetric map".into()));
    }
    if let Some(k) = map.domain.warping().curvature_constant() {
        if k != c {
            return Err(Error::Precondition(format!("domain has curvature {k}, not c = {c}")));
        }
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs n >= 2, got {n}")));
    }
    check_interval(map, a, b)?;
    let grid = uniform_grid(a, b, n);
    let mut conformal_sup = 0.0f64;
    let mut a_values = Vec::with_capacity(n);
    let mut lap_terms = Vec::with_capacity(n);
    let lw = map.target.warping();
    for &r in &grid {
        let res = conformality_residual(map, r).map_err(|e| e.at(r))?;
        conformal_sup = conformal_sup.max(res.abs());
        let [s0, s1, s2, _] = domain_warp(&map.domain, r)?;
        let p = &map.profile;
        let rho = Jet::new(p.eval(r, 0)?, p.eval(r, 1)?, p.eval(r, 2)?);
        let [l0, l1, l2] = lw.jet(rho.v).map_err(|e| e.at(r))?;
        let u = rho.compose(l0, l1, l2) / Jet::new(s0, s1, s2);
        let scal = target_scalar_curvature(&map.target, rho.v).map_err(|e| e.at(r))?;
        a_values.push(-(scal + 6.0 * c / (u.v * u.v)) / 6.0);
        let lap = u.d2 + 3.0 * s1 / s0 * u.d1;
        lap_terms.push((lap, u.v));
    }
    if conformal_sup > CONFORMAL_TOL {
        return Err(Error::NotConformal { sup: conformal_sup, tol: CONFORMAL_TOL });
    }
    let a_mean = a_values.iter().sum::<f64>() / n as f64;
    let a_min = a_values.iter().copied().fold(f64::INFINITY, f64::min);
    let a_max = a_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let residual_sup =
        lap_terms.iter().map(|&(lap, u)| (lap - 3.0 * c * u - a_mean * u * u * u).abs()).fold(0.0, f64::max);
    Ok(ConformalFactorReport {
        grid,
        a_values,
        a_mean,
        a_min,
        a_max,
        a_spread: a_max - a_min,
        residual_sup,
        conformal_sup,
    })
}

/// Target warping solving `(λ²)'' − 2Aλ² = 2(1+c)` with `λ(0) = 0`:
/// `√(1+c)·ρ` (A = 0), `C·sinh(√(2A)/2·ρ)` (A > 0), `C·sin(√(2|A|)/2·ρ)` (A < 0).
///
/// The ODE fixes `C² = 2(1+c)/|A|` (see [`conformal_target_amplitude`]); other
/// amplitudes give the same target up to homothety.
pub fn classify_conformal_target(a: f64, c: f64, amplitude: f64) -> Result<WarpingFunction> {
    if !(a.is_finite() && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("A = {a}, c = {c} must be finite")));
    }
    if a == 0.0 {
        if c <= -1.0 {
            return Err(Error::Degenerate(format!("A = 0 needs c > -1, got c = {c}")));
        }
        return Ok(WarpingFunction::custom_unchecked(
            CustomWarping::Linear { slope: (1.0 + c).sqrt() },
            Interval::nonnegative(),
        ));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!("amplitude C must be positive, got {amplitude}")));
    }
    let rate = (2.0 * a.abs()).sqrt() / 2.0;
    Ok(if a > 0.0 {
        WarpingFunction::custom_unchecked(CustomWarping::ScaledSinh { amplitude, rate }, Interval::nonnegative())
    } else {
        WarpingFunction::custom_unchecked(
            CustomWarping::ScaledSin { amplitude, rate },
            Interval::closed(0.0, std::f64::consts::PI / rate),
        )
    })
}

/// The amplitude `C = √(2(1+c)/|A|)` for which the sinh/sin targets satisfy the ODE exactly.
pub fn conformal_target_amplitude(a: f64, c: f64) -> f64 {
    (2.0 * (1.0 + c) / a.abs()).sqrt()
}

/// `(λ²)'' − 2Aλ² − 2(1+c)` at `ρ`.
pub fn conformal_target_ode_residual(w: &WarpingFunction, a: f64, c: f64, rho: f64) -> Result<f64> {
    let [l0, l1, l2] = w.jet(rho)?;
    Ok(2.0 * l1 * l1 + 2.0 * l0 * l2 - 2.0 * a * l0 * l0 - 2.0 * (1.0 + c))
}

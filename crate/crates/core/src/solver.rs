//! Integration and shooting for the fourth-order radial system, written as
//!
//! ```text
//! ρ'' = F − (m−1)(σ'/σ)ρ' + 2k·λλ'(ρ)/σ²
//! F'' = −(m−1)(σ'/σ)F' + 2k·(λλ')'(ρ)/σ²·F
//! ```
//!
//! on the state `(ρ, ρ', F, F')`. The integrator is the Dormand–Prince 5(4) pair
//! with PI step control; every accepted step is stored, and dense output is a
//! quintic Hermite interpolant on `ρ` and on `F` (values, first and second
//! derivatives at both nodes, the latter taken from the right-hand side).

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Interval, WarpingFunction, SINGULAR_WARP};
use crate::profiles::{EigenmapDescriptor, EquivariantMap, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeState {
    pub r: f64,
    pub rho: f64,
    pub rho_p: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "F_p")]
    pub f_p: f64,
}

impl OdeState {
    pub fn new(r: f64, rho: f64, rho_p: f64, f: f64, f_p: f64) -> Self {
        OdeState { r, rho, rho_p, f, f_p }
    }

    fn y(&self) -> [f64; 4] {
        [self.rho, self.rho_p, self.f, self.f_p]
    }

    fn from_y(r: f64, y: [f64; 4]) -> Self {
        OdeState { r, rho: y[0], rho_p: y[1], f: y[2], f_p: y[3] }
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.y().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub fd_jacobian_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_min: 1e-12,
            h_max: 1e-2,
            newton_tol: 1e-10,
            newton_max_iter: 30,
            fd_jacobian_step: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("h_min", self.h_min),
            ("h_max", self.h_max),
            ("newton_tol", self.newton_tol),
            ("fd_jacobian_step", self.fd_jacobian_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.h_min >= self.h_max {
            return Err(Error::InvalidArgument(format!("h_min {} must be below h_max {}", self.h_min, self.h_max)));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidArgument("newton_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// The radial biharmonic system for a fixed pair of warpings and eigenmap.
#[derive(Debug, Clone)]
pub struct BiharmonicOde {
    pub m: usize,
    pub energy_density: f64,
    pub sigma: WarpingFunction,
    pub lambda: WarpingFunction,
}

impl BiharmonicOde {
    pub fn new(m: usize, energy_density: f64, sigma: WarpingFunction, lambda: WarpingFunction) -> Result<Self> {
        if m < 2 {
            return Err(Error::UnsupportedDimension { got: m, expected: 2 });
        }
        if !(energy_density > 0.0 && energy_density.is_finite()) {
            return Err(Error::InvalidArgument(format!("energy density must be positive, got {energy_density}")));
        }
        Ok(BiharmonicOde { m, energy_density, sigma, lambda })
    }

    /// The system underlying an equivariant map (its profile is ignored).
    pub fn for_map(map: &EquivariantMap) -> Self {
        BiharmonicOde {
            m: map.m(),
            energy_density: map.energy_density(),
            sigma: map.domain.warping().clone(),
            lambda: map.target.warping().clone(),
        }
    }

    fn sigma_ratio(&self, r: f64) -> Result<(f64, f64)> {
        let s0 = self.sigma.eval(r, 0)?;
        if s0.abs() <= SINGULAR_WARP {
            return Err(Error::Singularity { r, what: "domain warping" });
        }
        Ok((s0, self.sigma.eval(r, 1)? / s0))
    }

    fn product(&self, r: f64, y: &[f64; 4]) -> Result<[f64; 3]> {
        if !y.iter().all(|v| v.is_finite()) || !self.lambda.target_range().contains(y[0]) {
            return Err(Error::RangeEscape { r, rho: y[0], state: *y });
        }
        self.lambda.product_derivatives(y[0])
    }

    /// `(ρ', ρ'', F', F'')` at `(r, y)`.
    pub fn rhs(&self, r: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
        let (s0, ratio) = self.sigma_ratio(r)?;
        let [g, g1, _] = self.product(r, y)?;
        let m1 = (self.m - 1) as f64;
        let c = self.energy_density / (s0 * s0);
        Ok([y[1], y[2] - m1 * ratio * y[1] + c * g, y[3], -m1 * ratio * y[3] + c * g1 * y[2]])
    }

    /// `ρ''` recovered from `F = ρ'' + (m−1)(σ'/σ)ρ' − 2k·λλ'(ρ)/σ²`.
    fn rho_pp(&self, r: f64, rho: f64, rho_p: f64, f: f64) -> Result<f64> {
        let (s0, ratio) = self.sigma_ratio(r)?;
        let [g, ..] = self.product(r, &[rho, rho_p, f, 0.0])?;
        Ok(f - (self.m - 1) as f64 * ratio * rho_p + self.energy_density * g / (s0 * s0))
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

struct Step {
    y: [f64; 4],
    dy: [f64; 4],
    err: [f64; 4],
}

fn dp_step(ode: &BiharmonicOde, r: f64, y: &[f64; 4], k1: &[f64; 4], h: f64) -> Result<Step> {
    let mut k = [[0.0; 4]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..4 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = ode.rhs(r + C[s] * h, &ys)?;
    }
    // stage 7 is evaluated at the fifth-order solution (FSAL)
    let mut y_new = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        for i in 0..4 {
            y_new[i] += h * A[6][j] * kj[i];
        }
    }
    let mut err = [0.0; 4];
    for (j, kj) in k.iter().enumerate() {
        for i in 0..4 {
            err[i] += h * E[j] * kj[i];
        }
    }
    Ok(Step { y: y_new, dy: k[6], err })
}

/// Accepted states with their derivatives `(ρ', ρ'', F', F'')`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<OdeState>,
    derivatives: Vec<[f64; 4]>,
    pub rejected_steps: usize,
}

fn quintic_hermite(t: f64, h: f64, p0: [f64; 3], p1: [f64; 3]) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let b = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        0.5 * (t3 - 2.0 * t4 + t5),
    ];
    let db = [
        -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
        1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
        0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
        30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
        0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
    ];
    let w = [p0[0], h * p0[1], h * h * p0[2], p1[0], h * p1[1], h * h * p1[2]];
    let v = b.iter().zip(w.iter()).map(|(b, w)| b * w).sum();
    let d: f64 = db.iter().zip(w.iter()).map(|(b, w)| b * w).sum();
    (v, d / h)
}

impl Trajectory {
    pub fn first(&self) -> &OdeState {
        &self.states[0]
    }

    pub fn last(&self) -> &OdeState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Radius range `[min, max]` covered.
    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.first().r, self.last().r);
        (a.min(b), a.max(b))
    }

    fn segment(&self, r: f64) -> Result<usize> {
        let (lo, hi) = self.span();
        if !(r >= lo && r <= hi) {
            return Err(Error::Domain { what: "dense output radius", value: r, domain: format!("[{lo},{hi}]") });
        }
        let n = self.states.len();
        if n == 1 {
            return Ok(0);
        }
        let increasing = self.states[1].r > self.states[0].r;
        // index of the first node past r in integration order
        let idx = self.states.partition_point(|s| if increasing { s.r < r } else { s.r > r });
        Ok(idx.clamp(1, n - 1) - 1)
    }

    /// Interpolated `(ρ, ρ', F, F')` at `r`.
    pub fn interpolate(&self, r: f64) -> Result<OdeState> {
        let i = self.segment(r)?;
        if self.states.len() == 1 {
            return Ok(self.states[0]);
        }
        let (s0, s1) = (&self.states[i], &self.states[i + 1]);
        let (d0, d1) = (&self.derivatives[i], &self.derivatives[i + 1]);
        let h = s1.r - s0.r;
        let t = (r - s0.r) / h;
        let (rho, rho_p) = quintic_hermite(t, h, [s0.rho, s0.rho_p, d0[1]], [s1.rho, s1.rho_p, d1[1]]);
        let (f, f_p) = quintic_hermite(t, h, [s0.f, s0.f_p, d0[3]], [s1.f, s1.f_p, d1[3]]);
        Ok(OdeState { r, rho, rho_p, f, f_p })
    }

    /// CSV with columns `r,rho,rho_p,F,F_p`, one row per accepted state.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv write failed: {e}"));
        w.write_record(["r", "rho", "rho_p", "F", "F_p"]).map_err(io)?;
        for s in &self.states {
            w.write_record([s.r, s.rho, s.rho_p, s.f, s.f_p].map(crate::cli::format_float)).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

fn check_radius(ode: &BiharmonicOde, r: f64) -> Result<()> {
    let d = ode.sigma.domain();
    if !d.contains_interior(r) {
        return Err(Error::Domain { what: "integration radius", value: r, domain: d.to_string() });
    }
    Ok(())
}

fn error_ratio(step: &Step, y: &[f64; 4], cfg: &SolverConfig) -> f64 {
    (0..4)
        .map(|i| {
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(step.y[i].abs());
            (step.err[i] / scale).abs()
        })
        .fold(0.0, f64::max)
}

/// Adaptive integration of the system from `s0` to `r_end` (either direction).
pub fn integrate_ivp(ode: &BiharmonicOde, s0: OdeState, r_end: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !s0.is_finite() {
        return Err(Error::InvalidArgument(format!("initial state is not finite: {s0:?}")));
    }
    check_radius(ode, s0.r)?;
    check_radius(ode, r_end)?;
    let mut y = s0.y();
    let mut k1 = ode.rhs(s0.r, &y)?;
    let mut traj = Trajectory { states: vec![s0], derivatives: vec![k1], rejected_steps: 0 };
    let span = r_end - s0.r;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let mut r = s0.r;
    let mut h = cfg.h_max.min(span.abs() / 16.0).max(cfg.h_min);
    let mut prev_err = 1e-4f64;
    let mut escaped: Option<Error> = None;
    const SAFETY: f64 = 0.9;
    const ALPHA: f64 = 0.17;
    const BETA: f64 = 0.04;
    while (r_end - r) * dir > 0.0 {
        let remaining = (r_end - r).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        match dp_step(ode, r, &y, &k1, hs) {
            Ok(step) => {
                let err = error_ratio(&step, &y, cfg);
                if err <= 1.0 {
                    r = if last { r_end } else { r + hs };
                    y = step.y;
                    k1 = step.dy;
                    traj.states.push(OdeState::from_y(r, y));
                    traj.derivatives.push(k1);
                    let err = err.max(1e-10);
                    let fac = SAFETY * err.powf(-ALPHA) * prev_err.powf(BETA);
                    h = (hs.abs() * fac.clamp(0.2, 5.0)).min(cfg.h_max);
                    prev_err = err;
                    escaped = None;
                } else {
                    traj.rejected_steps += 1;
                    h = hs.abs() * (SAFETY * err.powf(-0.2)).clamp(0.2, 1.0);
                }
            }
            Err(e @ Error::RangeEscape { .. }) | Err(e @ Error::Domain { .. }) | Err(e @ Error::Singularity { .. }) => {
                traj.rejected_steps += 1;
                escaped = Some(e);
                h = hs.abs() * 0.5;
            }
            Err(e) => return Err(e.at(r)),
        }
        if h < cfg.h_min {
            return Err(match escaped {
                Some(Error::RangeEscape { .. }) => Error::RangeEscape { r, rho: y[0], state: y },
                Some(e) => e.at(r),
                None => Error::Stiffness { r, h },
            });
        }
    }
    Ok(traj)
}

/// Classical RK steps of the Dormand–Prince pair on a prescribed mesh.
fn integrate_on_mesh(ode: &BiharmonicOde, y0: [f64; 4], mesh: &[f64]) -> Result<[f64; 4]> {
    let mut y = y0;
    let mut k1 = ode.rhs(mesh[0], &y)?;
    for w in mesh.windows(2) {
        let step = dp_step(ode, w[0], &y, &k1, w[1] - w[0])?;
        y = step.y;
        k1 = step.dy;
    }
    Ok(y)
}

/// Largest admissible pole offset for [`regular_pole_start`].
pub const MAX_POLE_OFFSET: f64 = 1e-2;

/// State at `r = ε` on the germ `ρ = C1·r + C2·r³` of a biharmonic map
/// regular at the pole, for `m = 4` and the identity eigenmap. The germ is
/// exact for flat targets; otherwise the relative truncation error is `O(ε³)`.
pub fn regular_pole_start(
    m: usize,
    eigenmap: &EigenmapDescriptor,
    lambda: &WarpingFunction,
    c1: f64,
    c2: f64,
    eps: f64,
) -> Result<OdeState> {
    if m != 4 || !eigenmap.is_identity() || eigenmap.domain_sphere_dim != 3 {
        return Err(Error::UnsupportedStart(format!(
            "pole starts need m = 4 with the identity eigenmap, got m = {m} with {}",
            eigenmap.name
        )));
    }
    if !(eps > 0.0 && eps <= MAX_POLE_OFFSET) {
        return Err(Error::Domain { what: "pole offset", value: eps, domain: format!("(0,{MAX_POLE_OFFSET}]") });
    }
    let slope = lambda.eval(0.0, 1)?;
    if (slope - 1.0).abs() > 1e-8 {
        return Err(Error::UnsupportedStart(format!("target warping has lambda'(0) = {slope}, not 1")));
    }
    Ok(OdeState::new(eps, c1 * eps + c2 * eps.powi(3), c1 + 3.0 * c2 * eps * eps, 12.0 * c2 * eps, 12.0 * c2))
}

/// Left boundary data for [`shoot_bvp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LeftCondition {
    /// `ρ(r), ρ'(r)` prescribed; `F(r), F'(r)` unknown, starting from the guesses.
    State { r: f64, rho: f64, rho_p: f64, f_guess: f64, f_p_guess: f64 },
    /// Regular at the pole (`m = 4`, identity eigenmap); `C1`, `C2` unknown.
    RegularPole { eps: f64, c1_guess: f64, c2_guess: f64 },
}

impl LeftCondition {
    fn radius(&self) -> f64 {
        match *self {
            LeftCondition::State { r, .. } => r,
            LeftCondition::RegularPole { eps, .. } => eps,
        }
    }

    fn guess(&self) -> [f64; 2] {
        match *self {
            LeftCondition::State { f_guess, f_p_guess, .. } => [f_guess, f_p_guess],
            LeftCondition::RegularPole { c1_guess, c2_guess, .. } => [c1_guess, c2_guess],
        }
    }
}

/// Prescribed `ρ(r), ρ'(r)` at the far end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RightCondition {
    pub r: f64,
    pub rho: f64,
    pub rho_p: f64,
}

#[derive(Debug, Clone)]
pub struct ShootingSolution {
    pub profile: RadialProfile,
    pub trajectory: Arc<Trajectory>,
    /// Newton updates applied.
    pub iterations: usize,
    /// `(F, F')` or `(C1, C2)` at convergence.
    pub unknowns: [f64; 2],
    /// `[ρ(r_b) − ρ_b, ρ'(r_b) − ρ'_b]`
    pub mismatch: [f64; 2],
}

/// Trajectory-backed profile of order 2. `ρ''` is recovered from the
/// interpolated `F` through the tension identity, so the profile's tension
/// coincides with the dense `F`.
#[derive(Debug)]
pub struct DenseProfile {
    ode: BiharmonicOde,
    trajectory: Arc<Trajectory>,
}

impl DenseProfile {
    pub fn new(ode: BiharmonicOde, trajectory: Arc<Trajectory>) -> Self {
        DenseProfile { ode, trajectory }
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn eval(&self, r: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::UnsupportedOrder { order, max: 2 });
        }
        let s = self.trajectory.interpolate(r)?;
        Ok(match order {
            0 => s.rho,
            1 => s.rho_p,
            _ => self.ode.rho_pp(r, s.rho, s.rho_p, s.f)?,
        })
    }

    /// Wraps the trajectory as a [`RadialProfile`] on the radii it covers.
    pub fn into_profile(self) -> RadialProfile {
        let (lo, hi) = self.trajectory.span();
        RadialProfile::numeric(Arc::new(self), Interval::closed(lo, hi))
    }
}

fn left_state(
    ode: &BiharmonicOde,
    eigenmap: &EigenmapDescriptor,
    left: &LeftCondition,
    u: [f64; 2],
) -> Result<OdeState> {
    match *left {
        LeftCondition::State { r, rho, rho_p, .. } => Ok(OdeState::new(r, rho, rho_p, u[0], u[1])),
        LeftCondition::RegularPole { eps, .. } => regular_pole_start(ode.m, eigenmap, &ode.lambda, u[0], u[1], eps),
    }
}

/// Solves the two-point problem by Newton iteration on the two left unknowns.
/// Jacobian columns are forward differences integrated on the mesh of the
/// current iterate, which makes the Newton step exact for linear problems.
pub fn shoot_bvp(
    ode: &BiharmonicOde,
    eigenmap: &EigenmapDescriptor,
    left: &LeftCondition,
    right: &RightCondition,
    cfg: &SolverConfig,
) -> Result<ShootingSolution> {
    cfg.validate()?;
    let r_a = left.radius();
    if !(right.r.is_finite() && right.r != r_a) {
        return Err(Error::InvalidArgument(format!("right end {} must differ from left end {r_a}", right.r)));
    }
    let tol = [cfg.newton_tol * (1.0 + right.rho.abs()), cfg.newton_tol * (1.0 + right.rho_p.abs())];
    let solve = |u: [f64; 2]| -> Result<(Trajectory, [f64; 2])> {
        let s0 = left_state(ode, eigenmap, left, u)?;
        let traj = integrate_ivp(ode, s0, right.r, cfg)?;
        let end = traj.last();
        let res = [end.rho - right.rho, end.rho_p - right.rho_p];
        Ok((traj, res))
    };
    let norm = |res: &[f64; 2]| (res[0] / tol[0]).abs().max((res[1] / tol[1]).abs());

    let mut u = left.guess();
    let (mut traj, mut res) = solve(u)?;
    let mut iterations = 0;
    while norm(&res) > 1.0 {
        if iterations >= cfg.newton_max_iter {
            return Err(Error::NoConvergence { iterations, mismatch: res[0].abs().max(res[1].abs()) });
        }
        let mesh: Vec<f64> = traj.states.iter().map(|s| s.r).collect();
        let base = integrate_on_mesh(ode, left_state(ode, eigenmap, left, u)?.y(), &mesh)?;
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut up = u;
            let dh = cfg.fd_jacobian_step * u[j].abs().max(1.0);
            up[j] += dh;
            let yp = integrate_on_mesh(ode, left_state(ode, eigenmap, left, up)?.y(), &mesh)?;
            jac[0][j] = (yp[0] - base[0]) / dh;
            jac[1][j] = (yp[1] - base[1]) / dh;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence { iterations, mismatch: res[0].abs().max(res[1].abs()) });
        }
        let du = [-(jac[1][1] * res[0] - jac[0][1] * res[1]) / det, -(-jac[1][0] * res[0] + jac[0][0] * res[1]) / det];
        iterations += 1;
        // damped update: halve until the integration succeeds and the mismatch drops
        let mut scale = 1.0;
        let current = norm(&res);
        loop {
            let trial = [u[0] + scale * du[0], u[1] + scale * du[1]];
            match solve(trial) {
                Ok((t, r)) if norm(&r) < current || scale < 1.0 / 1024.0 => {
                    u = trial;
                    traj = t;
                    res = r;
                    break;
                }
                Ok(_) | Err(Error::RangeEscape { .. }) | Err(Error::Stiffness { .. }) if scale >= 1.0 / 1024.0 => {
                    scale *= 0.5;
                }
                Ok((t, r)) => {
                    u = trial;
                    traj = t;
                    res = r;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let trajectory = Arc::new(traj);
    let profile = DenseProfile::new(ode.clone(), trajectory.clone()).into_profile();
    Ok(ShootingSolution { profile, trajectory, iterations, unknowns: u, mismatch: res })
}

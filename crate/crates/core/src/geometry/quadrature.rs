//! Composite 5-point Gauss–Legendre quadrature (exact for degree 9 per panel).

use crate::error::{Error, Result};

/// Panel-count cap for the doubling strategy (2²⁰ subintervals).
pub const MAX_PANELS: usize = 1 << 20;

const NODES: [f64; 5] = [
    -0.906_179_845_938_663_992_797_626_878_299_392_965,
    -0.538_469_310_105_683_091_036_314_420_700_208_805,
    0.0,
    0.538_469_310_105_683_091_036_314_420_700_208_805,
    0.906_179_845_938_663_992_797_626_878_299_392_965,
];

const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_087_514_264_040_719_917_363,
    0.478_628_670_499_366_468_041_291_514_835_638_192,
    0.568_888_888_888_888_888_888_888_888_888_888_889,
    0.478_628_670_499_366_468_041_291_514_835_638_192,
    0.236_926_885_056_189_087_514_264_040_719_917_363,
];

fn check_bounds(a: f64, b: f64, panels: usize) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("quadrature bounds must be finite: [{a}, {b}]")));
    }
    if a > b {
        return Err(Error::Domain { what: "quadrature lower bound", value: a, domain: format!("(-inf,{b}]") });
    }
    if panels == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one panel".into()));
    }
    Ok(())
}

/// Integrates a vector-valued integrand over `[a, b]` with `panels` equal panels.
/// Summation runs panel by panel from `a` upward, so results are reproducible.
pub fn integrate<const K: usize, F>(f: F, a: f64, b: f64, panels: usize) -> Result<[f64; K]>
where
    F: Fn(f64) -> Result<[f64; K]>,
{
    check_bounds(a, b, panels)?;
    let mut total = [0.0; K];
    if a == b {
        return Ok(total);
    }
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut panel = [0.0; K];
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            let t = mid + 0.5 * h * x;
            let y = f(t)?;
            for k in 0..K {
                if !y[k].is_finite() {
                    return Err(Error::Evaluation { x: t });
                }
                panel[k] += w * y[k];
            }
        }
        for k in 0..K {
            total[k] += 0.5 * h * panel[k];
        }
    }
    Ok(total)
}

/// Scalar form of [`integrate`] for fallible integrands.
pub fn try_quadrature<F>(f: F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate(|x| f(x).map(|y| [y]), a, b, panels).map(|[v]| v)
}

/// Composite Gauss–Legendre value of `∫_a^b f`.
pub fn quadrature<F>(f: F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_quadrature(|x| Ok(f(x)), a, b, panels)
}

/// Differences below this are treated as converged whatever the scale.
pub const ABSOLUTE_FLOOR: f64 = 1e-24;

/// Doubles the panel count until two successive values agree to `tol`
/// relative to the largest component (or to [`ABSOLUTE_FLOOR`]). Returns the
/// value and the panel count used.
pub fn integrate_adaptive<const K: usize, F>(f: F, a: f64, b: f64, tol: f64) -> Result<([f64; K], usize)>
where
    F: Fn(f64) -> Result<[f64; K]>,
{
    let mut panels = 2;
    let mut prev = integrate(&f, a, b, panels)?;
    loop {
        panels *= 2;
        let next = integrate(&f, a, b, panels)?;
        let scale = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = next.iter().zip(prev.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if diff <= tol * scale || diff <= ABSOLUTE_FLOOR {
            return Ok((next, panels));
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature { panels, tol });
        }
        prev = next;
    }
}

/// Scalar form of [`integrate_adaptive`].
pub fn adaptive_quadrature<F>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_adaptive(|x| f(x).map(|y| [y]), a, b, tol).map(|([v], n)| (v, n))
}

use std::fmt;
use std::sync::Arc;

use super::Interval;
use crate::error::{Error, Result};

/// Highest derivative order every warping supplies analytically.
pub const WARP_MAX_ORDER: usize = 3;

type WarpFn = dyn Fn(f64, usize) -> f64 + Send + Sync;

/// User-supplied warpings. All carry analytic derivatives up to order 3.
#[derive(Clone)]
pub enum CustomWarping {
    /// `Σ c·r^p` with non-negative integer powers.
    Polynomial(Vec<(f64, u32)>),
    /// `slope·r`
    Linear { slope: f64 },
    /// `amplitude·sinh(rate·r)`
    ScaledSinh { amplitude: f64, rate: f64 },
    /// `amplitude·sin(rate·r)`
    ScaledSin { amplitude: f64, rate: f64 },
    /// Closure returning `f^(order)(r)` for `order ≤ 3`.
    Function(Arc<WarpFn>),
}

impl fmt::Debug for CustomWarping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CustomWarping::Polynomial(t) => f.debug_tuple("Polynomial").field(t).finish(),
            CustomWarping::Linear { slope } => f.debug_struct("Linear").field("slope", slope).finish(),
            CustomWarping::ScaledSinh { amplitude, rate } => {
                f.debug_struct("ScaledSinh").field("amplitude", amplitude).field("rate", rate).finish()
            }
            CustomWarping::ScaledSin { amplitude, rate } => {
                f.debug_struct("ScaledSin").field("amplitude", amplitude).field("rate", rate).finish()
            }
            CustomWarping::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl CustomWarping {
    fn is_odd(&self) -> bool {
        match self {
            CustomWarping::Polynomial(terms) => terms.iter().all(|&(_, p)| p % 2 == 1),
            CustomWarping::Function(_) => false,
            _ => true,
        }
    }

    fn eval(&self, r: f64, order: usize) -> f64 {
        match self {
            CustomWarping::Polynomial(terms) => terms
                .iter()
                .map(|&(c, p)| {
                    if (p as usize) < order {
                        0.0
                    } else {
                        let falling: f64 = (0..order).map(|j| (p as usize - j) as f64).product();
                        c * falling * r.powi((p as usize - order) as i32)
                    }
                })
                .sum(),
            CustomWarping::Linear { slope } => match order {
                0 => slope * r,
                1 => *slope,
                _ => 0.0,
            },
            CustomWarping::ScaledSinh { amplitude, rate } => {
                let k = rate.powi(order as i32);
                let x = rate * r;
                amplitude * k * if order % 2 == 0 { x.sinh() } else { x.cosh() }
            }
            CustomWarping::ScaledSin { amplitude, rate } => {
                let k = rate.powi(order as i32);
                let x = rate * r;
                let v = match order % 4 {
                    0 => x.sin(),
                    1 => x.cos(),
                    2 => -x.sin(),
                    _ => -x.cos(),
                };
                amplitude * k * v
            }
            CustomWarping::Function(f) => f(r, order),
        }
    }
}

#[derive(Debug, Clone)]
pub enum WarpingKind {
    /// `f(r) = r` on `[0, ∞)`
    Flat,
    /// `f(r) = sin r` on `[0, π]`
    Spherical,
    /// `f(r) = sinh r` on `[0, ∞)`
    Hyperbolic,
    Custom(CustomWarping),
}

/// Warping function `f` of a model space together with its domain.
#[derive(Debug, Clone)]
pub struct WarpingFunction {
    kind: WarpingKind,
    domain: Interval,
}

impl WarpingFunction {
    pub fn flat() -> Self {
        WarpingFunction { kind: WarpingKind::Flat, domain: Interval::nonnegative() }
    }

    pub fn spherical() -> Self {
        WarpingFunction { kind: WarpingKind::Spherical, domain: Interval::closed(0.0, std::f64::consts::PI) }
    }

    pub fn hyperbolic() -> Self {
        WarpingFunction { kind: WarpingKind::Hyperbolic, domain: Interval::nonnegative() }
    }

    /// Custom warping; checks `f(0) = 0`, `f'(0) = 1` at `r = 1e-6` to relative `1e-4`
    /// and positivity on a sample of the domain interior.
    pub fn custom(warping: CustomWarping, domain: Interval) -> Result<Self> {
        let w = Self::custom_unchecked(warping, domain);
        let r0 = 1e-6;
        let f0 = w.eval(r0, 0)?;
        let f1 = w.eval(r0, 1)?;
        if !((f0 / r0 - 1.0).abs() <= 1e-4 && (f1 - 1.0).abs() <= 1e-4) {
            return Err(Error::InvalidArgument(format!(
                "custom warping violates f(0)=0, f'(0)=1: f(1e-6)={f0:e}, f'(1e-6)={f1:e}"
            )));
        }
        let hi = if domain.hi.is_finite() { domain.hi } else { domain.lo + 10.0 };
        for i in 1..64 {
            let r = domain.lo + (hi - domain.lo) * i as f64 / 64.0;
            let f = w.eval(r, 0)?;
            if !(f > 0.0) {
                return Err(Error::InvalidArgument(format!("custom warping is not positive at r = {r}: f = {f}")));
            }
        }
        Ok(w)
    }

    /// Custom warping without the pole normalisation check (used for targets that
    /// are only determined up to homothety).
    pub fn custom_unchecked(warping: CustomWarping, domain: Interval) -> Self {
        WarpingFunction { kind: WarpingKind::Custom(warping), domain }
    }

    pub fn kind(&self) -> &WarpingKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Admissible target radii. Odd warpings extend to negative `ρ`, where
    /// `(ρ, θ)` and `(−ρ, −θ)` name the same point.
    pub fn target_range(&self) -> Interval {
        let odd = match &self.kind {
            WarpingKind::Custom(c) => c.is_odd(),
            _ => true,
        };
        if odd && self.domain.lo == 0.0 && !self.domain.lo_open {
            Interval {
                lo: -self.domain.hi,
                hi: self.domain.hi,
                lo_open: self.domain.hi_open,
                hi_open: self.domain.hi_open,
            }
        } else {
            self.domain
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WarpingKind::Flat => "flat",
            WarpingKind::Spherical => "spherical",
            WarpingKind::Hyperbolic => "hyperbolic",
            WarpingKind::Custom(_) => "custom",
        }
    }

    /// Sectional curvature for the space-form kinds.
    pub fn curvature_constant(&self) -> Option<f64> {
        match self.kind {
            WarpingKind::Flat => Some(0.0),
            WarpingKind::Spherical => Some(1.0),
            WarpingKind::Hyperbolic => Some(-1.0),
            WarpingKind::Custom(_) => None,
        }
    }

    pub fn eval(&self, r: f64, order: usize) -> Result<f64> {
        if order > WARP_MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: WARP_MAX_ORDER });
        }
        self.domain.check("warping argument", r)?;
        Ok(self.eval_unchecked(r, order))
    }

    /// [`WarpingFunction::eval`] over the target range.
    pub(crate) fn eval_target(&self, rho: f64, order: usize) -> Result<f64> {
        if order > WARP_MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: WARP_MAX_ORDER });
        }
        self.target_range().check("target radius", rho)?;
        Ok(self.eval_unchecked(rho, order))
    }

    pub(crate) fn eval_unchecked(&self, r: f64, order: usize) -> f64 {
        match &self.kind {
            WarpingKind::Flat => match order {
                0 => r,
                1 => 1.0,
                _ => 0.0,
            },
            WarpingKind::Spherical => match order % 4 {
                0 => r.sin(),
                1 => r.cos(),
                2 => -r.sin(),
                _ => -r.cos(),
            },
            WarpingKind::Hyperbolic => {
                if order % 2 == 0 {
                    r.sinh()
                } else {
                    r.cosh()
                }
            }
            WarpingKind::Custom(c) => c.eval(r, order),
        }
    }

    /// `[f, f', f'']` at `r`.
    pub fn jet(&self, r: f64) -> Result<[f64; 3]> {
        self.target_range().check("warping argument", r)?;
        Ok([self.eval_unchecked(r, 0), self.eval_unchecked(r, 1), self.eval_unchecked(r, 2)])
    }

    /// `[g, g', g'']` for `g = f·f'` at `r`, the combination `λλ'` that drives
    /// the equivariant tension field.
    pub fn product_derivatives(&self, r: f64) -> Result<[f64; 3]> {
        self.target_range().check("target radius", r)?;
        Ok(match self.kind {
            WarpingKind::Flat => [r, 1.0, 0.0],
            WarpingKind::Spherical => {
                let s2 = (2.0 * r).sin();
                [0.5 * s2, (2.0 * r).cos(), -2.0 * s2]
            }
            WarpingKind::Hyperbolic => {
                let s2 = (2.0 * r).sinh();
                [0.5 * s2, (2.0 * r).cosh(), 2.0 * s2]
            }
            WarpingKind::Custom(_) => {
                let f0 = self.eval_unchecked(r, 0);
                let f1 = self.eval_unchecked(r, 1);
                let f2 = self.eval_unchecked(r, 2);
                let f3 = self.eval_unchecked(r, 3);
                [f0 * f1, f1 * f1 + f0 * f2, 3.0 * f1 * f2 + f0 * f3]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtins() -> Vec<WarpingFunction> {
        vec![WarpingFunction::flat(), WarpingFunction::spherical(), WarpingFunction::hyperbolic()]
    }

    #[test]
    fn derivative_consistency_by_central_differences() {
        let h = 1e-5;
        for w in builtins() {
            for i in 1..=50 {
                let r = 0.05 + 2.9 * i as f64 / 51.0;
                for order in 0..2 {
                    let fd = (w.eval(r + h, order).unwrap() - w.eval(r - h, order).unwrap()) / (2.0 * h);
                    let exact = w.eval(r, order + 1).unwrap();
                    assert!(
                        (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                        "{} order {order} at {r}: {fd} vs {exact}",
                        w.name()
                    );
                }
            }
        }
    }

    #[test]
    fn product_derivatives_agree_with_generic_formula() {
        for w in builtins() {
            for &r in &[0.3, 1.1, 2.5] {
                let [g, g1, g2] = w.product_derivatives(r).unwrap();
                let f: Vec<f64> = (0..4).map(|k| w.eval(r, k).unwrap()).collect();
                assert!((g - f[0] * f[1]).abs() < 1e-13);
                assert!((g1 - (f[1] * f[1] + f[0] * f[2])).abs() < 1e-12);
                assert!((g2 - (3.0 * f[1] * f[2] + f[0] * f[3])).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn custom_checks_pole_conditions() {
        let bad = WarpingFunction::custom(CustomWarping::Linear { slope: 2.0 }, Interval::nonnegative());
        assert!(bad.is_err());
        let ok = WarpingFunction::custom(
            CustomWarping::ScaledSin { amplitude: 0.5, rate: 2.0 },
            Interval::closed(0.0, std::f64::consts::FRAC_PI_2),
        );
        assert!(ok.is_ok());
        let closure = WarpingFunction::custom(
            CustomWarping::Function(Arc::new(|r, k| match k {
                0 => r.sinh(),
                1 => r.cosh(),
                2 => r.sinh(),
                _ => r.cosh(),
            })),
            Interval::nonnegative(),
        )
        .unwrap();
        assert!((closure.eval(1.0, 2).unwrap() - 1f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn scaled_sin_derivatives_cycle() {
        let w = CustomWarping::ScaledSin { amplitude: 2.0, rate: 3.0 };
        let r = 0.2;
        assert!((w.eval(r, 3) - (-2.0 * 27.0 * (0.6f64).cos())).abs() < 1e-12);
    }
}

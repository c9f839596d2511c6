//! Second-order jets: a value together with its first two derivatives in `r`.
//!
//! Arithmetic on jets applies the product, quotient and chain rules, which is
//! how the analytic derivatives of the tension field are assembled.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    pub fn scale(self, s: f64) -> Self {
        Jet::new(self.v * s, self.d1 * s, self.d2 * s)
    }

    /// `g ∘ self`, given `g`, `g'`, `g''` evaluated at `self.v`.
    pub fn compose(self, g0: f64, g1: f64, g2: f64) -> Self {
        Jet::new(g0, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        self.compose(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_of(f: impl Fn(f64) -> f64, x: f64) -> Jet {
        let h = 1e-3;
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        Jet::new(f(x), d1, d2)
    }

    #[test]
    fn quotient_rule_matches_differences() {
        let x = 0.7f64;
        let a = Jet::new(x.sin(), x.cos(), -x.sin());
        let b = Jet::new(x.exp(), x.exp(), x.exp());
        let q = a / b;
        let oracle = jet_of(|t| t.sin() / t.exp(), x);
        assert!((q.v - oracle.v).abs() < 1e-12);
        assert!((q.d1 - oracle.d1).abs() < 1e-6);
        assert!((q.d2 - oracle.d2).abs() < 1e-5);
    }

    #[test]
    fn compose_is_chain_rule() {
        let x = 1.3;
        let inner = Jet::new(x * x, 2.0 * x, 2.0);
        let u = inner.v;
        let c = inner.compose(u.sin(), u.cos(), -u.sin());
        let oracle = jet_of(|t| (t * t).sin(), x);
        assert!((c.d1 - oracle.d1).abs() < 1e-5);
        assert!((c.d2 - oracle.d2).abs() < 1e-4);
    }
}

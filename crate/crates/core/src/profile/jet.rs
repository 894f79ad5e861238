use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math;

/// Truncated Taylor jet `(v, v', v'')` of a function of `r`.
///
/// Arithmetic propagates first and second derivatives exactly, so any
/// composition of jet operations yields the derivatives of the composed
/// function at the seed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet2 { v, d1, d2 }
    }

    pub const fn constant(c: f64) -> Self {
        Jet2 { v: c, d1: 0.0, d2: 0.0 }
    }

    /// The identity function seeded at `r`.
    pub const fn variable(r: f64) -> Self {
        Jet2 { v: r, d1: 1.0, d2: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Applies an outer function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Jet2 { v: g, d1: g1 * self.d1, d2: g2 * self.d1 * self.d1 + g1 * self.d2 }
    }

    pub fn sin(self) -> Self {
        let (s, c) = (math::sin(self.v), math::cos(self.v));
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (math::sin(self.v), math::cos(self.v));
        self.chain(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (math::sinh(self.v), math::cosh(self.v));
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (math::sinh(self.v), math::cosh(self.v));
        self.chain(c, s, c)
    }

    pub fn exp(self) -> Self {
        let e = math::exp(self.v);
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let u = self.v;
        if u <= 0.0 {
            return self.chain(f64::NAN, f64::NAN, f64::NAN);
        }
        self.chain(math::log(u), 1.0 / u, -1.0 / (u * u))
    }

    pub fn sqrt(self) -> Self {
        let u = self.v;
        if u < 0.0 {
            return self.chain(f64::NAN, f64::NAN, f64::NAN);
        }
        let s = math::sqrt(u);
        self.chain(s, 0.5 / s, -0.25 / (s * u))
    }

    /// `self^k` for a constant exponent.
    ///
    /// Vanishing power-rule coefficients are kept at zero so that integer
    /// powers of a zero base do not produce `0 * inf`.
    pub fn powf(self, k: f64) -> Self {
        let u = self.v;
        if k == 0.0 {
            return Jet2::constant(1.0);
        }
        let g = math::pow(u, k);
        let c1 = k;
        let c2 = k * (k - 1.0);
        let g1 = if c1 == 0.0 { 0.0 } else { c1 * math::pow(u, k - 1.0) };
        let g2 = if c2 == 0.0 { 0.0 } else { c2 * math::pow(u, k - 2.0) };
        self.chain(g, g1, g2)
    }

    /// `self^e` with a non-constant exponent, as `exp(e ln self)`.
    pub fn pow(self, e: Jet2) -> Self {
        (e * self.ln()).exp()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        let q = self.v / o.v;
        let q1 = (self.d1 - q * o.d1) / o.v;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v;
        Jet2::new(q, q1, q2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        Jet2::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, c: f64) -> Jet2 {
        Jet2::new(self.v + c, self.d1, self.d2)
    }
}

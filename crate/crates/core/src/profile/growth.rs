//! Asymptotic growth at infinity of radial profiles.
//!
//! A [`LogGrowth`] `(g, e, p)` records that a log-scale quantity behaves like
//! `g r^2 + e r + p ln r + O(1)` as `r -> inf`. For a warping function the
//! quantity is `ln w`, for a log-weight it is `f` itself and for a drift
//! `θ` it is the antiderivative `∫ θ`. Integrands built from these are
//! products of powers and exponentials, so their growth is a linear
//! combination of the triples.

use alloc::vec;
use alloc::vec::Vec;

use super::expr::{Expr, Func};
use crate::math;

// Coefficients below this magnitude are treated as exact zeros.
const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogGrowth {
    pub quadratic: f64,
    pub linear: f64,
    pub log: f64,
}

impl LogGrowth {
    pub const ZERO: LogGrowth = LogGrowth { quadratic: 0.0, linear: 0.0, log: 0.0 };

    pub const fn new(quadratic: f64, linear: f64, log: f64) -> Self {
        LogGrowth { quadratic, linear, log }
    }

    pub fn scale(self, c: f64) -> Self {
        LogGrowth::new(c * self.quadratic, c * self.linear, c * self.log)
    }

    pub fn plus(self, o: LogGrowth) -> Self {
        LogGrowth::new(self.quadratic + o.quadratic, self.linear + o.linear, self.log + o.log)
    }

    /// Leading behaviour of `exp(g r^2 + e r + p ln r)`.
    pub fn order(self) -> AsymptoticOrder {
        let snap = |x: f64| if math::abs(x) < SNAP { 0.0 } else { x };
        let (g, e, p) = (snap(self.quadratic), snap(self.linear), snap(self.log));
        if g != 0.0 {
            AsymptoticOrder { kind: OrderKind::GaussianExponential, exponent: g }
        } else if e != 0.0 {
            AsymptoticOrder { kind: OrderKind::Exponential, exponent: e }
        } else {
            AsymptoticOrder { kind: OrderKind::Polynomial, exponent: p }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    /// `s^exponent`
    Polynomial,
    /// `e^{exponent s}`
    Exponential,
    /// `e^{exponent s^2}`
    GaussianExponential,
}

/// Leading-order behaviour of a positive integrand at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticOrder {
    pub kind: OrderKind,
    pub exponent: f64,
}

impl AsymptoticOrder {
    pub fn integrable(&self) -> bool {
        match self.kind {
            OrderKind::Polynomial => self.exponent < -1.0,
            OrderKind::Exponential | OrderKind::GaussianExponential => self.exponent < 0.0,
        }
    }
}

/// Growth of `ln g` for a profile `g` that is eventually positive.
pub fn infer_positive(e: &Expr) -> Option<LogGrowth> {
    let lead = analyze(e).lead?;
    (lead.c > 0.0).then(|| LogGrowth::new(lead.b, lead.a, lead.p))
}

/// Growth of a log-weight `f` used directly as an exponent.
pub fn infer_log_weight(e: &Expr) -> Option<LogGrowth> {
    analyze(e).expn.map(|x| LogGrowth::new(x.b, x.a, x.p))
}

/// Growth of `∫ θ` for a drift `θ`.
///
/// Only exact cases are recognised: polynomial terms of degree at most one,
/// exact multiples of `1/r`, and terms that are integrable at infinity.
pub fn infer_drift(e: &Expr) -> Option<LogGrowth> {
    let mut terms = Vec::new();
    split_sum(e, 1.0, &mut terms);
    let mut acc = LogGrowth::ZERO;
    for (sign, t) in terms {
        acc = acc.plus(drift_term(t)?.scale(sign));
    }
    Some(acc)
}

fn split_sum<'a>(e: &'a Expr, sign: f64, out: &mut Vec<(f64, &'a Expr)>) {
    match e {
        Expr::Add(a, b) => {
            split_sum(a, sign, out);
            split_sum(b, sign, out);
        }
        Expr::Sub(a, b) => {
            split_sum(a, sign, out);
            split_sum(b, -sign, out);
        }
        Expr::Neg(a) => split_sum(a, -sign, out),
        _ => out.push((sign, e)),
    }
}

fn drift_term(t: &Expr) -> Option<LogGrowth> {
    let info = analyze(t);
    if let Some(p) = &info.poly {
        if p.len() <= 2 {
            let c0 = p.first().copied().unwrap_or(0.0);
            let c1 = p.get(1).copied().unwrap_or(0.0);
            return Some(LogGrowth::new(0.5 * c1, c0, 0.0));
        }
        return None;
    }
    if let Some((c, p)) = info.mono {
        if p == -1.0 {
            return Some(LogGrowth::new(0.0, 0.0, c));
        }
        if p < -1.0 {
            return Some(LogGrowth::ZERO);
        }
        return None;
    }
    let lead = info.lead?;
    let integrable = lead.b < 0.0 || (lead.b == 0.0 && (lead.a < 0.0 || (lead.a == 0.0 && lead.p < -1.0)));
    integrable.then_some(LogGrowth::ZERO)
}

/// `c r^p e^{a r + b r^2} (1 + o(1))`
#[derive(Debug, Clone, Copy)]
struct Lead {
    c: f64,
    p: f64,
    a: f64,
    b: f64,
}

impl Lead {
    fn rate_cmp(&self, o: &Lead) -> core::cmp::Ordering {
        (self.b, self.a, self.p).partial_cmp(&(o.b, o.a, o.p)).unwrap_or(core::cmp::Ordering::Equal)
    }

    fn sign_of_rate(&self) -> i8 {
        let z = Lead { c: 1.0, p: 0.0, a: 0.0, b: 0.0 };
        match self.rate_cmp(&z) {
            core::cmp::Ordering::Less => -1,
            core::cmp::Ordering::Equal => 0,
            core::cmp::Ordering::Greater => 1,
        }
    }
}

/// `b r^2 + a r + p ln r + k + o(1)`
#[derive(Debug, Clone, Copy)]
struct Expansion {
    b: f64,
    a: f64,
    p: f64,
    k: f64,
}

impl Expansion {
    fn scale(self, c: f64) -> Self {
        Expansion { b: c * self.b, a: c * self.a, p: c * self.p, k: c * self.k }
    }

    fn plus(self, o: Expansion) -> Self {
        Expansion { b: self.b + o.b, a: self.a + o.a, p: self.p + o.p, k: self.k + o.k }
    }
}

#[derive(Debug, Clone, Default)]
struct Info {
    // Exact polynomial coefficients, lowest degree first, no trailing zeros.
    poly: Option<Vec<f64>>,
    lead: Option<Lead>,
    expn: Option<Expansion>,
    // Exact monomial `c r^p`.
    mono: Option<(f64, f64)>,
}

const MAX_DEGREE: usize = 8;

fn trim(mut p: Vec<f64>) -> Vec<f64> {
    while p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

fn poly_add(x: &[f64], y: &[f64], sy: f64) -> Vec<f64> {
    let n = x.len().max(y.len());
    let v = (0..n).map(|i| x.get(i).copied().unwrap_or(0.0) + sy * y.get(i).copied().unwrap_or(0.0)).collect();
    trim(v)
}

fn poly_mul(x: &[f64], y: &[f64]) -> Option<Vec<f64>> {
    if x.is_empty() || y.is_empty() {
        return Some(Vec::new());
    }
    if x.len() + y.len() - 2 > MAX_DEGREE {
        return None;
    }
    let mut v = vec![0.0; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            v[i + j] += a * b;
        }
    }
    Some(trim(v))
}

/// Coefficients of `e` when it is an exact polynomial in `r`.
pub(crate) fn exact_polynomial(e: &Expr) -> Option<Vec<f64>> {
    analyze(e).poly
}

fn as_constant(info: &Info) -> Option<f64> {
    match info.poly.as_deref() {
        Some([]) => Some(0.0),
        Some([c]) => Some(*c),
        _ => None,
    }
}

fn is_zero(info: &Info) -> bool {
    matches!(info.poly.as_deref(), Some([]))
}

fn finish(mut info: Info) -> Info {
    if let Some(p) = &info.poly {
        info.lead = p.last().map(|&c| Lead { c, p: (p.len() - 1) as f64, a: 0.0, b: 0.0 });
        if p.len() <= 3 {
            let g = |i: usize| p.get(i).copied().unwrap_or(0.0);
            info.expn = Some(Expansion { b: g(2), a: g(1), p: 0.0, k: g(0) });
        }
        if p.len() <= 1 || p[..p.len() - 1].iter().all(|&c| c == 0.0) {
            info.mono = Some((p.last().copied().unwrap_or(0.0), p.len().saturating_sub(1) as f64));
        }
    }
    if info.lead.is_none() {
        if let Some((c, p)) = info.mono {
            if c != 0.0 {
                info.lead = Some(Lead { c, p, a: 0.0, b: 0.0 });
            }
        }
    }
    if info.expn.is_none() {
        if let Some(l) = info.lead {
            match l.sign_of_rate() {
                -1 => info.expn = Some(Expansion { b: 0.0, a: 0.0, p: 0.0, k: 0.0 }),
                0 => info.expn = Some(Expansion { b: 0.0, a: 0.0, p: 0.0, k: l.c }),
                _ => {}
            }
        }
    }
    info
}

fn negate(mut info: Info) -> Info {
    info.poly = info.poly.map(|p| p.into_iter().map(|c| -c).collect());
    info.lead = info.lead.map(|l| Lead { c: -l.c, ..l });
    info.expn = info.expn.map(|x| x.scale(-1.0));
    info.mono = info.mono.map(|(c, p)| (-c, p));
    info
}

fn add(x: Info, y: Info) -> Info {
    let mut out = Info::default();
    if let (Some(p), Some(q)) = (&x.poly, &y.poly) {
        out.poly = Some(poly_add(p, q, 1.0));
        return finish(out);
    }
    if let (Some(ex), Some(ey)) = (x.expn, y.expn) {
        out.expn = Some(ex.plus(ey));
    }
    out.lead = if is_zero(&x) {
        y.lead
    } else if is_zero(&y) {
        x.lead
    } else {
        match (x.lead, y.lead) {
            (Some(l), Some(m)) => match l.rate_cmp(&m) {
                core::cmp::Ordering::Greater => Some(l),
                core::cmp::Ordering::Less => Some(m),
                core::cmp::Ordering::Equal => {
                    let c = l.c + m.c;
                    (math::abs(c) > SNAP * (math::abs(l.c) + math::abs(m.c))).then_some(Lead { c, ..l })
                }
            },
            _ => None,
        }
    };
    if let (Some((c1, p1)), Some((c2, p2))) = (x.mono, y.mono) {
        if p1 == p2 {
            out.mono = Some((c1 + c2, p1));
        }
    }
    finish(out)
}

fn mul(x: Info, y: Info) -> Info {
    let mut out = Info::default();
    if is_zero(&x) || is_zero(&y) {
        out.poly = Some(Vec::new());
        return finish(out);
    }
    if let (Some(p), Some(q)) = (&x.poly, &y.poly) {
        if let Some(v) = poly_mul(p, q) {
            out.poly = Some(v);
            return finish(out);
        }
    }
    if let (Some(l), Some(m)) = (x.lead, y.lead) {
        out.lead = Some(Lead { c: l.c * m.c, p: l.p + m.p, a: l.a + m.a, b: l.b + m.b });
    }
    if let Some(c) = as_constant(&x) {
        out.expn = y.expn.map(|e| e.scale(c));
    } else if let Some(c) = as_constant(&y) {
        out.expn = x.expn.map(|e| e.scale(c));
    }
    if let (Some((c1, p1)), Some((c2, p2))) = (x.mono, y.mono) {
        out.mono = Some((c1 * c2, p1 + p2));
    }
    finish(out)
}

fn div(x: Info, y: Info) -> Info {
    let mut out = Info::default();
    if is_zero(&y) {
        return out;
    }
    if is_zero(&x) {
        out.poly = Some(Vec::new());
        return finish(out);
    }
    if let Some(c) = as_constant(&y) {
        if let Some(p) = &x.poly {
            out.poly = Some(p.iter().map(|v| v / c).collect());
            return finish(out);
        }
        out.expn = x.expn.map(|e| e.scale(1.0 / c));
    }
    if let (Some(l), Some(m)) = (x.lead, y.lead) {
        out.lead = Some(Lead { c: l.c / m.c, p: l.p - m.p, a: l.a - m.a, b: l.b - m.b });
    }
    if let (Some((c1, p1)), Some((c2, p2))) = (x.mono, y.mono) {
        out.mono = Some((c1 / c2, p1 - p2));
    }
    finish(out)
}

fn powk(x: Info, k: f64) -> Info {
    let mut out = Info::default();
    let integer = k == (k as i64) as f64;
    if k == 0.0 {
        out.poly = Some(vec![1.0]);
        return finish(out);
    }
    if let Some(p) = &x.poly {
        if integer && (1.0..=MAX_DEGREE as f64).contains(&k) {
            let mut acc = Some(vec![1.0]);
            for _ in 0..k as usize {
                acc = acc.and_then(|a| poly_mul(&a, p));
            }
            if let Some(v) = acc {
                out.poly = Some(v);
                return finish(out);
            }
        }
    }
    if let Some(l) = x.lead {
        if l.c > 0.0 || integer {
            out.lead = Some(Lead { c: math::pow(l.c, k), p: k * l.p, a: k * l.a, b: k * l.b });
        }
    }
    if let Some((c, p)) = x.mono {
        if c > 0.0 || integer {
            out.mono = Some((math::pow(c, k), k * p));
        }
    }
    finish(out)
}

fn exp_of(x: &Info) -> Info {
    let mut out = Info::default();
    if let Some(e) = x.expn {
        let c = math::exp(e.k);
        if c.is_finite() && c > 0.0 {
            out.lead = Some(Lead { c, p: e.p, a: e.a, b: e.b });
        }
    }
    finish(out)
}

fn call(f: Func, x: Info) -> Info {
    let mut out = Info::default();
    if let Some(c) = as_constant(&x) {
        let v = Expr::Call(f, alloc::boxed::Box::new(Expr::Num(c))).eval(0.0);
        if v.is_finite() {
            out.poly = Some(trim(vec![v]));
        }
        return finish(out);
    }
    match f {
        Func::Exp => return exp_of(&x),
        Func::Log => {
            if let Some(l) = x.lead {
                if l.c > 0.0 {
                    out.expn = Some(Expansion { b: l.b, a: l.a, p: l.p, k: math::log(l.c) });
                }
            }
        }
        Func::Sqrt => return powk(x, 0.5),
        Func::Sinh | Func::Cosh => {
            let (Some(l), Some(e)) = (x.lead, x.expn) else { return out };
            let odd = f == Func::Sinh;
            match l.sign_of_rate() {
                1 => {
                    let half = |k: f64| 0.5 * math::exp(k);
                    out.lead = Some(if l.c > 0.0 {
                        Lead { c: half(e.k), p: e.p, a: e.a, b: e.b }
                    } else {
                        let c = half(-e.k);
                        Lead { c: if odd { -c } else { c }, p: -e.p, a: -e.a, b: -e.b }
                    });
                }
                _ => {
                    // Argument tends to the constant `e.k`.
                    if odd && e.k == 0.0 {
                        out.lead = Some(l);
                    } else {
                        let v = if odd { math::sinh(e.k) } else { math::cosh(e.k) };
                        out.lead = Some(Lead { c: v, p: 0.0, a: 0.0, b: 0.0 });
                    }
                }
            }
        }
        Func::Sin | Func::Cos => {
            let (Some(l), Some(e)) = (x.lead, x.expn) else { return out };
            if l.sign_of_rate() <= 0 {
                if f == Func::Sin && e.k == 0.0 {
                    out.lead = Some(l);
                } else {
                    let v = if f == Func::Sin { math::sin(e.k) } else { math::cos(e.k) };
                    if v != 0.0 {
                        out.lead = Some(Lead { c: v, p: 0.0, a: 0.0, b: 0.0 });
                    }
                }
            }
        }
    }
    finish(out)
}

fn analyze(e: &Expr) -> Info {
    match e {
        Expr::Num(c) => finish(Info { poly: Some(trim(vec![*c])), ..Info::default() }),
        Expr::Var => finish(Info { poly: Some(vec![0.0, 1.0]), ..Info::default() }),
        Expr::Neg(a) => negate(analyze(a)),
        Expr::Add(a, b) => add(analyze(a), analyze(b)),
        Expr::Sub(a, b) => add(analyze(a), negate(analyze(b))),
        Expr::Mul(a, b) => mul(analyze(a), analyze(b)),
        Expr::Div(a, b) => div(analyze(a), analyze(b)),
        Expr::Pow(a, b) => {
            if b.is_constant() {
                powk(analyze(a), b.eval(0.0))
            } else if a.is_constant() {
                let c = a.eval(0.0);
                if c > 0.0 {
                    let y = analyze(b);
                    exp_of(&Info { expn: y.expn.map(|x| x.scale(math::log(c))), ..Info::default() })
                } else {
                    Info::default()
                }
            } else {
                Info::default()
            }
        }
        Expr::Call(f, a) => call(*f, analyze(a)),
    }
}

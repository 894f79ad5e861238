use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

use super::jet::Jet2;
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Sin, Func::Cos, Func::Sinh, Func::Cosh, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => math::sin(x),
            Func::Cos => math::cos(x),
            Func::Sinh => math::sinh(x),
            Func::Cosh => math::cosh(x),
            Func::Exp => math::exp(x),
            Func::Log => {
                if x > 0.0 {
                    math::log(x)
                } else {
                    f64::NAN
                }
            }
            Func::Sqrt => {
                if x >= 0.0 {
                    math::sqrt(x)
                } else {
                    f64::NAN
                }
            }
        }
    }

    fn apply_jet(self, j: Jet2) -> Jet2 {
        match self {
            Func::Sin => j.sin(),
            Func::Cos => j.cos(),
            Func::Sinh => j.sinh(),
            Func::Cosh => j.cosh(),
            Func::Exp => j.exp(),
            Func::Log => j.ln(),
            Func::Sqrt => j.sqrt(),
        }
    }
}

/// Expression tree in the single variable `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// True when the expression does not mention `r`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var => r,
            Expr::Neg(a) => -a.eval(r),
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Div(a, b) => a.eval(r) / b.eval(r),
            Expr::Pow(a, b) => {
                let (x, k) = (a.eval(r), b.eval(r));
                if k == 0.0 {
                    1.0
                } else {
                    math::pow(x, k)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(r)),
        }
    }

    pub fn eval_jet(&self, r: f64) -> Jet2 {
        self.jet(Jet2::variable(r))
    }

    fn jet(&self, x: Jet2) -> Jet2 {
        match self {
            Expr::Num(c) => Jet2::constant(*c),
            Expr::Var => x,
            Expr::Neg(a) => -a.jet(x),
            Expr::Add(a, b) => a.jet(x) + b.jet(x),
            Expr::Sub(a, b) => a.jet(x) - b.jet(x),
            Expr::Mul(a, b) => a.jet(x) * b.jet(x),
            Expr::Div(a, b) => a.jet(x) / b.jet(x),
            Expr::Pow(a, b) => {
                let base = a.jet(x);
                if b.is_constant() {
                    base.powf(b.eval(0.0))
                } else {
                    base.pow(b.jet(x))
                }
            }
            Expr::Call(f, a) => f.apply_jet(a.jet(x)),
        }
    }

    /// Jet of `ln e(r)`, distributing the logarithm over products,
    /// quotients, constant powers and exponentials so that factors which
    /// overflow or underflow separately still combine to a finite result.
    /// NaN where `e(r) <= 0`.
    pub fn ln_jet(&self, r: f64) -> Jet2 {
        self.ln_jet_at(Jet2::variable(r)).unwrap_or_else(|| self.jet(Jet2::variable(r)).ln())
    }

    fn ln_jet_at(&self, x: Jet2) -> Option<Jet2> {
        match self {
            Expr::Num(c) if *c > 0.0 => Some(Jet2::constant(math::log(*c))),
            Expr::Var if x.v > 0.0 => Some(x.ln()),
            Expr::Mul(a, b) => Some(a.ln_jet_at(x)? + b.ln_jet_at(x)?),
            Expr::Div(a, b) => Some(a.ln_jet_at(x)? - b.ln_jet_at(x)?),
            Expr::Pow(a, b) if b.is_constant() => Some(a.ln_jet_at(x)? * b.eval(0.0)),
            Expr::Call(Func::Exp, u) => Some(u.jet(x)),
            Expr::Call(Func::Sqrt, a) => Some(a.ln_jet_at(x)? * 0.5),
            Expr::Call(Func::Sinh, u) => {
                let u = u.jet(x);
                if !(u.v > 0.0) {
                    return None;
                }
                let c = 1.0 / math::tanh(u.v);
                Some(u.chain(math::ln_sinh(u.v), c, 1.0 - c * c))
            }
            Expr::Call(Func::Cosh, u) => {
                let u = u.jet(x);
                let (a, t) = (math::abs(u.v), math::tanh(u.v));
                let v = a + math::log(0.5 * (1.0 + math::exp(-2.0 * a)));
                Some(u.chain(v, t, 1.0 - t * t))
            }
            _ => {
                let j = self.jet(x);
                (j.v > 0.0 && j.is_finite()).then(|| j.ln())
            }
        }
    }

    /// Symbolic derivative in `r`, with zero and one folded away.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        let bx = |e: &Expr| Box::new(e.clone());
        match self {
            Num(_) => Num(0.0),
            Var => Num(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
            Div(a, b) => sub(div(a.derivative(), (**b).clone()), div(mul((**a).clone(), b.derivative()), Pow(bx(b), Box::new(Num(2.0))))),
            Pow(a, b) if b.is_constant() => {
                let k = b.eval(0.0);
                let lower = if k - 1.0 == 1.0 { (**a).clone() } else { Pow(bx(a), Box::new(Num(k - 1.0))) };
                mul(mul(Num(k), lower), a.derivative())
            }
            // a^b (b' ln a + b a'/a)
            Pow(a, b) => {
                mul(self.clone(), add(mul(b.derivative(), Call(Func::Log, bx(a))), div(mul((**b).clone(), a.derivative()), (**a).clone())))
            }
            Call(f, a) => {
                let outer = match f {
                    Func::Sin => Call(Func::Cos, bx(a)),
                    Func::Cos => Neg(Box::new(Call(Func::Sin, bx(a)))),
                    Func::Sinh => Call(Func::Cosh, bx(a)),
                    Func::Cosh => Call(Func::Sinh, bx(a)),
                    Func::Exp => self.clone(),
                    Func::Log => div(Num(1.0), (**a).clone()),
                    Func::Sqrt => div(Num(0.5), self.clone()),
                };
                mul(outer, a.derivative())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(c) => write!(f, "{c:?}")?,
            Expr::Var => f.write_str("r")?,
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.write_prec(f, 1)?;
                f.write_str(" + ")?;
                b.write_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.write_prec(f, 1)?;
                f.write_str(" - ")?;
                b.write_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.write_prec(f, 2)?;
                f.write_str("*")?;
                b.write_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.write_prec(f, 2)?;
                f.write_str("/")?;
                b.write_prec(f, 3)?;
            }
            Expr::Pow(a, b) => {
                a.write_prec(f, 5)?;
                f.write_str("^")?;
                b.write_prec(f, 3)?;
            }
            Expr::Call(func, a) => {
                f.write_str(func.name())?;
                f.write_str("(")?;
                a.write_prec(f, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn is_num(e: &Expr, c: f64) -> bool {
    matches!(e, Expr::Num(x) if *x == c)
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => Expr::Num(-c),
        Expr::Neg(x) => *x,
        a => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        b
    } else if is_num(&b, 0.0) {
        a
    } else {
        Expr::Add(Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 0.0) {
        a
    } else if is_num(&a, 0.0) {
        neg(b)
    } else {
        Expr::Sub(Box::new(a), Box::new(b))
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) || is_num(&b, 0.0) {
        Expr::Num(0.0)
    } else if is_num(&a, 1.0) {
        b
    } else if is_num(&b, 1.0) {
        a
    } else if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        Expr::Num(x * y)
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        Expr::Num(0.0)
    } else if is_num(&b, 1.0) {
        a
    } else {
        Expr::Div(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // Unary minus binds looser than `^`, so `-r^2` is `-(r^2)`.
    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat(b'^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.factor()?)))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => Err(Error::Parse { pos: start, msg: String::from("malformed number") }),
        }
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match name {
            "r" => return Ok(Expr::Var),
            "pi" => return Ok(Expr::Num(math::PI)),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier { pos: start, name: name.to_string() });
        };
        if !self.eat(b'(') {
            return Err(self.error("expected `(` after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("-r^2 + 2*r - 1/r^2^1").unwrap();
        let r = 1.5f64;
        assert!((e.eval(r) - (-r * r + 2.0 * r - 1.0 / r.powf(2.0))).abs() < 1e-14);
        assert_eq!(Expr::parse("2^3^2").unwrap().eval(0.0), 512.0);
        assert_eq!(Expr::parse("8/2/2").unwrap().eval(0.0), 2.0);
        assert_eq!(Expr::parse("2^-1").unwrap().eval(0.0), 0.5);
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(Expr::parse("1.5e-3").unwrap().eval(0.0), 1.5e-3);
        assert_eq!(Expr::parse(".25").unwrap().eval(0.0), 0.25);
        assert!(Expr::parse("1e999").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match Expr::parse("sin(r) + foo(r)") {
            Err(Error::UnknownIdentifier { pos, name }) => {
                assert_eq!(pos, 9);
                assert_eq!(name, "foo");
            }
            other => panic!("unexpected {other:?}"),
        }
        match Expr::parse("(r + 1") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Expr::parse("r r"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(Expr::parse("sin r"), Err(Error::Parse { .. })));
        assert!(matches!(Expr::parse(""), Err(Error::Parse { pos: 0, .. })));
    }

    #[test]
    fn printing_round_trips_known_forms() {
        for src in ["sinh(r)", "-r^2", "(-r)^2", "r*exp(0.5*r)", "1/(r + 1) - (r - 2)", "2^-r^2", "--r"] {
            let e = Expr::parse(src).unwrap();
            let again = Expr::parse(&format!("{e}")).unwrap();
            assert_eq!(e, again, "{src} printed as {e}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0.0f64..10.0).prop_map(Expr::Num), (-10.0f64..0.0).prop_map(Expr::Num), Just(Expr::Var),];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Pow(Box::new(a), Box::new(b))),
                (0usize..7, inner).prop_map(|(i, a)| Expr::Call(Func::ALL[i], Box::new(a))),
            ]
        })
    }

    fn same(a: f64, b: f64) -> bool {
        a == b || (a.is_nan() && b.is_nan())
    }

    proptest! {
        #[test]
        fn print_then_parse_preserves_evaluation(e in arb_expr(), r in 0.01f64..5.0) {
            let text = format!("{e}");
            let back = Expr::parse(&text).unwrap();
            prop_assert!(same(e.eval(r), back.eval(r)), "{} -> {}", text, back);
            let (j1, j2) = (e.eval_jet(r), back.eval_jet(r));
            prop_assert!(same(j1.d1, j2.d1) && same(j1.d2, j2.d2));
        }
    }

    proptest! {
        #[test]
        fn derivative_matches_jet(e in arb_expr(), r in 0.1f64..3.0) {
            let d = e.derivative().eval(r);
            let j = e.eval_jet(r).d1;
            if d.is_finite() && j.is_finite() {
                prop_assert!((d - j).abs() <= 1e-9 * (1.0 + j.abs()), "{e}: {d} vs {j}");
            }
        }
    }

    #[test]
    fn derivative_is_folded() {
        assert_eq!(Expr::parse("-r^2").unwrap().derivative().to_string(), "-(2.0*r)");
        assert_eq!(Expr::parse("3").unwrap().derivative(), Expr::Num(0.0));
        let d = Expr::parse("log(sinh(r))").unwrap().derivative();
        assert!((d.eval(1.2) - 1.0 / 1.2f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn log_jet_survives_underflow() {
        let e = Expr::parse("r*exp(-r^2)").unwrap();
        let j = e.ln_jet(40.0);
        assert!((j.v - (40f64.ln() - 1600.0)).abs() < 1e-12);
        assert!((j.d1 - (1.0 / 40.0 - 80.0)).abs() < 1e-12);
        assert!((j.d2 - (-1.0 / 1600.0 - 2.0)).abs() < 1e-12);
        let s = Expr::parse("sinh(r)/cosh(r)^2").unwrap();
        for r in [0.3, 2.0, 900.0] {
            let j = s.ln_jet(r);
            assert!((j.d1 - (1.0 / r.tanh() - 2.0 * r.tanh())).abs() < 1e-12, "{r}");
        }
        assert!(Expr::parse("r - 2").unwrap().ln_jet(1.0).v.is_nan());
        let direct = Expr::parse("r^3 + 1").unwrap();
        assert!((direct.ln_jet(2.0).v - 9f64.ln()).abs() < 1e-15);
    }
}

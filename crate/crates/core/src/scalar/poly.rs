//! Sparse multivariate polynomials over the rationals in the fixed alphabet
//! `{x, y, z, x1, x2, x3}`.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order (`x` is the most significant variable), so equality
//! is structural and rendering is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::rational::{self, Rational};
use crate::error::{Error, Result};

pub const NVARS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
    X1,
    X2,
    X3,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::X, Var::Y, Var::Z, Var::X1, Var::X2, Var::X3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Exponent vector. Ordered by total degree, then lexicographically with
/// `x` compared first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rational::int(c))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), rational::one());
        p
    }

    /// `coef * Π v^e`.
    pub fn monomial(coef: Rational, powers: &[(Var, u16)]) -> Self {
        let mut e = [0u16; NVARS];
        for &(v, k) in powers {
            e[v.index()] += k;
        }
        let mut p = Self::zero();
        p.add_term(Monomial(e), coef);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, v: Var) -> Option<u16> {
        self.terms.keys().map(|m| m.exp(v)).max()
    }

    /// Variables that occur with a nonzero exponent.
    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| self.terms.keys().any(|m| m.exp(v) > 0)).collect()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, k: u16) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                let mut e = m.0;
                e[v.index()] = 0;
                out.add_term(Monomial(e), c.clone());
            }
        }
        out
    }

    /// Simultaneous substitution; unbound variables pass through.
    pub fn substitute(&self, bindings: &[(Var, Polynomial)]) -> Polynomial {
        let mut slot: [Option<&Polynomial>; NVARS] = [None; NVARS];
        for (v, p) in bindings {
            slot[v.index()] = Some(p);
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut rest = [0u16; NVARS];
            let mut factor = Polynomial::constant(c.clone());
            for v in Var::ALL {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                match slot[v.index()] {
                    Some(p) => factor = &factor * &p.pow(e as u32),
                    None => rest[v.index()] = e,
                }
            }
            let shift = Polynomial::from_terms([(Monomial(rest), rational::one())]);
            out += &factor * &shift;
        }
        out
    }

    /// Renames variables (a substitution by variables).
    pub fn rename(&self, map: &[(Var, Var)]) -> Polynomial {
        let b: Vec<(Var, Polynomial)> = map.iter().map(|&(a, b)| (a, Polynomial::var(b))).collect();
        self.substitute(&b)
    }

    /// Evaluates with every occurring variable bound to a rational.
    pub fn eval(&self, values: &[(Var, Rational)]) -> Result<Rational> {
        let b: Vec<(Var, Polynomial)> = values.iter().map(|(v, r)| (*v, Polynomial::constant(r.clone()))).collect();
        self.substitute(&b).constant_value().ok_or_else(|| Error::Internal("evaluation left free variables".into()))
    }

    /// Exact division by the monomial `v`; `None` if some term lacks `v`.
    pub fn div_by_var(&self, v: Var) -> Option<Polynomial> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == 0 {
                return None;
            }
            let mut e = m.0;
            e[v.index()] -= 1;
            out.add_term(Monomial(e), c.clone());
        }
        Some(out)
    }

    /// Exact division by `(b - a)`; `None` if the remainder is nonzero.
    ///
    /// Synthetic division in `b` with coefficients in the other variables.
    pub fn div_by_difference(&self, a: Var, b: Var) -> Option<Polynomial> {
        assert_ne!(a, b);
        let deg = match self.degree_in(b) {
            None => return Some(Polynomial::zero()),
            Some(d) => d,
        };
        let va = Polynomial::var(a);
        let coeffs: Vec<Polynomial> = (0..=deg).map(|k| self.coeff_of(b, k)).collect();
        if deg == 0 {
            return if self.is_zero() { Some(Polynomial::zero()) } else { None };
        }
        // q_{deg-1} = f_deg, q_{k-1} = f_k + a q_k, remainder f_0 + a q_0
        let mut q = vec![Polynomial::zero(); deg as usize];
        q[deg as usize - 1] = coeffs[deg as usize].clone();
        for k in (1..deg as usize).rev() {
            q[k - 1] = &coeffs[k] + &(&va * &q[k]);
        }
        let rem = &coeffs[0] + &(&va * &q[0]);
        if !rem.is_zero() {
            return None;
        }
        let vb = Polynomial::var(b);
        let mut out = Polynomial::zero();
        let mut pw = Polynomial::one();
        for qk in &q {
            out += qk * &pw;
            pw = &pw * &vb;
        }
        Some(out)
    }

    /// Canonical text: terms in descending order, e.g. `x^2 - 1/2*x*y + 3`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let body = render_monomial(m);
            if body.is_empty() {
                s.push_str(&rational::render(&a));
            } else if a.is_one() {
                s.push_str(&body);
            } else {
                s.push_str(&rational::render(&a));
                s.push('*');
                s.push_str(&body);
            }
        }
        s
    }

    pub fn parse(src: &str) -> Result<Polynomial> {
        Parser::new(src).parse()
    }
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        match m.exp(v) {
            0 => {}
            1 => parts.push(v.name().to_string()),
            e => parts.push(format!("{}^{}", v.name(), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Rational> for Polynomial {
    fn from(r: Rational) -> Self {
        Polynomial::constant(r)
    }
}

impl From<Var> for Polynomial {
    fn from(v: Var) -> Self {
        Polynomial::var(v)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl AddAssign<Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: Polynomial) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::one()
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        Some(&self.src[start..self.pos])
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero();
        let mut first = true;
        loop {
            self.skip_ws();
            if self.pos >= self.src.len() {
                if first {
                    return Err(self.err("empty polynomial"));
                }
                break;
            }
            let neg = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                return Err(self.err("expected `+` or `-`"));
            };
            let t = self.term()?;
            if neg {
                acc -= &t;
            } else {
                acc += &t;
            }
            first = false;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut t = self.factor()?;
        while self.eat('*') {
            t = &t * &self.factor()?;
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        if let Some(num) = self.number() {
            let mut text = num.to_string();
            if self.eat('/') {
                let den = self.number().ok_or_else(|| self.err("expected denominator"))?;
                text = format!("{num}/{den}");
            }
            return Ok(Polynomial::constant(rational::parse(&text)?));
        }
        if let Some(id) = self.ident() {
            let v = Var::from_name(id).ok_or_else(|| self.err("unknown variable"))?;
            let mut e = 1u16;
            if self.eat('^') {
                let k = self.number().ok_or_else(|| self.err("expected exponent"))?;
                e = k.parse().map_err(|_| self.err("bad exponent"))?;
            }
            return Ok(Polynomial::monomial(rational::one(), &[(v, e)]));
        }
        Err(self.err("expected number or variable"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::{int, rat};

    fn x() -> Polynomial {
        Polynomial::var(Var::X)
    }
    fn y() -> Polynomial {
        Polynomial::var(Var::Y)
    }

    #[test]
    fn difference_of_squares() {
        let p = (x() + y()) * (x() - y());
        let expect = x() * x() - y() * y();
        assert_eq!(p, expect);
        assert_eq!(p.render(), "x^2 - y^2");
    }

    #[test]
    fn additive_identity() {
        let p = x() * y() + Polynomial::int(3);
        assert_eq!(&p + &Polynomial::zero(), p);
    }

    #[test]
    fn singular_numerator_product_matches_pointwise() {
        // (y - x) * x == x*(y - x), cross-checked at sample points
        let lhs = (y() - x()) * x();
        let rhs = x() * y() - x() * x();
        assert_eq!(lhs, rhs);
        let pts = [(1, 2), (-3, 5), (7, -1), (2, 9), (-4, -6)];
        for (a, b) in pts {
            let vals = [(Var::X, int(a)), (Var::Y, int(b))];
            let direct = (int(b) - int(a)) * int(a);
            assert_eq!(lhs.eval(&vals).unwrap(), direct);
        }
    }

    #[test]
    fn substitution() {
        let p = x() * y();
        let r = p.rename(&[(Var::X, Var::X1), (Var::Y, Var::X2)]);
        assert_eq!(r, Polynomial::var(Var::X1) * Polynomial::var(Var::X2));

        let sq = x() * x();
        let v = sq.substitute(&[(Var::X, Polynomial::int(3))]);
        assert_eq!(v, Polynomial::int(9));

        let s = x() + y();
        assert_eq!(s.rename(&[(Var::X, Var::Y), (Var::Y, Var::X)]), s);
    }

    #[test]
    fn division_helpers() {
        let p = (Polynomial::var(Var::X2) - Polynomial::var(Var::X1)) * (x() * x() + Polynomial::int(2));
        let q = p.div_by_difference(Var::X1, Var::X2).unwrap();
        assert_eq!(q, x() * x() + Polynomial::int(2));
        assert!((x() + Polynomial::one()).div_by_difference(Var::X, Var::Y).is_none());
        assert_eq!((x() * y()).div_by_var(Var::X), Some(y()));
        assert!((x() + y()).div_by_var(Var::X).is_none());
    }

    #[test]
    fn render_parse() {
        let p = Polynomial::monomial(rat(1, 2), &[(Var::X, 2), (Var::Y, 1)])
            - Polynomial::monomial(rat(-3, 4), &[(Var::X3, 1)])
            - Polynomial::one();
        let s = p.render();
        assert_eq!(s, "1/2*x^2*y + 3/4*x3 - 1");
        assert_eq!(Polynomial::parse(&s).unwrap(), p);
        assert_eq!(Polynomial::parse("-x + 2*x").unwrap(), x());
        assert_eq!(Polynomial::parse("0").unwrap(), Polynomial::zero());
        assert!(Polynomial::parse("x +").is_err());
        assert!(Polynomial::parse("w").is_err());
    }

    #[test]
    fn graded_order() {
        assert!(Monomial::var(Var::X) > Monomial::var(Var::Y));
        assert!(Monomial::var(Var::Y) > Monomial::one());
        let xy = Monomial([1, 1, 0, 0, 0, 0]);
        assert!(xy > Monomial::var(Var::X));
    }
}

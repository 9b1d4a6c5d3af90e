//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Monomials are ordered graded-lexicographically over the variable order
//! `μ-symbols < V < ε-symbols < λ-symbols`. That order fixes both the
//! division algorithm and the serialized term order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// A formal symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Base size `μ₀`, `μ₁`, …
    Mu(u32),
    /// Fiber volume `V`.
    Volume,
    /// Blow-up weight `εᵢ`, 1-based.
    Eps(u32),
    /// Cohomology coordinate `λ_α`, 1-based.
    Lambda(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Mu(i) => write!(f, "mu{i}"),
            Var::Volume => write!(f, "V"),
            Var::Eps(i) => write!(f, "eps{i}"),
            Var::Lambda(i) => write!(f, "lambda{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("unknown variable name {0:?}")]
    UnknownVar(String),
    #[error("exponent vector has {got} entries, expected {expected}")]
    ExponentLength { got: usize, expected: usize },
    #[error("duplicate variable {0}")]
    DuplicateVar(Var),
    #[error("duplicate monomial in term list")]
    DuplicateMonomial,
    #[error(transparent)]
    Rational(#[from] rational::ParseRationalError),
}

impl FromStr for Var {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let index = |rest: &str| rest.parse::<u32>().ok();
        let parsed = if s == "V" {
            Some(Var::Volume)
        } else if let Some(r) = s.strip_prefix("lambda") {
            index(r).map(Var::Lambda)
        } else if let Some(r) = s.strip_prefix("eps") {
            index(r).map(Var::Eps)
        } else if let Some(r) = s.strip_prefix("mu") {
            index(r).map(Var::Mu)
        } else {
            None
        };
        parsed.ok_or_else(|| PolyError::UnknownVar(s.to_string()))
    }
}

/// A monomial as a sorted list of `(variable, exponent)` with exponents ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in powers {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(self.0.iter().chain(&other.0).copied())
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut rest = other.0.iter().peekable();
        for &(v, e) in &self.0 {
            match rest.peek() {
                Some(&&(w, f)) if w == v => {
                    rest.next();
                    match e.cmp(&f) {
                        Ordering::Less => return None,
                        Ordering::Equal => {}
                        Ordering::Greater => out.push((v, e - f)),
                    }
                }
                Some(&&(w, _)) if w < v => return None,
                _ => out.push((v, e)),
            }
        }
        if rest.next().is_some() {
            return None;
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    /// Graded lex: total degree first, then the larger exponent on the
    /// earliest variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut a, mut b) = (self.0.iter(), other.0.iter());
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(v, e)), Some(&(w, f))) => match v.cmp(&w) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal if e != f => return e.cmp(&f),
                        Ordering::Equal => {}
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial over ℚ. No zero coefficient is ever stored, so structural
/// equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

pub type VolumePolynomial = Polynomial;

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
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

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Variables occurring with non-zero coefficient, in variable order.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (n, a) in &self.terms {
            out.add_term(n.mul(m), a * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Division by a single polynomial in the graded-lex order.
    ///
    /// Returns `(q, r)` with `self = q·divisor + r` and no term of `r`
    /// divisible by the leading monomial of `divisor`. With one divisor this
    /// remainder is unique, so `r == 0` exactly when `divisor` divides `self`.
    ///
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let (lm, lc) = divisor.leading_term().expect("division by zero polynomial");
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut q = Polynomial::zero();
        let mut r = Polynomial::zero();
        let mut p = self.clone();
        while let Some((m, c)) = p.terms.pop_last() {
            match m.div(&lm) {
                Some(t) => {
                    let f = &c / &lc;
                    // p ← p − f·t·divisor, with the leading term already removed.
                    for (n, a) in divisor.terms.iter().rev().skip(1) {
                        p.add_term(n.mul(&t), -(a * &f));
                    }
                    q.add_term(t, f);
                }
                None => r.add_term(m, c),
            }
        }
        (q, r)
    }

    /// Replaces `v` by `value` everywhere.
    pub fn substitute(&self, v: Var, value: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        let mut powers: Vec<Polynomial> = vec![Polynomial::constant(Rational::one())];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let rest = Monomial(m.0.iter().copied().filter(|&(w, _)| w != v).collect());
            out = &out + &powers[e].mul_monomial(&rest, c);
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, a) in &self.terms {
            for (n, b) in &rhs.terms {
                out.add_term(m.mul(n), a * b);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                $tr::$f(&self, &rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", rational::format(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational::format(&mag))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coef: rational::Q,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

impl Polynomial {
    fn to_json(&self) -> PolyJson {
        let vars: Vec<Var> = self.vars().into_iter().collect();
        let terms = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| TermJson {
                exp: vars.iter().map(|&v| m.exponent(v)).collect(),
                coef: rational::Q(c.clone()),
            })
            .collect();
        PolyJson {
            vars: vars.iter().map(Var::to_string).collect(),
            terms,
        }
    }

    fn from_json(raw: PolyJson) -> Result<Self, PolyError> {
        let vars: Vec<Var> = raw.vars.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        let mut seen = BTreeSet::new();
        for &v in &vars {
            if !seen.insert(v) {
                return Err(PolyError::DuplicateVar(v));
            }
        }
        let mut out = Polynomial::zero();
        let mut monomials = BTreeSet::new();
        for t in raw.terms {
            if t.exp.len() != vars.len() {
                return Err(PolyError::ExponentLength {
                    got: t.exp.len(),
                    expected: vars.len(),
                });
            }
            let m = Monomial::from_powers(vars.iter().copied().zip(t.exp));
            if !monomials.insert(m.clone()) {
                return Err(PolyError::DuplicateMonomial);
            }
            out.add_term(m, t.coef.0);
        }
        Ok(out)
    }
}

/// `{"vars": [...], "terms": [{"exp": [...], "coef": "p/q"}, ...]}`, terms
/// listed from the leading monomial down, `vars` the occurring variables.
impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Polynomial::from_json(PolyJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn x() -> Polynomial {
        Polynomial::var(Var::Mu(0))
    }
    fn y() -> Polynomial {
        Polynomial::var(Var::Eps(1))
    }
    fn c(p: i64, q: i64) -> Polynomial {
        Polynomial::constant(ratio(p, q))
    }

    #[test]
    fn graded_lex_order() {
        let mu = Monomial::var(Var::Mu(0));
        let v = Monomial::var(Var::Volume);
        let e = Monomial::var(Var::Eps(1));
        let l = Monomial::var(Var::Lambda(1));
        assert!(Monomial::one() < l);
        assert!(l < e && e < v && v < mu);
        let e2 = Monomial::from_powers([(Var::Eps(1), 2)]);
        assert!(mu < e2);
        let mu_e = Monomial::from_powers([(Var::Mu(0), 1), (Var::Eps(1), 1)]);
        assert!(e2 < mu_e);
    }

    #[test]
    fn arithmetic_cancels_exactly() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let q = &x().pow(2) - &y().pow(2);
        assert_eq!(p, q);
        assert!((&p - &q).is_zero());
        assert_eq!(p.to_string(), "mu0^2 - eps1^2");
        assert_eq!((&x() * &c(0, 1)).len(), 0);
    }

    #[test]
    fn division_exact_and_inexact() {
        let g = &Polynomial::var(Var::Volume) - &y().pow(2).scale(&ratio(1, 2));
        let f = &g * &(&x() + &y().scale(&int(3)));
        let (q, r) = f.div_rem(&g);
        assert!(r.is_zero());
        assert_eq!(q, &x() + &y().scale(&int(3)));

        let h = &f + &c(1, 1);
        let (q2, r2) = h.div_rem(&g);
        assert_eq!(&(&q2 * &g) + &r2, h);
        assert!(!r2.is_zero());
    }

    #[test]
    fn substitution() {
        let p = &x().pow(2) + &(&x() * &y());
        let s = p.substitute(Var::Mu(0), &(&y() + &c(1, 1)));
        let expect = &(&y() + &c(1, 1)).pow(2) + &(&(&y() + &c(1, 1)) * &y());
        assert_eq!(s, expect);
    }

    #[test]
    fn json_is_canonical() {
        let p = &(&x() * &Polynomial::var(Var::Volume)) - &(&y().pow(2) * &x()).scale(&ratio(1, 2));
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(
            js,
            r#"{"vars":["mu0","V","eps1"],"terms":[{"exp":[1,0,2],"coef":"-1/2"},{"exp":[1,1,0],"coef":"1"}]}"#
        );
        let back: Polynomial = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);

        let reordered = r#"{"vars":["eps1","mu0","V"],"terms":[{"exp":[0,1,1],"coef":"1"},{"exp":[2,1,0],"coef":"-2/4"}]}"#;
        let q: Polynomial = serde_json::from_str(reordered).unwrap();
        assert_eq!(serde_json::to_string(&q).unwrap(), js);

        assert!(serde_json::from_str::<Polynomial>(r#"{"vars":["nu"],"terms":[]}"#).is_err());
        assert!(serde_json::from_str::<Polynomial>(r#"{"vars":["mu0"],"terms":[{"exp":[1,2],"coef":"1"}]}"#).is_err());
    }
}

//! Volumes of blown-up bundles over S² as exact polynomials, and the
//! decision procedures built on them.
//!
//! A bundle `P → S²` with fiber volume `V` and base size `μ₀` has volume
//! `μ₀V`. Blowing up along a section with `I_a = λ` and vertical Chern number
//! `ℓ` using a ball of capacity `ε` removes `v_ε(μ₀ + λ − ℓε/(n+1))`, where
//! `v_ε = εⁿ/n!`. A smoothly trivial bundle must instead have volume
//! `(V − v_ε)(μ₁ + sε)`; comparing coefficients separates the two.

mod fibersum;
mod rank;
mod tower;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::poly::{Monomial, Polynomial, Var};
use crate::rational::{self, Rational};

pub use fibersum::{fibersum_feasibility, FiberSumWitness, DEFAULT_M_MAX};
pub use rank::{rank_certificate, RankCertificate, StageParameter};
pub use tower::{chern_consistency, vol_multi_blowup, vol_tower, BundleTower, TowerStage};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VolumeError {
    #[error("fiber dimension must be at least 1, got {0}")]
    InvalidDimension(i64),
    #[error("malformed variable set: {0}")]
    MalformedVariables(String),
    #[error("malformed tower: {0}")]
    MalformedTower(String),
    #[error("chern basis has {got} entries, expected r = {expected}")]
    ChernBasisLength { got: usize, expected: usize },
    #[error("coefficient map has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("m_max must be at least 1")]
    InvalidSummandBound,
}

/// The fiber volume, either the formal symbol `V` or a number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum FiberVolume {
    #[default]
    Symbol,
    Value(Rational),
}

impl FiberVolume {
    pub fn as_polynomial(&self) -> Polynomial {
        match self {
            FiberVolume::Symbol => Polynomial::var(Var::Volume),
            FiberVolume::Value(v) => Polynomial::constant(v.clone()),
        }
    }
}

impl fmt::Display for FiberVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberVolume::Symbol => write!(f, "V"),
            FiberVolume::Value(v) => write!(f, "{}", rational::format(v)),
        }
    }
}

impl Serialize for FiberVolume {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiberVolume {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) if s == "V" => Ok(FiberVolume::Symbol),
            Raw::Str(s) => rational::parse(&s)
                .map(FiberVolume::Value)
                .map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(FiberVolume::Value(rational::int(i))),
        }
    }
}

pub(crate) fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n).map(BigInt::from).product())
}

pub(crate) fn check_dim(n: i64) -> Result<u32, VolumeError> {
    u32::try_from(n)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or(VolumeError::InvalidDimension(n))
}

/// `v_ε = εⁿ/n!` as a polynomial in `eps`.
pub fn ball_volume(n: i64, eps: Var) -> Result<Polynomial, VolumeError> {
    let n = check_dim(n)?;
    Ok(Polynomial::term(
        factorial(n).recip(),
        Monomial::from_powers([(eps, n)]),
    ))
}

/// `μ₀V − v_ε(μ₀ + λ − ℓε/(n+1))` in the variables `mu0`, `eps1` (and `V`).
pub fn vol_single_blowup(
    n: i64,
    fiber: &FiberVolume,
    lambda: &Rational,
    ell: i64,
) -> Result<Polynomial, VolumeError> {
    let v_eps = ball_volume(n, Var::Eps(1))?;
    let mu = Polynomial::var(Var::Mu(0));
    let eps = Polynomial::var(Var::Eps(1));
    let normal_shift = eps.scale(&(rational::int(ell) / rational::int(n + 1)));
    let section_area = &(&mu + &Polynomial::constant(lambda.clone())) - &normal_shift;
    Ok(&(&mu * &fiber.as_polynomial()) - &(&v_eps * &section_area))
}

/// A factorization `p = (V − εⁿ/n!)(μ₁ + slope·ε)` with `μ₁` affine in μ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialityWitness {
    pub mu1: Polynomial,
    #[serde(with = "rational::serde_q")]
    pub slope: Rational,
}

impl TrivialityWitness {
    /// Expands `(V − εⁿ/n!)(μ₁ + slope·ε)`.
    pub fn expand(&self, n: i64, fiber: &FiberVolume, eps: Var) -> Result<Polynomial, VolumeError> {
        let g = &fiber.as_polynomial() - &ball_volume(n, eps)?;
        let size = &self.mu1 + &Polynomial::var(eps).scale(&self.slope);
        Ok(&g * &size)
    }
}

/// Decides whether `p` factors as a trivial bundle volume
/// `(V − εⁿ/n!)(μ₁ + slope·ε)`. `None` certifies smooth non-triviality.
///
/// `p` may involve at most one μ-symbol, one ε-symbol, and `V` (the latter
/// only when `fiber` is symbolic).
pub fn triviality_test(
    p: &Polynomial,
    n: i64,
    fiber: &FiberVolume,
) -> Result<Option<TrivialityWitness>, VolumeError> {
    let mut mu = None;
    let mut eps = None;
    for v in p.vars() {
        match v {
            Var::Mu(_) if mu.is_none() => mu = Some(v),
            Var::Eps(_) if eps.is_none() => eps = Some(v),
            Var::Volume if *fiber == FiberVolume::Symbol => {}
            other => {
                return Err(VolumeError::MalformedVariables(format!(
                    "unexpected variable {other} in {p}"
                )))
            }
        }
    }
    let eps = eps.unwrap_or(Var::Eps(1));
    let g = &fiber.as_polynomial() - &ball_volume(n, eps)?;
    let (q, r) = p.div_rem(&g);
    if !r.is_zero() {
        return Ok(None);
    }

    let mut mu1 = Polynomial::zero();
    let mut slope = Rational::zero();
    for (m, c) in q.terms() {
        if m.is_one() || Some(m) == mu.map(Monomial::var).as_ref() {
            mu1.add_term(m.clone(), c.clone());
        } else if *m == Monomial::var(eps) {
            slope = c.clone();
        } else {
            return Ok(None);
        }
    }
    Ok(Some(TrivialityWitness { mu1, slope }))
}

/// Membership of `(λ, ℓ)` in the volume profiles realized by symplectic
/// loops on CP² # CP̄²: exactly `λ = ℓ/3`.
pub fn symp_image_family(lambda: &Rational, ell: i64) -> bool {
    lambda * rational::int(3) == rational::int(ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mu0() -> Polynomial {
        Polynomial::var(Var::Mu(0))
    }
    fn eps() -> Polynomial {
        Polynomial::var(Var::Eps(1))
    }
    fn vsym() -> Polynomial {
        Polynomial::var(Var::Volume)
    }

    #[test]
    fn ball_volumes() {
        let e = Var::Eps(1);
        assert_eq!(ball_volume(2, e).unwrap(), eps().pow(2).scale(&ratio(1, 2)));
        assert_eq!(ball_volume(1, e).unwrap(), eps());
        assert_eq!(ball_volume(3, e).unwrap(), eps().pow(3).scale(&ratio(1, 6)));
        assert_eq!(ball_volume(0, e), Err(VolumeError::InvalidDimension(0)));
    }

    #[test]
    fn single_blowup_examples() {
        let half_eps2 = eps().pow(2).scale(&ratio(1, 2));
        let base = &mu0() * &vsym();

        let p = vol_single_blowup(2, &FiberVolume::Symbol, &int(0), 0).unwrap();
        assert_eq!(p, &base - &(&half_eps2 * &mu0()));

        let p = vol_single_blowup(2, &FiberVolume::Symbol, &int(1), 3).unwrap();
        let inner = &(&mu0() + &Polynomial::constant(int(1))) - &eps();
        assert_eq!(p, &base - &(&half_eps2 * &inner));

        let p = vol_single_blowup(2, &FiberVolume::Symbol, &int(0), 1).unwrap();
        let inner = &mu0() - &eps().scale(&ratio(1, 3));
        assert_eq!(p, &base - &(&half_eps2 * &inner));
    }

    #[test]
    fn triviality_examples() {
        let sym = FiberVolume::Symbol;
        let p = vol_single_blowup(2, &sym, &int(0), 0).unwrap();
        let w = triviality_test(&p, 2, &sym).unwrap().unwrap();
        assert_eq!(w.mu1, mu0());
        assert_eq!(w.slope, int(0));
        assert_eq!(w.expand(2, &sym, Var::Eps(1)).unwrap(), p);

        let p = vol_single_blowup(2, &sym, &int(1), 3).unwrap();
        assert_eq!(triviality_test(&p, 2, &sym).unwrap(), None);
        let p = vol_single_blowup(2, &sym, &int(0), 1).unwrap();
        assert_eq!(triviality_test(&p, 2, &sym).unwrap(), None);
    }

    #[test]
    fn triviality_finds_slopes() {
        // (V − ε²/2)(2μ₀ + 1 − 3ε) factors with slope −3.
        let g = &vsym() - &eps().pow(2).scale(&ratio(1, 2));
        let size = &(&mu0().scale(&int(2)) + &Polynomial::constant(int(1))) - &eps().scale(&int(3));
        let p = &g * &size;
        let w = triviality_test(&p, 2, &FiberVolume::Symbol).unwrap().unwrap();
        assert_eq!(w.slope, int(-3));
        assert_eq!(w.mu1, &mu0().scale(&int(2)) + &Polynomial::constant(int(1)));
    }

    #[test]
    fn triviality_with_numeric_fiber() {
        let fiber = FiberVolume::Value(ratio(9, 2));
        let p = vol_single_blowup(2, &fiber, &int(0), 0).unwrap();
        let w = triviality_test(&p, 2, &fiber).unwrap().unwrap();
        assert_eq!(w.mu1, mu0());
        let p = vol_single_blowup(2, &fiber, &int(0), 2).unwrap();
        assert_eq!(triviality_test(&p, 2, &fiber).unwrap(), None);
        // V must not appear when the fiber volume is numeric.
        let p = vol_single_blowup(2, &FiberVolume::Symbol, &int(0), 0).unwrap();
        assert!(triviality_test(&p, 2, &fiber).is_err());
    }

    #[test]
    fn triviality_rejects_extra_variables() {
        let p = &mu0() + &Polynomial::var(Var::Mu(1));
        assert!(matches!(
            triviality_test(&p, 2, &FiberVolume::Symbol),
            Err(VolumeError::MalformedVariables(_))
        ));
        let p = &eps() * &Polynomial::var(Var::Lambda(1));
        assert!(triviality_test(&p, 2, &FiberVolume::Symbol).is_err());
    }

    #[test]
    fn symplectic_image() {
        assert!(symp_image_family(&int(1), 3));
        assert!(!symp_image_family(&int(0), 1));
        assert!(symp_image_family(&ratio(2, 3), 2));
        assert!(symp_image_family(&int(0), 0));
        assert!(symp_image_family(&int(-1), -3));
    }

    #[test]
    fn fiber_volume_json() {
        let f: FiberVolume = serde_json::from_str("\"V\"").unwrap();
        assert_eq!(f, FiberVolume::Symbol);
        let f: FiberVolume = serde_json::from_str("\"6/4\"").unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), "\"3/2\"");
        let f: FiberVolume = serde_json::from_str("2").unwrap();
        assert_eq!(f, FiberVolume::Value(int(2)));
    }
}

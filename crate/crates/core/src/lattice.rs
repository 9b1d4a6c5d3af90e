//! The second-homology lattice of the k-fold blow-up of CP².
//!
//! The lattice has basis `L, E1, …, Ek` with diagonal intersection form
//! `(+1, −1, …, −1)`. A class is written `dL − Σ mᵢEᵢ`, and the first Chern
//! class is `c₁ = 3L − ΣEᵢ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("rank mismatch: {left} blow-up points vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("blow-up index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },
}

/// `H₂` of CP² blown up at `k` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlowupLattice {
    k: usize,
}

pub fn make_lattice(k: usize) -> BlowupLattice {
    BlowupLattice { k }
}

impl BlowupLattice {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.k + 1
    }

    /// Intersection form on basis vectors, indexed `0 = L`, `i = Eᵢ`.
    pub fn form(&self, a: usize, b: usize) -> i64 {
        match (a, b) {
            (0, 0) => 1,
            (a, b) if a == b => -1,
            _ => 0,
        }
    }

    /// Values of c₁ on the basis `L, E1, …, Ek`.
    pub fn c1_vector(&self) -> Vec<i64> {
        std::iter::once(3).chain(std::iter::repeat_n(1, self.k)).collect()
    }

    pub fn line(&self) -> HClass {
        HClass::line(self.k)
    }

    pub fn exceptional(&self, i: usize) -> HClass {
        HClass::exceptional(self.k, i)
    }

    pub fn basis(&self) -> Vec<HClass> {
        std::iter::once(self.line())
            .chain((1..=self.k).map(|i| self.exceptional(i)))
            .collect()
    }
}

/// The integral class `dL − Σ mᵢEᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HClass {
    pub d: i64,
    pub m: Vec<i64>,
}

impl HClass {
    pub fn new(d: i64, m: Vec<i64>) -> Self {
        HClass { d, m }
    }

    pub fn zero(k: usize) -> Self {
        HClass { d: 0, m: vec![0; k] }
    }

    pub fn line(k: usize) -> Self {
        HClass { d: 1, m: vec![0; k] }
    }

    /// `Eᵢ`, with `i` counted from 1.
    ///
    /// Panics if `i` is not in `1..=k`.
    pub fn exceptional(k: usize, i: usize) -> Self {
        assert!((1..=k).contains(&i), "exceptional index {i} out of 1..={k}");
        let mut m = vec![0; k];
        m[i - 1] = -1;
        HClass { d: 0, m }
    }

    pub fn k(&self) -> usize {
        self.m.len()
    }

    pub fn is_zero(&self) -> bool {
        self.d == 0 && self.m.iter().all(|&x| x == 0)
    }

    pub fn self_intersection(&self) -> i64 {
        self.d * self.d - self.m.iter().map(|x| x * x).sum::<i64>()
    }

    /// Intersection number, panicking on a rank mismatch.
    pub fn dot(&self, other: &HClass) -> i64 {
        assert_eq!(self.k(), other.k(), "classes live in different lattices");
        self.d * other.d - self.m.iter().zip(&other.m).map(|(a, b)| a * b).sum::<i64>()
    }

    fn check_rank(&self, other: &HClass) -> Result<(), LatticeError> {
        if self.k() != other.k() {
            return Err(LatticeError::RankMismatch {
                left: self.k(),
                right: other.k(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        let mut term = |f: &mut fmt::Formatter<'_>, coef: i64, label: &str| -> fmt::Result {
            if coef == 0 {
                return Ok(());
            }
            let sign = if coef < 0 { "-" } else { "+" };
            let mag = coef.abs();
            match (wrote, coef < 0) {
                (false, false) => {}
                (false, true) => write!(f, "-")?,
                (true, _) => write!(f, " {sign} ")?,
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "{label}")?;
            wrote = true;
            Ok(())
        };
        term(f, self.d, "L")?;
        for (i, &mi) in self.m.iter().enumerate() {
            term(f, -mi, &format!("E{}", i + 1))?;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &HClass {
    type Output = HClass;

    fn add(self, rhs: &HClass) -> HClass {
        assert_eq!(self.k(), rhs.k());
        HClass {
            d: self.d + rhs.d,
            m: self.m.iter().zip(&rhs.m).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &HClass {
    type Output = HClass;

    fn sub(self, rhs: &HClass) -> HClass {
        self + &(-rhs)
    }
}

impl Neg for &HClass {
    type Output = HClass;

    fn neg(self) -> HClass {
        HClass {
            d: -self.d,
            m: self.m.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul<&HClass> for i64 {
    type Output = HClass;

    fn mul(self, rhs: &HClass) -> HClass {
        HClass {
            d: self * rhs.d,
            m: rhs.m.iter().map(|x| self * x).collect(),
        }
    }
}

/// Intersection number `a·b` under the form `(+1, −1, …, −1)`.
pub fn intersect(a: &HClass, b: &HClass) -> Result<i64, LatticeError> {
    a.check_rank(b)?;
    Ok(a.dot(b))
}

/// `c₁(dL − Σ mᵢEᵢ) = 3d − Σ mᵢ`.
pub fn c1(a: &HClass) -> i64 {
    3 * a.d - a.m.iter().sum::<i64>()
}

/// `(2 + a·a − c₁(a)) / 2`.
///
/// `c₁` is a characteristic vector of this lattice (`x² ≡ c₁·x mod 2`), so the
/// numerator is always even and the result is an exact integer.
pub fn adjunction_defect(a: &HClass) -> i64 {
    let num = 2 + a.self_intersection() - c1(a);
    debug_assert_eq!(num % 2, 0);
    num / 2
}

/// Square −1 and c₁ = 1.
pub fn is_numerically_exceptional(a: &HClass) -> bool {
    a.self_intersection() == -1 && c1(a) == 1
}

/// Exceptional candidates `dL − Σ mᵢEᵢ` with `d ≤ d_max`: the classes `Eᵢ`
/// together with every class with `d ≥ 1`, all `mᵢ ≥ 0`, square −1, c₁ = 1.
/// Sorted by `d`, then lexicographically on `m`.
pub fn enumerate_exceptional(lat: &BlowupLattice, d_max: u32) -> Vec<HClass> {
    let k = lat.k();
    let mut out: Vec<HClass> = (1..=k).map(|i| lat.exceptional(i)).collect();
    for d in 1..=i64::from(d_max) {
        // Σmᵢ² = d² + 1 and Σmᵢ = 3d − 1, each mᵢ ∈ [0, ⌊√(d²+1)⌋] = [0, d].
        let mut buf = Vec::with_capacity(k);
        search_m(k, 3 * d - 1, d * d + 1, 0, d, &mut buf, &mut |m| {
            out.push(HClass::new(d, m.to_vec()))
        });
    }
    out.sort();
    out
}

/// Every class in the box `d_range × [−m_bound, m_bound]ᵏ` with square −1 and
/// c₁ = 1, without sign restrictions. Sorted canonically.
pub fn exceptional_in_box(
    k: usize,
    d_range: std::ops::RangeInclusive<i64>,
    m_bound: i64,
) -> Vec<HClass> {
    let mut out = Vec::new();
    for d in d_range {
        let mut buf = Vec::with_capacity(k);
        search_m(k, 3 * d - 1, d * d + 1, -m_bound, m_bound, &mut buf, &mut |m| {
            out.push(HClass::new(d, m.to_vec()))
        });
    }
    out.sort();
    out
}

/// Depth-first search for integer vectors of length `slots` in `[lo, hi]`
/// with prescribed sum and sum of squares.
fn search_m(
    slots: usize,
    sum: i64,
    squares: i64,
    lo: i64,
    hi: i64,
    buf: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    if slots == 0 {
        if sum == 0 && squares == 0 {
            emit(buf);
        }
        return;
    }
    if squares < 0 {
        return;
    }
    // Cauchy–Schwarz: sum² ≤ slots · squares; parity: x² ≡ x (mod 2).
    if sum * sum > slots as i64 * squares || (sum - squares) % 2 != 0 {
        return;
    }
    for x in lo..=hi {
        if x * x > squares {
            continue;
        }
        buf.push(x);
        search_m(slots - 1, sum - x, squares - x * x, lo, hi, buf, emit);
        buf.pop();
    }
}

/// True iff every two distinct classes in the list are orthogonal.
pub fn kodaira_nonneg(classes: &[HClass]) -> Result<bool, LatticeError> {
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if a == b {
                continue;
            }
            if intersect(a, b)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Cohomology data `(μ; ε₁ ≥ … ≥ ε_k)` of a blow-up form on CP² # k CP̄².
///
/// Weights are kept sorted non-increasing; the sort is stable so ties keep
/// their input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticShape {
    mu: Rational,
    eps: Vec<Rational>,
}

impl SymplecticShape {
    pub fn new(mu: Rational, mut eps: Vec<Rational>) -> Result<Self, LatticeError> {
        if !mu.is_positive() {
            return Err(LatticeError::InvalidShape(format!(
                "mu must be positive, got {}",
                rational::format(&mu)
            )));
        }
        if let Some(bad) = eps.iter().find(|e| !e.is_positive()) {
            return Err(LatticeError::InvalidShape(format!(
                "blow-up weights must be positive, got {}",
                rational::format(bad)
            )));
        }
        eps.sort_by(|a, b| b.cmp(a));
        Ok(SymplecticShape { mu, eps })
    }

    /// Convenience constructor from integer numerators over a common denominator.
    pub fn from_ints(mu: i64, eps: &[i64]) -> Result<Self, LatticeError> {
        Self::new(
            rational::int(mu),
            eps.iter().map(|&e| rational::int(e)).collect(),
        )
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn eps(&self) -> &[Rational] {
        &self.eps
    }

    pub fn k(&self) -> usize {
        self.eps.len()
    }

    /// `μ²/2 − Σ εᵢ²/2`.
    pub fn volume(&self) -> Rational {
        let two = rational::int(2);
        let sq: Rational = self.eps.iter().map(|e| e * e).sum();
        (&self.mu * &self.mu - sq) / two
    }

    /// Whether the anticanonical volume is positive. Shapes failing this are
    /// representable but cannot be blow-up forms.
    pub fn has_positive_volume(&self) -> bool {
        self.volume().is_positive()
    }
}

impl fmt::Display for SymplecticShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", rational::format(&self.mu))?;
        for (i, e) in self.eps.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}", rational::format(e))?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct ShapeJson {
    #[serde(with = "rational::serde_q")]
    mu: Rational,
    #[serde(with = "rational::serde_vec")]
    eps: Vec<Rational>,
}

impl Serialize for SymplecticShape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ShapeJson {
            mu: self.mu.clone(),
            eps: self.eps.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticShape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ShapeJson::deserialize(d)?;
        SymplecticShape::new(raw.mu, raw.eps).map_err(serde::de::Error::custom)
    }
}

/// `ω(a) = d·μ − Σ mᵢεᵢ`.
pub fn omega_area(shape: &SymplecticShape, a: &HClass) -> Result<Rational, LatticeError> {
    if shape.k() != a.k() {
        return Err(LatticeError::RankMismatch {
            left: shape.k(),
            right: a.k(),
        });
    }
    let mut area = rational::int(a.d) * shape.mu();
    for (mi, ei) in a.m.iter().zip(shape.eps()) {
        if *mi != 0 {
            area -= rational::int(*mi) * ei;
        }
    }
    Ok(area)
}

/// `ε₁ + ε₂ + ε₃ ≤ μ`, treating missing weights as zero.
pub fn is_reduced(shape: &SymplecticShape) -> bool {
    let top: Rational = shape.eps().iter().take(3).sum();
    top <= *shape.mu()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn e(k: usize, i: usize) -> HClass {
        HClass::exceptional(k, i)
    }

    #[test]
    fn lattice_basics() {
        let l0 = make_lattice(0);
        assert_eq!(l0.rank(), 1);
        assert_eq!(l0.basis(), vec![HClass::new(1, vec![])]);
        let l2 = make_lattice(2);
        assert_eq!(l2.rank(), 3);
        assert_eq!(l2.c1_vector(), vec![3, 1, 1]);
        for (i, b) in l2.basis().iter().enumerate() {
            assert_eq!(c1(b), l2.c1_vector()[i]);
            for (j, b2) in l2.basis().iter().enumerate() {
                assert_eq!(intersect(b, b2).unwrap(), l2.form(i, j));
            }
        }
        assert_eq!(make_lattice(6).rank(), 7);
    }

    #[test]
    fn intersections() {
        let k = 2;
        let l = HClass::line(k);
        assert_eq!(intersect(&l, &l).unwrap(), 1);
        assert_eq!(intersect(&e(k, 1), &e(k, 1)).unwrap(), -1);
        let c = HClass::new(1, vec![1, 1]);
        assert_eq!(intersect(&c, &c).unwrap(), -1);
        assert_eq!(
            intersect(&c, &HClass::line(3)),
            Err(LatticeError::RankMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn chern_and_defect() {
        assert_eq!(c1(&e(3, 1)), 1);
        assert_eq!(c1(&HClass::line(3)), 3);
        assert_eq!(c1(&HClass::new(1, vec![1, 1, 1])), 0);
        assert_eq!(adjunction_defect(&HClass::line(0)), 0);
        assert_eq!(adjunction_defect(&HClass::new(2, vec![])), 0);
        assert_eq!(adjunction_defect(&HClass::new(3, vec![1])), 1);
    }

    #[test]
    fn defect_numerator_is_always_even() {
        for d in -6..=6 {
            for a in -6..=6 {
                for b in -6..=6 {
                    let c = HClass::new(d, vec![a, b]);
                    assert_eq!((2 + c.self_intersection() - c1(&c)) % 2, 0);
                }
            }
        }
    }

    #[test]
    fn enumerate_small_cases() {
        let got = enumerate_exceptional(&make_lattice(2), 1);
        assert_eq!(got, vec![e(2, 1), e(2, 2), HClass::new(1, vec![1, 1])]);
        assert_eq!(enumerate_exceptional(&make_lattice(1), 5), vec![e(1, 1)]);
        assert_eq!(enumerate_exceptional(&make_lattice(0), 4), vec![]);

        let six = enumerate_exceptional(&make_lattice(6), 2);
        assert_eq!(six.len(), 27);
        assert_eq!(six.iter().filter(|c| c.d == 0).count(), 6);
        assert_eq!(six.iter().filter(|c| c.d == 1).count(), 15);
        assert_eq!(six.iter().filter(|c| c.d == 2).count(), 6);
        for c in &six {
            assert!(is_numerically_exceptional(c));
            assert_eq!(adjunction_defect(c), 0);
        }
    }

    #[test]
    fn canonical_order_is_by_degree_first() {
        let got = enumerate_exceptional(&make_lattice(5), 2);
        assert!(got.windows(2).all(|w| w[0] < w[1]));
        assert!(got.windows(2).all(|w| w[0].d <= w[1].d));
    }

    #[test]
    fn kodaira() {
        let k = 2;
        assert!(kodaira_nonneg(&[e(k, 1), e(k, 2)]).unwrap());
        assert!(!kodaira_nonneg(&[e(k, 1), HClass::new(1, vec![1, 1])]).unwrap());
        assert!(kodaira_nonneg(&[]).unwrap());
    }

    #[test]
    fn areas() {
        let s = SymplecticShape::from_ints(3, &[1, 1]).unwrap();
        assert_eq!(omega_area(&s, &e(2, 2)).unwrap(), int(1));
        assert_eq!(omega_area(&s, &HClass::new(1, vec![1, 1])).unwrap(), int(1));
        let s = SymplecticShape::from_ints(5, &[2, 2, 2]).unwrap();
        assert_eq!(omega_area(&s, &HClass::line(3)).unwrap(), int(5));
        assert!(omega_area(&s, &HClass::line(2)).is_err());
    }

    #[test]
    fn reducedness() {
        assert!(is_reduced(&SymplecticShape::from_ints(3, &[1, 1, 1]).unwrap()));
        assert!(!is_reduced(&SymplecticShape::from_ints(5, &[2, 2, 2]).unwrap()));
        assert!(is_reduced(&SymplecticShape::from_ints(3, &[2]).unwrap()));
        assert!(!is_reduced(&SymplecticShape::from_ints(3, &[4]).unwrap()));
    }

    #[test]
    fn shape_sorts_and_validates() {
        let s = SymplecticShape::new(int(4), vec![ratio(1, 2), int(2), int(1)]).unwrap();
        assert_eq!(s.eps(), &[int(2), int(1), ratio(1, 2)]);
        assert!(SymplecticShape::from_ints(0, &[1]).is_err());
        assert!(SymplecticShape::from_ints(3, &[1, 0]).is_err());
        // Non-positive volume is representable, only flagged.
        let big = SymplecticShape::from_ints(1, &[1, 1]).unwrap();
        assert!(!big.has_positive_volume());
    }

    #[test]
    fn shape_json() {
        let s: SymplecticShape = serde_json::from_str(r#"{"mu":"5","eps":["1/2","2","4/4"]}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"mu":"5","eps":["2","1","1/2"]}"#
        );
        assert!(serde_json::from_str::<SymplecticShape>(r#"{"mu":"-1","eps":[]}"#).is_err());
        let c: HClass = serde_json::from_str(r#"{"d":1,"m":[1,1]}"#).unwrap();
        assert_eq!(c.to_string(), "L - E1 - E2");
        assert_eq!(HClass::new(2, vec![0, -1, 3]).to_string(), "2L + E2 - 3E3");
        assert_eq!(e(2, 1).to_string(), "E1");
        assert_eq!((-&HClass::line(1)).to_string(), "-L");
    }
}

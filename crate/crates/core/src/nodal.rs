//! Combinatorics of degenerating exceptional spheres and size constraints
//! on nested blow-ups.
//!
//! In a generic two-parameter family of almost complex structures an
//! exceptional class `E` is represented either by an embedded sphere or by a
//! nodal curve `A₀ ∪ A₁`. Componentwise:
//!
//! - every component is simple, so `c₁(Aᵢ) ≥ 0`, and `Σ c₁(Aᵢ) = 1` forces
//!   `c₁(A₀) = 1` and `c₁(Aᵢ) = 0` otherwise;
//! - adjunction gives `A₀² ≥ −1` and `Aᵢ² ≥ −2` for `i > 0`;
//! - connectedness and positivity of intersections give `Aᵢ·Aⱼ ≥ 1` along a
//!   spanning tree, so `−1 = E² ≥ −1 − 2k + 2k` and every inequality is sharp;
//! - distinct `c₁ = 0` classes are not represented at once, so `k = 1`.
//!
//! [`decompose_exceptional`] searches for exactly this endpoint and
//! [`Decomposition::is_valid`] rechecks it.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{
    adjunction_defect, c1, exceptional_in_box, intersect, is_numerically_exceptional, is_reduced,
    kodaira_nonneg, omega_area, BlowupLattice, HClass, LatticeError, SymplecticShape,
};
use crate::rational::{self, Rational};

/// `GW^{M̃,E}_{0,2}(e^{n−1}, e^{n−1})` for the exceptional divisor of a point
/// blow-up.
pub const E_SELF_PAIRING_GW: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NodalError {
    #[error("{0} is not an exceptional class (needs square -1 and c1 = 1)")]
    NotExceptional(HClass),
    #[error("shape is not reduced: {0}")]
    NotReduced(SymplecticShape),
    #[error("exceptional set is not pairwise disjoint")]
    NotDisjoint,
    #[error("lattice has no exceptional classes")]
    NoBlowup,
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `class = A₀ + A₁`, with `components = [A₀, A₁]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub class: HClass,
    pub components: Vec<HClass>,
}

impl Decomposition {
    /// Components sum to the class, have zero adjunction defect, and satisfy
    /// `c₁(A₀) = 1`, `A₀² = −1`, `c₁(A₁) = 0`, `A₁² = −2`, `A₀·A₁ = 1`.
    pub fn is_valid(&self) -> bool {
        let [a0, a1] = self.components.as_slice() else {
            return false;
        };
        let k = self.class.k();
        if a0.k() != k || a1.k() != k || &(a0 + a1) != &self.class {
            return false;
        }
        c1(a0) == 1
            && a0.self_intersection() == -1
            && c1(a1) == 0
            && a1.self_intersection() == -2
            && intersect(a0, a1) == Ok(1)
            && adjunction_defect(a0) == 0
            && adjunction_defect(a1) == 0
    }
}

fn check_rank(lat: &BlowupLattice, a: &HClass) -> Result<(), NodalError> {
    if a.k() != lat.k() {
        return Err(LatticeError::RankMismatch {
            left: lat.k(),
            right: a.k(),
        }
        .into());
    }
    Ok(())
}

fn in_box(a: &HClass, d_bound: i64) -> bool {
    a.d.abs() <= d_bound && a.m.iter().all(|m| m.abs() <= d_bound + 1)
}

/// All splittings `E = A₀ + A₁` of the shape described in the module docs
/// with both components in the box `|d| ≤ d_bound`, `|mᵢ| ≤ d_bound + 1`.
/// When `shape` is given both components must have positive area.
pub fn decompose_exceptional(
    lat: &BlowupLattice,
    e: &HClass,
    shape: Option<&SymplecticShape>,
    d_bound: u32,
) -> Result<Vec<Decomposition>, NodalError> {
    check_rank(lat, e)?;
    if !is_numerically_exceptional(e) {
        return Err(NodalError::NotExceptional(e.clone()));
    }
    if let Some(s) = shape {
        if s.k() != lat.k() {
            return Err(LatticeError::RankMismatch {
                left: lat.k(),
                right: s.k(),
            }
            .into());
        }
    }
    let d_bound = i64::from(d_bound);
    let mut out = Vec::new();
    // With A₀ exceptional and A₁ = E − A₀, the remaining constraints all
    // reduce to A₀·E = 0.
    for a0 in exceptional_in_box(lat.k(), -d_bound..=d_bound, d_bound + 1) {
        if a0.dot(e) != 0 {
            continue;
        }
        let a1 = e - &a0;
        if !in_box(&a1, d_bound) {
            continue;
        }
        if let Some(s) = shape {
            if !omega_area(s, &a0)?.is_positive() || !omega_area(s, &a1)?.is_positive() {
                continue;
            }
        }
        let dec = Decomposition {
            class: e.clone(),
            components: vec![a0, a1],
        };
        debug_assert!(dec.is_valid());
        out.push(dec);
    }
    out.sort();
    Ok(out)
}

/// Whether the exceptional class of smallest area `E_k` is stable: no
/// `A₀` in `exceptional_set` splits it as `E_k = A₀ + A₁` with `A₁` a
/// `−2`-class of positive area. Zero area counts as no splitting.
pub fn min_class_stability(
    lat: &BlowupLattice,
    shape: &SymplecticShape,
    exceptional_set: &[HClass],
) -> Result<bool, NodalError> {
    let k = lat.k();
    if k == 0 {
        return Err(NodalError::NoBlowup);
    }
    if shape.k() != k {
        return Err(LatticeError::RankMismatch {
            left: k,
            right: shape.k(),
        }
        .into());
    }
    for a in exceptional_set {
        check_rank(lat, a)?;
        if !is_numerically_exceptional(a) {
            return Err(NodalError::NotExceptional(a.clone()));
        }
    }
    if !kodaira_nonneg(exceptional_set)? {
        return Err(NodalError::NotDisjoint);
    }
    let ek = lat.exceptional(k);
    for a0 in exceptional_set.iter().filter(|a| **a != ek) {
        let dec = Decomposition {
            class: ek.clone(),
            components: vec![a0.clone(), &ek - a0],
        };
        if dec.is_valid() && omega_area(shape, &dec.components[1])?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For a reduced shape, checks `Σ_{i∈I} εᵢ ≤ dμ` for every `d ≥ 1` and every
/// `I` of size `3d ≤ k`. Only the `3d` largest weights need checking.
pub fn cp2_minimal_stability(shape: &SymplecticShape) -> Result<bool, NodalError> {
    if !is_reduced(shape) {
        return Err(NodalError::NotReduced(shape.clone()));
    }
    let mut prefix = Rational::zero();
    for (i, e) in shape.eps().iter().enumerate() {
        prefix += e;
        let size = i + 1;
        if size % 3 == 0 && prefix > rational::int((size / 3) as i64) * shape.mu() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn positive(name: &'static str, q: &Rational) -> Result<(), NodalError> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(NodalError::NonPositive {
            name,
            value: rational::format(q),
        })
    }
}

/// A second blow-up of size `eps2` along a section meeting the first
/// exceptional divisor (`link ≠ 0`) must be strictly smaller.
pub fn nested_size_check(eps1: &Rational, eps2: &Rational, link: i64) -> Result<bool, NodalError> {
    positive("eps1", eps1)?;
    positive("eps2", eps2)?;
    Ok(link == 0 || eps1 > eps2)
}

/// Blowing up a bundle of size-`alpha` blow-ups along a section meeting the
/// exceptional divisor (`link ≠ 0`) requires `eps < alpha`.
pub fn blowup_size_bound(alpha: &Rational, eps: &Rational, link: i64) -> Result<bool, NodalError> {
    positive("alpha", alpha)?;
    positive("eps", eps)?;
    Ok(link == 0 || eps < alpha)
}

/// `GW^{P,E_X}_{0,2}([gr_σ], E_X × [S²]) = −[σ]·[Σ_X]`.
pub fn gw_blowdown_pair(link: i64) -> i64 {
    -link
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_lattice;
    use crate::rational::{int, ratio};

    fn e(k: usize, i: usize) -> HClass {
        HClass::exceptional(k, i)
    }
    fn l(k: usize) -> HClass {
        HClass::line(k)
    }

    #[test]
    fn decompose_line_class() {
        let lat = make_lattice(3);
        let class = &(&l(3) - &e(3, 1)) - &e(3, 2);
        let got = decompose_exceptional(&lat, &class, None, 2).unwrap();
        let want = Decomposition {
            class: class.clone(),
            components: vec![e(3, 3), &class - &e(3, 3)],
        };
        assert_eq!(want.components[1], HClass::new(1, vec![1, 1, 1]));
        assert!(got.contains(&want));
        assert!(got.iter().all(Decomposition::is_valid));
    }

    #[test]
    fn decompose_pruned_by_area() {
        let lat = make_lattice(2);
        let shape = SymplecticShape::new(int(3), vec![ratio(3, 2), int(1)]).unwrap();
        let got = decompose_exceptional(&lat, &e(2, 2), Some(&shape), 2).unwrap();
        assert!(got.is_empty());
        // Without areas the split E₂ = E₁ + (E₂ − E₁) is found.
        let got = decompose_exceptional(&lat, &e(2, 2), None, 2).unwrap();
        assert!(got.iter().any(|d| d.components[0] == e(2, 1)));
    }

    #[test]
    fn decompose_rank_two_is_empty() {
        let lat = make_lattice(1);
        assert!(decompose_exceptional(&lat, &e(1, 1), None, 3).unwrap().is_empty());
    }

    #[test]
    fn decompose_rejects_non_exceptional() {
        let lat = make_lattice(2);
        assert!(matches!(
            decompose_exceptional(&lat, &l(2), None, 1),
            Err(NodalError::NotExceptional(_))
        ));
        assert!(decompose_exceptional(&lat, &e(3, 1), None, 1).is_err());
    }

    #[test]
    fn invalid_decompositions() {
        let bad = Decomposition {
            class: e(2, 1),
            components: vec![e(2, 1)],
        };
        assert!(!bad.is_valid());
        let bad = Decomposition {
            class: e(2, 1),
            components: vec![e(2, 2), &e(2, 1) - &e(2, 1)],
        };
        assert!(!bad.is_valid());
    }

    #[test]
    fn stability_examples() {
        let lat = make_lattice(2);
        let set = [e(2, 1), e(2, 2)];
        let s = SymplecticShape::from_ints(3, &[1, 1]).unwrap();
        assert!(min_class_stability(&lat, &s, &set).unwrap());
        let s = SymplecticShape::from_ints(3, &[2, 1]).unwrap();
        assert!(min_class_stability(&lat, &s, &set).unwrap());
        for k in 1..=5 {
            let lat = make_lattice(k);
            let set: Vec<HClass> = (1..=k).map(|i| e(k, i)).collect();
            let s = SymplecticShape::new(int(10), vec![ratio(1, 2); k]).unwrap();
            assert!(min_class_stability(&lat, &s, &set).unwrap());
        }
    }

    #[test]
    fn stability_detects_a_split() {
        // A₀ = L − E₁ − E₂ has area μ − 11, and E₃ − A₀ area 15 − μ.
        let lat = make_lattice(3);
        let a0 = HClass::new(1, vec![1, 1, 0]);
        for (mu, stable) in [(10, false), (14, false), (15, true), (20, true)] {
            let s = SymplecticShape::from_ints(mu, &[6, 5, 4]).unwrap();
            assert_eq!(min_class_stability(&lat, &s, &[a0.clone()]).unwrap(), stable);
        }
    }

    #[test]
    fn stability_errors() {
        let lat = make_lattice(2);
        let set = [e(2, 1), &l(2) - &e(2, 1)];
        assert!(matches!(
            min_class_stability(&lat, &SymplecticShape::from_ints(3, &[1, 1]).unwrap(), &set),
            Err(NodalError::NotExceptional(_))
        ));
        let set = [e(2, 1), &(&l(2) - &e(2, 1)) - &e(2, 2)];
        assert!(matches!(
            min_class_stability(&lat, &SymplecticShape::from_ints(3, &[1, 1]).unwrap(), &set),
            Err(NodalError::NotDisjoint)
        ));
        assert!(matches!(
            min_class_stability(&make_lattice(0), &SymplecticShape::from_ints(3, &[]).unwrap(), &[]),
            Err(NodalError::NoBlowup)
        ));
    }

    #[test]
    fn cp2_examples() {
        assert!(cp2_minimal_stability(&SymplecticShape::from_ints(3, &[1, 1, 1]).unwrap()).unwrap());
        assert!(cp2_minimal_stability(&SymplecticShape::from_ints(4, &[1; 6]).unwrap()).unwrap());
        let s = SymplecticShape::new(int(3), vec![ratio(3, 2); 3]).unwrap();
        assert!(matches!(cp2_minimal_stability(&s), Err(NodalError::NotReduced(_))));
    }

    #[test]
    fn size_checks() {
        assert!(nested_size_check(&int(2), &int(1), 1).unwrap());
        assert!(!nested_size_check(&int(1), &int(1), 1).unwrap());
        assert!(nested_size_check(&int(1), &int(2), 0).unwrap());
        assert!(blowup_size_bound(&int(1), &ratio(1, 2), 1).unwrap());
        assert!(!blowup_size_bound(&int(1), &int(1), 1).unwrap());
        assert!(blowup_size_bound(&int(1), &int(2), 0).unwrap());
        assert!(blowup_size_bound(&int(0), &int(1), 0).is_err());
        assert!(nested_size_check(&int(1), &int(-1), 0).is_err());
    }

    #[test]
    fn gw_values() {
        assert_eq!(gw_blowdown_pair(1), -1);
        assert_eq!(gw_blowdown_pair(0), 0);
        assert_eq!(gw_blowdown_pair(-2), 2);
        assert_eq!(E_SELF_PAIRING_GW, 1);
    }
}

//! Cremona transformations and the reduction of symplectic shapes.
//!
//! The Cremona move on the triple `(i, j, k)` is the lattice automorphism
//!
//! ```text
//! L  ↦ 2L − Eᵢ − Eⱼ − E_k
//! Eᵢ ↦  L − Eⱼ − E_k      (and cyclically for j, k)
//! Eₗ ↦  Eₗ                (l ∉ {i, j, k})
//! ```
//!
//! It preserves the intersection form and c₁, and is an involution.
//! Reduction repeatedly applies it to the three largest weights until
//! `ε₁ + ε₂ + ε₃ ≤ μ`. For rational shapes the μ-sequence strictly decreases
//! on a fixed integer lattice, so the loop terminates.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::lattice::{self, HClass, LatticeError, SymplecticShape};
use crate::rational::{self, Rational};

pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CremonaError {
    #[error("Cremona moves need at least 3 blow-up points, got {0}")]
    RankTooSmall(usize),
    #[error("invalid Cremona move {0:?}: indices must be distinct and within 1..={1}")]
    InvalidMove([usize; 3], usize),
    #[error("degenerate shape: class {class} would have area {area}")]
    DegenerateShape {
        /// A class, expressed in the starting basis, whose area is not positive.
        class: HClass,
        area: String,
    },
    #[error("reduction did not terminate within {0} moves")]
    NonTerminating(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A Cremona move on three distinct blow-up indices (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 3]", try_from = "[usize; 3]")]
pub struct CremonaMove {
    indices: [usize; 3],
}

impl CremonaMove {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        CremonaMove { indices: [i, j, k] }
    }

    /// The canonical move on the three largest weights.
    pub fn top() -> Self {
        Self::new(1, 2, 3)
    }

    pub fn indices(&self) -> [usize; 3] {
        self.indices
    }

    pub fn validate(&self, k: usize) -> Result<(), CremonaError> {
        if k < 3 {
            return Err(CremonaError::RankTooSmall(k));
        }
        let [a, b, c] = self.indices;
        let in_range = |x: usize| (1..=k).contains(&x);
        if !(in_range(a) && in_range(b) && in_range(c)) || a == b || b == c || a == c {
            return Err(CremonaError::InvalidMove(self.indices, k));
        }
        Ok(())
    }

    /// Applies the move to raw cohomology data without re-sorting.
    ///
    /// `ω(L′) = 2μ − Σ_T ε`, `ω(Eᵢ′) = μ − (sum of the other two in T)`.
    pub fn apply_to_weights(&self, mu: &Rational, eps: &[Rational]) -> (Rational, Vec<Rational>) {
        let t: Vec<usize> = self.indices.iter().map(|i| i - 1).collect();
        let s: Rational = t.iter().map(|&i| &eps[i]).sum();
        let two = rational::int(2);
        let new_mu = &two * mu - &s;
        let mut new_eps = eps.to_vec();
        for &i in &t {
            // μ − (s − εᵢ)
            new_eps[i] = mu - &s + &eps[i];
        }
        (new_mu, new_eps)
    }
}

impl From<CremonaMove> for [usize; 3] {
    fn from(m: CremonaMove) -> Self {
        m.indices
    }
}

impl TryFrom<[usize; 3]> for CremonaMove {
    type Error = String;

    fn try_from(v: [usize; 3]) -> Result<Self, Self::Error> {
        let [a, b, c] = v;
        if a == 0 || b == 0 || c == 0 || a == b || b == c || a == c {
            return Err(format!("invalid Cremona move {v:?}"));
        }
        Ok(CremonaMove::new(a, b, c))
    }
}

/// Image of a class under the move. Preserves intersections and c₁.
pub fn cremona_on_class(a: &HClass, mv: &CremonaMove) -> Result<HClass, CremonaError> {
    mv.validate(a.k())?;
    // With a = dL − Σ mᵢEᵢ and T the triple, the image is
    // (2d − Σ_T m)L − Σ_{i∈T} (d − Σ_T m + mᵢ)Eᵢ − Σ_{i∉T} mᵢEᵢ.
    let t = mv.indices.map(|i| i - 1);
    let s: i64 = t.iter().map(|&i| a.m[i]).sum();
    let mut m = a.m.clone();
    for &i in &t {
        m[i] = a.d - s + a.m[i];
    }
    Ok(HClass::new(2 * a.d - s, m))
}

/// Image of a shape under the move, re-sorted.
pub fn cremona_on_shape(
    shape: &SymplecticShape,
    mv: &CremonaMove,
) -> Result<SymplecticShape, CremonaError> {
    let mut state = Tracked::new(shape);
    mv.validate(shape.k())?;
    state.apply(mv)?;
    Ok(state.shape())
}

/// Anticanonical volume `μ²/2 − Σ εᵢ²/2`.
pub fn shape_volume(shape: &SymplecticShape) -> Rational {
    shape.volume()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub start: SymplecticShape,
    pub moves: Vec<CremonaMove>,
    pub end: SymplecticShape,
}

impl ReductionTrace {
    /// Replays the moves from `start`, re-sorting between moves.
    pub fn replay(&self) -> Result<SymplecticShape, CremonaError> {
        self.moves
            .iter()
            .try_fold(self.start.clone(), |s, mv| cremona_on_shape(&s, mv))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    pub max_iterations: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

pub fn reduce(shape: &SymplecticShape) -> Result<ReductionTrace, CremonaError> {
    reduce_with(shape, ReduceOptions::default())
}

/// Runs the canonical top-three reduction.
///
/// On failure, `DegenerateShape` names a class of the *starting* lattice
/// that must have positive area on any blow-up form but does not. For
/// `k ≥ 3` it is numerically exceptional; for `k < 3` it is `L − E₁` or
/// `L − E₁ − E₂`.
pub fn reduce_with(
    shape: &SymplecticShape,
    opts: ReduceOptions,
) -> Result<ReductionTrace, CremonaError> {
    let mut state = Tracked::new(shape);
    let mut moves = Vec::new();
    while !lattice::is_reduced(&state.shape()) {
        if shape.k() < 3 {
            // ε₁ + ε₂ > μ: the class L − E₁ − E₂ (or L − E₁) has negative area.
            let mut class = HClass::line(shape.k());
            for e in state.basis.iter().skip(1) {
                class = &class - e;
            }
            let area = lattice::omega_area(shape, &class)?;
            return Err(CremonaError::DegenerateShape {
                class,
                area: rational::format(&area),
            });
        }
        if moves.len() >= opts.max_iterations {
            return Err(CremonaError::NonTerminating(opts.max_iterations));
        }
        let mv = CremonaMove::top();
        state.apply(&mv)?;
        moves.push(mv);
    }
    Ok(ReductionTrace {
        start: shape.clone(),
        moves,
        end: state.shape(),
    })
}

/// Current weights together with the current basis expressed in the
/// starting lattice; `basis[0]` is `L`, `basis[i]` is `Eᵢ`.
struct Tracked<'a> {
    start: &'a SymplecticShape,
    mu: Rational,
    eps: Vec<Rational>,
    basis: Vec<HClass>,
}

impl<'a> Tracked<'a> {
    fn new(start: &'a SymplecticShape) -> Self {
        let k = start.k();
        Tracked {
            start,
            mu: start.mu().clone(),
            eps: start.eps().to_vec(),
            basis: std::iter::once(HClass::line(k))
                .chain((1..=k).map(|i| HClass::exceptional(k, i)))
                .collect(),
        }
    }

    fn shape(&self) -> SymplecticShape {
        SymplecticShape::new(self.mu.clone(), self.eps.clone())
            .expect("tracked weights stay positive")
    }

    fn degenerate(&self, class: HClass) -> CremonaError {
        let area = lattice::omega_area(self.start, &class)
            .map(|a| rational::format(&a))
            .unwrap_or_default();
        CremonaError::DegenerateShape { class, area }
    }

    fn apply(&mut self, mv: &CremonaMove) -> Result<(), CremonaError> {
        let (mu, eps) = mv.apply_to_weights(&self.mu, &self.eps);

        let t = mv.indices;
        let [a, b, c] = t;
        let l = &self.basis[0];
        let sum_t = &(&self.basis[a] + &self.basis[b]) + &self.basis[c];
        let mut basis = self.basis.clone();
        basis[0] = &(2 * l) - &sum_t;
        for &i in &t {
            // Eᵢ′ = L − (sum of the other two) = L − sum_t + Eᵢ
            basis[i] = &(l - &sum_t) + &self.basis[i];
        }

        // Weights first: if μ′ ≤ 0 then some new weight is negative too.
        for &i in &t {
            if !eps[i - 1].is_positive() {
                return Err(self.degenerate(basis[i].clone()));
            }
        }
        if !mu.is_positive() {
            return Err(self.degenerate(basis[0].clone()));
        }

        // Stable sort keeps tied weights in index order.
        let mut order: Vec<usize> = (0..eps.len()).collect();
        order.sort_by(|&x, &y| eps[y].cmp(&eps[x]));
        self.eps = order.iter().map(|&i| eps[i].clone()).collect();
        self.basis = std::iter::once(basis[0].clone())
            .chain(order.iter().map(|&i| basis[i + 1].clone()))
            .collect();
        self.mu = mu;
        debug_assert!(self.consistent());
        Ok(())
    }

    fn consistent(&self) -> bool {
        let area = |c: &HClass| lattice::omega_area(self.start, c).unwrap();
        area(&self.basis[0]) == self.mu
            && self.basis[1..]
                .iter()
                .zip(&self.eps)
                .all(|(c, e)| area(c) == *e)
    }
}

//! Deciding whether a tower's volume is that of a fiber sum of symplectic
//! towers.
//!
//! Volumes add under fiber sum, and the base sizes of the summands add up to
//! the base size of the sum. After the common `μ(V − Σ v_{εᵢ})` part is
//! removed the remaining coefficients are affine in the integer stage data of
//! each summand, so feasibility for a fixed number of summands is an integer
//! linear system.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::tower::{chern_consistency, symplectic_ell, vol_tower, BundleTower, TowerStage};
use super::VolumeError;
use crate::linalg;
use crate::poly::{Monomial, Polynomial, Var};
use crate::rational::Rational;

pub const DEFAULT_M_MAX: usize = 8;

/// `m` symplectic towers whose fiber sum has the target's volume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberSumWitness {
    pub m: usize,
    pub summands: Vec<BundleTower>,
}

impl FiberSumWitness {
    /// Recomputes `Σ_γ Vol(T^γ)` with each base size `μ/m` and compares it
    /// with the target's volume.
    pub fn replays(&self, target: &BundleTower, chern_basis: &[i64]) -> bool {
        let mu = Var::Mu(0);
        let share = Polynomial::var(mu).scale(&Rational::new(BigInt::one(), BigInt::from(self.m)));
        let mut sum = Polynomial::zero();
        for (g, t) in self.summands.iter().enumerate() {
            if t.k != target.k || t.r != target.r || t.n != target.n {
                return false;
            }
            if !matches!(chern_consistency(t, chern_basis), Ok(true)) {
                return false;
            }
            let mu_g = Var::Mu(g as u32 + 1);
            sum = &sum + &vol_tower(t, mu_g).substitute(mu_g, &share);
        }
        let ia: Vec<Rational> = (0..target.r)
            .map(|a| self.summands.iter().map(|t| &t.base_ia[a]).sum())
            .collect();
        let ic: i64 = self.summands.iter().map(|t| t.base_ic).sum();
        self.summands.len() == self.m
            && ia == target.base_ia
            && ic == target.base_ic
            && sum == vol_tower(target, mu)
    }
}

/// The part of the volume not shared by every tower with the same `n, k`.
fn excess_volume(t: &BundleTower) -> Polynomial {
    let trivial = BundleTower::trivial(t.n, t.r, t.k);
    &vol_tower(t, Var::Mu(0)) - &vol_tower(&trivial, Var::Mu(0))
}

/// Integer unknowns of one summand, in layout order.
#[derive(Debug, Clone, Copy)]
enum Unknown {
    N(usize, usize),
    M(usize, usize),
    Ell(usize),
    Ic,
}

fn unknowns(r: usize, k: usize) -> Vec<Unknown> {
    let mut out = Vec::new();
    for i in 0..k {
        out.extend((0..r).map(|a| Unknown::N(i, a)));
        out.extend((0..i).map(|j| Unknown::M(i, j)));
        out.push(Unknown::Ell(i));
    }
    out.push(Unknown::Ic);
    out
}

fn integer_tower(target: &BundleTower, layout: &[Unknown], values: &[BigInt]) -> BundleTower {
    let mut t = BundleTower::trivial(target.n, target.r, target.k);
    for (u, x) in layout.iter().zip(values) {
        let x = x.to_i64().expect("witness entries fit in i64");
        match *u {
            Unknown::N(i, a) => t.stages[i].n[a] = x,
            Unknown::M(i, j) => t.stages[i].m[j] = x,
            Unknown::Ell(i) => t.stages[i].ell = x,
            Unknown::Ic => t.base_ic = x,
        }
    }
    t
}

/// Clears denominators of `row · x = rhs`.
fn integral_row(row: &[Rational], rhs: &Rational) -> (Vec<BigInt>, BigInt) {
    let l = row
        .iter()
        .chain(std::iter::once(rhs))
        .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let scale = |q: &Rational| (q * Rational::from_integer(l.clone())).to_integer();
    (row.iter().map(scale).collect(), scale(rhs))
}

/// Searches `m = 1, …, m_max` for the smallest number of symplectic summands
/// whose fiber sum reproduces the target's volume coefficients together with
/// its `I_a(s₀)` and `I_c(s₀)`. `None` means no such sum exists for any
/// `m ≤ m_max`.
pub fn fibersum_feasibility(
    target: &BundleTower,
    m_max: usize,
    chern_basis: &[i64],
) -> Result<Option<FiberSumWitness>, VolumeError> {
    target.validate()?;
    if m_max == 0 {
        return Err(VolumeError::InvalidSummandBound);
    }
    if chern_basis.len() != target.r {
        return Err(VolumeError::ChernBasisLength {
            got: chern_basis.len(),
            expected: target.r,
        });
    }

    let layout = unknowns(target.r, target.k);
    let zero_ints = vec![BigInt::zero(); layout.len()];
    let zero = integer_tower(target, &layout, &zero_ints);
    let base = excess_volume(&zero);
    let columns: Vec<Polynomial> = (0..layout.len())
        .map(|c| {
            let mut e = zero_ints.clone();
            e[c] = BigInt::one();
            &excess_volume(&integer_tower(target, &layout, &e)) - &base
        })
        .collect();

    // The rational data sits in the first summand.
    let mut rational_part = zero.clone();
    rational_part.base_ia = target.base_ia.clone();
    for (s, t) in rational_part.stages.iter_mut().zip(&target.stages) {
        s.lambda2 = t.lambda2.clone();
    }
    let rhs = &excess_volume(target) - &excess_volume(&rational_part);

    let monomials: Vec<Monomial> = columns
        .iter()
        .chain(std::iter::once(&rhs))
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .rev()
        .collect();

    for m in 1..=m_max {
        if let Some(w) = solve_for(target, chern_basis, &layout, &columns, &monomials, &rhs, m) {
            let mut summands = w;
            let first = &mut summands[0];
            first.base_ia = rational_part.base_ia.clone();
            for (s, t) in first.stages.iter_mut().zip(&rational_part.stages) {
                s.lambda2 = t.lambda2.clone();
            }
            let witness = FiberSumWitness { m, summands };
            debug_assert!(witness.replays(target, chern_basis));
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn solve_for(
    target: &BundleTower,
    chern_basis: &[i64],
    layout: &[Unknown],
    columns: &[Polynomial],
    monomials: &[Monomial],
    rhs: &Polynomial,
    m: usize,
) -> Option<Vec<BundleTower>> {
    let u = layout.len();
    let width = u * m;
    let mut a: Vec<Vec<BigInt>> = Vec::new();
    let mut b: Vec<BigInt> = Vec::new();

    // Coefficient matching: Σ_γ Σ_c x_{γ,c} col_c = rhs.
    for mono in monomials {
        let coeffs: Vec<Rational> = columns.iter().map(|p| p.coefficient(mono)).collect();
        let (row, bi) = integral_row(&coeffs, &rhs.coefficient(mono));
        a.push((0..m).flat_map(|_| row.iter().cloned()).collect());
        b.push(bi);
    }

    // Σ_γ I_c(s₀^γ) = I_c(s₀).
    let ic = layout.iter().position(|x| matches!(x, Unknown::Ic)).unwrap();
    let mut row = vec![BigInt::zero(); width];
    for g in 0..m {
        row[g * u + ic] = BigInt::one();
    }
    a.push(row);
    b.push(BigInt::from(target.base_ic));

    // ℓᵢ^γ = I_c^γ + Σ_α n_{iα}^γ c_α + Σ_{j<i} m_{ij}^γ.
    for g in 0..m {
        for i in 0..target.k {
            let mut row = vec![BigInt::zero(); width];
            for (c, x) in layout.iter().enumerate() {
                let v: i64 = match *x {
                    Unknown::Ell(s) if s == i => 1,
                    Unknown::Ic => -1,
                    Unknown::N(s, alpha) if s == i => -chern_basis[alpha],
                    Unknown::M(s, _) if s == i => -1,
                    _ => 0,
                };
                row[g * u + c] = BigInt::from(v);
            }
            a.push(row);
            b.push(BigInt::zero());
        }
    }

    let x = linalg::solve_integer(&a, &b)?;
    let towers: Vec<BundleTower> = x
        .chunks(u)
        .map(|vals| {
            let mut t = integer_tower(target, layout, vals);
            t.symplectic = true;
            t
        })
        .collect();
    debug_assert!(towers.iter().all(|t| t
        .stages
        .iter()
        .all(|s: &TowerStage| s.ell == symplectic_ell(t.base_ic, s, chern_basis))));
    Some(towers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn step_two(k: usize, ell: i64) -> BundleTower {
        BundleTower::graph_of_e1(2, 0, k, ell)
    }

    #[test]
    fn nonstandard_graph_is_not_a_fiber_sum() {
        for k in 2..=4 {
            for ell in [0, 2, -1, 5] {
                assert_eq!(fibersum_feasibility(&step_two(k, ell), 8, &[]).unwrap(), None);
            }
        }
    }

    #[test]
    fn symplectic_graph_is_its_own_witness() {
        let t = step_two(3, 1);
        let w = fibersum_feasibility(&t, 8, &[]).unwrap().unwrap();
        assert_eq!(w.m, 1);
        let mut expect = t.clone();
        expect.symplectic = true;
        assert_eq!(w.summands, vec![expect]);
        assert!(w.replays(&t, &[]));
    }

    #[test]
    fn trivial_tower_is_feasible() {
        let t = BundleTower::trivial(2, 1, 2);
        let w = fibersum_feasibility(&t, DEFAULT_M_MAX, &[4]).unwrap().unwrap();
        assert_eq!(w.m, 1);
        assert!(w.replays(&t, &[4]));
    }

    #[test]
    fn rational_data_goes_to_first_summand() {
        let mut t = BundleTower::trivial(2, 1, 2);
        t.base_ia = vec![ratio(1, 2)];
        t.base_ic = 2;
        t.stages[0].lambda2 = ratio(-3, 4);
        t.stages[0].n[0] = 1;
        t.stages[1].m[0] = 2;
        t.stages[0].ell = 2 + 3;
        t.stages[1].ell = 2 + 2;
        let w = fibersum_feasibility(&t, 8, &[3]).unwrap().unwrap();
        assert_eq!(w.m, 1);
        assert!(w.replays(&t, &[3]));
        assert_eq!(w.summands[0].base_ia, vec![ratio(1, 2)]);

        t.stages[1].ell = 0;
        assert_eq!(fibersum_feasibility(&t, 8, &[3]).unwrap(), None);
    }

    #[test]
    fn replay_rejects_tampering() {
        let t = step_two(2, 1);
        let mut w = fibersum_feasibility(&t, 8, &[]).unwrap().unwrap();
        w.summands[0].stages[1].lambda2 = int(1);
        assert!(!w.replays(&t, &[]));

        // Two summands splitting the coupling are fine: 1 = 2 + (−1).
        let mut a = step_two(2, 2);
        a.stages[1].m[0] = 2;
        let mut b = step_two(2, -1);
        b.stages[1].m[0] = -1;
        let w = FiberSumWitness { m: 2, summands: vec![a, b] };
        assert!(w.replays(&t, &[]));
    }

    #[test]
    fn bad_inputs() {
        let t = step_two(2, 1);
        assert_eq!(
            fibersum_feasibility(&t, 0, &[]),
            Err(VolumeError::InvalidSummandBound)
        );
        assert!(matches!(
            fibersum_feasibility(&t, 1, &[1]),
            Err(VolumeError::ChernBasisLength { .. })
        ));
    }
}

//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use blowupcalc::poly::{Monomial, Polynomial, Var};
use blowupcalc::rational::{int, ratio, Rational};
use blowupcalc::{HClass, SymplecticShape};
use proptest::prelude::*;

pub fn class(k: usize, bound: i64) -> impl Strategy<Value = HClass> {
    (-bound..=bound, prop::collection::vec(-bound..=bound, k))
        .prop_map(|(d, m)| HClass::new(d, m))
}

/// Three classes of the same rank.
pub fn class_triple(max_k: usize, bound: i64) -> impl Strategy<Value = (HClass, HClass, HClass)> {
    (0..=max_k).prop_flat_map(move |k| (class(k, bound), class(k, bound), class(k, bound)))
}

pub fn rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(p, q)| ratio(p, q))
}

pub fn positive_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (1..=max_num, 1..=max_den).prop_map(|(p, q)| ratio(p, q))
}

/// Shapes with `k ≤ max_k` and numerators up to `max_num`.
pub fn shape(max_k: usize, max_num: i64) -> impl Strategy<Value = SymplecticShape> {
    (
        positive_rational(max_num, 12),
        prop::collection::vec(positive_rational(max_num, 12), 0..=max_k),
    )
        .prop_map(|(mu, eps)| SymplecticShape::new(mu, eps).unwrap())
}

/// Reduced shapes: `μ` is at least the sum of the three largest weights.
pub fn reduced_shape(max_k: usize, max_num: i64) -> impl Strategy<Value = SymplecticShape> {
    (
        prop::collection::vec(positive_rational(max_num, 12), 0..=max_k),
        (0..=max_num, 1..=12i64),
    )
        .prop_map(|(eps, (p, q))| {
            let mut sorted = eps.clone();
            sorted.sort_by(|a, b| b.cmp(a));
            let top: Rational = sorted.iter().take(3).sum();
            let slack = ratio(p, q);
            let mu = if sorted.is_empty() { int(1) + slack } else { top + slack };
            SymplecticShape::new(mu, eps).unwrap()
        })
}

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![
        (0..3u32).prop_map(Var::Mu),
        Just(Var::Volume),
        (1..4u32).prop_map(Var::Eps),
        (1..3u32).prop_map(Var::Lambda),
    ]
}

pub fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((var(), 0..4u32), 0..3).prop_map(Monomial::from_powers)
}

pub fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(), rational(20, 6)), 0..5).prop_map(|ts| {
        let mut p = Polynomial::zero();
        for (m, c) in ts {
            p.add_term(m, c);
        }
        p
    })
}

/// Every vector in `[lo, hi]^k`.
pub fn box_vectors(k: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn square(d: i64, m: &[i64]) -> i64 {
    d * d - m.iter().map(|x| x * x).sum::<i64>()
}

fn chern(d: i64, m: &[i64]) -> i64 {
    3 * d - m.iter().sum::<i64>()
}

fn pair(a: (i64, &[i64]), b: (i64, &[i64])) -> i64 {
    a.0 * b.0 - a.1.iter().zip(b.1).map(|(x, y)| x * y).sum::<i64>()
}

/// Exceptional candidates with `d ≤ d_max` by full box scan: `d = 0` or all
/// `mᵢ ≥ 0`, square −1, c₁ = 1.
pub fn exceptional_oracle(k: usize, d_max: i64) -> Vec<HClass> {
    let mut out = Vec::new();
    for d in 0..=d_max {
        for m in box_vectors(k, -1, d_max.max(1)) {
            if square(d, &m) == -1 && chern(d, &m) == 1 && (d == 0 || m.iter().all(|&x| x >= 0)) {
                out.push(HClass::new(d, m));
            }
        }
    }
    out.sort();
    out
}

/// Splittings `e = A₀ + A₁` with both parts in the box `|d| ≤ b`,
/// `|mᵢ| ≤ b + 1`, checked constraint by constraint.
pub fn decomposition_oracle(e: &HClass, b: i64, shape: Option<&SymplecticShape>) -> Vec<(HClass, HClass)> {
    let k = e.m.len();
    let area = |d: i64, m: &[i64]| -> Rational {
        let s = shape.unwrap();
        let mut a = int(d) * s.mu();
        for (x, w) in m.iter().zip(s.eps()) {
            a -= int(*x) * w;
        }
        a
    };
    let mut out = Vec::new();
    for d0 in -b..=b {
        for m0 in box_vectors(k, -b - 1, b + 1) {
            let d1 = e.d - d0;
            let m1: Vec<i64> = e.m.iter().zip(&m0).map(|(x, y)| x - y).collect();
            if d1.abs() > b || m1.iter().any(|x| x.abs() > b + 1) {
                continue;
            }
            let ok = chern(d0, &m0) == 1
                && square(d0, &m0) == -1
                && chern(d1, &m1) == 0
                && square(d1, &m1) == -2
                && pair((d0, &m0), (d1, &m1)) == 1;
            if !ok {
                continue;
            }
            if shape.is_some() && !(area(d0, &m0) > int(0) && area(d1, &m1) > int(0)) {
                continue;
            }
            out.push((HClass::new(d0, m0), HClass::new(d1, m1)));
        }
    }
    out.sort();
    out
}

/// `Σ_{i∈I} εᵢ ≤ dμ` over every index set `I` of size `3d`.
pub fn cp2_oracle(shape: &SymplecticShape) -> bool {
    let eps = shape.eps();
    let k = eps.len();
    (0..1u32 << k).all(|mask| {
        let size = mask.count_ones() as usize;
        if size == 0 || size % 3 != 0 {
            return true;
        }
        let s: Rational = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &eps[i]).sum();
        s <= int((size / 3) as i64) * shape.mu()
    })
}

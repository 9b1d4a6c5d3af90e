//! Injectivity of the stage data into volume coefficients.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::tower::{multi_blowup_volume, SectionData};
use super::{check_dim, VolumeError};
use crate::linalg;
use crate::poly::{Monomial, Polynomial, Var};
use crate::rational::Rational;

/// One free integer of a simultaneous `k`-point blow-up. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageParameter {
    /// `n_{iα}`, the `B_α` component of section `i`.
    N { i: usize, alpha: usize },
    /// `m_{ij}`, `j ≠ i`, the `E_j` component of section `i`.
    M { i: usize, j: usize },
    /// `ℓᵢ`.
    Ell { i: usize },
}

impl fmt::Display for StageParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageParameter::N { i, alpha } => write!(f, "n_{i},{alpha}"),
            StageParameter::M { i, j } => write!(f, "m_{i},{j}"),
            StageParameter::Ell { i } => write!(f, "ell_{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub n: i64,
    pub r: usize,
    pub k: usize,
    pub rank: usize,
    pub params: Vec<StageParameter>,
    /// Monomials whose coefficients detect the parameters, one per pivot.
    pub functionals: Vec<String>,
    pub chern_basis: Vec<i64>,
}

fn parameters(r: usize, k: usize) -> Vec<StageParameter> {
    let mut out = Vec::with_capacity(k * (r + k));
    for i in 1..=k {
        out.extend((1..=r).map(|alpha| StageParameter::N { i, alpha }));
        out.extend((1..=k).filter(|&j| j != i).map(|j| StageParameter::M { i, j }));
        out.push(StageParameter::Ell { i });
    }
    out
}

fn zero_sections(r: usize, k: usize) -> Vec<SectionData> {
    (0..k)
        .map(|_| SectionData {
            n: vec![0; r],
            m: vec![0; k],
            lambda2: Rational::zero(),
            ell: 0,
        })
        .collect()
}

/// Certifies that the `k(r+k)` integers `n_{iα}`, `m_{ij}` (`j ≠ i`) and `ℓᵢ`
/// are determined by the volume of the simultaneous blow-up, by computing the
/// exact rank of the parameter-to-coefficient map.
///
/// `chern_basis` holds `c₁(B_α)`; it does not enter the map, since the `ℓᵢ`
/// are free parameters here, and is only checked and recorded.
pub fn rank_certificate(
    n: i64,
    r: usize,
    k: usize,
    chern_basis: &[i64],
) -> Result<RankCertificate, VolumeError> {
    let dim = check_dim(n)?;
    if chern_basis.len() != r {
        return Err(VolumeError::ChernBasisLength {
            got: chern_basis.len(),
            expected: r,
        });
    }
    let params = parameters(r, k);
    let mu: Vec<Var> = (1..=k as u32).map(Var::Mu).collect();
    let base_ia = vec![Rational::zero(); r];
    let base = multi_blowup_volume(dim, &base_ia, &zero_sections(r, k), &mu);

    let columns: Vec<Polynomial> = params
        .iter()
        .map(|p| {
            let mut s = zero_sections(r, k);
            match *p {
                StageParameter::N { i, alpha } => s[i - 1].n[alpha - 1] = 1,
                StageParameter::M { i, j } => s[i - 1].m[j - 1] = 1,
                StageParameter::Ell { i } => s[i - 1].ell = 1,
            }
            &multi_blowup_volume(dim, &base_ia, &s, &mu) - &base
        })
        .collect();

    let monomials: Vec<Monomial> = {
        let mut all: Vec<Monomial> = columns
            .iter()
            .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
            .collect();
        all.sort_by(|a, b| b.cmp(a));
        all.dedup();
        all
    };
    let rows: Vec<Vec<Rational>> = columns
        .iter()
        .map(|c| monomials.iter().map(|m| c.coefficient(m)).collect())
        .collect();
    let (rank, pivots) = linalg::rank_with_pivots(&rows);
    if rank != params.len() {
        return Err(VolumeError::RankDeficient {
            rank,
            expected: params.len(),
        });
    }
    Ok(RankCertificate {
        n,
        r,
        k,
        rank,
        params,
        functionals: pivots.iter().map(|&c| monomials[c].to_string()).collect(),
        chern_basis: chern_basis.to_vec(),
    })
}

impl RankCertificate {
    /// The lower bound `k(r+k)` being certified.
    pub fn bound(&self) -> usize {
        self.k * (self.r + self.k)
    }
}

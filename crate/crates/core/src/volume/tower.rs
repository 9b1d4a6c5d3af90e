//! Iterated blow-up towers and their volume polynomials.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{ball_volume, check_dim, factorial, VolumeError};
use crate::poly::{Monomial, Polynomial, Var};
use crate::rational::{self, Rational};

/// Data of the `i`-th blow-up: the section is `s₀ + Σ n_α B_α + Σ_{j<i} m_j E_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerStage {
    /// `n_{iα}`, one per basis class `B_α`.
    pub n: Vec<i64>,
    /// `m_{ij}` for `j < i`.
    pub m: Vec<i64>,
    /// Extra real part `λᵢ″` of `I_a(sᵢ)`.
    #[serde(with = "rational::serde_q")]
    pub lambda2: Rational,
    /// Vertical Chern number `ℓᵢ = c₁ⱽ(sᵢ)`.
    pub ell: i64,
}

impl TowerStage {
    pub fn zero(r: usize, i: usize) -> Self {
        TowerStage {
            n: vec![0; r],
            m: vec![0; i - 1],
            lambda2: Rational::zero(),
            ell: 0,
        }
    }
}

/// A `k`-stage blow-up of an `M`-bundle over S², `dim_ℂ M = n`,
/// `rank H₂(M) = r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BundleTower {
    pub n: i64,
    pub r: usize,
    pub k: usize,
    pub stages: Vec<TowerStage>,
    /// `I_a(s₀) = Σ_α c_α λ_α`, stored as the coefficients `c_α`.
    #[serde(rename = "base_Ia", with = "rational::serde_vec")]
    pub base_ia: Vec<Rational>,
    #[serde(rename = "base_Ic")]
    pub base_ic: i64,
    pub symplectic: bool,
}

#[derive(Deserialize)]
struct TowerJson {
    n: i64,
    r: usize,
    k: usize,
    stages: Vec<TowerStage>,
    #[serde(rename = "base_Ia", with = "rational::serde_vec", default)]
    base_ia: Vec<Rational>,
    #[serde(rename = "base_Ic", default)]
    base_ic: i64,
    #[serde(default)]
    symplectic: bool,
}

impl<'de> Deserialize<'de> for BundleTower {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TowerJson::deserialize(d)?;
        let base_ia = if raw.base_ia.is_empty() {
            vec![Rational::zero(); raw.r]
        } else {
            raw.base_ia
        };
        let t = BundleTower {
            n: raw.n,
            r: raw.r,
            k: raw.k,
            stages: raw.stages,
            base_ia,
            base_ic: raw.base_ic,
            symplectic: raw.symplectic,
        };
        t.validate().map_err(serde::de::Error::custom)?;
        Ok(t)
    }
}

impl BundleTower {
    /// All stage data zero: the `k`-fold blow-up of the product bundle along
    /// constant sections.
    pub fn trivial(n: i64, r: usize, k: usize) -> Self {
        BundleTower {
            n,
            r,
            k,
            stages: (1..=k).map(|i| TowerStage::zero(r, i)).collect(),
            base_ia: vec![Rational::zero(); r],
            base_ic: 0,
            symplectic: false,
        }
    }

    /// The bundle obtained by `k − 1` trivial blow-ups followed by a last one
    /// along the graph of a sphere in the class `E₁` with vertical Chern
    /// number `ell`: `m_{k1} = 1`, everything else zero.
    pub fn graph_of_e1(n: i64, r: usize, k: usize, ell: i64) -> Self {
        assert!(k >= 2, "needs an earlier exceptional class");
        let mut t = Self::trivial(n, r, k);
        t.stages[k - 1].m[0] = 1;
        t.stages[k - 1].ell = ell;
        t
    }

    pub fn validate(&self) -> Result<(), VolumeError> {
        let bad = |msg: String| Err(VolumeError::MalformedTower(msg));
        check_dim(self.n)?;
        if self.stages.len() != self.k {
            return bad(format!("k = {} but {} stages given", self.k, self.stages.len()));
        }
        if self.base_ia.len() != self.r {
            return bad(format!("base_Ia has {} entries, r = {}", self.base_ia.len(), self.r));
        }
        for (idx, s) in self.stages.iter().enumerate() {
            let i = idx + 1;
            if s.n.len() != self.r {
                return bad(format!("stage {i}: n has {} entries, r = {}", s.n.len(), self.r));
            }
            if s.m.len() != i - 1 {
                return bad(format!("stage {i}: m must list m_ij for j < {i}, got {}", s.m.len()));
            }
        }
        Ok(())
    }

    pub(crate) fn dim(&self) -> u32 {
        self.n as u32
    }
}

/// `(1/(n+1)) · εᵢ · v_{εᵢ}` scaled by `ℓ`, i.e. the normal-bundle correction.
fn chern_term(n: u32, i: u32, ell: i64) -> Polynomial {
    let c = rational::int(ell) / (factorial(n) * rational::int(i64::from(n) + 1));
    Polynomial::term(c, Monomial::from_powers([(Var::Eps(i), n + 1)]))
}

fn v_eps(n: u32, i: u32) -> Polynomial {
    ball_volume(i64::from(n), Var::Eps(i)).expect("dimension checked")
}

fn lambda_form(coeffs: &[Rational]) -> Polynomial {
    let mut p = Polynomial::zero();
    for (a, c) in coeffs.iter().enumerate() {
        p.add_term(Monomial::var(Var::Lambda(a as u32 + 1)), c.clone());
    }
    p
}

fn int_lambda_form(coeffs: &[i64]) -> Polynomial {
    lambda_form(&coeffs.iter().map(|&c| rational::int(c)).collect::<Vec<_>>())
}

/// `Σ_j m_j ε_j` with `m_j` listed from `j = 1`.
fn eps_form(coeffs: &[i64]) -> Polynomial {
    let mut p = Polynomial::zero();
    for (j, &c) in coeffs.iter().enumerate() {
        p.add_term(Monomial::var(Var::Eps(j as u32 + 1)), rational::int(c));
    }
    p
}

/// Volume of the iterated blow-up with base size `mu` and formal fiber
/// volume `V`:
///
/// `μ(V − Σ v_{εᵢ}) − Σᵢ (I_a(s₀) + Σ_α n_{iα}λ_α + Σ_{j<i} m_{ij}εⱼ + λᵢ″ − ℓᵢεᵢ/(n+1)) v_{εᵢ}`.
pub fn vol_tower(tower: &BundleTower, mu: Var) -> Polynomial {
    let n = tower.dim();
    let mut fiber = Polynomial::var(Var::Volume);
    for i in 1..=tower.k as u32 {
        fiber = &fiber - &v_eps(n, i);
    }
    let mut out = &Polynomial::var(mu) * &fiber;
    let base = lambda_form(&tower.base_ia);
    for (idx, s) in tower.stages.iter().enumerate() {
        let i = idx as u32 + 1;
        let area = &(&(&base + &int_lambda_form(&s.n)) + &eps_form(&s.m))
            + &Polynomial::constant(s.lambda2.clone());
        out = &out - &(&area * &v_eps(n, i));
        out = &out + &chern_term(n, i, s.ell);
    }
    out
}

/// Volume of the simultaneous blow-up, a fiber sum of `k` single blow-ups of
/// trivial bundles, the `i`-th with fiber volume `V − Σ_{j≠i} v_{εⱼ}` and base
/// size `μᵢ`:
///
/// `Σᵢ [(V − Σ_{j≠i} v_{εⱼ})μᵢ − v_{εᵢ}(μᵢ + λᵢ − ℓᵢεᵢ/(n+1))]`
///
/// with `λᵢ = I_a(s₀) + Σ_α n_{iα}λ_α + Σ_{j<i} m_{ij}εⱼ + λᵢ″`.
pub fn vol_multi_blowup(tower: &BundleTower, mu: &[Var]) -> Result<Polynomial, VolumeError> {
    if mu.len() != tower.k {
        return Err(VolumeError::MalformedVariables(format!(
            "{} base symbols for {} stages",
            mu.len(),
            tower.k
        )));
    }
    let stages: Vec<SectionData> = tower
        .stages
        .iter()
        .map(|s| {
            let mut m = s.m.clone();
            m.resize(tower.k, 0);
            SectionData {
                n: s.n.clone(),
                m,
                lambda2: s.lambda2.clone(),
                ell: s.ell,
            }
        })
        .collect();
    Ok(multi_blowup_volume(tower.dim(), &tower.base_ia, &stages, mu))
}

/// Section data of one summand of a simultaneous blow-up. `m` has one entry
/// per blow-up point; the diagonal entry `m[i]` is ignored.
#[derive(Debug, Clone)]
pub(crate) struct SectionData {
    pub n: Vec<i64>,
    pub m: Vec<i64>,
    pub lambda2: Rational,
    pub ell: i64,
}

pub(crate) fn multi_blowup_volume(
    n: u32,
    base_ia: &[Rational],
    stages: &[SectionData],
    mu: &[Var],
) -> Polynomial {
    let k = stages.len();
    let base = lambda_form(base_ia);
    let vs: Vec<Polynomial> = (1..=k as u32).map(|i| v_eps(n, i)).collect();
    let mut out = Polynomial::zero();
    for (idx, s) in stages.iter().enumerate() {
        let i = idx as u32 + 1;
        let mut fiber = Polynomial::var(Var::Volume);
        for (j, v) in vs.iter().enumerate() {
            if j != idx {
                fiber = &fiber - v;
            }
        }
        let mu_i = Polynomial::var(mu[idx]);
        let mut off_diag = s.m.clone();
        off_diag[idx] = 0;
        let lambda = &(&(&base + &int_lambda_form(&s.n)) + &eps_form(&off_diag))
            + &Polynomial::constant(s.lambda2.clone());
        out = &out + &(&fiber * &mu_i);
        out = &out - &(&vs[idx] * &(&mu_i + &lambda));
        out = &out + &chern_term(n, i, s.ell);
    }
    out
}

fn check_chern_basis(tower: &BundleTower, chern_basis: &[i64]) -> Result<(), VolumeError> {
    if chern_basis.len() != tower.r {
        return Err(VolumeError::ChernBasisLength {
            got: chern_basis.len(),
            expected: tower.r,
        });
    }
    Ok(())
}

/// Value `ℓᵢ` must take on a symplectic blow-up:
/// `I_c(s₀) + Σ_α n_{iα}c₁(B_α) + Σ_{j<i} m_{ij}`.
pub(crate) fn symplectic_ell(base_ic: i64, stage: &TowerStage, chern_basis: &[i64]) -> i64 {
    base_ic
        + stage.n.iter().zip(chern_basis).map(|(a, c)| a * c).sum::<i64>()
        + stage.m.iter().sum::<i64>()
}

/// Whether every stage satisfies the symplectic Chern constraint.
pub fn chern_consistency(tower: &BundleTower, chern_basis: &[i64]) -> Result<bool, VolumeError> {
    check_chern_basis(tower, chern_basis)?;
    Ok(tower
        .stages
        .iter()
        .all(|s| s.ell == symplectic_ell(tower.base_ic, s, chern_basis)))
}

impl BundleTower {
    /// Validates the tower and, when flagged symplectic, its Chern data.
    pub fn validate_with(&self, chern_basis: &[i64]) -> Result<(), VolumeError> {
        self.validate()?;
        check_chern_basis(self, chern_basis)?;
        if self.symplectic && !chern_consistency(self, chern_basis)? {
            return Err(VolumeError::MalformedTower(
                "flagged symplectic but violates the Chern constraint".into(),
            ));
        }
        Ok(())
    }
}

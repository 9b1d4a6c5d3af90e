//! Exact computations on blow-ups of symplectic manifolds and bundles over S².
//!
//! - [`lattice`]: `H₂` of CP² # k CP̄², exceptional classes, symplectic shapes.
//! - [`cremona`]: Cremona moves and reduction of shapes to normal form.
//! - [`volume`]: volume polynomials of blown-up bundles and the triviality,
//!   rank and fiber-sum procedures built on them.
//! - [`nodal`]: degenerations of exceptional spheres and size constraints.
//!
//! Everything is exact: rationals are arbitrary precision and no floating
//! point is used.

pub mod cremona;
pub mod lattice;
pub mod linalg;
pub mod nodal;
pub mod poly;
pub mod rational;
pub mod volume;

pub use cremona::{
    cremona_on_class, cremona_on_shape, reduce, reduce_with, shape_volume, CremonaError,
    CremonaMove, ReduceOptions, ReductionTrace, DEFAULT_MAX_ITERATIONS,
};
pub use lattice::{
    adjunction_defect, c1, enumerate_exceptional, intersect, is_numerically_exceptional,
    is_reduced, kodaira_nonneg, make_lattice, omega_area, BlowupLattice, HClass, LatticeError,
    SymplecticShape,
};
pub use nodal::{
    blowup_size_bound, cp2_minimal_stability, decompose_exceptional, gw_blowdown_pair,
    min_class_stability, nested_size_check, Decomposition, NodalError, E_SELF_PAIRING_GW,
};
pub use poly::{Monomial, PolyError, Polynomial, Var, VolumePolynomial};
pub use rational::Rational;
pub use volume::{
    ball_volume, chern_consistency, fibersum_feasibility, rank_certificate, symp_image_family,
    triviality_test, vol_multi_blowup, vol_single_blowup, vol_tower, BundleTower, FiberSumWitness,
    FiberVolume, RankCertificate, StageParameter, TowerStage, TrivialityWitness, VolumeError,
    DEFAULT_M_MAX,
};

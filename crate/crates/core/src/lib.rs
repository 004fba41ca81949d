//! Lattice stability of a one-dimensional periodic chain under a
//! next-nearest-neighbour embedded-atom potential, together with its
//! volume-based and reconstruction-based Cauchy-Born local approximations.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the precision.
//!
//! ```
//! use eamchain::{coefficients, make_toy_potentials, min_eigenvalue, ModelKind, SpectrumMode, ToyFamilyParams64};
//!
//! let p = make_toy_potentials(ToyFamilyParams64::default()).unwrap();
//! let c = coefficients(&p, 1.0).unwrap();
//! let v = min_eigenvalue(&c, ModelKind::Atomistic, SpectrumMode::Discrete(64));
//! assert!(v.stable);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energetics;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod potentials;
pub mod scalar;
pub mod spectral;
pub mod stability;
pub mod sweep;

pub use energetics::{
    electron_density, energy, equilibrium_solve, gradient, hessian, pair_energy, residual_norm, DeadLoads, Deformation,
    EquilibriumResult, ModelKind,
};
pub use error::{EamError, Result};
pub use lattice::{diff, fourier_modes, mode_displacement, norm_l2eps, ChainConfig, Displacement};
pub use potentials::{
    check_assumption_signs, check_derivatives, make_toy_potentials, AssumptionSigns, PotentialSet, ScalarFunction2,
    ToyFamilyParams,
};
pub use scalar::{Scalar, Sign};
pub use spectral::{gram_du, sym_eigen, verify_diagonalization, SpectrumReport, Subspace};
pub use stability::{
    coefficients, compare_recon, compare_volume, counterexample_check, lambda_atomistic, lambda_recon, lambda_volume,
    min_eigenvalue, s_star, CaseLabel, CounterexampleReport, OrderingVerdict, ReconComparison, SpectrumMode,
    StabilityCoefficients, StabilityVerdict,
};
pub use sweep::{critical_strain, emit_report, sweep_strains, CriticalStrainReport, Format, Side, SweepRow};

pub type PotentialSet64 = PotentialSet<f64>;
pub type PotentialSet32 = PotentialSet<f32>;
pub type ToyFamilyParams64 = ToyFamilyParams<f64>;
pub type ToyFamilyParams32 = ToyFamilyParams<f32>;
pub type ChainConfig64 = ChainConfig<f64>;
pub type ChainConfig32 = ChainConfig<f32>;
pub type Displacement64 = Displacement<f64>;
pub type Displacement32 = Displacement<f32>;
pub type Deformation64 = Deformation<f64>;
pub type Deformation32 = Deformation<f32>;
pub type DeadLoads64 = DeadLoads<f64>;
pub type DeadLoads32 = DeadLoads<f32>;
pub type StabilityCoefficients64 = StabilityCoefficients<f64>;
pub type StabilityCoefficients32 = StabilityCoefficients<f32>;
pub type StabilityVerdict64 = StabilityVerdict<f64>;
pub type StabilityVerdict32 = StabilityVerdict<f32>;
pub type SpectrumReport64 = SpectrumReport<f64>;
pub type SpectrumReport32 = SpectrumReport<f32>;
pub type SweepRow64 = SweepRow<f64>;
pub type SweepRow32 = SweepRow<f32>;
pub type CriticalStrainReport64 = CriticalStrainReport<f64>;
pub type CriticalStrainReport32 = CriticalStrainReport<f32>;

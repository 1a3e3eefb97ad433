//! Numerical core of the symbreak suite: measurement-induced symmetry
//! breaking in two-mode Bose condensates and in Josephson junctions.
//!
//! * [`fock`]: exact algebra in the fixed-number two-mode sector.
//! * [`modes`]: condensate orbitals and interference profiles.
//! * [`measurement`]: sequential atom-detection Monte Carlo.
//! * [`fluctuation`]: variance of local operator sums in product states.
//! * [`bcs`]: BCS overlaps, critical current and phase projection.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bcs;
pub mod error;
pub mod fluctuation;
pub mod fock;
pub mod measurement;
pub mod modes;
pub mod numerics;

pub use bcs::{BcsModel, JunctionModel, SectorSuperposition};
pub use error::{Error, Result};
pub use fluctuation::{BranchSuperposition, LocalOperatorSum, Moments, ProductState, ScanResult};
pub use fock::{FockSectorState, QuadraticOperator};
pub use measurement::{DetectionRun, Detector, EnsembleReport, InitialState};
pub use modes::{DensityProfile, Mode, ModeModel};
pub use num_complex::Complex64 as C64;

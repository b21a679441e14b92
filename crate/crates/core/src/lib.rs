//! Certification toolkit for a mass–spring system sliding on a belt with
//! Stribeck friction.
//!
//! The crate provides the friction model and error dynamics, a small
//! semidefinite feasibility core, the three ellipsoidal certificates
//! (attractor, basin of attraction, global asymptotic stability) and a
//! set-valued time-stepping simulator used to cross-check them.

// `!(x > 0.0)` deliberately rejects NaN; index loops mirror matrix notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod attractor;
pub mod basin;
mod certificate;
pub mod dynamics;
pub mod error;
pub mod friction;
pub mod gas;
pub mod linalg;
pub mod sdp;
pub mod simulator;

pub use attractor::{certify_attractor, AttractorCertificate};
pub use basin::{certify_basin, check_corollary1, maximize_basin, BasinCertificate};
pub use certificate::ReplayReport;
pub use gas::{certify_gas, find_gas_threshold, GasCertificate, InclusionMode};
pub use dynamics::{equilibrium, error_matrix, Equilibrium, ErrorState, Rhs, SystemMatrices};
pub use error::{Error, Result};
pub use friction::{sign_set, FrictionBounds, Interval, PhysicalParams, SectorBound};
pub use simulator::{classify_regime, detect_cycle, simulate, step, CycleReport, Mode, Regime, SimConfig, Trajectory};
pub use linalg::{Mat2, SymMat2, Vec2};

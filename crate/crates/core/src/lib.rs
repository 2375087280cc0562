//! Covariance-matrix dynamics of two cavity modes coupled to an engineered
//! two-mode squeezed reservoir and a thermal reservoir, with the entanglement
//! measures, phase classification and sudden-death analysis built on them.
//!
//! ```
//! use gaussdyn::{drift, asymptotic_state, Convention, EngineeredParams, Variant};
//!
//! // r = 1, R = λ/κ = 1, zero temperature
//! let p = EngineeredParams::from_ratio(1.0, 1.0, 0.0);
//! let gen = drift(&p, Variant::Symmetric, Convention::Derived).unwrap();
//! let vf = *asymptotic_state(&gen).unwrap().state().unwrap();
//! assert!(vf.simon_s() < 0.0); // entanglement survives
//! ```

// NaN must fail every range check, so comparisons are written negated.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covariance;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod phase;
pub mod reservoir;

pub use covariance::{EprPair, OptimalEpr, SimonInvariants, TwoModeCovariance};
pub use dynamics::{
    asymptotic_state, propagate, propagate_adaptive, propagate_closed_form, run_schedule,
    Asymptote, Schedule, Stage, Trajectory,
};
pub use error::{Error, Result};
pub use phase::{
    boundary_nt, classify, esd_time_closed, esd_time_numeric, robustness_ratio, sweep, EsdResult,
    Phase, PhaseTag,
};
pub use reservoir::{
    drift, drift_asymmetric, drift_laser_frame, drift_symmetric, effective_params, Convention,
    DriftAffine, EngineeredParams, PhysicalSetup, Variant,
};

//! Joint transmit beamforming and reflecting-surface phase optimization for an
//! IRS-assisted multiuser cognitive radio downlink.
//!
//! The secondary base station serves `K` single-antenna users while keeping the
//! interference received by `I` primary users below a tolerance. The optimizer
//! alternates between
//!
//! * a beamforming block ([`beamforming`]): semidefinite relaxation plus
//!   successive convex approximation over the lifted matrices `W_k = w_k w_k^H`,
//! * a phase block ([`irs`]): lifting of the phase vector to `Θ`, a
//!   nuclear/spectral-norm penalty on its rank, and successive convex
//!   approximation,
//!
//! coordinated by [`ao::optimize`]. Every convex surrogate is solved through the
//! [`conic`] adapter. [`baselines`], [`channel_gen`] and [`experiment`] provide
//! the comparison schemes and the Monte-Carlo harness.

extern crate openblas_src;

pub mod ao;
pub mod baselines;
pub mod beamforming;
pub mod channel_gen;
pub mod conic;
pub mod error;
pub mod experiment;
pub mod irs;
pub mod linalg;
pub mod system_model;

pub use error::{Error, Result};
pub use system_model::{
    BeamformerSet, BudgetConfig, ChannelSet, LiftedBeamSet, LiftedPhase, PhaseConfig,
    ScenarioDims,
};

//! Coexistence analysis of UAV radar and UAV communication networks.
//!
//! Radars and base-station UAVs are scattered as Poisson point processes with
//! a guard zone, and share spectrum either by power splitting (SOMA) or by
//! time division (TDMA). The crate evaluates closed-form successful ranging
//! probability and transmission capacity ([`analytic`]), checks them against
//! a seeded Monte Carlo simulator ([`montecarlo`]), and solves the associated
//! network design problems ([`design`]).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod config;
pub mod design;
pub mod error;
pub mod montecarlo;
pub mod network;
pub mod propagation;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};

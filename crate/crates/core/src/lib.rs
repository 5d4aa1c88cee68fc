//! Simulation core for integrated sensing, localization and communication in
//! distributed-MIMO (cell-free) networks.
//!
//! * [`positioning`] — Fisher information and position error bounds for
//!   delay-based and carrier-phase positioning, measurement simulation,
//!   maximum-likelihood estimation and RMSE sweeps.
//! * [`se`] — uplink spectral efficiency with maximum-ratio combining under
//!   the four combinations of blockage knowledge and channel knowledge.
//! * [`scenario`], [`deployment`], [`blockage`], [`channel`] — configuration,
//!   geometry, link blockage and channel models shared by both.
//!
//! All randomness is derived from explicit seeds ([`seed`]); sweeps give
//! bit-identical results for any worker count.

pub mod blockage;
pub mod channel;
pub mod deployment;
pub mod error;
pub mod geometry;
pub mod kv;
pub mod lists;
pub mod manifest;
pub mod output;
pub mod parallel;
pub mod positioning;
pub mod scenario;
pub mod se;
pub mod seed;

pub use error::{Error, ErrorClass, Result};

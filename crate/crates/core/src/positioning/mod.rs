//! Delay (time-coherent) and carrier-phase (phase-coherent) positioning:
//! Fisher information and error bounds, measurement simulation, maximum
//! likelihood estimation and Monte Carlo RMSE sweeps.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

mod estimate;
mod fim;
mod measure;
mod sweep;

pub use estimate::{expected_nll, ml_estimate, EstimateResult, NEAR_TIE_RELATIVE};
pub use fim::{
    ap_snrs, fim, fim_delay, fim_phase, gdop, info_scale, inverse_trace, peb, unit_vectors, weighted_outer_sum,
    FisherInfo, PebResult, SINGULAR_CONDITION,
};
pub use measure::{coarse_delay, delay_variance, phase_variance, simulate_measurements, Measurements, NOISELESS_SNR};
pub use sweep::{
    gdop_sequence, peb_table, rmse_sweep, sweep_deployment, trial_seed, GdopStep, PebRow, RmseCurve, RmsePoint,
    SWEEP_UE,
};

/// Which observable the positioning uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Time of arrival only; accuracy set by the RMS bandwidth.
    Delay,
    /// Carrier phase with known phase references; accuracy set by the carrier.
    Phase,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Delay, Mode::Phase];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Delay => "delay",
            Mode::Phase => "phase",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "delay" => Ok(Mode::Delay),
            "phase" => Ok(Mode::Phase),
            _ => Err(Error::invalid("positioning.modes", format!("unknown mode `{s}` (expected delay or phase)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantity in a positioning result row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Peb,
    Rmse,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Peb => "peb",
            Metric::Rmse => "rmse",
        })
    }
}

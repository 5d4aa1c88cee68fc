//! Uplink spectral efficiency of a cell-free network under the four ISAC
//! information regimes.
//!
//! Sensing is modelled as an oracle for which links are blocked: a regime that
//! knows the blockage serves each UE from its nearest unblocked APs (the
//! backup set), otherwise from its nearest APs regardless of blockage (the
//! default set). Localization supplies the channel: a regime that knows the
//! CSI combines with the true channel, otherwise with its line-of-sight mean.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

mod cluster;
mod csi;
mod mrc;
mod sweep;

pub use cluster::{assign_clusters, AssignmentKind, ServingAssignment};
pub use csi::{csi_view, CsiView};
pub use mrc::{mrc_se, mrc_sinr, stack_channels};
pub use sweep::{draw_realization, se_sweep, Realization, SeCurve, SeRow, SeSweepOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsacRegime {
    WithIsac,
    WithLocalization,
    WithSensing,
    WithoutIsac,
}

/// What the combiner is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsiQuality {
    /// The true channel.
    Perfect,
    /// The deterministic LOS mean only.
    Statistical,
}

impl IsacRegime {
    pub const ALL: [IsacRegime; 4] = [
        IsacRegime::WithIsac,
        IsacRegime::WithLocalization,
        IsacRegime::WithSensing,
        IsacRegime::WithoutIsac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IsacRegime::WithIsac => "with-isac",
            IsacRegime::WithLocalization => "with-localization",
            IsacRegime::WithSensing => "with-sensing",
            IsacRegime::WithoutIsac => "without-isac",
        }
    }

    pub fn knows_blockage(self) -> bool {
        matches!(self, IsacRegime::WithIsac | IsacRegime::WithSensing)
    }

    pub fn knows_csi(self) -> bool {
        matches!(self, IsacRegime::WithIsac | IsacRegime::WithLocalization)
    }

    pub fn csi_quality(self) -> CsiQuality {
        if self.knows_csi() {
            CsiQuality::Perfect
        } else {
            CsiQuality::Statistical
        }
    }

    pub fn assignment_kind(self) -> AssignmentKind {
        if self.knows_blockage() {
            AssignmentKind::Backup
        } else {
            AssignmentKind::Default
        }
    }
}

impl FromStr for IsacRegime {
    type Err = Error;
    fn from_str(s: &str) -> Result<IsacRegime> {
        IsacRegime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::invalid("se.regimes", format!("unknown regime `{s}`")))
    }
}

impl fmt::Display for IsacRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_flags() {
        let flags: Vec<(bool, bool)> = IsacRegime::ALL.iter().map(|r| (r.knows_blockage(), r.knows_csi())).collect();
        assert_eq!(flags, vec![(true, true), (false, true), (true, false), (false, false)]);
    }

    #[test]
    fn names_round_trip() {
        for r in IsacRegime::ALL {
            assert_eq!(r.to_string().parse::<IsacRegime>().unwrap(), r);
        }
        assert!("with-everything".parse::<IsacRegime>().is_err());
    }
}

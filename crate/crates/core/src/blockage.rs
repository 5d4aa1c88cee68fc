//! Link blockage: which AP–UE links are obstructed, and by how much.

use rand::Rng;

use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::seed::{rng_from, mix64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockageKind {
    None,
    /// Every link inside a UE's default serving set is blocked.
    DefaultServingSet,
    /// Each link is blocked independently with this probability.
    RandomLinks { probability: f64 },
}

impl BlockageKind {
    pub fn name(&self) -> &'static str {
        match self {
            BlockageKind::None => "none",
            BlockageKind::DefaultServingSet => "default-serving-set",
            BlockageKind::RandomLinks { .. } => "random-links",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageSpec {
    pub kind: BlockageKind,
    /// Power loss on blocked links, dB.
    pub penalty_db: f64,
}

impl BlockageSpec {
    pub const DEFAULT_PENALTY_DB: f64 = 25.0;

    pub fn none() -> Self {
        BlockageSpec {
            kind: BlockageKind::None,
            penalty_db: Self::DEFAULT_PENALTY_DB,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.penalty_db >= 0.0) || !self.penalty_db.is_finite() {
            return Err(Error::invalid("channel.blockage_penalty_db", "must be a finite value >= 0 dB"));
        }
        if let BlockageKind::RandomLinks { probability } = self.kind {
            if !(0.0..=1.0).contains(&probability) {
                return Err(Error::invalid("blockage.probability", "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Per-link blockage flags, stored UE-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockageMap {
    num_aps: usize,
    num_ues: usize,
    blocked: Vec<bool>,
    pub penalty_db: f64,
}

impl BlockageMap {
    pub fn clear(num_aps: usize, num_ues: usize, penalty_db: f64) -> Self {
        BlockageMap {
            num_aps,
            num_ues,
            blocked: vec![false; num_aps * num_ues],
            penalty_db,
        }
    }

    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn num_ues(&self) -> usize {
        self.num_ues
    }

    pub fn is_blocked(&self, ap: usize, ue: usize) -> bool {
        self.blocked[ue * self.num_aps + ap]
    }

    /// Blocked and actually attenuated. A 0 dB obstruction is transparent,
    /// so it changes neither the channel nor what sensing can report.
    pub fn attenuates(&self, ap: usize, ue: usize) -> bool {
        self.penalty_db > 0.0 && self.is_blocked(ap, ue)
    }

    pub fn set(&mut self, ap: usize, ue: usize, blocked: bool) {
        self.blocked[ue * self.num_aps + ap] = blocked;
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|b| **b).count()
    }
}

pub fn apply_blockage(
    deployment: &Deployment,
    spec: &BlockageSpec,
    default_sets: Option<&[Vec<usize>]>,
    seed: u64,
) -> Result<BlockageMap> {
    spec.validate()?;
    let (n_ap, n_ue) = (deployment.num_aps(), deployment.num_ues());
    let mut map = BlockageMap::clear(n_ap, n_ue, spec.penalty_db);
    match spec.kind {
        BlockageKind::None => {}
        BlockageKind::DefaultServingSet => {
            let sets = default_sets.ok_or_else(|| {
                Error::invalid("blockage.kind", "default-serving-set blockage needs the default serving sets")
            })?;
            if sets.len() != n_ue {
                return Err(Error::invalid(
                    "blockage.kind",
                    format!("{} default sets given for {n_ue} UEs", sets.len()),
                ));
            }
            for (ue, set) in sets.iter().enumerate() {
                for &ap in set {
                    if ap >= n_ap {
                        return Err(Error::invalid("blockage.kind", format!("AP index {ap} out of range")));
                    }
                    map.set(ap, ue, true);
                }
            }
        }
        BlockageKind::RandomLinks { probability } => {
            let mut rng = rng_from(mix64(seed));
            for ue in 0..n_ue {
                for ap in 0..n_ap {
                    map.set(ap, ue, rng.random_bool(probability));
                }
            }
        }
    }
    Ok(map)
}

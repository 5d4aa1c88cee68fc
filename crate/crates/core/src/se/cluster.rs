//! Dynamic cooperation clustering: which APs serve which UE.

use crate::blockage::BlockageMap;
use crate::deployment::Deployment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentKind {
    /// Nearest APs, blockage ignored.
    Default,
    /// Nearest APs among the links that are not blocked.
    Backup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServingAssignment {
    pub kind: AssignmentKind,
    /// Per-UE AP indices, nearest first.
    pub sets: Vec<Vec<usize>>,
    /// Per-UE flag: fewer than `L` eligible APs were available.
    pub shortfall: Vec<bool>,
}

impl ServingAssignment {
    pub fn serves(&self, ap: usize, ue: usize) -> bool {
        self.sets[ue].contains(&ap)
    }
}

/// Nearest-`l` selection per UE; ties go to the lower AP index.
pub fn assign_clusters(
    deployment: &Deployment,
    blockage: &BlockageMap,
    l: usize,
    kind: AssignmentKind,
) -> Result<ServingAssignment> {
    if l == 0 {
        return Err(Error::invalid("cluster_size_L", "must be at least 1"));
    }
    if blockage.num_aps() != deployment.num_aps() || blockage.num_ues() != deployment.num_ues() {
        return Err(Error::invalid(
            "blockage",
            format!(
                "map is {}x{} but the deployment has {} APs and {} UEs",
                blockage.num_aps(),
                blockage.num_ues(),
                deployment.num_aps(),
                deployment.num_ues()
            ),
        ));
    }
    let mut sets = Vec::with_capacity(deployment.num_ues());
    let mut shortfall = Vec::with_capacity(deployment.num_ues());
    for ue in 0..deployment.num_ues() {
        let mut eligible: Vec<(f64, usize)> = (0..deployment.num_aps())
            .filter(|&ap| kind == AssignmentKind::Default || !blockage.attenuates(ap, ue))
            .map(|ap| (deployment.distance(ap, ue), ap))
            .collect();
        if eligible.is_empty() {
            return Err(Error::NoEligibleAps { ue });
        }
        eligible.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let want = l.min(deployment.num_aps());
        shortfall.push(eligible.len() < want);
        sets.push(eligible.into_iter().take(want).map(|(_, ap)| ap).collect());
    }
    Ok(ServingAssignment { kind, sets, shortfall })
}

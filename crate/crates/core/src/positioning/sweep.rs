//! PEB tables, Monte Carlo RMSE sweeps and sequential-deployment GDOP.

use super::{fim, gdop, ml_estimate, peb, simulate_measurements, Mode};
use crate::deployment::{generate_deployment_indexed, Deployment};
use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::scenario::{GeometryPolicy, ScenarioConfig};
use crate::seed::{child_seed, Stream};

/// The UE whose position the sweeps estimate.
pub const SWEEP_UE: usize = 0;

/// Deployment with `count` APs under the configured geometry policy.
pub fn sweep_deployment(config: &ScenarioConfig, count: usize) -> Result<Deployment> {
    if count == 0 || count > config.num_aps {
        return Err(Error::invalid(
            "positioning.ap_counts",
            format!("count {count} outside 1..={}", config.num_aps),
        ));
    }
    let index = match config.positioning.geometry {
        GeometryPolicy::Nested => 0,
        GeometryPolicy::Redraw => count as u64,
    };
    Ok(generate_deployment_indexed(config, index)?.with_ap_prefix(count))
}

/// Noise seed of one trial; shared by both modes so they see paired draws.
pub fn trial_seed(master: u64, count: usize, trial: usize) -> u64 {
    child_seed(master, Stream::PositioningTrial, ((count as u64) << 32) | trial as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PebRow {
    pub num_aps: usize,
    pub mode: Mode,
    pub peb_m: f64,
}

/// PEB for every (count, mode), counts outermost.
pub fn peb_table(config: &ScenarioConfig, counts: &[usize], modes: &[Mode]) -> Result<Vec<PebRow>> {
    let mut rows = Vec::with_capacity(counts.len() * modes.len());
    for &count in counts {
        let dep = sweep_deployment(config, count)?;
        for &mode in modes {
            let result = peb(&fim(&dep, SWEEP_UE, &config.signal, mode)?)?;
            rows.push(PebRow {
                num_aps: count,
                mode,
                peb_m: result.peb_m,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsePoint {
    pub num_aps: usize,
    pub mode: Mode,
    pub rmse_m: f64,
    pub peb_m: f64,
    /// Trials that produced an estimate.
    pub trials: usize,
    /// Trials whose estimation raised an error.
    pub failures: usize,
    /// Trials whose refinement stopped at the iteration limit.
    pub unconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseCurve {
    pub points: Vec<RmsePoint>,
}

pub fn rmse_sweep(
    config: &ScenarioConfig,
    mode: Mode,
    counts: &[usize],
    trials: usize,
    jobs: usize,
) -> Result<RmseCurve> {
    if trials == 0 {
        return Err(Error::invalid("positioning.trials", "must be at least 1"));
    }
    let mut points = Vec::with_capacity(counts.len());
    for &count in counts {
        let dep = sweep_deployment(config, count)?;
        let bound = peb(&fim(&dep, SWEEP_UE, &config.signal, mode)?)?.peb_m;
        let truth = dep.ue_positions[SWEEP_UE];
        let outcomes = map_indexed(jobs, trials, |t| {
            let seed = trial_seed(config.seed, count, t);
            let m = simulate_measurements(&dep, SWEEP_UE, &config.signal, mode, None, seed)?;
            let est = ml_estimate(&m, &dep, &config.signal, &config.search)?;
            Ok::<_, Error>((est.position.distance(&truth).powi(2), est.converged))
        });
        let (mut sum, mut ok, mut failures, mut unconverged) = (0.0, 0usize, 0usize, 0usize);
        for outcome in outcomes {
            match outcome {
                Ok((sq, converged)) => {
                    sum += sq;
                    ok += 1;
                    if !converged {
                        unconverged += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
        points.push(RmsePoint {
            num_aps: count,
            mode,
            rmse_m: if ok > 0 { (sum / ok as f64).sqrt() } else { f64::NAN },
            peb_m: bound,
            trials: ok,
            failures,
            unconverged,
        });
    }
    Ok(RmseCurve { points })
}

/// GDOP and carrier-phase PEB after each AP of an ordering is added.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdopStep {
    pub step: usize,
    /// 1-based label of the AP added at this step.
    pub ap_label: usize,
    /// `None` while the prefix is geometrically singular.
    pub gdop: Option<f64>,
    pub peb_phase_m: Option<f64>,
}

pub fn gdop_sequence(config: &ScenarioConfig, deployment: &Deployment, ordering: &[usize]) -> Result<Vec<GdopStep>> {
    crate::lists::check_permutation("gdop.orderings", ordering, deployment.num_aps())?;
    let singular_as_none = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::SingularInformation { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    (1..=ordering.len())
        .map(|step| {
            let sub = deployment.with_ap_subset(&ordering[..step]);
            let g = singular_as_none(gdop(&sub, SWEEP_UE))?;
            let p = singular_as_none(
                fim(&sub, SWEEP_UE, &config.signal, Mode::Phase).and_then(|j| peb(&j).map(|r| r.peb_m)),
            )?;
            Ok(GdopStep {
                step,
                ap_label: ordering[step - 1] + 1,
                gdop: g,
                peb_phase_m: p,
            })
        })
        .collect()
}

//! Monte Carlo spectral-efficiency sweeps over transmit SNR and ISAC regime.
//!
//! Each realization draws fresh UE positions, blockage, shadow fading and
//! small-scale fading over a fixed AP layout; all regimes and SNRs are then
//! evaluated on that same draw, so regime differences are paired.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{assign_clusters, csi_view, mrc_se, stack_channels, AssignmentKind, CsiQuality, IsacRegime, ServingAssignment};
use crate::blockage::{apply_blockage, BlockageMap};
use crate::channel::{db_to_linear, draw_rician_channel, los_steering, path_gain, ChannelRealization};
use crate::deployment::{draw_ues, generate_deployment, Deployment};
use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::scenario::{DeploymentKind, ScenarioConfig};
use crate::seed::{rng_for, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct SeSweepOptions {
    pub regimes: Vec<IsacRegime>,
    pub snr_db: Vec<f64>,
    pub realizations: usize,
    pub report_sum: bool,
    pub jobs: usize,
    /// Forces one CSI quality on every regime.
    pub csi_override: Option<CsiQuality>,
}

impl SeSweepOptions {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        SeSweepOptions {
            regimes: config.se.regimes.clone(),
            snr_db: config.se.snr_db.clone(),
            realizations: config.se.realizations,
            report_sum: config.se.report_sum,
            jobs: 0,
            csi_override: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeRow {
    pub snr_db: f64,
    pub regime: IsacRegime,
    /// Per-UE average (or sum over UEs), bits/s/Hz.
    pub se: f64,
    /// Standard error of `se` across realizations.
    pub std_error: f64,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeCurve {
    /// SNR outermost, regimes in the requested order.
    pub rows: Vec<SeRow>,
    pub report_sum: bool,
}

impl SeCurve {
    pub fn value(&self, snr_db: f64, regime: IsacRegime) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.snr_db == snr_db && r.regime == regime)
            .map(|r| r.se)
    }

    /// SE of `regime` over that of without-isac at the same SNR.
    pub fn gain(&self, snr_db: f64, regime: IsacRegime) -> Option<f64> {
        Some(self.value(snr_db, regime)? / self.value(snr_db, IsacRegime::WithoutIsac)?)
    }
}

/// One joint draw of UE placement, blockage and channels.
#[derive(Debug, Clone)]
pub struct Realization {
    pub deployment: Deployment,
    pub blockage: BlockageMap,
    pub default: ServingAssignment,
    pub backup: ServingAssignment,
    /// `[ue][ap]`.
    pub channels: Vec<Vec<ChannelRealization>>,
}

impl Realization {
    pub fn assignment(&self, kind: AssignmentKind) -> &ServingAssignment {
        match kind {
            AssignmentKind::Default => &self.default,
            AssignmentKind::Backup => &self.backup,
        }
    }

    pub fn stacked_truth(&self) -> Vec<Vec<Complex64>> {
        stack_channels(
            &self
                .channels
                .iter()
                .map(|aps| aps.iter().map(|c| c.h.clone()).collect())
                .collect::<Vec<_>>(),
        )
    }

    pub fn stacked_view(&self, quality: CsiQuality) -> Vec<Vec<Complex64>> {
        stack_channels(
            &self
                .channels
                .iter()
                .map(|aps| aps.iter().map(|c| csi_view(c, quality).h_hat).collect())
                .collect::<Vec<_>>(),
        )
    }
}

pub fn draw_realization(config: &ScenarioConfig, layout: &Deployment, index: u64) -> Result<Realization> {
    let mut rng = rng_for(config.seed, Stream::SeRealization, index);
    let ues = match &config.deployment {
        DeploymentKind::ExplicitList { ues: Some(ues), .. } => ues.clone(),
        _ => draw_ues(config, &mut rng),
    };
    let deployment = layout.with_ues(ues);
    let (n_ap, n_ue) = (deployment.num_aps(), deployment.num_ues());
    let clear = BlockageMap::clear(n_ap, n_ue, config.blockage.penalty_db);
    let default = assign_clusters(&deployment, &clear, config.cluster_size_l, AssignmentKind::Default)?;
    let blockage = apply_blockage(&deployment, &config.blockage, Some(&default.sets), rng.random())?;
    let backup = assign_clusters(&deployment, &blockage, config.cluster_size_l, AssignmentKind::Backup)?;
    let sigma = config.channel.shadow_sigma_db;
    let mut channels = Vec::with_capacity(n_ue);
    for ue in 0..n_ue {
        let mut row = Vec::with_capacity(n_ap);
        for ap in 0..n_ap {
            let blocked = blockage.attenuates(ap, ue);
            let shadow = sigma * rng.sample::<f64, _>(StandardNormal);
            let link = deployment.link(ap, ue, blocked);
            let gain = path_gain(&link, deployment.dims, &config.signal, shadow, blockage.penalty_db)?;
            let los = los_steering(&link.ap, &link.ue, &config.signal, config.antennas_per_ap);
            row.push(draw_rician_channel(&gain, config.channel.k_factor(blocked), los, &mut rng)?);
        }
        channels.push(row);
    }
    Ok(Realization {
        deployment,
        blockage,
        default,
        backup,
        channels,
    })
}

fn evaluate(config: &ScenarioConfig, opts: &SeSweepOptions, r: &Realization) -> Result<Vec<f64>> {
    let truth = r.stacked_truth();
    let perfect = r.stacked_view(CsiQuality::Perfect);
    let statistical = r.stacked_view(CsiQuality::Statistical);
    let n_ue = truth.len() as f64;
    let mut out = Vec::with_capacity(opts.snr_db.len() * opts.regimes.len());
    for &snr_db in &opts.snr_db {
        for &regime in &opts.regimes {
            let quality = opts.csi_override.unwrap_or(regime.csi_quality());
            let views = match quality {
                CsiQuality::Perfect => &perfect,
                CsiQuality::Statistical => &statistical,
            };
            let sets = &r.assignment(regime.assignment_kind()).sets;
            let se = mrc_se(&truth, views, sets, config.antennas_per_ap, db_to_linear(snr_db))?;
            let total: f64 = se.iter().sum();
            out.push(if opts.report_sum { total } else { total / n_ue });
        }
    }
    Ok(out)
}

pub fn se_sweep(config: &ScenarioConfig, opts: &SeSweepOptions) -> Result<SeCurve> {
    if opts.realizations == 0 {
        return Err(Error::invalid("se.realizations", "must be at least 1"));
    }
    if opts.regimes.is_empty() || opts.snr_db.is_empty() {
        return Err(Error::invalid("se.regimes", "nothing to sweep"));
    }
    let layout = generate_deployment(config)?;
    let per_realization = map_indexed(opts.jobs, opts.realizations, |i| {
        let r = draw_realization(config, &layout, i as u64)?;
        evaluate(config, opts, &r)
    });
    let cells = opts.snr_db.len() * opts.regimes.len();
    let mut sum = vec![0.0; cells];
    let mut sum_sq = vec![0.0; cells];
    for values in per_realization {
        for (c, v) in values?.into_iter().enumerate() {
            sum[c] += v;
            sum_sq[c] += v * v;
        }
    }
    let n = opts.realizations as f64;
    let mut rows = Vec::with_capacity(cells);
    for (s, &snr_db) in opts.snr_db.iter().enumerate() {
        for (g, &regime) in opts.regimes.iter().enumerate() {
            let c = s * opts.regimes.len() + g;
            let mean = sum[c] / n;
            let var = if opts.realizations > 1 {
                ((sum_sq[c] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            rows.push(SeRow {
                snr_db,
                regime,
                se: mean,
                std_error: (var / n).sqrt(),
                realizations: opts.realizations,
            });
        }
    }
    Ok(SeCurve {
        rows,
        report_sum: opts.report_sum,
    })
}

//! Scenario configuration and the scenario file format.
//!
//! A scenario file is a [`kv::Document`](crate::kv::Document). Required keys:
//! `area_side_m`, `num_aps`, `num_ues`, `seed`, `signal.carrier_hz`,
//! `signal.bandwidth_hz`. Every other key has a default (see
//! [`ScenarioConfig::from_document`]); unknown keys are rejected. Keys under
//! `run.` carry run metadata written into manifests and are ignored by the
//! configuration itself, which lets a manifest be replayed as a scenario.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::blockage::{BlockageKind, BlockageSpec};
use crate::channel::SignalModel;
use crate::error::{Error, Result};
use crate::geometry::{Dims, Point};
use crate::kv::{Document, Entry};
use crate::lists;
use crate::positioning::Mode;
use crate::se::IsacRegime;

#[derive(Debug, Clone, PartialEq)]
pub enum DeploymentKind {
    /// APs and UEs uniform in `[0, side]^2`.
    UniformSquare,
    /// APs evenly spaced on the circle inscribed in the square, UEs uniform in its disc.
    Circle,
    /// Fixed AP coordinates; UEs fixed too when given, otherwise uniform in the square.
    ExplicitList {
        aps: Vec<Point>,
        ues: Option<Vec<Point>>,
        allow_outside: bool,
    },
}

impl DeploymentKind {
    pub fn name(&self) -> &'static str {
        match self {
            DeploymentKind::UniformSquare => "uniform-square",
            DeploymentKind::Circle => "circle",
            DeploymentKind::ExplicitList { .. } => "explicit-list",
        }
    }
}

/// How positioning sweeps obtain the AP set for each count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeometryPolicy {
    /// The first `k` APs of one deployment, so sets grow by inclusion.
    #[default]
    Nested,
    /// A fresh deployment per count.
    Redraw,
}

impl FromStr for GeometryPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nested" => Ok(GeometryPolicy::Nested),
            "redraw" => Ok(GeometryPolicy::Redraw),
            _ => Err(Error::invalid("positioning.geometry", format!("unknown policy `{s}`"))),
        }
    }
}

impl fmt::Display for GeometryPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryPolicy::Nested => "nested",
            GeometryPolicy::Redraw => "redraw",
        })
    }
}

/// Small-scale fading and shadowing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub rician_k_db: f64,
    /// K-factor on blocked links; `-inf` dB means pure scattering.
    pub blocked_rician_k_db: f64,
    pub shadow_sigma_db: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            rician_k_db: 10.0,
            blocked_rician_k_db: f64::NEG_INFINITY,
            shadow_sigma_db: 4.0,
        }
    }
}

impl ChannelParams {
    pub fn k_factor(&self, blocked: bool) -> f64 {
        let db = if blocked { self.blocked_rician_k_db } else { self.rician_k_db };
        crate::channel::db_to_linear(db)
    }
}

/// Maximum-likelihood search settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Coarse grid spacing of the delay-domain search.
    pub delay_grid_m: f64,
    /// The search region is the deployment square padded by this margin.
    pub margin_m: f64,
    pub max_iterations: usize,
    pub step_tol_m: f64,
    /// Mahalanobis radius² of the carrier-phase search gate around the coarse estimate.
    pub gate_chi2: f64,
    /// Fixed gate radius; overrides `gate_chi2` when set.
    pub phase_gate_radius_m: Option<f64>,
    /// Carrier-phase candidates kept for local refinement.
    pub keep: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            delay_grid_m: 1.0,
            margin_m: 20.0,
            max_iterations: 50,
            step_tol_m: 1e-9,
            gate_chi2: 25.0,
            phase_gate_radius_m: None,
            keep: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositioningSettings {
    pub ap_counts: Vec<usize>,
    pub trials: usize,
    pub modes: Vec<Mode>,
    pub geometry: GeometryPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeSettings {
    pub snr_db: Vec<f64>,
    pub realizations: usize,
    pub regimes: Vec<IsacRegime>,
    /// Report the sum over UEs instead of the per-UE average.
    pub report_sum: bool,
}

impl Default for SeSettings {
    fn default() -> Self {
        SeSettings {
            snr_db: (0..9).map(|i| -10.0 + 5.0 * i as f64).collect(),
            realizations: 200,
            regimes: IsacRegime::ALL.to_vec(),
            report_sum: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub area_side_m: f64,
    pub num_aps: usize,
    pub num_ues: usize,
    pub antennas_per_ap: usize,
    pub dims: Dims,
    pub deployment: DeploymentKind,
    pub seed: u64,
    pub signal: SignalModel,
    pub channel: ChannelParams,
    pub blockage: BlockageSpec,
    pub cluster_size_l: usize,
    pub search: SearchConfig,
    pub positioning: PositioningSettings,
    pub se: SeSettings,
    pub gdop_orderings: Vec<Vec<usize>>,
}

const REQUIRED: [&str; 6] = [
    "area_side_m",
    "num_aps",
    "num_ues",
    "seed",
    "signal.carrier_hz",
    "signal.bandwidth_hz",
];

const KNOWN: [&str; 38] = [
    "area_side_m",
    "num_aps",
    "num_ues",
    "seed",
    "antennas_per_ap",
    "dimensions",
    "cluster_size_L",
    "deployment.kind",
    "deployment.aps",
    "deployment.ues",
    "deployment.allow_outside",
    "signal.carrier_hz",
    "signal.bandwidth_hz",
    "signal.num_subcarriers",
    "signal.ref_snr_db",
    "signal.ref_distance_m",
    "signal.pathloss_exponent",
    "channel.rician_k_db",
    "channel.blocked_rician_k_db",
    "channel.shadow_sigma_db",
    "channel.blockage_penalty_db",
    "blockage.kind",
    "blockage.probability",
    "search.delay_grid_m",
    "search.margin_m",
    "search.max_iterations",
    "search.step_tol_m",
    "search.gate_chi2",
    "search.phase_gate_radius_m",
    "search.keep",
    "positioning.ap_counts",
    "positioning.trials",
    "positioning.modes",
    "positioning.geometry",
    "se.snr_db",
    "se.realizations",
    "se.regimes",
    "se.report",
];

const KNOWN_EXTRA: [&str; 1] = ["gdop.orderings"];

/// Metadata keys accepted under `run.`.
pub const RUN_KEYS: [&str; 6] = [
    "run.command",
    "run.tool_version",
    "run.outputs",
    "run.duration_s",
    "run.jobs",
    "run.master_seed",
];

struct Reader<'a> {
    doc: &'a Document,
}

impl<'a> Reader<'a> {
    fn entry(&self, key: &str) -> Option<&'a Entry> {
        self.doc.get(key)
    }

    fn typed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                Error::invalid(key, format!("line {}: `{}` is not {what}", e.line, e.value))
            }),
        }
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        let v: Option<f64> = self.typed(key, "a number")?;
        if let Some(x) = v {
            if x.is_nan() {
                return Err(Error::invalid(key, "NaN is not allowed"));
            }
        }
        Ok(v)
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.typed(key, "a non-negative integer")
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.typed(key, "`true` or `false`")
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.entry(key).map(|e| e.value.as_str())
    }
}

impl ScenarioConfig {
    /// Builds and validates a configuration from a parsed document.
    pub fn from_document(doc: &Document) -> Result<ScenarioConfig> {
        for e in doc.entries() {
            let known = KNOWN.contains(&e.key.as_str())
                || KNOWN_EXTRA.contains(&e.key.as_str())
                || RUN_KEYS.contains(&e.key.as_str());
            if !known {
                return Err(Error::invalid(e.key.clone(), format!("line {}: unknown key", e.line)));
            }
        }
        for key in REQUIRED {
            if doc.get(key).is_none() {
                return Err(Error::invalid(key, "required key is missing"));
            }
        }
        let r = Reader { doc };
        let num_aps = r.usize("num_aps")?.unwrap();
        let num_ues = r.usize("num_ues")?.unwrap();

        let dims = match r.usize("dimensions")? {
            None => Dims::Planar,
            Some(n) => Dims::from_count(n).ok_or_else(|| Error::invalid("dimensions", "must be 2 or 3"))?,
        };

        let kind = r.raw("deployment.kind").unwrap_or("uniform-square");
        let deployment = match kind {
            "uniform-square" | "circle" => {
                for key in ["deployment.aps", "deployment.ues", "deployment.allow_outside"] {
                    if doc.get(key).is_some() {
                        return Err(Error::invalid(key, "only valid with deployment.kind = explicit-list"));
                    }
                }
                if kind == "circle" {
                    DeploymentKind::Circle
                } else {
                    DeploymentKind::UniformSquare
                }
            }
            "explicit-list" => {
                let aps = lists::parse_points(
                    "deployment.aps",
                    r.raw("deployment.aps")
                        .ok_or_else(|| Error::invalid("deployment.aps", "explicit-list needs AP coordinates"))?,
                )?;
                let ues = r
                    .raw("deployment.ues")
                    .map(|s| lists::parse_points("deployment.ues", s))
                    .transpose()?;
                DeploymentKind::ExplicitList {
                    aps,
                    ues,
                    allow_outside: r.bool("deployment.allow_outside")?.unwrap_or(false),
                }
            }
            other => return Err(Error::invalid("deployment.kind", format!("unknown kind `{other}`"))),
        };

        let defaults = SignalModel::default();
        let signal = SignalModel {
            carrier_hz: r.f64("signal.carrier_hz")?.unwrap(),
            bandwidth_hz: r.f64("signal.bandwidth_hz")?.unwrap(),
            num_subcarriers: r.usize("signal.num_subcarriers")?.unwrap_or(defaults.num_subcarriers),
            ref_snr_db: r.f64("signal.ref_snr_db")?.unwrap_or(defaults.ref_snr_db),
            ref_distance_m: r.f64("signal.ref_distance_m")?.unwrap_or(defaults.ref_distance_m),
            pathloss_exponent: r.f64("signal.pathloss_exponent")?.unwrap_or(defaults.pathloss_exponent),
        };

        let cd = ChannelParams::default();
        let channel = ChannelParams {
            rician_k_db: r.f64("channel.rician_k_db")?.unwrap_or(cd.rician_k_db),
            blocked_rician_k_db: r.f64("channel.blocked_rician_k_db")?.unwrap_or(cd.blocked_rician_k_db),
            shadow_sigma_db: r.f64("channel.shadow_sigma_db")?.unwrap_or(cd.shadow_sigma_db),
        };

        let probability = r.f64("blockage.probability")?;
        let blockage_kind = match r.raw("blockage.kind").unwrap_or("none") {
            "none" => BlockageKind::None,
            "default-serving-set" => BlockageKind::DefaultServingSet,
            "random-links" => BlockageKind::RandomLinks {
                probability: probability
                    .ok_or_else(|| Error::invalid("blockage.probability", "random-links needs a probability"))?,
            },
            other => return Err(Error::invalid("blockage.kind", format!("unknown kind `{other}`"))),
        };
        if probability.is_some() && !matches!(blockage_kind, BlockageKind::RandomLinks { .. }) {
            return Err(Error::invalid("blockage.probability", "only valid with blockage.kind = random-links"));
        }
        let blockage = BlockageSpec {
            kind: blockage_kind,
            penalty_db: r.f64("channel.blockage_penalty_db")?.unwrap_or(BlockageSpec::DEFAULT_PENALTY_DB),
        };

        let sd = SearchConfig::default();
        let search = SearchConfig {
            delay_grid_m: r.f64("search.delay_grid_m")?.unwrap_or(sd.delay_grid_m),
            margin_m: r.f64("search.margin_m")?.unwrap_or(sd.margin_m),
            max_iterations: r.usize("search.max_iterations")?.unwrap_or(sd.max_iterations),
            step_tol_m: r.f64("search.step_tol_m")?.unwrap_or(sd.step_tol_m),
            gate_chi2: r.f64("search.gate_chi2")?.unwrap_or(sd.gate_chi2),
            phase_gate_radius_m: r.f64("search.phase_gate_radius_m")?,
            keep: r.usize("search.keep")?.unwrap_or(sd.keep),
        };

        let positioning = PositioningSettings {
            ap_counts: match r.raw("positioning.ap_counts") {
                Some(s) => lists::parse_counts("positioning.ap_counts", s)?,
                None => default_counts(num_aps),
            },
            trials: r.usize("positioning.trials")?.unwrap_or(500),
            modes: match r.raw("positioning.modes") {
                Some(s) => s
                    .split(',')
                    .map(|m| m.trim().parse::<Mode>())
                    .collect::<Result<Vec<_>>>()?,
                None => vec![Mode::Delay, Mode::Phase],
            },
            geometry: match r.raw("positioning.geometry") {
                Some(s) => s.parse()?,
                None => GeometryPolicy::Nested,
            },
        };

        let sed = SeSettings::default();
        let se = SeSettings {
            snr_db: match r.raw("se.snr_db") {
                Some(s) => lists::parse_grid("se.snr_db", s)?,
                None => sed.snr_db,
            },
            realizations: r.usize("se.realizations")?.unwrap_or(sed.realizations),
            regimes: match r.raw("se.regimes") {
                Some(s) => s
                    .split(',')
                    .map(|m| m.trim().parse::<IsacRegime>())
                    .collect::<Result<Vec<_>>>()?,
                None => sed.regimes,
            },
            report_sum: match r.raw("se.report") {
                None | Some("per-ue") => false,
                Some("sum") => true,
                Some(other) => return Err(Error::invalid("se.report", format!("expected `per-ue` or `sum`, got `{other}`"))),
            },
        };

        let config = ScenarioConfig {
            area_side_m: r.f64("area_side_m")?.unwrap(),
            num_aps,
            num_ues,
            antennas_per_ap: r.usize("antennas_per_ap")?.unwrap_or(1),
            dims,
            deployment,
            seed: r.typed("seed", "an unsigned 64-bit integer")?.unwrap(),
            signal,
            channel,
            blockage,
            cluster_size_l: r.usize("cluster_size_L")?.unwrap_or(num_aps.min(5)),
            search,
            positioning,
            se,
            gdop_orderings: match r.raw("gdop.orderings") {
                Some(s) => lists::parse_orderings("gdop.orderings", s)?,
                None => Vec::new(),
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<ScenarioConfig> {
        ScenarioConfig::from_document(&Document::parse(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_side_m > 0.0) || !self.area_side_m.is_finite() {
            return Err(Error::invalid("area_side_m", "zero-area region: side must be positive and finite"));
        }
        if self.num_aps == 0 {
            return Err(Error::invalid("num_aps", "must be at least 1"));
        }
        if self.num_ues == 0 {
            return Err(Error::invalid("num_ues", "must be at least 1"));
        }
        if self.antennas_per_ap == 0 {
            return Err(Error::invalid("antennas_per_ap", "must be at least 1"));
        }
        if self.cluster_size_l == 0 || self.cluster_size_l > self.num_aps {
            return Err(Error::invalid(
                "cluster_size_L",
                format!("must lie in 1..={} (num_aps), got {}", self.num_aps, self.cluster_size_l),
            ));
        }
        if let DeploymentKind::ExplicitList { aps, ues, .. } = &self.deployment {
            if aps.len() != self.num_aps {
                return Err(Error::invalid(
                    "deployment.aps",
                    format!("{} coordinates given for num_aps = {}", aps.len(), self.num_aps),
                ));
            }
            if let Some(ues) = ues {
                if ues.len() != self.num_ues {
                    return Err(Error::invalid(
                        "deployment.ues",
                        format!("{} coordinates given for num_ues = {}", ues.len(), self.num_ues),
                    ));
                }
            }
        }
        self.signal.validate()?;
        if !(self.channel.shadow_sigma_db >= 0.0) || !self.channel.shadow_sigma_db.is_finite() {
            return Err(Error::invalid("channel.shadow_sigma_db", "must be non-negative"));
        }
        if self.channel.rician_k_db == f64::INFINITY {
            return Err(Error::invalid("channel.rician_k_db", "use a large finite value for a LOS-only channel"));
        }
        if self.channel.blocked_rician_k_db == f64::INFINITY {
            return Err(Error::invalid("channel.blocked_rician_k_db", "must be below +inf"));
        }
        self.blockage.validate()?;
        let s = &self.search;
        let positive = [
            ("search.delay_grid_m", s.delay_grid_m),
            ("search.step_tol_m", s.step_tol_m),
            ("search.gate_chi2", s.gate_chi2),
        ];
        for (field, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, "must be positive"));
            }
        }
        if !(s.margin_m >= 0.0) || !s.margin_m.is_finite() {
            return Err(Error::invalid("search.margin_m", "must be non-negative"));
        }
        if let Some(radius) = s.phase_gate_radius_m {
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(Error::invalid("search.phase_gate_radius_m", "must be positive"));
            }
        }
        if s.max_iterations == 0 {
            return Err(Error::invalid("search.max_iterations", "must be at least 1"));
        }
        if s.keep == 0 {
            return Err(Error::invalid("search.keep", "must be at least 1"));
        }
        let p = &self.positioning;
        if p.trials == 0 {
            return Err(Error::invalid("positioning.trials", "must be at least 1"));
        }
        if p.ap_counts.is_empty() {
            return Err(Error::invalid("positioning.ap_counts", "must not be empty"));
        }
        if let Some(&k) = p.ap_counts.iter().find(|&&k| k == 0 || k > self.num_aps) {
            return Err(Error::invalid(
                "positioning.ap_counts",
                format!("count {k} outside 1..={} (num_aps)", self.num_aps),
            ));
        }
        if p.modes.is_empty() {
            return Err(Error::invalid("positioning.modes", "must not be empty"));
        }
        if self.se.realizations == 0 {
            return Err(Error::invalid("se.realizations", "must be at least 1"));
        }
        if self.se.snr_db.is_empty() || self.se.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("se.snr_db", "must be a non-empty list of finite values"));
        }
        if self.se.regimes.is_empty() {
            return Err(Error::invalid("se.regimes", "must not be empty"));
        }
        for o in &self.gdop_orderings {
            lists::check_permutation("gdop.orderings", o, self.num_aps)?;
        }
        Ok(())
    }

    /// Canonical document with every default resolved.
    pub fn to_document(&self) -> Document {
        let mut d = Document::default();
        d.push("area_side_m", self.area_side_m.to_string());
        d.push("num_aps", self.num_aps.to_string());
        d.push("num_ues", self.num_ues.to_string());
        d.push("seed", self.seed.to_string());
        d.push("antennas_per_ap", self.antennas_per_ap.to_string());
        d.push("dimensions", self.dims.count().to_string());
        d.push("cluster_size_L", self.cluster_size_l.to_string());
        d.push("deployment.kind", self.deployment.name());
        if let DeploymentKind::ExplicitList { aps, ues, allow_outside } = &self.deployment {
            let spatial = self.dims == Dims::Spatial;
            d.push("deployment.aps", lists::render_points(aps, spatial));
            if let Some(ues) = ues {
                d.push("deployment.ues", lists::render_points(ues, spatial));
            }
            d.push("deployment.allow_outside", allow_outside.to_string());
        }
        let s = &self.signal;
        d.push("signal.carrier_hz", s.carrier_hz.to_string());
        d.push("signal.bandwidth_hz", s.bandwidth_hz.to_string());
        d.push("signal.num_subcarriers", s.num_subcarriers.to_string());
        d.push("signal.ref_snr_db", s.ref_snr_db.to_string());
        d.push("signal.ref_distance_m", s.ref_distance_m.to_string());
        d.push("signal.pathloss_exponent", s.pathloss_exponent.to_string());
        d.push("channel.rician_k_db", self.channel.rician_k_db.to_string());
        d.push("channel.blocked_rician_k_db", self.channel.blocked_rician_k_db.to_string());
        d.push("channel.shadow_sigma_db", self.channel.shadow_sigma_db.to_string());
        d.push("channel.blockage_penalty_db", self.blockage.penalty_db.to_string());
        d.push("blockage.kind", self.blockage.kind.name());
        if let BlockageKind::RandomLinks { probability } = self.blockage.kind {
            d.push("blockage.probability", probability.to_string());
        }
        let q = &self.search;
        d.push("search.delay_grid_m", q.delay_grid_m.to_string());
        d.push("search.margin_m", q.margin_m.to_string());
        d.push("search.max_iterations", q.max_iterations.to_string());
        d.push("search.step_tol_m", q.step_tol_m.to_string());
        d.push("search.gate_chi2", q.gate_chi2.to_string());
        if let Some(r) = q.phase_gate_radius_m {
            d.push("search.phase_gate_radius_m", r.to_string());
        }
        d.push("search.keep", q.keep.to_string());
        let p = &self.positioning;
        d.push("positioning.ap_counts", lists::render_list(&p.ap_counts));
        d.push("positioning.trials", p.trials.to_string());
        d.push("positioning.modes", lists::render_list(&p.modes));
        d.push("positioning.geometry", p.geometry.to_string());
        d.push("se.snr_db", lists::render_list(&self.se.snr_db));
        d.push("se.realizations", self.se.realizations.to_string());
        d.push("se.regimes", lists::render_list(&self.se.regimes));
        d.push("se.report", if self.se.report_sum { "sum" } else { "per-ue" });
        if !self.gdop_orderings.is_empty() {
            d.push("gdop.orderings", lists::render_orderings(&self.gdop_orderings));
        }
        d
    }

    pub fn render(&self) -> String {
        self.to_document().render()
    }
}

fn default_counts(num_aps: usize) -> Vec<usize> {
    let hi = num_aps.min(12);
    (num_aps.min(4)..=hi).collect()
}

/// A scenario plus any `run.` metadata it carried.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub config: ScenarioConfig,
    pub run: BTreeMap<String, String>,
}

pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile> {
    let doc = Document::parse(text)?;
    let config = ScenarioConfig::from_document(&doc)?;
    let run = doc
        .entries()
        .iter()
        .filter(|e| e.key.starts_with("run."))
        .map(|e| (e.key.clone(), e.value.clone()))
        .collect();
    Ok(ScenarioFile { config, run })
}

/// Reads and validates a scenario (or manifest) file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    Ok(load_scenario_file(path)?.config)
}

pub fn load_scenario_file(path: &Path) -> Result<ScenarioFile> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        Error::parse(0, format!("{} is not UTF-8: {e}", path.display()))
    })?;
    parse_scenario_file(&text)
}

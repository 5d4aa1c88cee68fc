//! Run manifests: the fully resolved scenario plus `run.` metadata.
//!
//! A manifest is itself a valid scenario file, so feeding it back through
//! `--scenario` with the same command reproduces the run's CSV.

use std::path::Path;

use crate::error::Result;
use crate::scenario::{load_scenario_file, parse_scenario_file, ScenarioConfig, ScenarioFile};

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Resolved configuration; its `seed` is the master seed of the run.
    pub config: ScenarioConfig,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub duration_s: f64,
    pub jobs: usize,
}

impl RunManifest {
    pub fn master_seed(&self) -> u64 {
        self.config.seed
    }

    pub fn render(&self) -> String {
        let mut doc = self.config.to_document();
        doc.push("run.command", self.command.clone());
        doc.push("run.tool_version", self.tool_version.clone());
        doc.push("run.master_seed", self.config.seed.to_string());
        doc.push("run.outputs", self.outputs.join(", "));
        doc.push("run.duration_s", format!("{:.3}", self.duration_s));
        doc.push("run.jobs", self.jobs.to_string());
        doc.render()
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        Ok(Self::from_file(load_scenario_file(path)?))
    }

    /// Parses manifest text; missing `run.` keys become empty defaults.
    pub fn parse(text: &str) -> Result<RunManifest> {
        Ok(Self::from_file(parse_scenario_file(text)?))
    }

    fn from_file(file: ScenarioFile) -> RunManifest {
        let get = |k: &str| file.run.get(k).cloned().unwrap_or_default();
        RunManifest {
            command: get("run.command"),
            tool_version: get("run.tool_version"),
            outputs: get("run.outputs")
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
            duration_s: get("run.duration_s").parse().unwrap_or(0.0),
            jobs: get("run.jobs").parse().unwrap_or(0),
            config: file.config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_is_a_scenario() {
        let config = ScenarioConfig::parse(
            "area_side_m = 100\nnum_aps = 6\nnum_ues = 1\nseed = 77\nsignal.carrier_hz = 28e9\nsignal.bandwidth_hz = 6e6\n",
        )
        .unwrap();
        let m = RunManifest {
            command: "peb".into(),
            config: config.clone(),
            tool_version: "0.1.0".into(),
            outputs: vec!["out.csv".into()],
            duration_s: 0.25,
            jobs: 2,
        };
        let file = parse_scenario_file(&m.render()).unwrap();
        assert_eq!(file.config, config);
        assert_eq!(file.run["run.master_seed"], "77");
        assert_eq!(file.run["run.command"], "peb");
        let back = RunManifest::parse(&m.render()).unwrap();
        assert_eq!(back.jobs, 2);
        assert_eq!(back.outputs, m.outputs);
        assert_eq!(back.config, config);
    }
}

//! CSV renderers for sweep results.
//!
//! Floats are written in Rust's shortest round-trip form, so a CSV read back
//! reproduces the computed values exactly and equal results give equal bytes.

use crate::error::{Error, Result};
use crate::positioning::{GdopStep, Metric, Mode, PebRow, RmseCurve};
use crate::se::SeCurve;

pub const POSITIONING_HEADER: [&str; 6] = ["num_aps", "mode", "metric", "value_m", "trials", "seed"];
pub const SE_HEADER: [&str; 5] = ["snr_db", "regime", "se_per_ue", "realizations", "seed"];
pub const SE_SUM_HEADER: [&str; 5] = ["snr_db", "regime", "se_sum", "realizations", "seed"];
pub const GDOP_HEADER: [&str; 6] = ["ordering", "step", "ap_label", "gdop", "peb_phase_m", "seed"];

/// One row of a positioning CSV. PEB rows carry `trials = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositioningRow {
    pub num_aps: usize,
    pub mode: Mode,
    pub metric: Metric,
    pub value_m: f64,
    pub trials: usize,
}

impl From<&PebRow> for PositioningRow {
    fn from(r: &PebRow) -> Self {
        PositioningRow {
            num_aps: r.num_aps,
            mode: r.mode,
            metric: Metric::Peb,
            value_m: r.peb_m,
            trials: 0,
        }
    }
}

/// RMSE rows followed by their companion PEB rows, per AP count.
pub fn rmse_rows(curve: &RmseCurve) -> Vec<PositioningRow> {
    curve
        .points
        .iter()
        .flat_map(|p| {
            [
                PositioningRow {
                    num_aps: p.num_aps,
                    mode: p.mode,
                    metric: Metric::Rmse,
                    value_m: p.rmse_m,
                    trials: p.trials,
                },
                PositioningRow {
                    num_aps: p.num_aps,
                    mode: p.mode,
                    metric: Metric::Peb,
                    value_m: p.peb_m,
                    trials: 0,
                },
            ]
        })
        .collect()
}

fn write_rows<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

pub fn positioning_csv(rows: &[PositioningRow], seed: u64) -> Result<String> {
    write_rows(
        &POSITIONING_HEADER,
        rows.iter().map(|r| {
            vec![
                r.num_aps.to_string(),
                r.mode.to_string(),
                r.metric.to_string(),
                r.value_m.to_string(),
                r.trials.to_string(),
                seed.to_string(),
            ]
        }),
    )
}

pub fn se_csv(curve: &SeCurve, seed: u64) -> Result<String> {
    let header = if curve.report_sum { SE_SUM_HEADER } else { SE_HEADER };
    write_rows(
        &header,
        curve.rows.iter().map(|r| {
            vec![
                r.snr_db.to_string(),
                r.regime.to_string(),
                r.se.to_string(),
                r.realizations.to_string(),
                seed.to_string(),
            ]
        }),
    )
}

/// `orderings[i]` pairs a 1-based ordering number with its steps.
pub fn gdop_csv(orderings: &[(usize, Vec<GdopStep>)], seed: u64) -> Result<String> {
    let num = |v: Option<f64>| v.map_or_else(|| "inf".to_string(), |x| x.to_string());
    write_rows(
        &GDOP_HEADER,
        orderings.iter().flat_map(|(o, steps)| {
            steps.iter().map(move |s| {
                vec![
                    o.to_string(),
                    s.step.to_string(),
                    s.ap_label.to_string(),
                    num(s.gdop),
                    num(s.peb_phase_m),
                    seed.to_string(),
                ]
            })
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positioning_csv_layout() {
        let rows = [PositioningRow {
            num_aps: 4,
            mode: Mode::Phase,
            metric: Metric::Peb,
            value_m: 9.41345919631802e-4,
            trials: 0,
        }];
        let text = positioning_csv(&rows, 42).unwrap();
        assert_eq!(text, "num_aps,mode,metric,value_m,trials,seed\n4,phase,peb,0.000941345919631802,0,42\n");
        let parsed: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(parsed, 9.41345919631802e-4);
    }

    #[test]
    fn singular_gdop_prefix_is_inf() {
        let steps = vec![GdopStep {
            step: 1,
            ap_label: 3,
            gdop: None,
            peb_phase_m: None,
        }];
        let text = gdop_csv(&[(1, steps)], 7).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "1,1,3,inf,inf,7");
    }
}

//! AP/UE placement and deployment snapshots.
//!
//! Snapshots are CSV with header `kind,index,x_m,y_m` (`z_m` appended for
//! spatial deployments); `kind` is `ap` or `ue` and indices run from 0.

use std::f64::consts::PI;

use rand::Rng;

use crate::channel::Link;
use crate::error::{Error, Result};
use crate::geometry::{Dims, Point};
use crate::scenario::{DeploymentKind, ScenarioConfig};
use crate::seed::{rng_for, Stream};

/// APs closer than this are considered co-located.
pub const DUPLICATE_TOLERANCE_M: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub dims: Dims,
    pub area_side_m: f64,
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    /// Skip the inside-the-area check (explicit lists only).
    pub allow_outside: bool,
}

impl Deployment {
    pub fn new(
        dims: Dims,
        area_side_m: f64,
        ap_positions: Vec<Point>,
        ue_positions: Vec<Point>,
        allow_outside: bool,
    ) -> Result<Deployment> {
        let d = Deployment {
            dims,
            area_side_m,
            ap_positions,
            ue_positions,
            allow_outside,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_side_m > 0.0) || !self.area_side_m.is_finite() {
            return Err(Error::invalid("area_side_m", "zero-area region"));
        }
        let side = self.area_side_m;
        let inside = |p: &Point| {
            let c = self.dims.components(p);
            c.iter().take(self.dims.count()).all(|v| (0.0..=side).contains(v))
        };
        for (kind, list) in [("deployment.aps", &self.ap_positions), ("deployment.ues", &self.ue_positions)] {
            for (i, p) in list.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::invalid(kind, format!("entry {i} is not finite")));
                }
                if !self.allow_outside && !inside(p) {
                    return Err(Error::invalid(kind, format!("entry {i} at {p} lies outside the area")));
                }
            }
        }
        for i in 0..self.ap_positions.len() {
            for j in 0..i {
                if self.ap_positions[i].distance(&self.ap_positions[j]) < DUPLICATE_TOLERANCE_M {
                    return Err(Error::invalid(
                        "deployment.aps",
                        format!("APs {j} and {i} are co-located"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn num_ues(&self) -> usize {
        self.ue_positions.len()
    }

    /// Deployment restricted to the first `k` APs.
    pub fn with_ap_prefix(&self, k: usize) -> Deployment {
        Deployment {
            ap_positions: self.ap_positions[..k.min(self.num_aps())].to_vec(),
            ..self.clone()
        }
    }

    /// Deployment restricted to `indices`, in that order.
    pub fn with_ap_subset(&self, indices: &[usize]) -> Deployment {
        Deployment {
            ap_positions: indices.iter().map(|&i| self.ap_positions[i]).collect(),
            ..self.clone()
        }
    }

    pub fn with_ues(&self, ues: Vec<Point>) -> Deployment {
        Deployment {
            ue_positions: ues,
            ..self.clone()
        }
    }

    pub fn link(&self, ap: usize, ue: usize, blocked: bool) -> Link {
        Link {
            ap: self.ap_positions[ap],
            ue: self.ue_positions[ue],
            ap_index: ap,
            ue_index: ue,
            blocked,
        }
    }

    pub fn distance(&self, ap: usize, ue: usize) -> f64 {
        self.link(ap, ue, false).distance(self.dims)
    }

    pub fn to_csv(&self) -> String {
        let spatial = self.dims == Dims::Spatial;
        let mut out = String::from(if spatial { "kind,index,x_m,y_m,z_m\n" } else { "kind,index,x_m,y_m\n" });
        for (kind, list) in [("ap", &self.ap_positions), ("ue", &self.ue_positions)] {
            for (i, p) in list.iter().enumerate() {
                if spatial {
                    out.push_str(&format!("{kind},{i},{},{},{}\n", p.x, p.y, p.z));
                } else {
                    out.push_str(&format!("{kind},{i},{},{}\n", p.x, p.y));
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str, area_side_m: f64, allow_outside: bool) -> Result<Deployment> {
        let snap = parse_snapshot(text)?;
        Deployment::new(snap.dims, area_side_m, snap.aps, snap.ues, allow_outside)
    }
}

/// Positions read from a snapshot, before area validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dims: Dims,
    pub aps: Vec<Point>,
    pub ues: Vec<Point>,
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(1, format!("bad header: {e}")))?
        .clone();
    let cols: Vec<&str> = header.iter().collect();
    let dims = match cols.as_slice() {
        ["kind", "index", "x_m", "y_m"] => Dims::Planar,
        ["kind", "index", "x_m", "y_m", "z_m"] => Dims::Spatial,
        _ => {
            return Err(Error::parse(
                1,
                format!("expected header `kind,index,x_m,y_m[,z_m]`, found `{}`", cols.join(",")),
            ))
        }
    };
    let mut aps = Vec::new();
    let mut ues = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let line = n + 2;
        let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
        if record.len() != cols.len() {
            return Err(Error::parse(line, format!("expected {} fields, found {}", cols.len(), record.len())));
        }
        let num = |i: usize| -> Result<f64> {
            let v: f64 = record[i]
                .parse()
                .map_err(|_| Error::parse(line, format!("`{}` is not a number", &record[i])))?;
            if !v.is_finite() {
                return Err(Error::parse(line, "coordinates must be finite"));
            }
            Ok(v)
        };
        let z = if dims == Dims::Spatial { num(4)? } else { 0.0 };
        let p = Point::new3(num(2)?, num(3)?, z);
        let index: usize = record[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("`{}` is not an index", &record[1])))?;
        let list = match &record[0] {
            "ap" => &mut aps,
            "ue" => &mut ues,
            other => return Err(Error::parse(line, format!("unknown kind `{other}`"))),
        };
        if index != list.len() {
            return Err(Error::parse(line, format!("expected index {}, found {index}", list.len())));
        }
        list.push(p);
    }
    Ok(Snapshot { dims, aps, ues })
}

fn uniform_point<R: Rng + ?Sized>(rng: &mut R, side: f64, dims: Dims) -> Point {
    let x = rng.random::<f64>() * side;
    let y = rng.random::<f64>() * side;
    let z = if dims == Dims::Spatial { rng.random::<f64>() * side } else { 0.0 };
    Point::new3(x, y, z)
}

/// UE positions drawn according to the configured deployment kind.
pub fn draw_ues<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Vec<Point> {
    let side = config.area_side_m;
    match &config.deployment {
        DeploymentKind::Circle => {
            let (c, r) = (side / 2.0, side / 2.0);
            (0..config.num_ues)
                .map(|_| {
                    let rho = r * rng.random::<f64>().sqrt();
                    let theta = 2.0 * PI * rng.random::<f64>();
                    let z = if config.dims == Dims::Spatial { rng.random::<f64>() * side } else { 0.0 };
                    Point::new3(
                        (c + rho * theta.cos()).clamp(0.0, side),
                        (c + rho * theta.sin()).clamp(0.0, side),
                        z,
                    )
                })
                .collect()
        }
        _ => (0..config.num_ues).map(|_| uniform_point(rng, side, config.dims)).collect(),
    }
}

/// AP positions for the configured deployment kind.
pub fn draw_aps<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Vec<Point> {
    let side = config.area_side_m;
    match &config.deployment {
        DeploymentKind::UniformSquare => (0..config.num_aps).map(|_| uniform_point(rng, side, config.dims)).collect(),
        DeploymentKind::Circle => {
            let (c, r) = (side / 2.0, side / 2.0);
            let z = if config.dims == Dims::Spatial { side / 2.0 } else { 0.0 };
            (0..config.num_aps)
                .map(|i| {
                    let theta = 2.0 * PI * i as f64 / config.num_aps as f64;
                    Point::new3(
                        (c + r * theta.cos()).clamp(0.0, side),
                        (c + r * theta.sin()).clamp(0.0, side),
                        z,
                    )
                })
                .collect()
        }
        DeploymentKind::ExplicitList { aps, .. } => aps.clone(),
    }
}

/// Deployment for `config`, drawn from the deployment stream of its seed.
pub fn generate_deployment(config: &ScenarioConfig) -> Result<Deployment> {
    generate_deployment_indexed(config, 0)
}

/// As [`generate_deployment`] but from child `index` of the deployment stream.
pub fn generate_deployment_indexed(config: &ScenarioConfig, index: u64) -> Result<Deployment> {
    if !(config.area_side_m > 0.0) || !config.area_side_m.is_finite() {
        return Err(Error::invalid("area_side_m", "zero-area region"));
    }
    let mut rng = rng_for(config.seed, Stream::Deployment, index);
    let aps = draw_aps(config, &mut rng);
    let (ues, allow_outside) = match &config.deployment {
        DeploymentKind::ExplicitList { aps, ues, allow_outside } => {
            if aps.len() != config.num_aps {
                return Err(Error::invalid(
                    "deployment.aps",
                    format!("{} coordinates given for num_aps = {}", aps.len(), config.num_aps),
                ));
            }
            let ues = match ues {
                Some(u) => u.clone(),
                None => draw_ues(config, &mut rng),
            };
            (ues, *allow_outside)
        }
        _ => (draw_ues(config, &mut rng), false),
    };
    Deployment::new(config.dims, config.area_side_m, aps, ues, allow_outside)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ScenarioConfig {
        ScenarioConfig::parse(text).unwrap()
    }

    const FIG3_LIKE: &str = "area_side_m = 1000\nnum_aps = 200\nnum_ues = 5\nseed = 42\n\
                             signal.carrier_hz = 28e9\nsignal.bandwidth_hz = 6e6\n";

    #[test]
    fn uniform_square_stays_in_area() {
        let d = generate_deployment(&config(FIG3_LIKE)).unwrap();
        assert_eq!(d.num_aps(), 200);
        assert_eq!(d.num_ues(), 5);
        for p in d.ap_positions.iter().chain(&d.ue_positions) {
            assert!((0.0..=1000.0).contains(&p.x) && (0.0..=1000.0).contains(&p.y));
            assert_eq!(p.z, 0.0);
        }
    }

    #[test]
    fn same_seed_same_coordinates() {
        let c = config(&FIG3_LIKE.replace("seed = 42", "seed = 7"));
        let a = generate_deployment(&c).unwrap();
        let b = generate_deployment(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let other = generate_deployment(&config(FIG3_LIKE)).unwrap();
        assert_ne!(a.ap_positions, other.ap_positions);
    }

    #[test]
    fn explicit_list_is_echoed() {
        let c = config(
            "area_side_m = 100\nnum_aps = 1\nnum_ues = 1\nseed = 1\nsignal.carrier_hz = 28e9\n\
             signal.bandwidth_hz = 6e6\ndeployment.kind = explicit-list\ndeployment.aps = 0 0\n\
             deployment.ues = 10 0\n",
        );
        let d = generate_deployment(&c).unwrap();
        assert_eq!(d.ap_positions, vec![Point::new(0.0, 0.0)]);
        assert_eq!(d.ue_positions, vec![Point::new(10.0, 0.0)]);
    }

    #[test]
    fn explicit_list_outside_area_needs_opt_out() {
        let base = "area_side_m = 10\nnum_aps = 1\nnum_ues = 1\nseed = 1\nsignal.carrier_hz = 28e9\n\
                    signal.bandwidth_hz = 6e6\ndeployment.kind = explicit-list\ndeployment.aps = -5 0\n\
                    deployment.ues = 1 1\n";
        assert!(generate_deployment(&config(base)).is_err());
        let opted = format!("{base}deployment.allow_outside = true\n");
        assert!(generate_deployment(&config(&opted)).is_ok());
    }

    #[test]
    fn duplicate_aps_rejected() {
        let aps = vec![Point::new(1.0, 1.0), Point::new(1.0 + 1e-7, 1.0)];
        assert!(Deployment::new(Dims::Planar, 10.0, aps, vec![], false).is_err());
    }

    #[test]
    fn circle_aps_on_inscribed_circle() {
        let c = config(&format!("{FIG3_LIKE}deployment.kind = circle\n").replace("num_aps = 200", "num_aps = 8"));
        let d = generate_deployment(&c).unwrap();
        for p in &d.ap_positions {
            assert!((p.distance(&Point::new(500.0, 500.0)) - 500.0).abs() < 1e-9);
        }
        for p in &d.ue_positions {
            assert!(p.distance(&Point::new(500.0, 500.0)) <= 500.0 + 1e-9);
        }
    }

    #[test]
    fn csv_round_trip_is_a_fixed_point() {
        let d = generate_deployment(&config(FIG3_LIKE)).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with("kind,index,x_m,y_m\n"));
        let back = Deployment::from_csv(&csv, 1000.0, false).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn snapshot_errors_carry_lines() {
        assert!(matches!(parse_snapshot("kind,i,x,y\n"), Err(Error::Parse { line: 1, .. })));
        let err = parse_snapshot("kind,index,x_m,y_m\nap,0,1,2\nap,2,1,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_snapshot("kind,index,x_m,y_m\nbs,0,1,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}

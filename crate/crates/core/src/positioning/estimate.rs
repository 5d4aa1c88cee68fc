//! Maximum-likelihood position estimation.
//!
//! Delay mode minimises `sum_k (c tau_k - d_k(p))^2 / sigma_k^2` with a grid
//! over the search region followed by damped Gauss–Newton.
//!
//! Carrier-phase mode maximises `sum_k cos(phi_k - phi_k(p)) / sigma_k^2`. The
//! objective has one local maximum per wavelength cell, so a dense grid over
//! the coarse-delay region is far too expensive; the search instead
//! enumerates the cells directly. Every cell contains exactly one point where
//! the phases of a reference AP pair `(a, b)` are matched, namely an
//! intersection of the circles `d_a = lambda (n_a + c_a)` and
//! `d_b = lambda (n_b + c_b)`. All intersections inside the gate around the
//! coarse (delay) estimate are scored on the remaining APs, the best `keep`
//! are refined with Gauss–Newton on the wrapped residuals, and the refined
//! candidate with the largest likelihood wins.

use std::f64::consts::PI;

use super::{Measurements, Mode};
use crate::channel::{SignalModel, SPEED_OF_LIGHT};
use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::geometry::{Dims, Point, Rect};
use crate::scenario::SearchConfig;

use super::measure::{delay_variance, phase_variance};

/// Candidates whose likelihood is within this fraction of the best count as ties.
pub const NEAR_TIE_RELATIVE: f64 = 1e-3;

/// Refusal threshold for the carrier-phase cell enumeration.
const MAX_CELLS: f64 = 2e9;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub position: Point,
    /// Delay mode: `-1/2 sum_k r_k^2`. Phase mode: `sum_k cos(e_k) / sigma_k^2`.
    pub log_likelihood: f64,
    pub converged: bool,
    /// Delay mode: grid points. Phase mode: wavelength cells inside the gate.
    pub candidates: usize,
    /// Refined candidates within [`NEAR_TIE_RELATIVE`] of the best likelihood.
    pub near_ties: usize,
}

/// Expected negative log-likelihood of the noise-free observations of UE
/// `ue`, evaluated at a hypothesised position `p` (constant terms dropped).
/// Its Hessian at the true position is the Fisher information.
pub fn expected_nll(deployment: &Deployment, ue: usize, model: &SignalModel, mode: Mode, p: &Point) -> Result<f64> {
    let truth = deployment.ue_positions[ue];
    let dims = deployment.dims;
    let mut total = 0.0;
    for (k, ap) in deployment.ap_positions.iter().enumerate() {
        let d0 = dist(ap, &truth, dims);
        if d0 == 0.0 {
            return Err(Error::ZeroDistance { ap: k, ue });
        }
        let snr = model.link_snr(d0);
        let dd = dist(ap, p, dims) - d0;
        let (delta, var) = match mode {
            Mode::Delay => (dd / SPEED_OF_LIGHT, delay_variance(snr, model)),
            Mode::Phase => (2.0 * PI * model.carrier_hz * dd / SPEED_OF_LIGHT, phase_variance(snr)),
        };
        total += 0.5 * delta * delta / var;
    }
    Ok(total)
}

fn dist(a: &Point, b: &Point, dims: Dims) -> f64 {
    let (x, y) = (dims.components(a), dims.components(b));
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

pub fn ml_estimate(
    m: &Measurements,
    deployment: &Deployment,
    model: &SignalModel,
    search: &SearchConfig,
) -> Result<EstimateResult> {
    if deployment.dims != Dims::Planar {
        return Err(Error::Unsupported("position estimation supports planar scenarios only".into()));
    }
    if m.num_aps() != deployment.num_aps() {
        return Err(Error::invalid(
            "measurements",
            format!("{} observations for {} APs", m.num_aps(), deployment.num_aps()),
        ));
    }
    if deployment.num_aps() == 0 {
        return Err(Error::invalid("measurements", "no APs to position against"));
    }
    let region = Rect::square(deployment.area_side_m, search.margin_m);
    let aps: Vec<[f64; 2]> = deployment.ap_positions.iter().map(|p| [p.x, p.y]).collect();
    match m.mode {
        Mode::Delay => Ok(delay_search(&aps, m, &region, search).0),
        Mode::Phase => phase_search(&aps, m, model, &region, search),
    }
}

// ---------------------------------------------------------------------------
// Delay mode

struct DelayProblem<'a> {
    aps: &'a [[f64; 2]],
    ranges: Vec<f64>,
    sigmas: Vec<f64>,
}

impl DelayProblem<'_> {
    fn cost(&self, p: [f64; 2]) -> f64 {
        let mut c = 0.0;
        for ((a, r), s) in self.aps.iter().zip(&self.ranges).zip(&self.sigmas) {
            let d = ((p[0] - a[0]).powi(2) + (p[1] - a[1]).powi(2)).sqrt();
            let e = (r - d) / s;
            c += e * e;
        }
        c
    }

    /// Gauss–Newton normal equations `(H, g)` with `H = J^T J`, `g = J^T r`.
    fn normal(&self, p: [f64; 2]) -> ([f64; 3], [f64; 2]) {
        let mut h = [0.0; 3];
        let mut g = [0.0; 2];
        for ((a, r), s) in self.aps.iter().zip(&self.ranges).zip(&self.sigmas) {
            let (dx, dy) = (p[0] - a[0], p[1] - a[1]);
            let d = (dx * dx + dy * dy).sqrt().max(1e-12);
            // residual (r - d)/s, derivative -(p - a)/(d s)
            let (jx, jy) = (-dx / (d * s), -dy / (d * s));
            let e = (r - d) / s;
            h[0] += jx * jx;
            h[1] += jx * jy;
            h[2] += jy * jy;
            g[0] += jx * e;
            g[1] += jy * e;
        }
        (h, g)
    }
}

fn solve2(h: [f64; 3], g: [f64; 2], mu: f64) -> Option<[f64; 2]> {
    let (a, b, c) = (h[0] + mu, h[1], h[2] + mu);
    let det = a * c - b * b;
    if !(det.abs() > 0.0) || !det.is_finite() {
        return None;
    }
    Some([-(c * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det])
}

/// Levenberg-damped Gauss–Newton on a least-squares cost. Returns the final
/// point and whether the step tolerance was reached.
fn gauss_newton<C, N>(start: [f64; 2], region: &Rect, search: &SearchConfig, cost: C, normal: N) -> ([f64; 2], bool)
where
    C: Fn([f64; 2]) -> f64,
    N: Fn([f64; 2]) -> ([f64; 3], [f64; 2]),
{
    let clamp = |p: [f64; 2]| [p[0].clamp(region.min.x, region.max.x), p[1].clamp(region.min.y, region.max.y)];
    let mut p = start;
    let mut f = cost(p);
    for _ in 0..search.max_iterations {
        let (h, g) = normal(p);
        let scale = (h[0] + h[2]).max(f64::MIN_POSITIVE);
        let mut mu = 1e-12 * scale;
        let mut accepted = None;
        for _ in 0..40 {
            if let Some(step) = solve2(h, g, mu) {
                let q = clamp([p[0] + step[0], p[1] + step[1]]);
                let fq = cost(q);
                if fq <= f {
                    accepted = Some((q, fq));
                    break;
                }
            }
            mu = if mu == 0.0 { 1e-12 } else { mu * 10.0 };
        }
        let Some((q, fq)) = accepted else {
            // No descent direction left: numerically at the minimum.
            return (p, true);
        };
        let moved = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        p = q;
        f = fq;
        if moved < search.step_tol_m {
            return (p, true);
        }
    }
    (p, false)
}

/// Returns the estimate and the information matrix at it (`[xx, xy, yy]`, 1/m²).
fn delay_search(
    aps: &[[f64; 2]],
    m: &Measurements,
    region: &Rect,
    search: &SearchConfig,
) -> (EstimateResult, [f64; 3]) {
    let problem = DelayProblem {
        aps,
        ranges: m.delays_s.iter().map(|t| t * SPEED_OF_LIGHT).collect(),
        sigmas: m.delay_vars.iter().map(|v| v.sqrt() * SPEED_OF_LIGHT).collect(),
    };
    let (start, points) = grid_max(region, search.delay_grid_m, |p| -problem.cost(p));
    let (mut result, info) = delay_refine(&problem, start, region, search);
    result.candidates = points;
    (result, info)
}

/// Best point of `score` on a grid over `region`, and the number of grid points.
fn grid_max<F: Fn([f64; 2]) -> f64>(region: &Rect, step: f64, score: F) -> ([f64; 2], usize) {
    let nx = ((region.max.x - region.min.x) / step).floor() as usize + 1;
    let ny = ((region.max.y - region.min.y) / step).floor() as usize + 1;
    let mut best = ([region.min.x, region.min.y], f64::NEG_INFINITY);
    for i in 0..nx {
        for j in 0..ny {
            let p = [region.min.x + step * i as f64, region.min.y + step * j as f64];
            let s = score(p);
            if s > best.1 {
                best = (p, s);
            }
        }
    }
    (best.0, nx * ny)
}

fn delay_refine(
    problem: &DelayProblem,
    start: [f64; 2],
    region: &Rect,
    search: &SearchConfig,
) -> (EstimateResult, [f64; 3]) {
    let (p, converged) = gauss_newton(start, region, search, |p| problem.cost(p), |p| problem.normal(p));
    let info = problem.normal(p).0;
    (
        EstimateResult {
            position: Point::new(p[0], p[1]),
            log_likelihood: -0.5 * problem.cost(p),
            converged,
            candidates: 1,
            near_ties: 1,
        },
        info,
    )
}

/// Magnitude of one AP's delay spectrum tabulated over a range interval.
struct RangeSpectrum {
    start_m: f64,
    step_m: f64,
    values: Vec<f64>,
}

impl RangeSpectrum {
    fn new(response: &[num_complex::Complex64], model: &SignalModel, near_m: f64, far_m: f64) -> Self {
        let step_m = SPEED_OF_LIGHT / (200.0 * model.bandwidth_hz);
        let offsets = model.subcarrier_offsets();
        let n = ((far_m - near_m) / step_m).ceil() as usize + 2;
        let values = (0..n)
            .map(|i| delay_spectrum(response, &offsets, (near_m + step_m * i as f64) / SPEED_OF_LIGHT).sqrt())
            .collect();
        RangeSpectrum {
            start_m: near_m,
            step_m,
            values,
        }
    }

    #[inline]
    fn at(&self, range_m: f64) -> f64 {
        let t = ((range_m - self.start_m) / self.step_m).max(0.0);
        let i = (t as usize).min(self.values.len() - 2);
        let f = (t - i as f64).min(1.0);
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

use super::measure::delay_spectrum;

/// Coarse position from the multicarrier responses: a non-coherent
/// position-domain search `max_p sum_k a_k |S_k(d_k(p) / c)|` (amplitude
/// `a_k`, delay spectrum `S_k`), then per-AP delays re-estimated within a
/// quarter resolution cell of that point and a delay-domain fit. Combining
/// the APs before picking delays avoids the outliers that weak APs produce
/// when their delays are estimated one at a time.
fn coarse_from_responses(
    aps: &[[f64; 2]],
    m: &Measurements,
    model: &SignalModel,
    region: &Rect,
    search: &SearchConfig,
) -> (EstimateResult, [f64; 3]) {
    let n = model.num_subcarriers as f64;
    let spectra: Vec<RangeSpectrum> = aps
        .iter()
        .zip(&m.responses)
        .map(|(a, y)| {
            let (near, far) = region.distance_range(&Point::new(a[0], a[1]));
            RangeSpectrum::new(y, model, near, far)
        })
        .collect();
    // SNR = 1 / (2 var_phi); per-subcarrier amplitude sqrt(SNR / N).
    let amps: Vec<f64> = m.phase_vars.iter().map(|v| (0.5 / v / n).sqrt()).collect();
    let (start, points) = grid_max(region, search.delay_grid_m, |p| {
        aps.iter()
            .zip(&spectra)
            .zip(&amps)
            .map(|((a, s), w)| w * s.at(((p[0] - a[0]).powi(2) + (p[1] - a[1]).powi(2)).sqrt()))
            .sum()
    });
    let half = 0.25 / model.bandwidth_hz;
    let ranges = aps
        .iter()
        .zip(&m.responses)
        .map(|(a, y)| {
            let tau = ((start[0] - a[0]).powi(2) + (start[1] - a[1]).powi(2)).sqrt() / SPEED_OF_LIGHT;
            super::coarse_delay(y, model, (tau - half).max(0.0), tau + half) * SPEED_OF_LIGHT
        })
        .collect();
    let problem = DelayProblem {
        aps,
        ranges,
        sigmas: m.delay_vars.iter().map(|v| v.sqrt() * SPEED_OF_LIGHT).collect(),
    };
    let (mut result, info) = delay_refine(&problem, start, region, search);
    result.candidates = points;
    (result, info)
}

// ---------------------------------------------------------------------------
// Carrier-phase mode

struct PhaseProblem<'a> {
    aps: &'a [[f64; 2]],
    /// Measured fractional range in wavelengths: `d_k / lambda = n + frac_k`.
    frac: Vec<f64>,
    weights: Vec<f64>,
    wavelength: f64,
}

impl PhaseProblem<'_> {
    /// Wrapped range residual in cycles, in `[-1/2, 1/2]`.
    #[inline]
    fn cycles(&self, k: usize, p: [f64; 2]) -> f64 {
        let a = self.aps[k];
        let d = ((p[0] - a[0]).powi(2) + (p[1] - a[1]).powi(2)).sqrt();
        let t = d / self.wavelength - self.frac[k];
        t - t.round()
    }

    fn log_likelihood(&self, p: [f64; 2]) -> f64 {
        (0..self.aps.len())
            .map(|k| self.weights[k] * (2.0 * PI * self.cycles(k, p)).cos())
            .sum()
    }

    fn wrapped_cost(&self, p: [f64; 2]) -> f64 {
        (0..self.aps.len())
            .map(|k| {
                let e = 2.0 * PI * self.cycles(k, p);
                self.weights[k] * e * e
            })
            .sum()
    }

    fn normal(&self, p: [f64; 2]) -> ([f64; 3], [f64; 2]) {
        let mut h = [0.0; 3];
        let mut g = [0.0; 2];
        let scale = 2.0 * PI / self.wavelength;
        for (k, a) in self.aps.iter().enumerate() {
            let (dx, dy) = (p[0] - a[0], p[1] - a[1]);
            let d = (dx * dx + dy * dy).sqrt().max(1e-12);
            let sw = self.weights[k].sqrt();
            let (jx, jy) = (sw * scale * dx / d, sw * scale * dy / d);
            let e = sw * 2.0 * PI * self.cycles(k, p);
            h[0] += jx * jx;
            h[1] += jx * jy;
            h[2] += jy * jy;
            g[0] += jx * e;
            g[1] += jy * e;
        }
        (h, g)
    }
}

/// Ellipse `(p - c)^T Q (p - c) <= 1` with bounding radius `radius`.
struct Gate {
    center: [f64; 2],
    q: [f64; 3],
    radius: f64,
}

impl Gate {
    #[inline]
    fn contains(&self, p: [f64; 2]) -> bool {
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        self.q[0] * dx * dx + 2.0 * self.q[1] * dx * dy + self.q[2] * dy * dy <= 1.0
    }
}

fn make_gate(center: [f64; 2], info: [f64; 3], search: &SearchConfig) -> Result<Gate> {
    if let Some(r) = search.phase_gate_radius_m {
        return Ok(Gate {
            center,
            q: [1.0 / (r * r), 0.0, 1.0 / (r * r)],
            radius: r,
        });
    }
    let (a, b, c) = (info[0], info[1], info[2]);
    let mean = 0.5 * (a + c);
    let disc = (0.25 * (a - c).powi(2) + b * b).sqrt();
    let (lmax, lmin) = (mean + disc, mean - disc);
    if !(lmin > 0.0) || lmax / lmin > super::SINGULAR_CONDITION {
        let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
        return Err(Error::SingularInformation { condition });
    }
    Ok(Gate {
        center,
        q: [a / search.gate_chi2, b / search.gate_chi2, c / search.gate_chi2],
        radius: (search.gate_chi2 / lmin).sqrt(),
    })
}

/// Reference pair: large `min(w_a, w_b) sin^2(theta_ab)` seen from the gate centre.
fn reference_pair(problem: &PhaseProblem, center: [f64; 2]) -> (usize, usize) {
    let n = problem.aps.len();
    let units: Vec<[f64; 2]> = problem
        .aps
        .iter()
        .map(|a| {
            let (dx, dy) = (a[0] - center[0], a[1] - center[1]);
            let d = (dx * dx + dy * dy).sqrt().max(1e-12);
            [dx / d, dy / d]
        })
        .collect();
    let mut best = ((0, 1), f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let s = units[i][0] * units[j][1] - units[i][1] * units[j][0];
            let score = problem.weights[i].min(problem.weights[j]) * s * s;
            if score > best.1 {
                best = ((i, j), score);
            }
        }
    }
    best.0
}

/// Kept candidates, ascending by deficit.
struct TopK {
    keep: usize,
    items: Vec<(f64, [f64; 2])>,
}

impl TopK {
    #[inline]
    fn threshold(&self) -> f64 {
        if self.items.len() < self.keep {
            f64::INFINITY
        } else {
            self.items[self.items.len() - 1].0
        }
    }

    fn insert(&mut self, deficit: f64, p: [f64; 2]) {
        let at = self.items.partition_point(|(d, _)| *d <= deficit);
        self.items.insert(at, (deficit, p));
        self.items.truncate(self.keep);
    }
}

fn wrap_angle(a: f64) -> f64 {
    crate::channel::wrap_phase(a)
}

fn phase_search(
    aps: &[[f64; 2]],
    m: &Measurements,
    model: &SignalModel,
    region: &Rect,
    search: &SearchConfig,
) -> Result<EstimateResult> {
    if aps.len() < 2 {
        return Err(Error::SingularInformation { condition: f64::INFINITY });
    }
    let (coarse, info) = if m.responses.len() == aps.len() {
        coarse_from_responses(aps, m, model, region, search)
    } else {
        delay_search(aps, m, region, search)
    };
    let gate = make_gate([coarse.position.x, coarse.position.y], info, search)?;

    let wavelength = model.wavelength();
    let problem = PhaseProblem {
        aps,
        frac: m.phases.iter().map(|phi| -phi / (2.0 * PI)).collect(),
        weights: m.phase_vars.iter().map(|v| 1.0 / v).collect(),
        wavelength,
    };
    let (ia, ib) = reference_pair(&problem, gate.center);
    let cells = PI * gate.radius * gate.radius / (wavelength * wavelength);
    if cells > MAX_CELLS {
        return Err(Error::Unsupported(format!(
            "carrier-phase search gate of radius {:.3} m spans {cells:.3e} wavelength cells",
            gate.radius
        )));
    }

    // Remaining APs, heaviest first so that hopeless cells are rejected early.
    let mut others: Vec<usize> = (0..aps.len()).filter(|&k| k != ia && k != ib).collect();
    others.sort_by(|&x, &y| problem.weights[y].total_cmp(&problem.weights[x]).then(x.cmp(&y)));

    let (a, b) = (aps[ia], aps[ib]);
    let (ca, cb) = (problem.frac[ia], problem.frac[ib]);
    let ab = [b[0] - a[0], b[1] - a[1]];
    let dist_ab = (ab[0] * ab[0] + ab[1] * ab[1]).sqrt();
    let e = [ab[0] / dist_ab, ab[1] / dist_ab];
    let e_perp = [-e[1], e[0]];
    let theta_b = ab[1].atan2(ab[0]);
    let ga = [gate.center[0] - a[0], gate.center[1] - a[1]];
    let dist_ga = (ga[0] * ga[0] + ga[1] * ga[1]).sqrt();
    let theta_g = ga[1].atan2(ga[0]);
    let radius = gate.radius;

    let mut top = TopK {
        keep: search.keep,
        items: Vec::with_capacity(search.keep + 1),
    };
    let mut candidates = 0usize;

    let na_lo = (((dist_ga - radius).max(0.0)) / wavelength - ca).ceil() as i64;
    let na_hi = ((dist_ga + radius) / wavelength - ca).floor() as i64;
    for na in na_lo.max(0)..=na_hi {
        let ra = wavelength * (na as f64 + ca);
        if ra <= 0.0 {
            continue;
        }
        // Arc of ring a inside the bounding disc of the gate, and the range of
        // distances to AP b along it.
        let (db_min, db_max) = if ra + dist_ga <= radius {
            ((ra - dist_ab).abs(), ra + dist_ab)
        } else {
            if (ra - dist_ga).abs() > radius {
                continue;
            }
            let cos_alpha = ((ra * ra + dist_ga * dist_ga - radius * radius) / (2.0 * ra * dist_ga)).clamp(-1.0, 1.0);
            let alpha = cos_alpha.acos();
            let at = |t: f64| {
                let p = [a[0] + ra * t.cos(), a[1] + ra * t.sin()];
                ((p[0] - b[0]).powi(2) + (p[1] - b[1]).powi(2)).sqrt()
            };
            let (d1, d2) = (at(theta_g - alpha), at(theta_g + alpha));
            let mut lo = d1.min(d2);
            let mut hi = d1.max(d2);
            if wrap_angle(theta_b - theta_g).abs() <= alpha {
                lo = (ra - dist_ab).abs();
            }
            if wrap_angle(theta_b + PI - theta_g).abs() <= alpha {
                hi = ra + dist_ab;
            }
            (lo, hi)
        };
        let nb_lo = (db_min / wavelength - cb).ceil() as i64;
        let nb_hi = (db_max / wavelength - cb).floor() as i64;
        for nb in nb_lo.max(0)..=nb_hi {
            let rb = wavelength * (nb as f64 + cb);
            let x = (dist_ab * dist_ab + ra * ra - rb * rb) / (2.0 * dist_ab);
            let y2 = ra * ra - x * x;
            if y2 < 0.0 {
                continue;
            }
            let y = y2.sqrt();
            for sign in [1.0, -1.0] {
                let p = [
                    a[0] + x * e[0] + sign * y * e_perp[0],
                    a[1] + x * e[1] + sign * y * e_perp[1],
                ];
                if !gate.contains(p) || !region.contains(&Point::new(p[0], p[1])) {
                    continue;
                }
                candidates += 1;
                score_cell(&problem, &others, p, &mut top);
                if y == 0.0 {
                    break;
                }
            }
        }
    }

    if top.items.is_empty() {
        // Nothing phase-consistent inside the gate: fall back to the coarse estimate.
        return Ok(EstimateResult {
            converged: false,
            candidates,
            near_ties: 0,
            log_likelihood: problem.log_likelihood([coarse.position.x, coarse.position.y]),
            ..coarse
        });
    }

    let mut refined: Vec<([f64; 2], f64, bool)> = Vec::with_capacity(top.items.len());
    for &(_, start) in &top.items {
        let (p, converged) =
            gauss_newton(start, region, search, |p| problem.wrapped_cost(p), |p| problem.normal(p));
        let dup = refined.iter().any(|(q, _, _)| {
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() < wavelength / 8.0
        });
        if !dup {
            refined.push((p, problem.log_likelihood(p), converged));
        }
    }
    let best = refined
        .iter()
        .copied()
        .fold(None::<([f64; 2], f64, bool)>, |acc, c| match acc {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
        .expect("at least one refined candidate");
    let tie_gap = NEAR_TIE_RELATIVE * best.1.abs();
    let near_ties = refined.iter().filter(|c| best.1 - c.1 <= tie_gap).count();
    Ok(EstimateResult {
        position: Point::new(best.0[0], best.0[1]),
        log_likelihood: best.1,
        converged: best.2,
        candidates,
        near_ties,
    })
}

/// Scores one cell on the APs outside the reference pair and keeps it if it
/// ranks among the best. The deficit `sum_k w_k (1 - cos e_k)` is bounded
/// below by `sum_k 8 w_k f_k^2` (with `e_k = 2 pi f_k`, `|f_k| <= 1/2`), which
/// rejects most cells after one or two APs.
#[inline]
fn score_cell(problem: &PhaseProblem, others: &[usize], p: [f64; 2], top: &mut TopK) {
    let threshold = top.threshold();
    let mut bound = 0.0;
    for &k in others {
        let f = problem.cycles(k, p);
        bound += 8.0 * problem.weights[k] * f * f;
        if bound > threshold {
            return;
        }
    }
    let deficit: f64 = others
        .iter()
        .map(|&k| problem.weights[k] * (1.0 - (2.0 * PI * problem.cycles(k, p)).cos()))
        .sum();
    if deficit < threshold {
        top.insert(deficit, p);
    }
}

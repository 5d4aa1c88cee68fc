//! Noisy delay and carrier-phase observations of a UE.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::Mode;
use crate::blockage::BlockageMap;
use crate::channel::{complex_normal, propagation_phase, wrap_phase, SignalModel, SPEED_OF_LIGHT};
use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::seed::rng_from;

/// SNRs at or above this are treated as noiseless.
pub const NOISELESS_SNR: f64 = 1e12;

/// Observations of one UE from every AP of a deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    pub mode: Mode,
    /// Delay mode: the noisy delays. Phase mode: coarse delays estimated
    /// from the subcarrier responses.
    pub delays_s: Vec<f64>,
    pub delay_vars: Vec<f64>,
    /// Wrapped carrier phases in `(-pi, pi]` (phase mode only).
    pub phases: Vec<f64>,
    pub phase_vars: Vec<f64>,
    /// Noisy per-subcarrier responses `sqrt(SNR/N) e^{-j 2 pi (f_c + f_n) tau} + w`
    /// with unit-variance noise (phase mode only).
    pub responses: Vec<Vec<Complex64>>,
}

impl Measurements {
    pub fn num_aps(&self) -> usize {
        self.delays_s.len()
    }
}

/// Delay-estimation variance `1 / (8 pi^2 beta_rms^2 SNR)`.
pub fn delay_variance(snr: f64, model: &SignalModel) -> f64 {
    let b = model.rms_bandwidth();
    1.0 / (8.0 * PI * PI * b * b * snr)
}

/// Carrier-phase variance `1 / (2 SNR)`.
pub fn phase_variance(snr: f64) -> f64 {
    1.0 / (2.0 * snr)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64, noiseless: bool) -> f64 {
    if noiseless {
        0.0
    } else {
        var.sqrt() * rng.sample::<f64, _>(StandardNormal)
    }
}

pub fn simulate_measurements(
    deployment: &Deployment,
    ue: usize,
    model: &SignalModel,
    mode: Mode,
    blockage: Option<&BlockageMap>,
    seed: u64,
) -> Result<Measurements> {
    let n_ap = deployment.num_aps();
    if let Some(map) = blockage {
        if let Some(ap) = (0..n_ap).find(|&k| map.is_blocked(k, ue)) {
            return Err(Error::BlockedLink { ap, ue });
        }
    }
    let mut rng = rng_from(seed);
    let region = Rect::square(deployment.area_side_m, deployment.area_side_m);
    let mut m = Measurements {
        mode,
        delays_s: Vec::with_capacity(n_ap),
        delay_vars: Vec::with_capacity(n_ap),
        phases: Vec::new(),
        phase_vars: Vec::new(),
        responses: Vec::new(),
    };
    for k in 0..n_ap {
        let d = deployment.distance(k, ue);
        if d == 0.0 {
            return Err(Error::ZeroDistance { ap: k, ue });
        }
        let snr = model.link_snr(d);
        let noiseless = snr >= NOISELESS_SNR;
        let tau = d / SPEED_OF_LIGHT;
        let dvar = delay_variance(snr, model);
        match mode {
            Mode::Delay => {
                m.delays_s.push(tau + gaussian(&mut rng, dvar, noiseless));
            }
            Mode::Phase => {
                let pvar = phase_variance(snr);
                let phase = wrap_phase(propagation_phase(model.carrier_hz, d) + gaussian(&mut rng, pvar, noiseless));
                let response = subcarrier_response(model, d, snr, noiseless, &mut rng);
                let (near, far) = region.distance_range(&deployment.ap_positions[k]);
                let coarse = coarse_delay(&response, model, near / SPEED_OF_LIGHT, far / SPEED_OF_LIGHT);
                m.phases.push(phase);
                m.phase_vars.push(pvar);
                m.responses.push(response);
                m.delays_s.push(coarse);
            }
        }
        m.delay_vars.push(dvar);
    }
    Ok(m)
}

fn subcarrier_response<R: Rng + ?Sized>(
    model: &SignalModel,
    distance: f64,
    snr: f64,
    noiseless: bool,
    rng: &mut R,
) -> Vec<Complex64> {
    let amp = (snr / model.num_subcarriers as f64).sqrt();
    let carrier = propagation_phase(model.carrier_hz, distance);
    model
        .subcarrier_offsets()
        .iter()
        .map(|f| {
            let clean = Complex64::from_polar(amp, carrier + propagation_phase(*f, distance));
            if noiseless {
                clean
            } else {
                clean + complex_normal(rng)
            }
        })
        .collect()
}

/// `|sum_n y_n e^{+j 2 pi f_n tau}|^2`.
pub(super) fn delay_spectrum(response: &[Complex64], offsets: &[f64], tau: f64) -> f64 {
    let f0 = offsets[0];
    let step = if offsets.len() > 1 { offsets[1] - offsets[0] } else { 0.0 };
    let rot = Complex64::from_polar(1.0, 2.0 * PI * step * tau);
    let mut w = Complex64::from_polar(1.0, 2.0 * PI * f0 * tau);
    let mut acc = Complex64::new(0.0, 0.0);
    for y in response {
        acc += y * w;
        w *= rot;
    }
    acc.norm_sqr()
}

/// Maximum-likelihood delay from a multicarrier response, searched over
/// `[tau_min, tau_max]`: a grid at one eighth of the resolution `1/B`, then
/// golden-section refinement around the best grid point.
pub fn coarse_delay(response: &[Complex64], model: &SignalModel, tau_min: f64, tau_max: f64) -> f64 {
    let offsets = model.subcarrier_offsets();
    let step = 1.0 / (8.0 * model.bandwidth_hz);
    let n = ((tau_max - tau_min) / step).ceil().max(1.0) as usize;
    let mut best = (tau_min, f64::NEG_INFINITY);
    for i in 0..=n {
        let tau = tau_min + step * i as f64;
        let v = delay_spectrum(response, &offsets, tau);
        if v > best.1 {
            best = (tau, v);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = delay_spectrum(response, &offsets, x1);
    let mut f2 = delay_spectrum(response, &offsets, x2);
    for _ in 0..80 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = delay_spectrum(response, &offsets, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = delay_spectrum(response, &offsets, x2);
        }
        if hi - lo < 1e-18 {
            break;
        }
    }
    0.5 * (lo + hi)
}

//! Large-scale gains, Rician small-scale fading and line-of-sight responses.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Dims, Point};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// K-factors at or above this value are treated as a purely deterministic channel.
pub const K_INFINITE: f64 = 1e9;

/// Carrier, bandwidth and link-budget parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalModel {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub num_subcarriers: usize,
    /// SNR at `ref_distance_m`, dB.
    pub ref_snr_db: f64,
    pub ref_distance_m: f64,
    pub pathloss_exponent: f64,
}

impl Default for SignalModel {
    fn default() -> Self {
        SignalModel {
            carrier_hz: 28e9,
            bandwidth_hz: 6e6,
            num_subcarriers: 64,
            ref_snr_db: 20.0,
            ref_distance_m: 1.0,
            pathloss_exponent: 2.0,
        }
    }
}

impl SignalModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) || !self.bandwidth_hz.is_finite() {
            return Err(Error::invalid("signal.bandwidth_hz", "must be positive"));
        }
        if !(self.carrier_hz > self.bandwidth_hz) || !self.carrier_hz.is_finite() {
            return Err(Error::invalid("signal.carrier_hz", "must exceed the bandwidth"));
        }
        if self.num_subcarriers < 2 {
            return Err(Error::invalid("signal.num_subcarriers", "must be at least 2"));
        }
        if !(self.ref_distance_m > 0.0) || !self.ref_distance_m.is_finite() {
            return Err(Error::invalid("signal.ref_distance_m", "must be positive"));
        }
        if !(self.pathloss_exponent >= 0.0) || !self.pathloss_exponent.is_finite() {
            return Err(Error::invalid("signal.pathloss_exponent", "must be non-negative"));
        }
        if !self.ref_snr_db.is_finite() {
            return Err(Error::invalid("signal.ref_snr_db", "must be finite"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// RMS bandwidth of a flat spectrum of width B: `B / sqrt(12)`.
    pub fn rms_bandwidth(&self) -> f64 {
        self.bandwidth_hz / 12f64.sqrt()
    }

    /// Baseband subcarrier offsets, equally spaced by `B / N` and centred on the carrier.
    pub fn subcarrier_offsets(&self) -> Vec<f64> {
        let n = self.num_subcarriers;
        let spacing = self.bandwidth_hz / n as f64;
        let mid = (n as f64 - 1.0) / 2.0;
        (0..n).map(|i| (i as f64 - mid) * spacing).collect()
    }

    pub fn ref_snr(&self) -> f64 {
        db_to_linear(self.ref_snr_db)
    }

    /// Distance-dependent power gain `(d0 / d)^eta`.
    pub fn distance_gain(&self, distance_m: f64) -> f64 {
        (self.ref_distance_m / distance_m).powf(self.pathloss_exponent)
    }

    /// Received SNR over a clear link without shadowing.
    pub fn link_snr(&self, distance_m: f64) -> f64 {
        self.ref_snr() * self.distance_gain(distance_m)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let mut w = phase - 2.0 * PI * (phase / (2.0 * PI)).round();
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Carrier phase `-2 pi f d / c` wrapped into `(-pi, pi]`, evaluated via the
/// fractional cycle count to keep precision for large `f d / c`.
pub fn propagation_phase(freq_hz: f64, distance_m: f64) -> f64 {
    let cycles = freq_hz * (distance_m / SPEED_OF_LIGHT);
    let frac = cycles - cycles.round();
    wrap_phase(-2.0 * PI * frac)
}

/// One AP–UE link.
#[derive(Debug, Clone, Copy)]
pub struct Link {
    pub ap: Point,
    pub ue: Point,
    pub ap_index: usize,
    pub ue_index: usize,
    pub blocked: bool,
}

impl Link {
    pub fn distance(&self, dims: Dims) -> f64 {
        let a = dims.components(&self.ap);
        let b = dims.components(&self.ue);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// Large-scale power gain of one link, shadowing and blockage included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeScaleGain {
    pub gain: f64,
    pub shadow_fading_db: f64,
    pub blocked: bool,
}

/// `gain = (d0/d)^eta * 10^(shadow/10) * 10^(-penalty/10)` where the penalty
/// applies to blocked links only.
pub fn path_gain(
    link: &Link,
    dims: Dims,
    model: &SignalModel,
    shadow_fading_db: f64,
    blockage_penalty_db: f64,
) -> Result<LargeScaleGain> {
    let d = link.distance(dims);
    if d == 0.0 {
        return Err(Error::ZeroDistance {
            ap: link.ap_index,
            ue: link.ue_index,
        });
    }
    let mut gain = model.distance_gain(d) * db_to_linear(shadow_fading_db);
    if link.blocked {
        gain *= db_to_linear(-blockage_penalty_db);
    }
    Ok(LargeScaleGain {
        gain,
        shadow_fading_db,
        blocked: link.blocked,
    })
}

/// Weights `(sqrt(K/(K+1)), sqrt(1/(K+1)))` of the LOS and scattered parts.
pub fn rician_weights(k_factor: f64) -> (f64, f64) {
    if k_factor >= K_INFINITE || k_factor.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k_factor / (k_factor + 1.0)).sqrt(), (1.0 / (k_factor + 1.0)).sqrt())
    }
}

/// Unit-magnitude LOS phasors across a half-wavelength linear array along x.
pub fn los_steering(ap: &Point, ue: &Point, model: &SignalModel, antennas: usize) -> Vec<Complex64> {
    let d = ap.distance(ue);
    let base = propagation_phase(model.carrier_hz, d);
    let sin_theta = if d > 0.0 { (ue.x - ap.x) / d } else { 0.0 };
    (0..antennas)
        .map(|m| Complex64::from_polar(1.0, base - PI * m as f64 * sin_theta))
        .collect()
}

/// A Rician channel vector for one (AP, UE) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gain: f64,
    pub k_factor: f64,
    /// Unit-magnitude LOS phasor per antenna.
    pub los: Vec<Complex64>,
    pub h: Vec<Complex64>,
}

impl ChannelRealization {
    /// Deterministic LOS mean `sqrt(gain K/(K+1)) * los`.
    pub fn los_mean(&self) -> Vec<Complex64> {
        let (w_los, _) = rician_weights(self.k_factor);
        let amp = self.gain.sqrt() * w_los;
        self.los.iter().map(|l| l * amp).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Circularly symmetric complex Gaussian with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `h = sqrt(gain) (sqrt(K/(K+1)) h_los + sqrt(1/(K+1)) h_scatter)`.
pub fn draw_rician_channel<R: Rng + ?Sized>(
    gain: &LargeScaleGain,
    k_factor: f64,
    los: Vec<Complex64>,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if !(k_factor >= 0.0) {
        return Err(Error::invalid("rician_k", "K-factor must be non-negative"));
    }
    if los.is_empty() {
        return Err(Error::invalid("antennas_per_ap", "need at least one antenna"));
    }
    let (w_los, w_scatter) = rician_weights(k_factor);
    let amp = gain.gain.sqrt();
    let h = los
        .iter()
        .map(|l| {
            let mut v = l * (amp * w_los);
            if w_scatter > 0.0 {
                v += complex_normal(rng) * (amp * w_scatter);
            }
            v
        })
        .collect();
    Ok(ChannelRealization {
        gain: gain.gain,
        k_factor,
        los,
        h,
    })
}

/// Noise-free multicarrier LOS response of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct LosResponse {
    pub delay_s: f64,
    /// Carrier phase `-2 pi f_c tau`, wrapped.
    pub carrier_phase: f64,
    pub subcarrier_offsets_hz: Vec<f64>,
    /// Per-subcarrier phase `-2 pi (f_c + f_n) tau`, wrapped.
    pub phases: Vec<f64>,
    pub amplitude: f64,
    pub response: Vec<Complex64>,
}

pub fn los_phase_response(link: &Link, dims: Dims, model: &SignalModel) -> Result<LosResponse> {
    if link.blocked {
        return Err(Error::BlockedLink {
            ap: link.ap_index,
            ue: link.ue_index,
        });
    }
    let g = path_gain(link, dims, model, 0.0, 0.0)?;
    let d = link.distance(dims);
    let offsets = model.subcarrier_offsets();
    let carrier_phase = propagation_phase(model.carrier_hz, d);
    // The per-subcarrier phase splits into the carrier term and the baseband
    // term so that both keep full precision.
    let phases: Vec<f64> = offsets
        .iter()
        .map(|f| wrap_phase(carrier_phase + propagation_phase(*f, d)))
        .collect();
    let amplitude = g.gain.sqrt();
    let response = phases.iter().map(|p| Complex64::from_polar(amplitude, *p)).collect();
    Ok(LosResponse {
        delay_s: d / SPEED_OF_LIGHT,
        carrier_phase,
        subcarrier_offsets_hz: offsets,
        phases,
        amplitude,
        response,
    })
}

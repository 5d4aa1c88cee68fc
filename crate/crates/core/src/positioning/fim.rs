//! Position-domain Fisher information, position error bound and GDOP.
//!
//! For a UE at `p` and AP `k` in clear line of sight, let `u_k` be the unit
//! vector from the UE to the AP and `SNR_k` the received SNR. Delay
//! (time-of-arrival) measurements contribute
//!
//! ```text
//! J_delay = sum_k 8 pi^2 beta_rms^2 SNR_k / c^2 * u_k u_k^T,   beta_rms = B / sqrt(12)
//! ```
//!
//! and carrier-phase measurements with known phase references contribute the
//! same geometry weighted by the carrier instead of the RMS bandwidth:
//!
//! ```text
//! J_phase = sum_k 8 pi^2 f_c^2 SNR_k / c^2 * u_k u_k^T
//! ```
//!
//! so `PEB_phase / PEB_delay = beta_rms / f_c` for every geometry.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::Mode;
use crate::channel::{SignalModel, SPEED_OF_LIGHT};
use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::geometry::{unit_vector, Dims};

/// Information matrices with a condition number above this are singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct FisherInfo {
    /// Symmetric position-domain information, 1/m².
    pub matrix: DMatrix<f64>,
    /// Per-AP SNRs that produced the matrix.
    pub snrs: Vec<f64>,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PebResult {
    pub peb_m: f64,
    pub mode: Mode,
    pub num_aps: usize,
}

/// Scalar multiplying `SNR_k u_k u_k^T` in the information matrix.
pub fn info_scale(mode: Mode, model: &SignalModel) -> f64 {
    let freq = match mode {
        Mode::Delay => model.rms_bandwidth(),
        Mode::Phase => model.carrier_hz,
    };
    8.0 * PI * PI * freq * freq / (SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// Unit vectors from UE `ue` to every AP.
pub fn unit_vectors(deployment: &Deployment, ue: usize) -> Result<Vec<[f64; 3]>> {
    let p = deployment.ue_positions[ue];
    deployment
        .ap_positions
        .iter()
        .enumerate()
        .map(|(k, a)| unit_vector(&p, a, deployment.dims).ok_or(Error::ZeroDistance { ap: k, ue }))
        .collect()
}

/// Clear-link SNR of every AP towards UE `ue` (no shadowing).
pub fn ap_snrs(deployment: &Deployment, ue: usize, model: &SignalModel) -> Result<Vec<f64>> {
    (0..deployment.num_aps())
        .map(|k| {
            let d = deployment.distance(k, ue);
            if d == 0.0 {
                Err(Error::ZeroDistance { ap: k, ue })
            } else {
                Ok(model.link_snr(d))
            }
        })
        .collect()
}

/// `sum_k weights[k] u_k u_k^T` over the first `dims` components.
pub fn weighted_outer_sum(units: &[[f64; 3]], weights: &[f64], dims: Dims) -> DMatrix<f64> {
    let n = dims.count();
    let mut m = DMatrix::zeros(n, n);
    for (u, w) in units.iter().zip(weights) {
        for i in 0..n {
            for j in i..n {
                m[(i, j)] += w * u[i] * u[j];
            }
        }
    }
    // Mirror so the result is exactly symmetric.
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

pub fn fim(deployment: &Deployment, ue: usize, model: &SignalModel, mode: Mode) -> Result<FisherInfo> {
    let units = unit_vectors(deployment, ue)?;
    let snrs = ap_snrs(deployment, ue, model)?;
    let scale = info_scale(mode, model);
    let weights: Vec<f64> = snrs.iter().map(|s| scale * s).collect();
    Ok(FisherInfo {
        matrix: weighted_outer_sum(&units, &weights, deployment.dims),
        snrs,
        mode,
    })
}

pub fn fim_delay(deployment: &Deployment, ue: usize, model: &SignalModel) -> Result<FisherInfo> {
    fim(deployment, ue, model, Mode::Delay)
}

pub fn fim_phase(deployment: &Deployment, ue: usize, model: &SignalModel) -> Result<FisherInfo> {
    fim(deployment, ue, model, Mode::Phase)
}

/// `trace(M^-1)` of a symmetric matrix, or an error when it is singular.
pub fn inverse_trace(m: &DMatrix<f64>) -> Result<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !(min > 0.0) || max / min > SINGULAR_CONDITION {
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        return Err(Error::SingularInformation { condition });
    }
    Ok(eig.eigenvalues.iter().map(|l| 1.0 / l).sum())
}

/// Position error bound `sqrt(trace(J^-1))`.
pub fn peb(info: &FisherInfo) -> Result<PebResult> {
    Ok(PebResult {
        peb_m: inverse_trace(&info.matrix)?.sqrt(),
        mode: info.mode,
        num_aps: info.snrs.len(),
    })
}

/// Geometry-only dilution of precision, `sqrt(trace((sum_k u_k u_k^T)^-1))`.
pub fn gdop(deployment: &Deployment, ue: usize) -> Result<f64> {
    let units = unit_vectors(deployment, ue)?;
    let ones = vec![1.0; units.len()];
    Ok(inverse_trace(&weighted_outer_sum(&units, &ones, deployment.dims))?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn dep(aps: &[(f64, f64)], ue: (f64, f64)) -> Deployment {
        Deployment::new(
            Dims::Planar,
            1000.0,
            aps.iter().map(|&(x, y)| Point::new(x + 500.0, y + 500.0)).collect(),
            vec![Point::new(ue.0 + 500.0, ue.1 + 500.0)],
            true,
        )
        .unwrap()
    }

    #[test]
    fn single_ap_is_rank_one() {
        let d = dep(&[(10.0, 3.0)], (0.0, 0.0));
        let j = fim_delay(&d, 0, &SignalModel::default()).unwrap();
        let eig = SymmetricEigen::new(j.matrix.clone());
        let nonzero = eig.eigenvalues.iter().filter(|l| l.abs() > 1e-12 * j.matrix.norm()).count();
        assert_eq!(nonzero, 1);
        assert!(matches!(peb(&j), Err(Error::SingularInformation { .. })));
    }

    #[test]
    fn square_corners_give_scaled_identity() {
        // Hand sum: the four outer products of (±1,±1)/sqrt(2) add to 2I.
        let d = dep(&[(10.0, 10.0), (-10.0, 10.0), (-10.0, -10.0), (10.0, -10.0)], (0.0, 0.0));
        let model = SignalModel::default();
        let j = fim_delay(&d, 0, &model).unwrap();
        let s = j.snrs[0];
        assert!(j.snrs.iter().all(|x| (x - s).abs() <= 1e-12 * s));
        let expected = 2.0 * info_scale(Mode::Delay, &model) * s;
        assert!((j.matrix[(0, 0)] - expected).abs() < 1e-12 * expected);
        assert!((j.matrix[(1, 1)] - expected).abs() < 1e-12 * expected);
        assert!(j.matrix[(0, 1)].abs() < 1e-12 * expected);
        assert!((gdop(&d, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn peb_of_twice_identity_is_one_metre() {
        let info = FisherInfo {
            matrix: DMatrix::identity(2, 2) * 2.0,
            snrs: vec![1.0, 1.0],
            mode: Mode::Delay,
        };
        assert!((peb(&info).unwrap().peb_m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_geometry_is_singular() {
        let d = dep(&[(10.0, 0.0), (25.0, 0.0)], (0.0, 0.0));
        let model = SignalModel::default();
        assert!(matches!(peb(&fim_delay(&d, 0, &model).unwrap()), Err(Error::SingularInformation { .. })));
        assert!(gdop(&d, 0).is_err());
    }

    #[test]
    fn zero_snr_contributes_nothing() {
        let units = [[0.6, 0.8, 0.0]];
        let m = weighted_outer_sum(&units, &[0.0], Dims::Planar);
        assert_eq!(m, DMatrix::zeros(2, 2));
    }

    #[test]
    fn phase_to_delay_ratio_constant() {
        let model = SignalModel::default();
        let expected = model.bandwidth_hz / (12f64.sqrt() * model.carrier_hz);
        assert!((expected - 6.185_90e-5).abs() < 5e-11);
        let d = dep(&[(10.0, 3.0), (-7.0, 12.0), (2.0, -30.0)], (1.0, 1.0));
        let pd = peb(&fim_delay(&d, 0, &model).unwrap()).unwrap().peb_m;
        let pp = peb(&fim_phase(&d, 0, &model).unwrap()).unwrap().peb_m;
        assert!(((pp / pd) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ue_on_ap_is_an_error() {
        let d = dep(&[(0.0, 0.0), (5.0, 0.0)], (0.0, 0.0));
        assert!(matches!(fim_delay(&d, 0, &SignalModel::default()), Err(Error::ZeroDistance { ap: 0, .. })));
    }
}

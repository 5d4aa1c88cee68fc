//! Maximum-ratio combining with UE-specific serving sets.
//!
//! Channels are stacked per UE over all APs, `antennas` entries per AP. UE
//! `i`'s combiner is its channel estimate with every entry outside its serving
//! set zeroed, and
//!
//! ```text
//! SINR_i = snr |v_i^H h_i|^2 / (snr sum_{j != i} |v_i^H h_j|^2 + ||v_i||^2)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stacks per-(UE, AP) vectors into one vector per UE.
pub fn stack_channels(per_link: &[Vec<Vec<Complex64>>]) -> Vec<Vec<Complex64>> {
    per_link.iter().map(|aps| aps.iter().flatten().copied().collect()).collect()
}

fn check(truth: &[Vec<Complex64>], views: &[Vec<Complex64>], sets: &[Vec<usize>], antennas: usize) -> Result<usize> {
    if antennas == 0 {
        return Err(Error::invalid("antennas_per_ap", "must be at least 1"));
    }
    if views.len() != truth.len() || sets.len() != truth.len() {
        return Err(Error::invalid("channels", "truth, views and serving sets disagree on the UE count"));
    }
    let len = truth.first().map_or(0, Vec::len);
    if len % antennas != 0 || truth.iter().chain(views).any(|h| h.len() != len) {
        return Err(Error::invalid("channels", "channel vectors have inconsistent lengths"));
    }
    let num_aps = len / antennas;
    if sets.iter().flatten().any(|&ap| ap >= num_aps) {
        return Err(Error::invalid("channels", "serving set names an AP outside the channel vectors"));
    }
    Ok(num_aps)
}

pub fn mrc_sinr(
    truth: &[Vec<Complex64>],
    views: &[Vec<Complex64>],
    sets: &[Vec<usize>],
    antennas: usize,
    tx_snr: f64,
) -> Result<Vec<f64>> {
    check(truth, views, sets, antennas)?;
    if !(tx_snr >= 0.0) || !tx_snr.is_finite() {
        return Err(Error::invalid("snr_db", "transmit SNR must be finite"));
    }
    let inner = |v: &[Complex64], h: &[Complex64], set: &[usize]| -> Complex64 {
        set.iter()
            .flat_map(|&ap| ap * antennas..(ap + 1) * antennas)
            .map(|n| v[n].conj() * h[n])
            .sum()
    };
    Ok((0..truth.len())
        .map(|i| {
            let set = &sets[i];
            let v = &views[i];
            let norm: f64 = set
                .iter()
                .flat_map(|&ap| ap * antennas..(ap + 1) * antennas)
                .map(|n| v[n].norm_sqr())
                .sum();
            if norm == 0.0 {
                return 0.0;
            }
            let signal = inner(v, &truth[i], set).norm_sqr();
            let interference: f64 = (0..truth.len())
                .filter(|&j| j != i)
                .map(|j| inner(v, &truth[j], set).norm_sqr())
                .sum();
            tx_snr * signal / (tx_snr * interference + norm)
        })
        .collect())
}

/// `log2(1 + SINR_i)` per UE; an all-zero combiner gives zero.
pub fn mrc_se(
    truth: &[Vec<Complex64>],
    views: &[Vec<Complex64>],
    sets: &[Vec<usize>],
    antennas: usize,
    tx_snr: f64,
) -> Result<Vec<f64>> {
    Ok(mrc_sinr(truth, views, sets, antennas, tx_snr)?
        .into_iter()
        .map(|s| (1.0 + s).log2())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_ue_perfect_csi_sums_serving_power() {
        let h = vec![vec![c(1.0, 0.5), c(-0.2, 0.3), c(2.0, -1.0)]];
        let sinr = mrc_sinr(&h, &h, &[vec![0, 2]], 1, 4.0).unwrap();
        let expected = 4.0 * (1.25 + 5.0);
        assert!((sinr[0] - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn orthogonal_users_do_not_interfere() {
        let h = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 2.0)]];
        let sets = vec![vec![0, 1], vec![0, 1]];
        let joint = mrc_sinr(&h, &h, &sets, 1, 3.0).unwrap();
        for i in 0..2 {
            let alone = mrc_sinr(&h[i..=i], &h[i..=i], &sets[i..=i], 1, 3.0).unwrap();
            assert!((joint[i] - alone[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_combiner_gives_zero_se() {
        let h = vec![vec![c(1.0, 0.0)]];
        let v = vec![vec![c(0.0, 0.0)]];
        assert_eq!(mrc_se(&h, &v, &[vec![0]], 1, 10.0).unwrap(), vec![0.0]);
    }

    #[test]
    fn vanishing_snr_vanishing_se() {
        let h = vec![vec![c(1.0, 1.0), c(0.5, 0.0)], vec![c(0.3, -1.0), c(2.0, 0.1)]];
        let se = mrc_se(&h, &h, &[vec![0], vec![1]], 1, 1e-15).unwrap();
        assert!(se.iter().all(|s| *s < 1e-13));
    }

    #[test]
    fn inconsistent_shapes_rejected() {
        let h = vec![vec![c(1.0, 0.0), c(1.0, 0.0)]];
        assert!(mrc_sinr(&h, &h, &[vec![0]], 3, 1.0).is_err());
        assert!(mrc_sinr(&h, &h, &[vec![5]], 1, 1.0).is_err());
    }
}

//! Channel draws, serving sets, MRC and spectral-efficiency sweeps.

use std::f64::consts::PI;

use dmimo_core::blockage::BlockageMap;
use dmimo_core::channel::{draw_rician_channel, rician_weights, wrap_phase, LargeScaleGain};
use dmimo_core::deployment::Deployment;
use dmimo_core::geometry::{Dims, Point};
use dmimo_core::scenario::{load_scenario, ScenarioConfig};
use dmimo_core::se::{
    assign_clusters, csi_view, draw_realization, mrc_sinr, se_sweep, AssignmentKind, CsiQuality, IsacRegime,
    SeSweepOptions,
};
use dmimo_core::deployment::generate_deployment;
use dmimo_core::seed::rng_from;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn fig3() -> ScenarioConfig {
    load_scenario(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/fig3.scenario")).unwrap()
}

fn small_se_config(penalty_db: f64) -> ScenarioConfig {
    ScenarioConfig::parse(&format!(
        "area_side_m = 500\nnum_aps = 40\nnum_ues = 4\nseed = 9\nsignal.carrier_hz = 28e9\n\
         signal.bandwidth_hz = 6e6\nsignal.ref_distance_m = 40\nsignal.pathloss_exponent = 2.5\n\
         antennas_per_ap = 2\ncluster_size_L = 4\nblockage.kind = default-serving-set\n\
         channel.blockage_penalty_db = {penalty_db}\nchannel.blocked_rician_k_db = -10\nse.realizations = 30\n"
    ))
    .unwrap()
}

#[test]
fn rician_draws_conserve_power() {
    let gain = LargeScaleGain { gain: 0.7, shadow_fading_db: 0.0, blocked: false };
    for k in [0.0, 0.5, 1.0, 10.0] {
        let mut rng = rng_from(42);
        let los: Vec<Complex64> = (0..4).map(|m| Complex64::from_polar(1.0, 0.4 * m as f64)).collect();
        let n = 20_000;
        let mut power = 0.0;
        for _ in 0..n {
            power += draw_rician_channel(&gain, k, los.clone(), &mut rng).unwrap().norm_sqr();
        }
        let per_antenna = power / (n * 4) as f64;
        assert!((per_antenna / 0.7 - 1.0).abs() < 0.02, "K = {k}: {per_antenna}");
        let (a, b) = rician_weights(k);
        assert!((a * a + b * b - 1.0).abs() < 1e-15);
    }
}

#[test]
fn statistical_view_is_the_los_mean() {
    let gain = LargeScaleGain { gain: 2.0, shadow_fading_db: 0.0, blocked: false };
    let mut rng = rng_from(1);
    let los = vec![Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -1.2)];
    let h = draw_rician_channel(&gain, 3.0, los.clone(), &mut rng).unwrap();
    let view = csi_view(&h, CsiQuality::Statistical).h_hat;
    let amp = (2.0f64 * 3.0 / 4.0).sqrt();
    for (v, l) in view.iter().zip(&los) {
        assert!((v - l * amp).norm() < 1e-15);
    }
    assert_eq!(csi_view(&h, CsiQuality::Perfect).h_hat, h.h);
}

#[test]
fn backup_sets_avoid_every_default_link() {
    let config = fig3();
    let layout = generate_deployment(&config).unwrap();
    for i in 0..20 {
        let r = draw_realization(&config, &layout, i).unwrap();
        for ue in 0..config.num_ues {
            assert_eq!(r.default.sets[ue].len(), config.cluster_size_l);
            assert_eq!(r.backup.sets[ue].len(), config.cluster_size_l);
            for ap in &r.backup.sets[ue] {
                assert!(!r.default.sets[ue].contains(ap));
                assert!(!r.blockage.is_blocked(*ap, ue));
            }
            for ap in &r.default.sets[ue] {
                assert!(r.blockage.is_blocked(*ap, ue));
            }
        }
    }
}

#[test]
fn backup_takes_the_nearest_unblocked_aps() {
    let d = Deployment::new(
        Dims::Planar,
        10.0,
        vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(3.0, 0.0)],
        vec![Point::new(0.0, 0.0)],
        false,
    )
    .unwrap();
    let mut map = BlockageMap::clear(3, 1, 25.0);
    map.set(0, 0, true);
    let backup = assign_clusters(&d, &map, 2, AssignmentKind::Backup).unwrap();
    assert_eq!(backup.sets[0], vec![1, 2]);
    let default = assign_clusters(&d, &map, 2, AssignmentKind::Default).unwrap();
    assert_eq!(default.sets[0], vec![0, 1]);
}

#[test]
fn regimes_coincide_without_blockage_loss_and_with_perfect_csi() {
    let config = small_se_config(0.0);
    let mut opts = SeSweepOptions::from_config(&config);
    opts.csi_override = Some(CsiQuality::Perfect);
    let curve = se_sweep(&config, &opts).unwrap();
    for snr in &opts.snr_db {
        let reference = curve.value(*snr, IsacRegime::WithIsac).unwrap();
        for regime in IsacRegime::ALL {
            assert_eq!(curve.value(*snr, regime).unwrap(), reference, "{regime} at {snr} dB");
        }
    }
}

#[test]
fn sum_report_is_ue_count_times_average() {
    let config = small_se_config(20.0);
    let mut opts = SeSweepOptions::from_config(&config);
    let avg = se_sweep(&config, &opts).unwrap();
    opts.report_sum = true;
    let sum = se_sweep(&config, &opts).unwrap();
    for (a, s) in avg.rows.iter().zip(&sum.rows) {
        assert!((s.se - a.se * config.num_ues as f64).abs() <= 1e-12 * s.se.max(1.0));
    }
}

#[test]
fn sweeps_do_not_depend_on_worker_count() {
    let config = small_se_config(20.0);
    let mut opts = SeSweepOptions::from_config(&config);
    opts.jobs = 1;
    let serial = se_sweep(&config, &opts).unwrap();
    opts.jobs = 3;
    assert_eq!(se_sweep(&config, &opts).unwrap(), serial);
}

#[test]
fn shipped_curves_grow_with_snr() {
    let config = fig3();
    let curve = se_sweep(&config, &SeSweepOptions::from_config(&config)).unwrap();
    for regime in IsacRegime::ALL {
        let rows: Vec<_> = curve.rows.iter().filter(|r| r.regime == regime).collect();
        assert_eq!(rows.len(), 9);
        for w in rows.windows(2) {
            assert!(w[1].se >= w[0].se - w[1].std_error, "{regime}: {} then {}", w[0].se, w[1].se);
        }
        assert!(rows.iter().all(|r| r.se >= 0.0));
    }
}

#[test]
fn vanishing_snr_gives_vanishing_se() {
    let config = small_se_config(20.0);
    let mut opts = SeSweepOptions::from_config(&config);
    opts.snr_db = vec![-200.0];
    let curve = se_sweep(&config, &opts).unwrap();
    assert!(curve.rows.iter().all(|r| r.se < 1e-15));
}

fn complex_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Random `a x a` unitary from Gram-Schmidt on a complex Gaussian matrix.
fn random_unitary(rng: &mut impl Rng, a: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < a {
        let mut v = complex_vec(rng, a);
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    cols
}

fn apply_block_unitary(u: &[Vec<Vec<Complex64>>], h: &[Complex64], a: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); h.len()];
    for (ap, q) in u.iter().enumerate() {
        for r in 0..a {
            out[ap * a + r] = (0..a).map(|c| q[c][r] * h[ap * a + c]).sum();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrapped_phases_stay_in_range(x in -1e6f64..1e6) {
        let w = wrap_phase(x);
        prop_assert!(w > -PI && w <= PI);
        let turns = (x - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-6);
    }

    #[test]
    fn sinr_is_invariant_under_per_ap_unitaries(seed in 0u64..100_000, snr_db in -20.0f64..30.0) {
        let mut rng = rng_from(seed);
        let (n_ap, n_ue, a) = (5, 3, 3);
        let truth: Vec<_> = (0..n_ue).map(|_| complex_vec(&mut rng, n_ap * a)).collect();
        let views: Vec<_> = (0..n_ue).map(|_| complex_vec(&mut rng, n_ap * a)).collect();
        let sets = vec![vec![0, 1, 2], vec![2, 3], vec![4, 0]];
        let snr = 10f64.powf(snr_db / 10.0);
        let before = mrc_sinr(&truth, &views, &sets, a, snr).unwrap();
        let u: Vec<_> = (0..n_ap).map(|_| random_unitary(&mut rng, a)).collect();
        let rot = |v: &Vec<Vec<Complex64>>| v.iter().map(|h| apply_block_unitary(&u, h, a)).collect::<Vec<_>>();
        let after = mrc_sinr(&rot(&truth), &rot(&views), &sets, a, snr).unwrap();
        for (b, c) in before.iter().zip(&after) {
            prop_assert!((b - c).abs() <= 1e-9 * b.max(1e-12), "{b} vs {c}");
        }
    }

    #[test]
    fn combiners_ignore_entries_outside_the_serving_set(seed in 0u64..100_000) {
        let mut rng = rng_from(seed);
        let (n_ap, n_ue, a) = (6, 3, 2);
        let truth: Vec<_> = (0..n_ue).map(|_| complex_vec(&mut rng, n_ap * a)).collect();
        let views = truth.clone();
        let sets = vec![vec![0, 1], vec![2, 3, 4], vec![5]];
        let before = mrc_sinr(&truth, &views, &sets, a, 3.0).unwrap();
        for i in 0..n_ue {
            let mut masked = truth.clone();
            for (j, h) in masked.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                for ap in (0..n_ap).filter(|ap| !sets[i].contains(ap)) {
                    for n in ap * a..(ap + 1) * a {
                        h[n] = Complex64::new(0.0, 0.0);
                    }
                }
            }
            let mut masked_views = views.clone();
            masked_views[i] = views[i]
                .iter()
                .enumerate()
                .map(|(n, v)| if sets[i].contains(&(n / a)) { *v } else { Complex64::new(0.0, 0.0) })
                .collect();
            let after = mrc_sinr(&masked, &masked_views, &sets, a, 3.0).unwrap();
            prop_assert_eq!(after[i], before[i]);
        }
    }
}

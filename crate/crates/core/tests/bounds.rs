//! Fisher information, position error bounds and GDOP.

use std::f64::consts::PI;

use dmimo_core::channel::SignalModel;
use dmimo_core::deployment::Deployment;
use dmimo_core::geometry::{Dims, Point};
use dmimo_core::positioning::{expected_nll, fim, gdop, peb, Mode};
use dmimo_core::seed::{rng_for, Stream};
use dmimo_core::Error;
use proptest::prelude::*;
use rand::Rng;

/// `beta_rms / f_c` with `beta_rms = B / sqrt(12)`, B = 6 MHz, f_c = 28 GHz.
const PEB_RATIO: f64 = 6.185895741317419e-5;

/// (delay PEB, phase PEB) pairs for 4..=12 APs from the reference curves.
const REFERENCE_PAIRS: [(f64, f64); 9] = [
    (15.2176169919147, 9.41345919631802e-4),
    (10.0913914550671, 6.24242953064326e-4),
    (5.39339785317973, 3.33629967473828e-4),
    (5.29125030909978, 3.27311226906815e-4),
    (4.01452982482993, 2.48334628992942e-4),
    (4.01447298871339, 2.48331113170036e-4),
    (3.00559365953909, 1.85922889831015e-4),
    (2.96598102096157, 1.83472493312913e-4),
    (2.93889990256433, 1.81797283566482e-4),
];

fn model() -> SignalModel {
    SignalModel::default()
}

fn random_deployment(seed: u64, n_ap: usize) -> Deployment {
    let mut rng = rng_for(seed, Stream::Custom(17), n_ap as u64);
    let mut pt = || Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0));
    let aps: Vec<Point> = (0..n_ap).map(|_| pt()).collect();
    let ue = pt();
    Deployment::new(Dims::Planar, 100.0, aps, vec![ue], false).unwrap()
}

fn planar(aps: &[(f64, f64)], ue: (f64, f64)) -> Deployment {
    Deployment::new(
        Dims::Planar,
        100.0,
        aps.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        vec![Point::new(ue.0, ue.1)],
        true,
    )
    .unwrap()
}

fn peb_of(d: &Deployment, mode: Mode) -> f64 {
    peb(&fim(d, 0, &model(), mode).unwrap()).unwrap().peb_m
}

#[test]
fn ratio_law_holds_for_random_geometries() {
    for g in 0..100 {
        for n in 4..=12 {
            let d = random_deployment(g, n);
            let ratio = peb_of(&d, Mode::Phase) / peb_of(&d, Mode::Delay);
            assert!((ratio / PEB_RATIO - 1.0).abs() < 1e-9, "geometry {g}, {n} APs: {ratio}");
        }
    }
}

#[test]
fn reference_pairs_share_the_ratio() {
    for (delay, phase) in REFERENCE_PAIRS {
        let r = phase / delay;
        assert!((r / PEB_RATIO - 1.0).abs() < 1e-3, "{delay} / {phase}: {r}");
    }
}

#[test]
fn ratio_is_independent_of_snr() {
    let d = random_deployment(5, 6);
    for snr in [-10.0, 20.0, 60.0] {
        let m = SignalModel { ref_snr_db: snr, ..model() };
        let r = peb(&fim(&d, 0, &m, Mode::Phase).unwrap()).unwrap().peb_m
            / peb(&fim(&d, 0, &m, Mode::Delay).unwrap()).unwrap().peb_m;
        assert!((r / PEB_RATIO - 1.0).abs() < 1e-9);
    }
}

#[test]
fn information_is_symmetric_and_positive_definite() {
    for g in 0..50 {
        let d = random_deployment(1000 + g, 3 + (g as usize % 8));
        for mode in Mode::ALL {
            let j = fim(&d, 0, &model(), mode).unwrap().matrix;
            assert_eq!(j, j.transpose());
            let eig = j.clone().symmetric_eigen();
            assert!(eig.eigenvalues.iter().all(|l| *l > 0.0), "{:?}", eig.eigenvalues);
        }
    }
}

#[test]
fn information_is_additive_over_ap_sets() {
    let d = random_deployment(3, 9);
    for mode in Mode::ALL {
        let full = fim(&d, 0, &model(), mode).unwrap().matrix;
        let a = fim(&d.with_ap_subset(&[0, 1, 2, 3]), 0, &model(), mode).unwrap().matrix;
        let b = fim(&d.with_ap_subset(&[4, 5, 6, 7, 8]), 0, &model(), mode).unwrap().matrix;
        let diff = (&full - (a + b)).abs().max();
        assert!(diff <= 1e-12 * full.abs().max(), "{diff}");
    }
}

/// Central second differences of the expected negative log-likelihood at
/// the true position.
fn numeric_hessian(d: &Deployment, mode: Mode, h: f64) -> [[f64; 2]; 2] {
    let truth = d.ue_positions[0];
    let f = |dx: f64, dy: f64| {
        expected_nll(d, 0, &model(), mode, &Point::new(truth.x + dx, truth.y + dy)).unwrap()
    };
    let f0 = f(0.0, 0.0);
    let hxx = (f(h, 0.0) - 2.0 * f0 + f(-h, 0.0)) / (h * h);
    let hyy = (f(0.0, h) - 2.0 * f0 + f(0.0, -h)) / (h * h);
    let hxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    [[hxx, hxy], [hxy, hyy]]
}

#[test]
fn information_matches_likelihood_curvature() {
    for g in 0..20 {
        let d = random_deployment(500 + g, 4 + (g as usize % 9));
        for mode in Mode::ALL {
            let j = fim(&d, 0, &model(), mode).unwrap().matrix;
            let hess = numeric_hessian(&d, mode, 1e-4);
            let scale = j.abs().max();
            for r in 0..2 {
                for c in 0..2 {
                    let err = (hess[r][c] - j[(r, c)]).abs() / scale;
                    assert!(err < 1e-4, "geometry {g}, {mode}, ({r},{c}): {} vs {}", hess[r][c], j[(r, c)]);
                }
            }
        }
    }
}

#[test]
fn singular_geometries_are_reported() {
    let one = planar(&[(10.0, 10.0)], (50.0, 50.0));
    assert!(matches!(peb(&fim(&one, 0, &model(), Mode::Delay).unwrap()), Err(Error::SingularInformation { .. })));
    let collinear = planar(&[(10.0, 50.0), (90.0, 50.0), (30.0, 50.0)], (60.0, 50.0));
    assert!(matches!(gdop(&collinear, 0), Err(Error::SingularInformation { .. })));
}

#[test]
fn square_corner_gdop_is_one() {
    let d = planar(&[(0.0, 0.0), (100.0, 0.0), (100.0, 100.0), (0.0, 100.0)], (50.0, 50.0));
    assert!((gdop(&d, 0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn regular_polygon_gdop() {
    // n unit vectors spread evenly: sum u u^T = (n/2) I, so GDOP = 2/sqrt(n).
    for n in 3..=12 {
        let aps: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64 + 0.3;
                (50.0 + 40.0 * t.cos(), 50.0 + 40.0 * t.sin())
            })
            .collect();
        let g = gdop(&planar(&aps, (50.0, 50.0)), 0).unwrap();
        assert!((g - 2.0 / (n as f64).sqrt()).abs() < 1e-12, "{n}: {g}");
    }
}

#[test]
fn equidistant_peb_is_gdop_over_sqrt_info() {
    // With every AP at the same distance all weights are equal, so
    // PEB = GDOP / sqrt(scale * SNR).
    let aps = [(90.0, 50.0), (50.0, 90.0), (10.0, 50.0), (50.0 + 40.0 * 0.6, 50.0 - 40.0 * 0.8)];
    let d = planar(&aps, (50.0, 50.0));
    let m = model();
    let snr = m.link_snr(40.0);
    for mode in Mode::ALL {
        let w = dmimo_core::positioning::info_scale(mode, &m) * snr;
        let expected = gdop(&d, 0).unwrap() / w.sqrt();
        let got = peb_of(&d, mode);
        assert!((got / expected - 1.0).abs() < 1e-12);
    }
}

fn rotate(d: &Deployment, angle: f64) -> Deployment {
    let pivot = d.ue_positions[0];
    Deployment::new(
        d.dims,
        d.area_side_m,
        d.ap_positions.iter().map(|p| p.rotated_about(&pivot, angle)).collect(),
        d.ue_positions.clone(),
        true,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_an_ap_never_increases_peb(seed in 0u64..10_000, n in 3usize..12) {
        let d = random_deployment(seed, n + 1);
        let small = d.with_ap_prefix(n);
        for mode in Mode::ALL {
            match (peb(&fim(&small, 0, &model(), mode).unwrap()), peb(&fim(&d, 0, &model(), mode).unwrap())) {
                (Ok(a), Ok(b)) => prop_assert!(b.peb_m <= a.peb_m * (1.0 + 1e-12)),
                (Err(_), _) => {}
                (Ok(_), Err(e)) => prop_assert!(false, "larger set became singular: {e}"),
            }
        }
    }

    #[test]
    fn rotation_about_the_ue_preserves_peb_and_gdop(seed in 0u64..10_000, n in 3usize..10, angle in -PI..PI) {
        let d = random_deployment(seed, n);
        let r = rotate(&d, angle);
        let (g0, g1) = (gdop(&d, 0), gdop(&r, 0));
        if let (Ok(g0), Ok(g1)) = (g0, g1) {
            prop_assert!((g1 / g0 - 1.0).abs() < 1e-9, "{g0} vs {g1}");
            for mode in Mode::ALL {
                let (a, b) = (peb_of(&d, mode), peb_of(&r, mode));
                prop_assert!((b / a - 1.0).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn ratio_law_for_any_band(carrier in 1e9f64..1e11, bandwidth in 1e5f64..5e8, seed in 0u64..1000) {
        prop_assume!(carrier > 2.0 * bandwidth);
        let m = SignalModel { carrier_hz: carrier, bandwidth_hz: bandwidth, ..model() };
        let d = random_deployment(seed, 6);
        let r = peb(&fim(&d, 0, &m, Mode::Phase).unwrap()).unwrap().peb_m
            / peb(&fim(&d, 0, &m, Mode::Delay).unwrap()).unwrap().peb_m;
        let expected = bandwidth / 12f64.sqrt() / carrier;
        prop_assert!((r / expected - 1.0).abs() < 1e-9);
    }
}

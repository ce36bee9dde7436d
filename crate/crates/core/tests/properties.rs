use proptest::prelude::*;

use wireforce_core::ingest::{calibrate, smooth, Calibration, PoseRecord, RawSensorRecord, StampedSample};
use wireforce_core::mapping::{build_map, wire_footprint, GridChoice};
use wireforce_core::model::{
    elongation_from_load, elongation_from_point_force, homogeneous_load, peak_deflection, point_force, solve_curvature,
    DEFAULT_CURVATURE_TOL,
};
use wireforce_core::{Estimator, ForceModel, WireConfig};

const L: f64 = 0.44;
const T: f64 = 2.2;

fn cfg() -> WireConfig {
    WireConfig::new(L, T).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn triangle_sides_sum_to_stretched_length(l in 0.0..2.0f64, frac in 0.0..=1.0f64) {
        let c = cfg();
        let x0 = frac * L;
        let y0 = peak_deflection(l, x0, &c).unwrap();
        let sides = x0.hypot(y0) + (L - x0).hypot(y0);
        prop_assert!((sides - (L + l)).abs() <= 1e-9 * L);
    }

    #[test]
    fn point_force_monotone_and_bounded(a in 0.0..5.0f64, b in 0.0..5.0f64, frac in 0.01..0.99f64) {
        let c = cfg();
        let x0 = frac * L;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f_lo = point_force(lo, x0, &c).unwrap().force;
        let f_hi = point_force(hi, x0, &c).unwrap().force;
        prop_assert!((0.0..2.0 * T).contains(&f_lo));
        prop_assert!((0.0..2.0 * T).contains(&f_hi));
        if hi - lo > 1e-9 {
            prop_assert!(f_hi > f_lo, "F({hi})={f_hi} <= F({lo})={f_lo}");
        }
    }

    #[test]
    fn homogeneous_force_monotone_and_bounded(a in 0.0..0.3f64, b in 0.0..0.3f64) {
        let c = cfg();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f_lo = homogeneous_load(lo, &c).unwrap();
        let f_hi = homogeneous_load(hi, &c).unwrap();
        prop_assert!(f_lo.total_force >= 0.0 && f_hi.total_force <= 2.0 * T);
        if hi - lo > 1e-9 && lo < c.saturation_elongation() {
            prop_assert!(f_hi.total_force > f_lo.total_force);
        }
    }

    #[test]
    fn point_force_mirror_symmetry(l in 0.0..3.0f64, frac in 0.0..=1.0f64) {
        let c = cfg();
        let x0 = frac * L;
        let left = point_force(l, x0, &c).unwrap();
        let right = point_force(l, L - x0, &c).unwrap();
        prop_assert!((left.force - right.force).abs() <= 1e-14 * T);
        prop_assert!((left.deflection - right.deflection).abs() <= 1e-14 * L);
    }

    #[test]
    fn curvature_residual_below_tolerance(l in 0.0..0.25f64) {
        let sol = solve_curvature(l, &cfg(), DEFAULT_CURVATURE_TOL).unwrap();
        prop_assert!(!sol.saturated);
        prop_assert!(sol.residual < DEFAULT_CURVATURE_TOL);
    }

    #[test]
    fn point_inverse_round_trip(l in 0.0..0.5f64, frac in 0.05..0.95f64) {
        let c = cfg();
        let x0 = frac * L;
        let fs = point_force(l, x0, &c).unwrap().force;
        let back = elongation_from_point_force(fs, x0, &c).unwrap();
        prop_assert!((back - l).abs() <= 1e-6 * L, "l={l} back={back}");
        let again = point_force(back, x0, &c).unwrap().force;
        prop_assert!((again - fs).abs() <= 1e-6 * T);
    }

    #[test]
    fn load_inverse_round_trip(l in 0.0..0.25f64) {
        let c = cfg();
        let fv = homogeneous_load(l, &c).unwrap().load;
        let back = elongation_from_load(fv, &c).unwrap();
        prop_assert!((back - l).abs() <= 1e-6 * L, "l={l} back={back}");
    }

    #[test]
    fn small_elongation_series_agreement(ratio in 1e-9..1e-4f64) {
        let l = ratio * L;
        let kappa = solve_curvature(l, &cfg(), DEFAULT_CURVATURE_TOL).unwrap().curvature;
        let series = (24.0 * l / (L + l).powi(3)).sqrt();
        prop_assert!((kappa / series - 1.0).abs() < 0.01);
    }
}

proptest! {
    #[test]
    fn calibration_is_monotone(a in 0.0..=1.0f64, b in 0.0..=1.0f64, offset in 0.0..0.5f64, scale in 0.1..3.0f64) {
        let cal = Calibration { full_scale: scale, zero_offset: offset };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let at = |r| calibrate(&RawSensorRecord { time: 0.0, raw_ratio: r }, &cal).elongation;
        prop_assert!(at(lo) <= at(hi));
        prop_assert!(at(lo) >= 0.0);
    }

    #[test]
    fn smoothing_preserves_mass_of_padded_sequences(
        core in prop::collection::vec(0.0..1.0f64, 1..40),
        half in 0usize..4,
    ) {
        let window = 2 * half + 1;
        let pad = window - 1;
        let values: Vec<f64> = std::iter::repeat_n(0.0, pad)
            .chain(core.iter().copied())
            .chain(std::iter::repeat_n(0.0, pad))
            .collect();
        let samples: Vec<StampedSample> = values.iter().enumerate().map(|(i, &elongation)| StampedSample {
            time: i as f64,
            pose: PoseRecord { time: i as f64, x: 0.0, y: 0.0, yaw: 0.0 },
            elongation,
            distance: 0.0,
        }).collect();
        let out = smooth(&samples, window).unwrap();
        prop_assert_eq!(out.len(), samples.len());
        let before: f64 = values.iter().sum();
        let after: f64 = out.iter().map(|s| s.elongation).sum();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn map_conserves_force_and_bounds_means(
        readings in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -3.1..3.1f64, 0.0..0.4f64), 1..30),
        point in any::<bool>(),
    ) {
        let c = cfg();
        let model = if point { ForceModel::PointMidspan } else { ForceModel::Homogeneous };
        let estimator = Estimator::new(model);
        let samples: Vec<StampedSample> = readings.iter().enumerate().map(|(i, &(x, y, yaw, l))| StampedSample {
            time: i as f64,
            pose: PoseRecord { time: i as f64, x, y, yaw },
            elongation: l,
            distance: 0.0,
        }).collect();
        let map = build_map(&samples, &estimator, &c, GridChoice::default(), 32).unwrap();
        prop_assert_eq!(map.out_of_bounds, 0);

        let mut expected = 0.0;
        for s in &samples {
            let est = estimator.estimate(s.elongation, &c).unwrap();
            let fp = wire_footprint(&s.pose, &est, &c, 32).unwrap();
            let mut cells: Vec<_> = fp.points.iter().filter_map(|&(x, y)| map.spec.cell_of(x, y)).collect();
            cells.sort_unstable();
            cells.dedup();
            expected += est.total_force * cells.len() as f64;
        }
        prop_assert!((map.total_sum() - expected).abs() <= 1e-9 * expected.max(1.0));
        for (_, _, mean, count) in map.explored() {
            prop_assert!(count > 0);
            prop_assert!((0.0..=2.0 * T).contains(&mean));
        }
    }
}

use aerialnet::a2a::{
    coverage_probability_mc, sinr_with_gains, A2aScenario, AirspaceVolume, Density, McConfig,
};
use aerialnet::a2g::{
    solve_specular_geometry, specular_split, A2gEndpoints, EarthModel, GrazingModel,
};
use aerialnet::harness::{ExperimentConfig, FadingSpec};
use aerialnet::mec::{
    interpolate, minkowski, run_stream, FilterConfig, FilterMode, FilterState, PositionPacket,
};
use proptest::prelude::*;

fn walk(steps: Vec<(f64, f64, bool)>) -> Vec<PositionPacket> {
    let mut seq = 0u64;
    let (mut e, mut n) = (0.0, 0.0);
    steps
        .into_iter()
        .map(|(de, dn, skip)| {
            seq += if skip { 4 } else { 1 };
            e += de;
            n += dn;
            PositionPacket::new(
                "p",
                seq,
                Some(seq as f64),
                116.0 + e * 1e-5,
                40.0 + n * 1e-5,
                900.0,
            )
        })
        .collect()
}

fn mode() -> impl Strategy<Value = FilterMode> {
    prop_oneof![Just(FilterMode::PaperLiteral), Just(FilterMode::Corrected)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_reciprocal(s in 10.0..60_000.0f64, ha in 1.0..10_000.0f64, hb in 1.0..10_000.0f64) {
        let r = EarthModel::with_factor(4.0 / 3.0).unwrap().effective_radius();
        let ab = specular_split(s, ha, hb, r);
        let ba = specular_split(s, hb, ha, r);
        if let (Ok(ab), Ok(ba)) = (ab, ba) {
            prop_assert!((ab.arc_s1 + ab.arc_s2 - s).abs() <= 1e-9 * s);
            prop_assert!((ab.arc_s1 - ba.arc_s2).abs() <= 1e-6 * s);
            prop_assert!(ab.arc_s1 >= 0.0 && ab.arc_s2 >= 0.0);
        }
    }

    #[test]
    fn geometry_is_consistent(h in 200.0..10_000.0f64, gs in 0.0..100.0f64, s in 1.0..20_000.0f64) {
        let ep = A2gEndpoints::new(h, gs, s, 3.5e9).unwrap();
        let earth = EarthModel::with_factor(1.0).unwrap();
        let g = solve_specular_geometry(&ep, &earth, GrazingModel::Exact).unwrap();
        prop_assert!((g.arc_s1 + g.arc_s2 - s).abs() <= 1e-6 * s.max(1.0));
        prop_assert!(g.grazing_angle_psi > 0.0 && g.grazing_angle_psi <= std::f64::consts::FRAC_PI_2);
        prop_assert!(g.path_delta_s >= -1e-9);
        prop_assert!(g.reflect_r1 + g.reflect_r2 >= g.los_distance_r1 - 1e-6);
    }

    #[test]
    fn minkowski_is_a_metric(
        a in prop::array::uniform3(-1e3..1e3f64),
        b in prop::array::uniform3(-1e3..1e3f64),
        c in prop::array::uniform3(-1e3..1e3f64),
        p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.0..8.0f64],
    ) {
        let ab = minkowski(&a, &b, p).unwrap();
        prop_assert_eq!(ab, minkowski(&b, &a, p).unwrap());
        prop_assert!(ab >= 0.0);
        let ac = minkowski(&a, &c, p).unwrap();
        let cb = minkowski(&c, &b, p).unwrap();
        prop_assert!(ab <= ac + cb + 1e-9 * (1.0 + ab));
    }

    #[test]
    fn supplements_lie_on_segment(
        a in prop::array::uniform3(-50.0..50.0f64),
        b in prop::array::uniform3(-50.0..50.0f64),
        n in 1usize..10,
    ) {
        let p = PositionPacket::new("s", 1, Some(0.0), a[0], a[1], a[2]);
        let q = PositionPacket::new("s", 2, Some(1.0), b[0], b[1], b[2]);
        let between = |x: f64, u: f64, v: f64| x >= u.min(v) && x <= u.max(v);
        let sup = interpolate(&p, &q, n);
        prop_assert_eq!(sup.len(), n);
        for s in &sup {
            prop_assert!(s.is_supplement());
            prop_assert!(between(s.lon_deg, a[0], b[0]));
            prop_assert!(between(s.lat_deg, a[1], b[1]));
            prop_assert!(between(s.alt_m, a[2], b[2]));
            let t = s.time_s.unwrap();
            prop_assert!(t > 0.0 && t < 1.0);
        }
    }

    #[test]
    fn output_is_time_ordered(
        steps in prop::collection::vec((0.0..30.0f64, -5.0..5.0f64, prop::bool::weighted(0.1)), 12..80),
        mode in mode(),
    ) {
        let input = walk(steps);
        let cfg = FilterConfig { mode, ..Default::default() };
        let out = run_stream(&input, &cfg).unwrap();
        let times: Vec<f64> = out.packets.iter().map(|p| p.time_s.unwrap()).collect();
        prop_assert!(times.windows(2).all(|w| w[0] < w[1]), "{times:?}");
        let s = out.summary;
        prop_assert_eq!(s.accepted + s.abandoned, s.total);
        prop_assert_eq!(out.packets.len(), s.accepted + s.supplemented);
    }

    #[test]
    fn window_keeps_its_size(
        steps in prop::collection::vec((0.0..30.0f64, -5.0..5.0f64, prop::bool::weighted(0.1)), 12..60),
        mode in mode(),
    ) {
        let cfg = FilterConfig { mode, ..Default::default() };
        let mut state = FilterState::new(cfg).unwrap();
        for p in walk(steps) {
            state.process(p).unwrap();
            if state.warmup_complete() {
                prop_assert_eq!(state.window().len(), cfg.window);
            }
        }
    }

    #[test]
    fn config_round_trips(
        seed in any::<u64>(),
        trials in 1usize..1_000_000,
        k in -10.0..20.0f64,
        p in 1.0..20.0f64,
        theta in prop::collection::vec(7.0..14.0f64, 1..4),
        corrected in any::<bool>(),
    ) {
        let mut c = ExperimentConfig { seed, trials, ..Default::default() };
        c.a2g.fading = FadingSpec::Rice { k_db: k };
        c.a2a.tx_power_w = p;
        c.a2a.thresholds_db = theta;
        if corrected {
            c.filter.mode = FilterMode::Corrected;
        }
        c.validate().unwrap();
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn sinr_decreases_with_interference(
        d in prop::collection::vec(10.0..3_000.0f64, 2..10),
        extra in 10.0..3_000.0f64,
    ) {
        let scen = A2aScenario::default();
        let gains = vec![1.0; d.len() + 1];
        let base = sinr_with_gains(&d, 0, &gains[..d.len()], &scen).unwrap();
        let mut more = d.clone();
        more.push(extra);
        let crowded = sinr_with_gains(&more, 0, &gains, &scen).unwrap();
        prop_assert!(crowded < base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn coverage_is_a_probability(count in 1.0..60.0f64, theta_db in 7.0..14.0f64, seed in any::<u64>()) {
        let scen = A2aScenario {
            density: Density::ExpectedCount(count),
            threshold: 10f64.powf(theta_db / 10.0),
            ..Default::default()
        };
        let r = coverage_probability_mc(&scen, &AirspaceVolume::default(), &McConfig::new(500, seed)).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_cov));
        prop_assert!(r.std_error.is_finite());
    }
}

use exzone_cli::{parse_scenario, ReGrid, Scenario};
use exzone_core::{FadingModel, Topology, TrainingMode};
use proptest::prelude::*;

prop_compose! {
    fn scenario()(
        alpha in 2.05f64..5.0,
        a in 0.0f64..300.0,
        lambda_scale in 0.2f64..5.0,
        p_d in 1e-4f64..1.0,
        antennas in 1usize..1024,
        pilots in 1usize..64,
        sigma2 in 0.0f64..1.0,
        muted in any::<bool>(),
        r0 in 1e-3f64..10.0,
        d in 0.91f64..3.0,
        c in 1.0f64..50.0,
        c_max in 1.5f64..50.0,
        step in 0.01f64..0.5,
        drops in 1usize..100_000,
        seed in any::<u64>(),
        budgets in prop::collection::vec(1e-3f64..100.0, 1..5),
        hex in prop::option::of(1usize..61),
        explicit in any::<bool>(),
        noise in any::<bool>(),
    ) -> Scenario {
        let mut s = Scenario::default();
        s.network.alpha = alpha;
        s.network.user_ratio = a;
        s.network.lambda_b *= lambda_scale;
        s.network.p_d = p_d;
        s.network.antennas = antennas;
        s.network.pilots = pilots;
        s.network.sigma2_d2d = sigma2;
        s.network.training_mode = if muted { TrainingMode::MutedD2D } else { TrainingMode::ActiveD2D };
        s.geometry.r0 = r0;
        s.geometry.d = d;
        s.c = c;
        s.c_max = c_max;
        s.re_grid = ReGrid { start: 0.4, stop: 0.9, step };
        s.n_drops = drops;
        s.seed = seed;
        s.i_d2d = budgets;
        s.simulation.topology = hex.map_or(Topology::Poisson, |cell_count| Topology::Hexagonal { cell_count });
        s.simulation.fading = if explicit { FadingModel::Explicit } else { FadingModel::Statistical };
        s.simulation.include_noise = noise;
        s
    }
}

proptest! {
    #[test]
    fn parse_inverts_serialize(s in scenario()) {
        prop_assert!(s.validate().is_ok());
        prop_assert_eq!(parse_scenario(&s.serialize()).unwrap(), s);
    }

    #[test]
    fn unknown_keys_never_parse(key in "[a-z_]{1,12}") {
        let known = Scenario::default().serialize();
        prop_assume!(!known.lines().any(|l| l.starts_with(&format!("{key} "))));
        let err = parse_scenario(&format!("{key} = 1")).unwrap_err();
        prop_assert!(err.to_string().contains(&key));
    }

    #[test]
    fn dbm_and_watts_agree(dbm in -30.0f64..40.0) {
        let a = parse_scenario(&format!("p_d = {dbm} dBm")).unwrap();
        let w = 10f64.powf((dbm - 30.0) / 10.0);
        let b = parse_scenario(&format!("p_d = {w} W")).unwrap();
        prop_assert!((a.network.p_d - b.network.p_d).abs() <= 1e-12 * w);
    }
}

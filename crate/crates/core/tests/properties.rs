use levelflow_core::field_kit::{GridConfig, RunConfig, Tolerances};
use levelflow_core::{
    build_flow, build_hamiltonian, build_scenario, solve_cauchy, FlowMap, InitialDatum, NearIncompressiblePair,
    ScenarioConfig, ScenarioKind, SpaceTimeGrid,
};
use proptest::prelude::*;
use std::sync::OnceLock;

fn wave() -> &'static (NearIncompressiblePair, FlowMap) {
    static CELL: OnceLock<(NearIncompressiblePair, FlowMap)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = SpaceTimeGrid::new(1.0, -3.0, 3.0, 64, 64).unwrap();
        let pair = build_scenario(&ScenarioKind::hamiltonian_first(), g).unwrap();
        let tol = Tolerances::default();
        let h = build_hamiltonian(&pair, &tol).unwrap();
        let flow = build_flow(&h, &tol).unwrap();
        (pair, flow)
    })
}

fn datum() -> impl Strategy<Value = InitialDatum> {
    prop_oneof![
        (-0.8..0.8f64, 0.05..0.12f64, -2.0..2.0f64).prop_map(|(center, width, height)| InitialDatum::GaussianBump {
            center,
            width,
            height
        }),
        (-0.5..0.5f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(location, left, right)| InitialDatum::Step {
            location,
            left,
            right
        }),
        (-1.0..1.0f64).prop_map(|value| InitialDatum::Constant { value }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn solution_is_linear(a in datum(), b in datum(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let (pair, flow) = wave();
        let ua = solve_cauchy(pair, flow, &a).unwrap();
        let ub = solve_cauchy(pair, flow, &b).unwrap();
        let uc = solve_cauchy(pair, flow, &InitialDatum::combine(alpha, a, beta, b)).unwrap();
        for ((x, y), z) in ua.u().values().iter().zip(ub.u().values()).zip(uc.u().values()) {
            prop_assert!((alpha * x + beta * y - z).abs() <= 1e-12 * (1.0 + z.abs()));
        }
    }

    #[test]
    fn nonnegative_data_give_nonnegative_solutions(center in -0.8..0.8f64, width in 0.05..0.12f64, height in 0.0..5.0f64) {
        let (pair, flow) = wave();
        let sol = solve_cauchy(pair, flow, &InitialDatum::GaussianBump { center, width, height }).unwrap();
        prop_assert!(sol.u().min() >= 0.0);
    }

    #[test]
    fn flow_and_inverse_compose_to_identity(i in 0usize..=64, j in 0usize..=64) {
        let (_, flow) = wave();
        let g = *flow.grid();
        if let Some(x) = flow.x_at(i, j) {
            let h = flow.hamiltonian();
            let back = h.slice(0).invert(h.slice(i).eval(x)).unwrap();
            prop_assert!((back - g.x(j)).abs() <= 1e-9, "{back} vs {}", g.x(j));
        }
    }

    #[test]
    fn level_inversion_round_trip(i in 0usize..=64, s in 0.0..1.0f64) {
        let (_, flow) = wave();
        let slice = flow.hamiltonian().slice(i);
        let (lo, hi) = slice.range();
        let level = lo + s * (hi - lo);
        let x = slice.invert(level).unwrap();
        prop_assert!((slice.eval(x) - level).abs() <= 1e-10);
    }

    // TOML integers are signed, so seeds live in [0, 2^63).
    #[test]
    fn config_round_trips(
        nt in 2usize..500,
        nx in 2usize..500,
        x_min in -5.0..0.0f64,
        width in 0.5..10.0f64,
        velocity in -2.0..2.0f64,
        seed in 0..=i64::MAX as u64,
    ) {
        let cfg = ScenarioConfig {
            grid: GridConfig { t_final: 1.0, x_min, x_max: x_min + width, nt, nx },
            scenario: ScenarioKind::ConstantField { velocity },
            tolerances: Tolerances::default(),
            datum: None,
            probe: None,
            compactness: None,
            run: RunConfig { seed },
        };
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

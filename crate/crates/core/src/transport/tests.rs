use super::*;
use crate::field_kit::{build_scenario, ScenarioKind, Tolerances};
use crate::flow::build_flow;
use crate::hamiltonian::build_hamiltonian;
use crate::profile::TimeProfile;

struct Setup {
    pair: NearIncompressiblePair,
    h: HamiltonianField,
    flow: FlowMap,
}

fn setup(kind: ScenarioKind, x_min: f64, x_max: f64, nt: usize, nx: usize) -> Setup {
    let g = SpaceTimeGrid::new(1.0, x_min, x_max, nt, nx).unwrap();
    let pair = build_scenario(&kind, g).unwrap();
    let tol = Tolerances::default();
    let h = build_hamiltonian(&pair, &tol).unwrap();
    let flow = build_flow(&h, &tol).unwrap();
    Setup { pair, h, flow }
}

fn zero(n: usize) -> Setup {
    setup(ScenarioKind::ZeroField, -2.0, 2.0, n, n)
}

fn translation(nt: usize, nx: usize) -> Setup {
    setup(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, nt, nx)
}

fn wave(n: usize) -> Setup {
    setup(ScenarioKind::hamiltonian_first(), -3.0, 3.0, n, n)
}

#[test]
fn zero_field_keeps_datum() {
    let s = zero(32);
    let datum = InitialDatum::gaussian(0.1, 0.1);
    let sol = solve_cauchy(&s.pair, &s.flow, &datum).unwrap();
    let g = *sol.grid();
    for i in 0..=g.nt() {
        for j in 0..=g.nx() {
            assert_eq!(sol.u().at(i, j), datum.clipped(g.x(j)));
        }
    }
    assert_eq!(sol.source(), SolutionSource::Pushforward);
}

#[test]
fn translated_step() {
    // dt = dx, so x - t is always a node.
    let s = translation(32, 128);
    let datum = InitialDatum::Step { location: 0.0, left: 0.0, right: 1.0 };
    let sol = solve_cauchy(&s.pair, &s.flow, &datum).unwrap();
    let g = *sol.grid();
    for i in 0..=g.nt() {
        for j in 0..=g.nx() {
            let y = g.x(j) - g.t(i);
            let want = if y.abs() < 1e-12 { 0.5 } else if y > 0.0 { 1.0 } else { 0.0 };
            assert!((sol.u().at(i, j) - want).abs() < 1e-12, "({i}, {j})");
        }
    }
}

#[test]
fn density_reproduced_inside_domain_of_dependence() {
    let s = wave(128);
    let datum = InitialDatum::Density { generator: ScenarioKind::hamiltonian_first().generator() };
    let sol = solve_cauchy(&s.pair, &s.flow, &datum).unwrap();
    let g = *sol.grid();
    let rho = s.pair.density();
    for i in 0..=g.nt() {
        for j in 0..=g.nx() {
            if s.flow.xinv_at(i, j).is_some() {
                assert!((sol.u().at(i, j) - rho.at(i, j)).abs() < 5e-3);
            }
        }
    }
}

#[test]
fn linear_in_the_datum() {
    let s = wave(64);
    let (d1, d2) = (InitialDatum::gaussian(-0.4, 0.1), InitialDatum::Step { location: 0.3, left: 0.0, right: 2.0 });
    let (alpha, beta) = (1.5, -0.25);
    let combo = InitialDatum::combine(alpha, d1.clone(), beta, d2.clone());
    let u1 = solve_cauchy(&s.pair, &s.flow, &d1).unwrap();
    let u2 = solve_cauchy(&s.pair, &s.flow, &d2).unwrap();
    let u = solve_cauchy(&s.pair, &s.flow, &combo).unwrap();
    for ((a, b), c) in u1.u().values().iter().zip(u2.u().values()).zip(u.u().values()) {
        assert!((alpha * a + beta * b - c).abs() < 1e-12);
    }
}

#[test]
fn nonnegative_data_stay_nonnegative_and_mass_is_conserved() {
    let drift = |n: usize| {
        let s = wave(n);
        let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::gaussian(0.0, 0.2)).unwrap();
        assert!(sol.u().min() >= 0.0);
        assert_eq!(sol.mass_window(), (-3.0, 3.0));
        sol.mass_drift()
    };
    let (coarse, fine) = (drift(128), drift(256));
    assert!(coarse < 1e-4 && coarse / fine >= 3.0, "{coarse:e} {fine:e}");
}

#[test]
fn support_must_stay_in_padded_region() {
    let s = translation(16, 16);
    let wide = InitialDatum::gaussian(0.0, 0.2);
    assert!(matches!(solve_cauchy(&s.pair, &s.flow, &wide), Err(Error::Support(_))));
    // Unbounded supports and singular data are allowed.
    let sing = InitialDatum::InvSqrtSingularity { center: 0.0, clip: 50.0 };
    let sol = solve_cauchy(&s.pair, &s.flow, &sing).unwrap();
    assert!(sol.u().values().iter().all(|v| v.is_finite()));
}

#[test]
fn weak_residual_zero_field_exact() {
    let s = zero(64);
    let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::gaussian(0.2, 0.1)).unwrap();
    let tests = TensorTest::bump_family(3, -1.5, 1.5, 0.4, TimeProfile::LinearDecay { t_end: 1.0 });
    let r = weak_residual(&sol, &s.pair, &tests).unwrap();
    assert!(r.iter().all(|&v| v <= 1e-9), "{r:?}");
}

#[test]
fn weak_residual_step_off_the_jump_path() {
    // The jump travels along x = t in [0, 1]; the bump sits in u = 1.
    let run = |n: usize| {
        let s = translation(n, n);
        let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::Step { location: 0.0, left: 0.0, right: 1.0 }).unwrap();
        let test = TensorTest {
            space: Profile::PolyBump { center: 1.5, half_width: 0.3 },
            time: TimeProfile::PolyBump { t_end: 0.9 },
        };
        weak_residual(&sol, &s.pair, &[test]).unwrap()[0]
    };
    let (coarse, fine) = (run(128), run(256));
    assert!(coarse <= 1e-4 && coarse / fine >= 3.0, "{coarse:e} {fine:e}");
}

#[test]
fn weak_residual_wave_small() {
    let s = wave(128);
    let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::gaussian(0.0, 0.2)).unwrap();
    let r = weak_residual(&sol, &s.pair, &default_test_suite(&s.pair).unwrap()).unwrap();
    assert_eq!(r.len(), 5);
    assert!(r.iter().all(|&v| v < 1e-2), "{r:?}");
}

#[test]
fn weak_residual_rejects_boundary_tests() {
    let s = zero(16);
    let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::zero()).unwrap();
    let bad = TensorTest { space: Profile::PolyBump { center: 1.8, half_width: 0.3 }, time: TimeProfile::LinearDecay { t_end: 1.0 } };
    assert!(matches!(weak_residual(&sol, &s.pair, &[bad]), Err(Error::Support(_))));
    let late = TensorTest { space: Profile::PolyBump { center: 0.0, half_width: 0.3 }, time: TimeProfile::LinearDecay { t_end: 2.0 } };
    assert!(matches!(weak_residual(&sol, &s.pair, &[late]), Err(Error::Support(_))));
}

#[test]
fn observable_zero_and_frozen_cases() {
    let s = wave(64);
    let times = [0.0, 0.25, 0.5, 1.0];
    let f = Profile::PolyBump { center: s.h.eval(0.0, 0.0), half_width: 0.3 };
    let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::zero()).unwrap();
    let r = conserved_observable(&sol, &s.h, &f, &times).unwrap();
    assert!(r.values.iter().all(|&v| v == 0.0) && r.drift == 0.0);

    let z = zero(64);
    let sol = solve_cauchy(&z.pair, &z.flow, &InitialDatum::gaussian(0.0, 0.1)).unwrap();
    let f = Profile::SmoothBump { center: 2.0, half_width: 0.5 };
    let r = conserved_observable(&sol, &z.h, &f, &times).unwrap();
    assert_eq!(r.drift, 0.0);
    assert_eq!(r.times, vec![0.0, 0.25, 0.5, 1.0]);
}

#[test]
fn observable_rejects_unrealized_levels() {
    let s = wave(32);
    let sol = solve_cauchy(&s.pair, &s.flow, &InitialDatum::zero()).unwrap();
    let f = Profile::PolyBump { center: 100.0, half_width: 1.0 };
    assert!(matches!(conserved_observable(&sol, &s.h, &f, &[0.5]), Err(Error::Support(_))));
}

#[test]
fn probe_vanishes_on_stationary_field() {
    let s = zero(256);
    let setup = ProbeSetup {
        eps: vec![0.2, 0.1, 0.05],
        tau: 0.7,
        level: Profile::PolyBump { center: 2.0, half_width: 0.5 },
        datum: InitialDatum::gaussian(0.0, 0.2),
    };
    let rows = uniqueness_probe(&s.pair, &s.h, &s.flow, &setup).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.d <= 1e-15 && r.boundary_gap <= 1e-15), "{rows:?}");
}

#[test]
fn probe_validates_inputs() {
    let s = zero(256);
    let mut setup = ProbeSetup {
        eps: vec![0.1, 0.2],
        tau: 0.7,
        level: Profile::PolyBump { center: 2.0, half_width: 0.5 },
        datum: InitialDatum::zero(),
    };
    assert!(matches!(uniqueness_probe(&s.pair, &s.h, &s.flow, &setup), Err(Error::InvalidParameter(_))));
    setup.eps = vec![0.2, 0.1];
    setup.tau = 0.3;
    assert!(matches!(uniqueness_probe(&s.pair, &s.h, &s.flow, &setup), Err(Error::InvalidParameter(_))));
    setup.tau = 0.7;
    setup.level = Profile::PolyBump { center: 0.5, half_width: 0.5 };
    assert!(matches!(uniqueness_probe(&s.pair, &s.h, &s.flow, &setup), Err(Error::Support(_))));
}

#[test]
fn probe_boundary_gap_tracks_decay() {
    let s = wave(512);
    let i_tau = s.pair.grid().nearest_time_index(0.7);
    let setup = ProbeSetup {
        eps: vec![0.2, 0.1],
        tau: 0.7,
        level: Profile::PolyBump { center: s.h.at(i_tau, 256), half_width: 0.5 },
        datum: InitialDatum::gaussian(0.0, 0.2),
    };
    for r in uniqueness_probe(&s.pair, &s.h, &s.flow, &setup).unwrap() {
        assert!((r.d - r.boundary_gap).abs() <= 0.1 * r.d + 1e-6, "{r:?}");
    }
}

#[test]
fn cross_validation_on_translation() {
    let run = |n: usize| {
        let s = translation(n / 4, n);
        cross_validate(&s.pair, &s.flow, &InitialDatum::gaussian(0.0, 0.06), &[OracleKind::Characteristics, OracleKind::FvUpwind])
            .unwrap()
    };
    let coarse = run(256);
    let fine = run(512);
    assert!(fine[0].max_distance <= 1e-6, "{:?}", fine[0]);
    let order = (coarse[1].max_distance / fine[1].max_distance).log2();
    assert!((2.0 / 3.0..=1.3).contains(&order), "FV order {order}");
}

#[test]
fn cross_validation_on_stationary_field() {
    let s = zero(64);
    let rec = cross_validate(&s.pair, &s.flow, &InitialDatum::gaussian(0.0, 0.1), &[OracleKind::Characteristics]).unwrap();
    assert!(rec[0].max_distance <= 1e-9, "{rec:?}");
    assert_eq!(rec[0].times.len(), 5);
}

#[test]
fn cross_validation_refines_on_wave() {
    let s = wave(64);
    let fine = SpaceTimeGrid::new(1.0, -3.0, 3.0, 128, 128).unwrap();
    let study = refinement_study(&s.pair, &InitialDatum::gaussian(0.0, 0.2), OracleKind::FvUpwind, fine, &Tolerances::default()).unwrap();
    assert!(study.ratio > 1.5, "{study:?}");
}

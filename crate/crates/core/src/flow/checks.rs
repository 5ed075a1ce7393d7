use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::FlowMap;
use crate::error::{Error, Result};
use crate::field_kit::NearIncompressiblePair;
use crate::profile::Profile;
use crate::quadrature::trapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeResidual {
    /// `max |(Y(t+) - Y(t-)) / 2Δt - b(t, Y(t))|` over interior times.
    pub centered: f64,
    /// `max |Y(t) - Y(0) - ∫ b(s, Y(s)) ds|` with trapezoid time quadrature.
    pub integral: f64,
}

/// Residual of `∂t Y(t, h) = b(t, Y(t, h))` on the level table.
pub fn ode_residual(flow: &FlowMap, pair: &NearIncompressiblePair) -> OdeResidual {
    let g = *flow.grid();
    let (nt, nh) = (g.nt(), flow.nh());
    let dt = g.dt();
    let b = pair.velocity();
    let mut centered = 0.0_f64;
    let mut integral = 0.0_f64;
    for k in 0..=nh {
        let speeds: Vec<f64> = (0..=nt).map(|i| b.eval_at_slice(i, flow.y(i, k))).collect();
        for i in 1..nt {
            let d = (flow.y(i + 1, k) - flow.y(i - 1, k)) / (2.0 * dt) - speeds[i];
            centered = centered.max(d.abs());
        }
        let mut acc = 0.0;
        for i in 1..=nt {
            acc += 0.5 * dt * (speeds[i - 1] + speeds[i]);
            integral = integral.max((flow.y(i, k) - flow.y(0, k) - acc).abs());
        }
    }
    OdeResidual { centered, integral }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushforwardReport {
    /// Grid times at which the identities were checked.
    pub times: Vec<f64>,
    /// `max |∫ φ(Y(t,h)) dh - ∫ φ ρ(t) dy|`.
    pub level_defect: f64,
    /// `max |∫ φ(X(t,x)) ρ(0,x) dx - ∫ φ ρ(t) dy|`.
    pub flow_defect: f64,
}

/// Grid times nearest to `0, T/4, T/2, 3T/4, T`.
pub fn quarter_times(flow: &FlowMap) -> Vec<usize> {
    let g = flow.grid();
    let mut idx: Vec<usize> = (0..=4).map(|q| g.nearest_time_index(g.t_final() * q as f64 / 4.0)).collect();
    idx.dedup();
    idx
}

/// Checks `Y(t,.)# Lebesgue = ρ(t,.)` and `X(t,.)# (ρ(0,.)) = ρ(t,.)`
/// against each probe.
pub fn pushforward_check(flow: &FlowMap, pair: &NearIncompressiblePair, probes: &[Profile]) -> Result<PushforwardReport> {
    let (lo, hi) = pair
        .padded_window()
        .ok_or_else(|| Error::Support("padded region is empty".into()))?;
    for p in probes {
        if !p.support_within(lo, hi) {
            let (a, b) = p.support();
            return Err(Error::Support(format!("probe support [{a}, {b}] leaves padded region [{lo}, {hi}]")));
        }
    }
    let g = *flow.grid();
    let rho = pair.density();
    let times = quarter_times(flow);
    let mut level_defect = 0.0_f64;
    let mut flow_defect = 0.0_f64;
    for &i in &times {
        for p in probes {
            let eulerian: Vec<f64> = (0..=g.nx()).map(|j| p.value(g.x(j)) * rho.at(i, j)).collect();
            let target = trapezoid(&eulerian, g.dx());
            let along_levels: Vec<f64> = flow.y_row(i).iter().map(|&y| p.value(y)).collect();
            level_defect = level_defect.max((trapezoid(&along_levels, flow.dh()) - target).abs());
            let mut pushed = Vec::with_capacity(g.nx() + 1);
            for j in 0..=g.nx() {
                let w = rho.at(0, j);
                pushed.push(match flow.x_at(i, j) {
                    Some(x) => p.value(x) * w,
                    None => 0.0,
                });
            }
            flow_defect = flow_defect.max((trapezoid(&pushed, g.dx()) - target).abs());
        }
    }
    Ok(PushforwardReport { times: times.iter().map(|&i| g.t(i)).collect(), level_defect, flow_defect })
}

/// Space-time region `[t_a, t_b] x [x_a, x_b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub t_a: f64,
    pub t_b: f64,
    pub x_a: f64,
    pub x_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowModulus {
    /// `max |ΔX| / (lip_x |Δx| + lip_t |Δt|)` over the sampled pairs.
    pub ratio: f64,
    pub axis_pairs: usize,
    pub random_pairs: usize,
}

/// Scans the modulus `|X(t,x) - X(t',x')| <= lip_x |x-x'| + lip_t |t-t'|`
/// over node pairs inside `region`.
///
/// Every axis-aligned pair is covered by scanning adjacent nodes: a sum of
/// adjacent increments is bounded by the largest adjacent ratio. Diagonal
/// pairs are drawn at random with the given seed.
pub fn flow_modulus(flow: &FlowMap, region: &Region, lip_x: f64, lip_t: f64, random_pairs: usize, seed: u64) -> FlowModulus {
    let g = *flow.grid();
    let rows: Vec<usize> = (0..=g.nt()).filter(|&i| g.t(i) >= region.t_a - 1e-12 && g.t(i) <= region.t_b + 1e-12).collect();
    let cols: Vec<usize> = (0..=g.nx())
        .filter(|&j| g.x(j) >= region.x_a - 1e-12 && g.x(j) <= region.x_b + 1e-12)
        .filter(|&j| rows.iter().all(|&i| flow.x_at(i, j).is_some()))
        .collect();
    let ratio_of = |i: usize, j: usize, p: usize, q: usize| -> f64 {
        let dx = flow.x_at(i, j).unwrap() - flow.x_at(p, q).unwrap();
        let bound = lip_x * (g.x(j) - g.x(q)).abs() + lip_t * (g.t(i) - g.t(p)).abs();
        if bound > 0.0 {
            dx.abs() / bound
        } else if dx == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let mut ratio = 0.0_f64;
    let mut axis = 0;
    for &i in &rows {
        for w in cols.windows(2) {
            ratio = ratio.max(ratio_of(i, w[1], i, w[0]));
            axis += 1;
        }
    }
    for w in rows.windows(2) {
        for &j in &cols {
            ratio = ratio.max(ratio_of(w[1], j, w[0], j));
            axis += 1;
        }
    }
    let mut drawn = 0;
    if rows.len() >= 2 && cols.len() >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while drawn < random_pairs {
            let (i, p) = (rows[rng.random_range(0..rows.len())], rows[rng.random_range(0..rows.len())]);
            let (j, q) = (cols[rng.random_range(0..cols.len())], cols[rng.random_range(0..cols.len())]);
            if i == p || j == q {
                continue;
            }
            ratio = ratio.max(ratio_of(i, j, p, q));
            drawn += 1;
        }
    }
    FlowModulus { ratio, axis_pairs: axis, random_pairs: drawn }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_kit::{build_scenario, ScenarioKind, SpaceTimeGrid, Tolerances};
    use crate::flow::build_flow;
    use crate::hamiltonian::build_hamiltonian;

    fn run(kind: ScenarioKind, x_min: f64, x_max: f64, n: usize) -> (NearIncompressiblePair, FlowMap) {
        let g = SpaceTimeGrid::new(1.0, x_min, x_max, n, n).unwrap();
        let pair = build_scenario(&kind, g).unwrap();
        let tol = Tolerances::default();
        let h = build_hamiltonian(&pair, &tol).unwrap();
        let f = build_flow(&h, &tol).unwrap();
        (pair, f)
    }

    #[test]
    fn ode_residual_trivial_fields() {
        let (p, f) = run(ScenarioKind::ZeroField, -1.0, 1.0, 32);
        let r = ode_residual(&f, &p);
        assert_eq!(r.centered, 0.0);
        assert_eq!(r.integral, 0.0);
        let (p, f) = run(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 32);
        let r = ode_residual(&f, &p);
        assert!(r.centered < 1e-12 && r.integral < 1e-12, "{r:?}");
    }

    #[test]
    fn ode_residual_refines() {
        let (p, f) = run(ScenarioKind::hamiltonian_first(), -3.0, 3.0, 64);
        let coarse = ode_residual(&f, &p);
        let (p, f) = run(ScenarioKind::hamiltonian_first(), -3.0, 3.0, 128);
        let fine = ode_residual(&f, &p);
        assert!(coarse.centered / fine.centered >= 3.0, "{coarse:?} {fine:?}");
    }

    #[test]
    fn pushforward_trivial_fields() {
        let tri = Profile::Triangle { center: 0.1, half_width: 0.4 };
        let (p, f) = run(ScenarioKind::ZeroField, -1.0, 1.0, 64);
        let r = pushforward_check(&f, &p, &[tri]).unwrap();
        assert!(r.level_defect < 1e-13 && r.flow_defect < 1e-13, "{r:?}");
        assert_eq!(r.times.len(), 5);

        // Translated nodes miss the kinks of the hat: trapezoid error is
        // at most (slope jump) dx² / 4 per kink.
        let (p, f) = run(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 128);
        let r = pushforward_check(&f, &p, &[tri]).unwrap();
        let dx = f.grid().dx().max(f.dh());
        let bound = 3.0 * (2.0 / 0.4) * dx * dx / 4.0;
        assert!(r.level_defect <= bound && r.flow_defect <= bound, "{r:?}");

        let gauss = Profile::Gaussian { center: 0.0, width: 0.1 };
        let r = pushforward_check(&f, &p, &[gauss]).unwrap();
        assert!(r.level_defect < 1e-12 && r.flow_defect < 1e-12, "{r:?}");
    }

    #[test]
    fn pushforward_rejects_wide_probe() {
        let (p, f) = run(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 32);
        let wide = Profile::Triangle { center: 0.0, half_width: 1.5 };
        assert!(matches!(pushforward_check(&f, &p, &[wide]), Err(Error::Support(_))));
    }

    #[test]
    fn identity_modulus_is_one_third_with_declared_constants() {
        let (_, f) = run(ScenarioKind::ZeroField, -2.0, 2.0, 32);
        let k = Region { t_a: 0.1, t_b: 0.9, x_a: -0.9, x_b: 0.9 };
        let m = flow_modulus(&f, &k, 3.0, 1.0, 1000, 7);
        assert!((m.ratio - 1.0 / 3.0).abs() < 1e-12, "{m:?}");
        assert_eq!(m.random_pairs, 1000);
    }

    #[test]
    fn translation_modulus_attains_one_along_characteristics() {
        let (_, f) = run(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 32);
        let k = Region { t_a: 0.1, t_b: 0.9, x_a: -0.9, x_b: 0.9 };
        let m = flow_modulus(&f, &k, 1.0, 1.0, 1000, 7);
        assert!(m.ratio <= 1.0 + 1e-12 && m.ratio > 1.0 - 1e-12, "{m:?}");
    }
}

//! Independent solvers used to cross-check the pushforward solution: a
//! conservative first-order upwind scheme and RK4 characteristics.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_kit::{AnalyticHamiltonian, Generator, InitialDatum, NearIncompressiblePair, SampledField};
use crate::transport::{SolutionSource, TransportSolution};

/// Largest Courant number used by the upwind scheme.
pub const CFL: f64 = 0.9;

/// First-order upwind finite volumes on node-centred cells.
///
/// Each scenario step is split into sub-steps with `b_max Δt_fv <= CFL Δx`.
/// Face velocities are interpolated at face midpoints in space and at the
/// sub-step midpoint in time; ghost cells copy their neighbour.
pub fn fv_upwind_solve(pair: &NearIncompressiblePair, datum: &InitialDatum) -> Result<TransportSolution> {
    if !datum.is_bounded() {
        return Err(Error::OraclePrecondition("upwind oracle needs bounded data".into()));
    }
    let g = *pair.grid();
    let (nt, nx, dt, dx) = (g.nt(), g.nx(), g.dt(), g.dx());
    let b = pair.velocity();
    let b_max = pair.b_max();
    let substeps = if b_max > 0.0 { ((b_max * dt) / (CFL * dx)).ceil().max(1.0) as usize } else { 1 };
    let h = dt / substeps as f64;

    let mut cells: Vec<f64> = (0..=nx)
        .map(|j| {
            let x = g.x(j);
            datum.clipped_integral(x - 0.5 * dx, x + 0.5 * dx) / dx
        })
        .collect();
    let mut values = Vec::with_capacity(g.node_count());
    values.extend_from_slice(&cells);
    let mut flux = vec![0.0; nx + 2];
    let mut faces = vec![0.0; nx + 2];
    for i in 0..nt {
        for s in 0..substeps {
            if b_max == 0.0 {
                break;
            }
            let t_mid = g.t(i) + (s as f64 + 0.5) * h;
            faces.iter_mut().enumerate().for_each(|(f, v)| {
                *v = b.eval(t_mid, g.x_min() + (f as f64 - 0.5) * dx);
            });
            for f in 0..=nx + 1 {
                let left = cells[f.saturating_sub(1)];
                let right = cells[f.min(nx)];
                let v = faces[f];
                flux[f] = v.max(0.0) * left + v.min(0.0) * right;
            }
            for j in 0..=nx {
                cells[j] -= h / dx * (flux[j + 1] - flux[j]);
            }
        }
        values.extend_from_slice(&cells);
    }
    let u = SampledField::new(g, values)?;
    Ok(TransportSolution::new(u, datum.clone(), SolutionSource::FvUpwind { substeps }))
}

/// RK4 trajectory of `γ' = b(t, γ)` with `b = -∂t H / ∂x H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
}

impl Trajectory {
    pub fn end(&self) -> f64 {
        *self.x.last().expect("trajectory has a start point")
    }
}

fn rk4_step(gen: &Generator, t: f64, x: f64, h: f64) -> f64 {
    let k1 = gen.velocity(t, x);
    let k2 = gen.velocity(t + 0.5 * h, x + 0.5 * h * k1);
    let k3 = gen.velocity(t + 0.5 * h, x + 0.5 * h * k2);
    let k4 = gen.velocity(t + h, x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Classical RK4 from `(0, x0)` to `t_end` in `n_steps` equal steps.
pub fn integrate_characteristics(gen: &Generator, x0: f64, t_end: f64, n_steps: usize) -> Trajectory {
    let n = n_steps.max(1);
    let h = t_end / n as f64;
    let mut t = Vec::with_capacity(n + 1);
    let mut x = Vec::with_capacity(n + 1);
    t.push(0.0);
    x.push(x0);
    let mut cur = x0;
    for k in 0..n {
        cur = rk4_step(gen, k as f64 * h, cur, h);
        t.push((k + 1) as f64 * h);
        x.push(cur);
    }
    Trajectory { t, x }
}

/// Integrates `(γ, log J)` backward from `(t, x)` to time zero, where
/// `d log J / ds = ∂x b(s, γ)`. Returns `(γ(0), log J(t) - log J(0))`.
fn trace_back(gen: &Generator, t: f64, x: f64, n_steps: usize) -> (f64, f64) {
    if t == 0.0 || n_steps == 0 {
        return (x, 0.0);
    }
    let h = -t / n_steps as f64;
    let rhs = |s: f64, y: f64| (gen.velocity(s, y), gen.velocity_dx(s, y));
    let (mut s, mut y, mut l) = (t, x, 0.0);
    for _ in 0..n_steps {
        let (a1, m1) = rhs(s, y);
        let (a2, m2) = rhs(s + 0.5 * h, y + 0.5 * h * a1);
        let (a3, m3) = rhs(s + 0.5 * h, y + 0.5 * h * a2);
        let (a4, m4) = rhs(s + h, y + h * a3);
        y += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        l += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
        s += h;
    }
    // l accumulated ∫_t^0 ∂x b ds = -∫_0^t ∂x b ds.
    (y, -l)
}

/// `u(t, x) = ū(γ(0)) exp(-∫_0^t ∂x b(s, γ(s)) ds)` along the backward
/// characteristic through each node.
pub fn characteristics_solve(
    pair: &NearIncompressiblePair,
    datum: &InitialDatum,
    steps_per_unit_time: usize,
) -> Result<TransportSolution> {
    let gen = pair
        .generator()
        .copied()
        .ok_or_else(|| Error::OraclePrecondition("characteristics oracle needs an analytic generator".into()))?;
    let g = *pair.grid();
    let mut values = vec![0.0; g.node_count()];
    values.par_chunks_mut(g.nx() + 1).enumerate().for_each(|(i, row)| {
        let t = g.t(i);
        let n = (t * steps_per_unit_time as f64).ceil() as usize;
        for (j, out) in row.iter_mut().enumerate() {
            let (y0, growth) = trace_back(&gen, t, g.x(j), n);
            *out = datum.clipped(y0) * (-growth).exp();
        }
    });
    let u = SampledField::new(g, values)?;
    Ok(TransportSolution::new(u, datum.clone(), SolutionSource::Characteristics { steps_per_unit_time }))
}

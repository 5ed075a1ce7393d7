use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solve_cauchy;
use crate::error::{Error, Result};
use crate::field_kit::{InitialDatum, NearIncompressiblePair};
use crate::flow::FlowMap;
use crate::hamiltonian::{mollify, HamiltonianField};
use crate::profile::Profile;
use crate::quadrature::trapezoid;

/// Inputs of the mollified-test-function probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSetup {
    /// Decreasing kernel radii.
    pub eps: Vec<f64>,
    /// Observation time, in `(T/2, T - max eps)`.
    pub tau: f64,
    /// Level profile `f`; the test function is `φ_ε = f(H_ε)`.
    pub level: Profile,
    pub datum: InitialDatum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub eps: f64,
    /// `|∫_{t_s}^τ ∫ u (∂t φ_ε + b ∂x φ_ε)|`, where `t_s` is the first grid
    /// time at which `H_ε` is available.
    pub d: f64,
    /// `|∫ u(τ) φ_ε(τ) - ∫ u(t_s) φ_ε(t_s)|`.
    pub boundary_gap: f64,
}

/// Tabulates `D(ε)` for each radius; the solution is obtained with
/// [`solve_cauchy`] from `setup.datum`.
pub fn uniqueness_probe(
    pair: &NearIncompressiblePair,
    h: &HamiltonianField,
    flow: &FlowMap,
    setup: &ProbeSetup,
) -> Result<Vec<DecayRow>> {
    let g = *pair.grid();
    let t_final = g.t_final();
    if setup.eps.is_empty() || setup.eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps list must be nonempty and strictly decreasing".into()));
    }
    let largest = setup.eps[0];
    if !(setup.tau > 0.5 * t_final && setup.tau < t_final - largest) {
        return Err(Error::InvalidParameter(format!(
            "tau = {} must lie in (T/2, T - max eps) = ({}, {})",
            setup.tau,
            0.5 * t_final,
            t_final - largest
        )));
    }
    let sol = solve_cauchy(pair, flow, &setup.datum)?;
    let u = sol.u();
    let b = pair.velocity();
    let f = setup.level;
    let (la, lb) = f.support();
    let i_tau = g.nearest_time_index(setup.tau);

    setup
        .eps
        .par_iter()
        .map(|&eps| {
            let he = mollify(h, eps)?;
            let (r0, r1) = he.rows();
            let (c0, c1) = he.cols();
            if i_tau <= r0 || i_tau > r1 {
                return Err(Error::InvalidParameter(format!("tau outside the mollified window for eps = {eps}")));
            }
            for i in r0..=i_tau {
                let (lo, hi) = (he.at(i, c0), he.at(i, c1));
                if la <= lo || lb >= hi {
                    return Err(Error::Support(format!(
                        "level support [{la}, {lb}] reaches the window of H_eps at t = {} (eps = {eps})",
                        g.t(i)
                    )));
                }
            }
            let dx = g.dx();
            let rows: Vec<f64> = (r0..=i_tau)
                .map(|i| {
                    let integrand: Vec<f64> = (c0..=c1)
                        .map(|j| {
                            let df = f.derivative(he.at(i, j));
                            u.at(i, j) * df * (he.dt(i, j) + b.at(i, j) * he.dx(i, j))
                        })
                        .collect();
                    trapezoid(&integrand, dx)
                })
                .collect();
            let d = trapezoid(&rows, g.dt()).abs();
            let pairing = |i: usize| {
                let v: Vec<f64> = (c0..=c1).map(|j| u.at(i, j) * f.value(he.at(i, j))).collect();
                trapezoid(&v, dx)
            };
            let boundary_gap = (pairing(i_tau) - pairing(r0)).abs();
            Ok(DecayRow { eps, d, boundary_gap })
        })
        .collect()
}

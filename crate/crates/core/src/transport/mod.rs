//! Cauchy problem by pushforward along the flow, and weak-form diagnostics.

mod cross;
mod probe;

use rayon::prelude::*;
use serde::Serialize;

pub use cross::{cross_validate, refinement_study, CrossValidation, OracleKind, RefinementStudy};
pub use probe::{uniqueness_probe, DecayRow, ProbeSetup};

use crate::error::{Error, Result};
use crate::field_kit::{InitialDatum, NearIncompressiblePair, SampledField, SpaceTimeGrid};
use crate::flow::FlowMap;
use crate::hamiltonian::HamiltonianField;
use crate::profile::{Profile, TensorTest, TimeProfile};
use crate::quadrature::trapezoid;

/// Which solver produced a [`TransportSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum SolutionSource {
    Pushforward,
    FvUpwind { substeps: usize },
    Characteristics { steps_per_unit_time: usize },
}

/// Sampled solution `u(t_i, x_j)` of the continuity equation.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    u: SampledField,
    datum: InitialDatum,
    source: SolutionSource,
    mass_window: (f64, f64),
}

impl TransportSolution {
    pub(crate) fn new(u: SampledField, datum: InitialDatum, source: SolutionSource) -> Self {
        let g = *u.grid();
        Self { u, datum, source, mass_window: (g.x_min(), g.x_max()) }
    }

    pub fn u(&self) -> &SampledField {
        &self.u
    }
    pub fn grid(&self) -> &SpaceTimeGrid {
        self.u.grid()
    }
    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }
    pub fn source(&self) -> SolutionSource {
        self.source
    }
    pub fn mass_window(&self) -> (f64, f64) {
        self.mass_window
    }

    /// `∫ u(t_i, x) dx` over the mass window.
    pub fn mass(&self, i: usize) -> f64 {
        trapezoid(self.u.slice(i), self.grid().dx())
    }

    /// `max_i |mass(i) - mass(0)|`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass(0);
        (0..=self.grid().nt()).map(|i| (self.mass(i) - m0).abs()).fold(0.0, f64::max)
    }

    /// `∫ |u(t_i) - v(t_i)|` over `[lo, hi]` by trapezoid on the nodes.
    pub fn l1_distance(&self, other: &TransportSolution, i: usize, lo: f64, hi: f64) -> f64 {
        let g = self.grid();
        let diff: Vec<f64> = (0..=g.nx())
            .map(|j| {
                let x = g.x(j);
                if x < lo - 1e-12 || x > hi + 1e-12 {
                    0.0
                } else {
                    (self.u.at(i, j) - other.u.at(i, j)).abs()
                }
            })
            .collect();
        trapezoid(&diff, g.dx())
    }
}

fn check_datum_support(pair: &NearIncompressiblePair, datum: &InitialDatum) -> Result<()> {
    if let Some((a, b)) = datum.support() {
        if a < b {
            let (lo, hi) = pair
                .padded_window()
                .ok_or_else(|| Error::Support("padded region is empty".into()))?;
            if a < lo || b > hi {
                return Err(Error::Support(format!(
                    "datum support [{a}, {b}] escapes padded region [{lo}, {hi}]"
                )));
            }
        }
    }
    Ok(())
}

/// `u(t, x) = ū(X⁻¹(t, x)) ρ(t, x) / ρ(0, X⁻¹(t, x))`.
///
/// Data with unbounded support are accepted; where `X⁻¹` leaves the
/// window the time-zero slice is continued linearly, matching the constant
/// extension of `ρ`.
pub fn solve_cauchy(pair: &NearIncompressiblePair, flow: &FlowMap, datum: &InitialDatum) -> Result<TransportSolution> {
    check_datum_support(pair, datum)?;
    let g = *pair.grid();
    if g != *flow.grid() {
        return Err(Error::InvalidGrid("flow and pair live on different grids".into()));
    }
    let rho = pair.density();
    let start = flow.hamiltonian().slice(0);
    let mut values = vec![0.0; g.node_count()];
    values.par_chunks_mut(g.nx() + 1).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            let y = flow.xinv_at(i, j).unwrap_or_else(|| start.invert_extended(flow.hamiltonian().at(i, j)));
            *out = datum.clipped(y) * rho.at(i, j) / rho.eval_at_slice(0, y);
        }
    });
    let u = SampledField::new(g, values)?;
    Ok(TransportSolution::new(u, datum.clone(), SolutionSource::Pushforward))
}

/// Five polynomial bumps across the padded region, kept two cells off the
/// window edge, with the time factor `1 - t/T`.
pub fn default_test_suite(pair: &NearIncompressiblePair) -> Result<Vec<TensorTest>> {
    let (lo, hi) = pair
        .padded_window()
        .ok_or_else(|| Error::Support("padded region is empty".into()))?;
    let dx = pair.grid().dx();
    let (lo, hi) = (lo.max(pair.grid().x_min() + 2.0 * dx), hi.min(pair.grid().x_max() - 2.0 * dx));
    if !(hi > lo) {
        return Err(Error::Support("padded region is narrower than four cells".into()));
    }
    let half_width = (hi - lo) / 8.0;
    let time = TimeProfile::LinearDecay { t_end: pair.grid().t_final() };
    Ok(TensorTest::bump_family(5, lo, hi, half_width, time))
}

/// `|∫∫ u (∂t φ + b ∂x φ) + ∫ ū φ(0, .)|` for each test, by trapezoid
/// quadrature in space and time.
pub fn weak_residual(sol: &TransportSolution, pair: &NearIncompressiblePair, tests: &[TensorTest]) -> Result<Vec<f64>> {
    let g = *sol.grid();
    for (k, test) in tests.iter().enumerate() {
        let (a, b) = test.space.support();
        if a <= g.x_min() + g.dx() || b >= g.x_max() - g.dx() {
            return Err(Error::Support(format!("test {k} does not vanish near the window boundary")));
        }
        if test.time.t_end() > g.t_final() {
            return Err(Error::Support(format!("test {k} does not vanish before T")));
        }
    }
    let b = pair.velocity();
    let u = sol.u();
    Ok(tests
        .par_iter()
        .map(|test| {
            let rows: Vec<f64> = (0..=g.nt())
                .map(|i| {
                    let t = g.t(i);
                    let integrand: Vec<f64> = (0..=g.nx())
                        .map(|j| {
                            let x = g.x(j);
                            u.at(i, j) * (test.dt(t, x) + b.at(i, j) * test.dx(t, x))
                        })
                        .collect();
                    trapezoid(&integrand, g.dx())
                })
                .collect();
            let bulk = trapezoid(&rows, g.dt());
            let initial: Vec<f64> = (0..=g.nx()).map(|j| u.at(0, j) * test.value(0.0, g.x(j))).collect();
            (bulk + trapezoid(&initial, g.dx())).abs()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableReport {
    /// Node times actually used.
    pub times: Vec<f64>,
    /// `I(τ) = ∫ u(τ, x) f(H(τ, x)) dx`.
    pub values: Vec<f64>,
    /// `∫ ū(x) f(H(0, x)) dx`.
    pub target: f64,
    pub drift: f64,
}

/// The level observable `∫ u(τ) f(H(τ))`, which is time-invariant for
/// solutions of the continuity equation.
pub fn conserved_observable(sol: &TransportSolution, h: &HamiltonianField, f: &Profile, times: &[f64]) -> Result<ObservableReport> {
    let g = *sol.grid();
    if g != *h.grid() {
        return Err(Error::InvalidGrid("solution and Hamiltonian live on different grids".into()));
    }
    let (a, b) = f.support();
    let observe = |i: usize, u_row: &dyn Fn(usize) -> f64| -> Result<f64> {
        let (lo, hi) = h.range(i);
        if a < lo || b > hi {
            return Err(Error::Support(format!(
                "level support [{a}, {b}] outside realized range [{lo}, {hi}] at t = {}",
                g.t(i)
            )));
        }
        let integrand: Vec<f64> = (0..=g.nx()).map(|j| u_row(j) * f.value(h.at(i, j))).collect();
        Ok(trapezoid(&integrand, g.dx()))
    };
    let datum = sol.datum();
    let target = observe(0, &|j| datum.clipped(g.x(j)))?;
    let mut used = Vec::with_capacity(times.len());
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let i = g.nearest_time_index(t);
        used.push(g.t(i));
        values.push(observe(i, &|j| sol.u().at(i, j))?);
    }
    let drift = values.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
    Ok(ObservableReport { times: used, values, target, drift })
}

#[cfg(test)]
mod tests;

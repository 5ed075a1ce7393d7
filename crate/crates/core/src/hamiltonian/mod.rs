//! The Hamiltonian `H` of a pair: `∂x H = rho`, `∂t H = -rho b`,
//! normalized by `H(0, x_min) = 0`.

mod cone;
mod mollify;
mod slice;

use std::borrow::Cow;

use serde::Serialize;

pub use cone::{cone_bound_check, ConeReport, ConeSample};
pub use mollify::{mollify, standard_bump, MollifiedHamiltonian, MollifyReport};
pub use slice::Slice;

use crate::error::{Error, Result};
use crate::field_kit::{validate_pair, NearIncompressiblePair, SampledField, SpaceTimeGrid, Tolerances};
use crate::quadrature::cumulative_trapezoid;
use crate::report::Diagnostic;

#[derive(Debug, Clone)]
pub struct HamiltonianField {
    values: SampledField,
    density: SampledField,
    c1: f64,
    c2: f64,
    b_max: f64,
    diagnostics: HamiltonianDiagnostics,
}

/// Slope scan and path-independence defect recorded by [`build_hamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamiltonianDiagnostics {
    pub min_x_slope: f64,
    pub max_x_slope: f64,
    pub max_abs_t_slope: f64,
    /// `max |D_x(-∫ rho b dt) - (rho(t,.) - rho(0,.))|` over interior nodes.
    pub path_independence_defect: f64,
}

impl HamiltonianDiagnostics {
    pub fn records(&self, c1: f64, c2: f64, b_max: f64, tol: f64) -> Vec<Diagnostic> {
        vec![
            Diagnostic::at_least("hamiltonian.min_x_slope", self.min_x_slope, c1 - tol),
            Diagnostic::at_most("hamiltonian.max_x_slope", self.max_x_slope, c2 + tol),
            Diagnostic::at_most("hamiltonian.max_abs_t_slope", self.max_abs_t_slope, c2 * b_max + tol),
            Diagnostic::info("hamiltonian.path_independence_defect", self.path_independence_defect),
        ]
    }
}

impl HamiltonianField {
    pub fn grid(&self) -> &SpaceTimeGrid {
        self.values.grid()
    }
    pub fn values(&self) -> &SampledField {
        &self.values
    }
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values.at(i, j)
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn b_max(&self) -> f64 {
        self.b_max
    }
    pub fn diagnostics(&self) -> &HamiltonianDiagnostics {
        &self.diagnostics
    }

    /// Lipschitz constant of `H` in space-time implied by the slope bounds.
    pub fn lipschitz(&self) -> f64 {
        self.c2.max(self.c2 * self.b_max)
    }

    /// Time slice `i` as a monotone interpolant.
    pub fn slice(&self, i: usize) -> Slice<'_> {
        let g = self.grid();
        Slice::new(
            Cow::Borrowed(self.values.slice(i)),
            Cow::Borrowed(self.density.slice(i)),
            g.x_min(),
            g.dx(),
        )
    }

    /// Slice at an arbitrary time, linear in `t` between node slices.
    pub fn slice_at(&self, t: f64) -> Slice<'_> {
        let g = self.grid();
        let (i, a) = g.locate_t(t);
        if a == 0.0 {
            return self.slice(i);
        }
        if a == 1.0 {
            return self.slice(i + 1);
        }
        let blend = |f: &SampledField| -> Vec<f64> {
            f.slice(i)
                .iter()
                .zip(f.slice(i + 1))
                .map(|(p, q)| (1.0 - a) * p + a * q)
                .collect()
        };
        Slice::new(blend(&self.values).into(), blend(&self.density).into(), g.x_min(), g.dx())
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.slice_at(t).eval(x)
    }

    /// `[H(t_i, x_min), H(t_i, x_max)]`.
    pub fn range(&self, i: usize) -> (f64, f64) {
        let s = self.values.slice(i);
        (s[0], s[s.len() - 1])
    }
}

/// Integrates the Hamiltonian of a validated pair.
///
/// `H(0, .)` is the cumulative trapezoid integral of `rho(0, .)` from
/// `x_min`; every column is then integrated in time with the trapezoid rule
/// applied to `-rho b`.
pub fn build_hamiltonian(pair: &NearIncompressiblePair, tol: &Tolerances) -> Result<HamiltonianField> {
    let report = validate_pair(pair, tol.continuity);
    if !report.pass {
        return Err(Error::InvalidField(format!(
            "pair failed validation: residual {} (tol {}), bounds hold: {}",
            report.continuity_residual, tol.continuity, report.bounds_hold
        )));
    }
    let g = *pair.grid();
    let (nt, nx) = (g.nt(), g.nx());
    let (dt, dx) = (g.dt(), g.dx());
    let rho = pair.density();
    let flux = rho.product(pair.velocity())?;

    let h0 = cumulative_trapezoid(rho.slice(0), dx);
    // transport[i][j] = ∫_0^{t_i} (rho b)(s, x_j) ds
    let mut transport = vec![0.0; g.node_count()];
    for j in 0..=nx {
        let mut acc = 0.0;
        for i in 1..=nt {
            acc += 0.5 * dt * (flux.at(i - 1, j) + flux.at(i, j));
            transport[i * (nx + 1) + j] = acc;
        }
    }
    let values: Vec<f64> = (0..=nt)
        .flat_map(|i| {
            let h0 = &h0;
            let transport = &transport;
            (0..=nx).map(move |j| h0[j] - transport[i * (nx + 1) + j])
        })
        .collect();
    let values = SampledField::new(g, values)?;

    let mut path_defect = 0.0_f64;
    for i in 1..=nt {
        for j in 1..nx {
            let dgx = -(transport[i * (nx + 1) + j + 1] - transport[i * (nx + 1) + j - 1]) / (2.0 * dx);
            path_defect = path_defect.max((dgx - (rho.at(i, j) - rho.at(0, j))).abs());
        }
    }

    let (c1, c2, b_max) = (pair.c1(), pair.c2(), pair.b_max());
    let mut diag = HamiltonianDiagnostics {
        min_x_slope: f64::INFINITY,
        max_x_slope: f64::NEG_INFINITY,
        max_abs_t_slope: 0.0,
        path_independence_defect: path_defect,
    };
    for i in 0..=nt {
        for j in 0..nx {
            let s = (values.at(i, j + 1) - values.at(i, j)) / dx;
            diag.min_x_slope = diag.min_x_slope.min(s);
            diag.max_x_slope = diag.max_x_slope.max(s);
            if s < c1 - tol.slope || s > c2 + tol.slope {
                return Err(Error::SlopeViolation {
                    i,
                    j,
                    detail: format!("x-slope {s} outside [{}, {}]", c1 - tol.slope, c2 + tol.slope),
                });
            }
        }
    }
    let t_bound = c2 * b_max + tol.slope;
    for i in 0..nt {
        for j in 0..=nx {
            let s = (values.at(i + 1, j) - values.at(i, j)) / dt;
            diag.max_abs_t_slope = diag.max_abs_t_slope.max(s.abs());
            if s.abs() > t_bound {
                return Err(Error::SlopeViolation {
                    i,
                    j,
                    detail: format!("t-slope {s} exceeds {t_bound}"),
                });
            }
        }
    }

    Ok(HamiltonianField { values, density: rho.clone(), c1, c2, b_max, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_kit::{build_scenario, AnalyticHamiltonian, ScenarioKind};

    fn build(kind: ScenarioKind, x_min: f64, x_max: f64, n: usize) -> (NearIncompressiblePair, HamiltonianField) {
        let g = SpaceTimeGrid::new(1.0, x_min, x_max, n, n).unwrap();
        let pair = build_scenario(&kind, g).unwrap();
        let h = build_hamiltonian(&pair, &Tolerances::default()).unwrap();
        (pair, h)
    }

    #[test]
    fn zero_field_is_shifted_identity() {
        let (_, h) = build(ScenarioKind::ZeroField, -1.0, 1.0, 8);
        let g = *h.grid();
        for i in 0..=8 {
            for j in 0..=8 {
                assert!((h.at(i, j) - (g.x(j) + 1.0)).abs() < 1e-14);
            }
        }
        assert_eq!(h.at(0, 0), 0.0);
    }

    #[test]
    fn constant_field_is_affine() {
        let (_, h) = build(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 8);
        let g = *h.grid();
        for i in 0..=8 {
            for j in 0..=8 {
                assert!((h.at(i, j) - (g.x(j) + 2.0 - g.t(i))).abs() < 1e-14);
            }
        }
    }

    fn generator_error(n: usize) -> f64 {
        let kind = ScenarioKind::hamiltonian_first();
        let (_, h) = build(kind, -3.0, 3.0, n);
        let gen = kind.generator();
        let g = *h.grid();
        let base = gen.value(0.0, g.x_min());
        let mut err = 0.0_f64;
        for i in 0..=n {
            for j in 0..=n {
                err = err.max((h.at(i, j) - (gen.value(g.t(i), g.x(j)) - base)).abs());
            }
        }
        err
    }

    #[test]
    fn matches_generator_to_second_order() {
        let (e1, e2) = (generator_error(64), generator_error(128));
        assert!(e1 < 1e-2);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn reference_wave_slopes_within_bounds() {
        let (pair, h) = build(ScenarioKind::hamiltonian_first(), -3.0, 3.0, 256);
        let d = h.diagnostics();
        assert!(d.min_x_slope >= pair.c1() - 1e-6);
        assert!(d.max_x_slope <= pair.c2() + 1e-6);
        assert!(d.max_abs_t_slope <= pair.c2() * pair.b_max() + 1e-6);
        assert!(d.path_independence_defect < 1e-3);
    }

    #[test]
    fn rejects_pair_violating_continuity() {
        let g = SpaceTimeGrid::new(1.0, -1.0, 1.0, 16, 16).unwrap();
        let b = SampledField::from_fn(g, |_, x| x).unwrap();
        let rho = SampledField::constant(g, 1.0).unwrap();
        let pair = NearIncompressiblePair::from_samples(b, rho).unwrap();
        assert!(build_hamiltonian(&pair, &Tolerances::default()).is_err());
    }

    #[test]
    fn slice_between_nodes_is_monotone() {
        let (_, h) = build(ScenarioKind::hamiltonian_first(), -3.0, 3.0, 32);
        let s = h.slice_at(0.37);
        let vals: Vec<f64> = (0..200).map(|k| s.eval(-3.0 + 0.03 * k as f64)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        let x = s.invert(s.eval(0.4)).unwrap();
        assert!((x - 0.4).abs() < 1e-12);
    }
}

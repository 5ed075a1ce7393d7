//! Level-set trajectories `Y(t, h)` with `H(t, Y(t, h)) = h`, the flow
//! `X(t, x) = Y(t, H(0, x))` and its inverse `X⁻¹(t, x) = Y(0, H(t, x))`.

mod checks;

use rayon::prelude::*;
use serde::Serialize;

pub use checks::{
    flow_modulus, ode_residual, pushforward_check, quarter_times, FlowModulus, OdeResidual, PushforwardReport, Region,
};

use crate::error::{Error, Result};
use crate::field_kit::{SpaceTimeGrid, Tolerances};
use crate::hamiltonian::HamiltonianField;

/// Solves `H(t, x) = h` for `x` inside the window.
pub fn invert_in_x(h: &HamiltonianField, t: f64, level: f64) -> Result<f64> {
    let slice = h.slice_at(t);
    slice.invert(level).ok_or_else(|| {
        let (lo, hi) = slice.range();
        Error::LevelOutOfRange { t, h: level, lo, hi }
    })
}

/// Tables of the regular Lagrangian flow built from a Hamiltonian.
///
/// `X` and `X⁻¹` are `NaN` at nodes whose trajectory leaves the window;
/// use [`FlowMap::x_at`] / [`FlowMap::xinv_at`] for checked access.
#[derive(Debug, Clone)]
pub struct FlowMap {
    hamiltonian: HamiltonianField,
    grid: SpaceTimeGrid,
    c1: f64,
    c2: f64,
    b_max: f64,
    h_lo: f64,
    h_hi: f64,
    nh: usize,
    y: Vec<f64>,
    x: Vec<f64>,
    xinv: Vec<f64>,
    diagnostics: FlowDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowDiagnostics {
    /// `max |H(t, X(t,x)) - H(0,x)|`.
    pub defining_residual: f64,
    /// `max |X(0,x) - x|`.
    pub identity_defect: f64,
    /// Largest `|ΔY| / Δh` over adjacent levels.
    pub h_lipschitz: f64,
    /// Largest `|ΔY| / Δt` over adjacent times.
    pub t_lipschitz: f64,
    pub min_quotient: f64,
    pub max_quotient: f64,
    /// Compression constant `L`: sup of the density of `X(t,.)# Lebesgue`.
    pub compression: f64,
    /// `max |X⁻¹(t, X(t, x)) - x|`.
    pub inverse_defect: f64,
}

impl FlowMap {
    /// The Hamiltonian the tables were built from.
    pub fn hamiltonian(&self) -> &HamiltonianField {
        &self.hamiltonian
    }
    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
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
    pub fn diagnostics(&self) -> &FlowDiagnostics {
        &self.diagnostics
    }
    pub fn compression(&self) -> f64 {
        self.diagnostics.compression
    }

    /// Level range `[h_lo, h_hi]` realized at every time slice.
    pub fn level_range(&self) -> (f64, f64) {
        (self.h_lo, self.h_hi)
    }
    /// Number of level cells; there are `nh + 1` levels.
    pub fn nh(&self) -> usize {
        self.nh
    }
    pub fn dh(&self) -> f64 {
        (self.h_hi - self.h_lo) / self.nh as f64
    }
    pub fn level(&self, k: usize) -> f64 {
        level_at(self.h_lo, self.h_hi, self.nh, k)
    }

    pub fn y(&self, i: usize, k: usize) -> f64 {
        self.y[i * (self.nh + 1) + k]
    }
    pub fn y_row(&self, i: usize) -> &[f64] {
        &self.y[i * (self.nh + 1)..(i + 1) * (self.nh + 1)]
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.grid.nx() + 1) + j
    }

    pub fn x_at(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.x[self.idx(i, j)];
        (!v.is_nan()).then_some(v)
    }

    pub fn xinv_at(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.xinv[self.idx(i, j)];
        (!v.is_nan()).then_some(v)
    }

    /// Raw `X` row (with `NaN` holes).
    pub fn x_row(&self, i: usize) -> &[f64] {
        let n = self.grid.nx() + 1;
        &self.x[i * n..(i + 1) * n]
    }

    pub fn xinv_row(&self, i: usize) -> &[f64] {
        let n = self.grid.nx() + 1;
        &self.xinv[i * n..(i + 1) * n]
    }

    /// `Y(t_i, level)` by linear interpolation in the level table.
    pub fn y_interpolated(&self, i: usize, level: f64) -> Option<f64> {
        if !(level >= self.h_lo && level <= self.h_hi) {
            return None;
        }
        let s = (level - self.h_lo) / self.dh();
        let k = (s.floor() as usize).min(self.nh - 1);
        let a = s - k as f64;
        Some((1.0 - a) * self.y(i, k) + a * self.y(i, k + 1))
    }
}

/// Uniform levels with both endpoints hit exactly.
fn level_at(h_lo: f64, h_hi: f64, nh: usize, k: usize) -> f64 {
    if k == nh {
        h_hi
    } else {
        h_lo + k as f64 * ((h_hi - h_lo) / nh as f64)
    }
}

/// Fills every table by inversion and verifies the flow invariants.
pub fn build_flow(h: &HamiltonianField, tol: &Tolerances) -> Result<FlowMap> {
    let g = *h.grid();
    let (nt, nx) = (g.nt(), g.nx());
    let h_lo = (0..=nt).map(|i| h.range(i).0).fold(f64::NEG_INFINITY, f64::max);
    let h_hi = (0..=nt).map(|i| h.range(i).1).fold(f64::INFINITY, f64::min);
    if !(h_hi > h_lo) {
        return Err(Error::LevelOutOfRange { t: g.t_final(), h: h_lo, lo: h_lo, hi: h_hi });
    }
    let nh = nx;

    let mut y = vec![0.0; (nt + 1) * (nh + 1)];
    y.par_chunks_mut(nh + 1).enumerate().try_for_each(|(i, row)| -> Result<()> {
        let slice = h.slice(i);
        for (k, out) in row.iter_mut().enumerate() {
            let level = level_at(h_lo, h_hi, nh, k);
            *out = slice.invert(level).ok_or(Error::FlowInvariant {
                name: "level inversion",
                i,
                j: k,
                value: level,
                bound: h_hi,
            })?;
        }
        Ok(())
    })?;

    let start = h.slice(0);
    let h0 = start.values().to_vec();
    let mut x = vec![f64::NAN; g.node_count()];
    x.par_chunks_mut(nx + 1).enumerate().for_each(|(i, row)| {
        let slice = h.slice(i);
        for (j, out) in row.iter_mut().enumerate() {
            if let Some(v) = slice.invert(h0[j]) {
                *out = v;
            }
        }
    });
    let mut xinv = vec![f64::NAN; g.node_count()];
    xinv.par_chunks_mut(nx + 1).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            if let Some(v) = start.invert(h.at(i, j)) {
                *out = v;
            }
        }
    });

    let mut flow = FlowMap {
        hamiltonian: h.clone(),
        grid: g,
        c1: h.c1(),
        c2: h.c2(),
        b_max: h.b_max(),
        h_lo,
        h_hi,
        nh,
        y,
        x,
        xinv,
        diagnostics: FlowDiagnostics {
            defining_residual: 0.0,
            identity_defect: 0.0,
            h_lipschitz: 0.0,
            t_lipschitz: 0.0,
            min_quotient: f64::INFINITY,
            max_quotient: 0.0,
            compression: 0.0,
            inverse_defect: 0.0,
        },
    };
    flow.diagnostics = verify(&flow, h, tol)?;
    Ok(flow)
}

fn verify(flow: &FlowMap, h: &HamiltonianField, tol: &Tolerances) -> Result<FlowDiagnostics> {
    let g = flow.grid;
    let (nt, nx, nh) = (g.nt(), g.nx(), flow.nh);
    let (c1, c2, b_max) = (flow.c1, flow.c2, flow.b_max);
    let fail = |name, i, j, value, bound| Err(Error::FlowInvariant { name, i, j, value, bound });
    let mut d = flow.diagnostics;

    for i in 0..=nt {
        let slice = h.slice(i);
        for j in 0..=nx {
            if let Some(xv) = flow.x_at(i, j) {
                let r = (slice.eval(xv) - h.at(0, j)).abs();
                d.defining_residual = d.defining_residual.max(r);
                if r > tol.inversion {
                    return fail("defining relation", i, j, r, tol.inversion);
                }
                if let Some(back) = h.slice(0).invert(slice.eval(xv)) {
                    d.inverse_defect = d.inverse_defect.max((back - g.x(j)).abs());
                }
            }
        }
    }
    for j in 0..=nx {
        let e = flow.x_at(0, j).map_or(f64::INFINITY, |v| (v - g.x(j)).abs());
        d.identity_defect = d.identity_defect.max(e);
        if e > tol.inversion {
            return fail("initial identity", 0, j, e, tol.inversion);
        }
    }

    let dh = flow.dh();
    let h_bound = 1.0 / c1 + tol.lipschitz;
    for i in 0..=nt {
        let row = flow.y_row(i);
        for k in 0..nh {
            let q = (row[k + 1] - row[k]).abs() / dh;
            d.h_lipschitz = d.h_lipschitz.max(q);
            if q > h_bound {
                return fail("h-Lipschitz", i, k, q, h_bound);
            }
        }
    }
    let dt = g.dt();
    let t_bound = b_max + tol.lipschitz;
    for i in 0..nt {
        for k in 0..=nh {
            let q = (flow.y(i + 1, k) - flow.y(i, k)).abs() / dt;
            d.t_lipschitz = d.t_lipschitz.max(q);
            if q > t_bound {
                return fail("t-Lipschitz", i, k, q, t_bound);
            }
        }
    }

    let dx = g.dx();
    let (q_lo, q_hi) = (c1 / c2 - tol.lipschitz, c2 / c1 + tol.lipschitz);
    for i in 0..=nt {
        let row = flow.x_row(i);
        for j in 0..nx {
            let (a, b) = (row[j], row[j + 1]);
            if a.is_nan() || b.is_nan() {
                continue;
            }
            let q = (b - a) / dx;
            d.min_quotient = d.min_quotient.min(q);
            d.max_quotient = d.max_quotient.max(q);
            if !(q >= q_lo && q <= q_hi) {
                return fail("monotonicity", i, j, q, if q < q_lo { q_lo } else { q_hi });
            }
        }
    }
    d.compression = 1.0 / d.min_quotient;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_kit::{build_scenario, AnalyticHamiltonian, NearIncompressiblePair, ScenarioKind};
    use crate::hamiltonian::build_hamiltonian;

    fn setup(kind: ScenarioKind, x_min: f64, x_max: f64, n: usize) -> (NearIncompressiblePair, HamiltonianField, FlowMap) {
        let g = SpaceTimeGrid::new(1.0, x_min, x_max, n, n).unwrap();
        let pair = build_scenario(&kind, g).unwrap();
        let tol = Tolerances::default();
        let h = build_hamiltonian(&pair, &tol).unwrap();
        let f = build_flow(&h, &tol).unwrap();
        (pair, h, f)
    }

    #[test]
    fn invert_affine_examples() {
        let (_, h, _) = setup(ScenarioKind::ZeroField, -1.0, 1.0, 8);
        assert!((invert_in_x(&h, 0.7, 1.0).unwrap() - 0.0).abs() < 1e-14);
        let (_, h, _) = setup(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 8);
        assert!((invert_in_x(&h, 0.5, 1.0).unwrap() - (-0.5)).abs() < 1e-14);
        assert!(matches!(invert_in_x(&h, 0.5, 10.0), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn invert_just_evaluated_point() {
        let (_, h, _) = setup(ScenarioKind::hamiltonian_first(), -3.0, 3.0, 64);
        let level = h.eval(0.0, 1.3);
        assert!((invert_in_x(&h, 0.0, level).unwrap() - 1.3).abs() < 1e-13);
    }

    #[test]
    fn identity_flow() {
        let (_, _, f) = setup(ScenarioKind::ZeroField, -1.0, 1.0, 16);
        let g = *f.grid();
        for i in 0..=16 {
            for j in 0..=16 {
                assert!((f.x_at(i, j).unwrap() - g.x(j)).abs() < 1e-14);
                assert!((f.xinv_at(i, j).unwrap() - g.x(j)).abs() < 1e-14);
            }
        }
        assert!((f.compression() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translation_flow() {
        let (_, _, f) = setup(ScenarioKind::ConstantField { velocity: 1.0 }, -2.0, 2.0, 16);
        let g = *f.grid();
        for i in 0..=16 {
            for j in 0..=16 {
                let (t, x) = (g.t(i), g.x(j));
                match f.x_at(i, j) {
                    Some(v) => assert!((v - (x + t)).abs() < 1e-13),
                    None => assert!(x + t > g.x_max() + 1e-12),
                }
                match f.xinv_at(i, j) {
                    Some(v) => assert!((v - (x - t)).abs() < 1e-13),
                    None => assert!(x - t < g.x_min() - 1e-12),
                }
            }
        }
        assert!((f.compression() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_wave_flow_constants() {
        let (pair, h, f) = setup(ScenarioKind::hamiltonian_first(), -3.0, 3.0, 128);
        let d = f.diagnostics();
        assert!(d.compression <= pair.c2() / pair.c1() + 1e-3);
        assert!(d.h_lipschitz <= 1.0 / pair.c1() + 1e-3);
        assert!(d.t_lipschitz <= pair.b_max() + 1e-3);
        assert!(d.defining_residual <= 1e-10);
        assert!(d.inverse_defect <= 2e-10);
        // Two representations of X agree: direct inversion and the Y table.
        for i in [0, 40, 128] {
            for j in (40..=88).step_by(8) {
                let direct = f.x_at(i, j).unwrap();
                let via_table = f.y_interpolated(i, h.at(0, j)).unwrap();
                assert!((direct - via_table).abs() < 1e-3);
            }
        }
        // Flow endpoint against the closed-form level set H(1, X) = H(0, 0).
        let gen = ScenarioKind::hamiltonian_first().generator();
        let target = gen.value(0.0, 0.0);
        let mut lo = -1.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gen.value(1.0, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((f.x_at(128, 64).unwrap() - lo).abs() < 1e-3);
    }
}

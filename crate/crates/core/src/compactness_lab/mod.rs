//! Families of flows under uniform density and velocity bounds, their
//! common modulus of continuity and sup-norm clustering.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_kit::{from_hamiltonian, Generator, NearIncompressiblePair, SpaceTimeGrid, Tolerances};
use crate::flow::{build_flow, flow_modulus, FlowMap, Region};
use crate::hamiltonian::build_hamiltonian;

/// Default seed for the random diagonal pairs of the modulus scan.
pub const MODULUS_SEED: u64 = 0x5eed;
/// Random diagonal pairs per member in the modulus scan.
pub const RANDOM_PAIRS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Member {
    pub n: u32,
    pub pair: NearIncompressiblePair,
    pub flow: FlowMap,
}

/// Members sharing one grid and one set of declared constants.
#[derive(Debug, Clone)]
pub struct FlowFamily {
    members: Vec<Member>,
    region: Region,
    c1: f64,
    c2: f64,
    b_max: f64,
}

impl FlowFamily {
    /// Builds every flow; `labels[k]` tags `pairs[k]`.
    pub fn from_pairs(
        labels: &[u32],
        pairs: Vec<NearIncompressiblePair>,
        (c1, c2, b_max): (f64, f64, f64),
        tol: &Tolerances,
    ) -> Result<Self> {
        if pairs.is_empty() || labels.len() != pairs.len() {
            return Err(Error::InvalidParameter("family needs one label per member and at least one member".into()));
        }
        let g = *pairs[0].grid();
        if pairs.iter().any(|p| *p.grid() != g) {
            return Err(Error::InvalidGrid("family members must share a grid".into()));
        }
        let members = labels
            .par_iter()
            .zip(pairs)
            .map(|(&n, pair)| {
                let h = build_hamiltonian(&pair, tol)?;
                let flow = build_flow(&h, tol)?;
                Ok(Member { n, pair, flow })
            })
            .collect::<Result<Vec<_>>>()?;
        let t = g.t_final();
        let margin = b_max * t + 0.1;
        let region = Region { t_a: 0.1 * t, t_b: 0.9 * t, x_a: g.x_min() + margin, x_b: g.x_max() - margin };
        if !(region.x_b > region.x_a) {
            return Err(Error::InvalidGrid(format!("window too narrow for the evaluation set; need width > {}", 2.0 * margin)));
        }
        Ok(Self { members, region, c1, c2, b_max })
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }
    /// Evaluation set `K`.
    pub fn region(&self) -> Region {
        self.region
    }
    pub fn constants(&self) -> (f64, f64, f64) {
        (self.c1, self.c2, self.b_max)
    }
    pub fn grid(&self) -> &SpaceTimeGrid {
        self.members[0].pair.grid()
    }

    fn k_nodes(&self) -> (Vec<usize>, Vec<usize>) {
        let g = self.grid();
        let k = self.region;
        let rows = (0..=g.nt()).filter(|&i| g.t(i) >= k.t_a - 1e-12 && g.t(i) <= k.t_b + 1e-12).collect();
        let cols = (0..=g.nx()).filter(|&j| g.x(j) >= k.x_a - 1e-12 && g.x(j) <= k.x_b + 1e-12).collect();
        (rows, cols)
    }

    fn sup_on_k(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let (rows, cols) = self.k_nodes();
        let mut sup = 0.0_f64;
        for &i in &rows {
            for &j in &cols {
                sup = sup.max(f(i, j));
            }
        }
        sup
    }

    fn x_on_k(&self, m: usize, i: usize, j: usize) -> f64 {
        self.members[m].flow.x_at(i, j).unwrap_or(f64::NAN)
    }

    /// `sup_K |X_a - X_b|`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.sup_on_k(|i, j| {
            let d = (self.x_on_k(a, i, j) - self.x_on_k(b, i, j)).abs();
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
    }

    /// `sup_K |X_m(t, x) - x|`.
    pub fn distance_to_identity(&self, m: usize) -> f64 {
        let g = *self.grid();
        self.sup_on_k(|i, j| {
            let d = (self.x_on_k(m, i, j) - g.x(j)).abs();
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
    }
}

/// The family `H_n = x + sin(n (x - t)) / (2n)`, with `n = 0` the identity.
/// Declared constants `C1 = 1/2`, `C2 = 3/2`, `b_max = 1`.
///
/// Member Hamiltonians are gated with the Lipschitz slack instead of the
/// slope slack: near the resolution limit the difference quotients of an
/// `n`-oscillation carry an `O((n Δx)²)` quadrature error.
pub fn oscillatory_family(n_list: &[u32], grid: SpaceTimeGrid, tol: &Tolerances) -> Result<FlowFamily> {
    let top = *n_list.iter().max().ok_or_else(|| Error::InvalidParameter("n_list is empty".into()))?;
    let finest = std::f64::consts::PI / (8.0 * top.max(1) as f64);
    if grid.dx() > finest {
        return Err(Error::InvalidGrid(format!(
            "oscillation n = {top} under-resolved: dx = {} > pi/(8n) = {finest}",
            grid.dx()
        )));
    }
    let pairs = n_list
        .par_iter()
        .map(|&n| from_hamiltonian(&Generator::oscillatory(n), grid))
        .collect::<Result<Vec<_>>>()?;
    let gate = Tolerances { slope: tol.slope.max(tol.lipschitz), ..*tol };
    FlowFamily::from_pairs(n_list, pairs, (0.5, 1.5, 1.0), &gate)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusRecord {
    /// Largest ratio over all members.
    pub ratio: f64,
    pub per_member: Vec<(u32, f64)>,
    pub pass: bool,
}

/// Largest `|ΔX| / ((C2/C1) |Δx| + b_max |Δt|)` over node pairs in `K`,
/// using the declared constants.
pub fn equicontinuity_modulus(family: &FlowFamily, tol: f64, seed: u64) -> ModulusRecord {
    let (c1, c2, b_max) = family.constants();
    let region = family.region();
    let per_member: Vec<(u32, f64)> = family
        .members()
        .par_iter()
        .map(|m| (m.n, flow_modulus(&m.flow, &region, c2 / c1, b_max, RANDOM_PAIRS, seed).ratio))
        .collect();
    let ratio = per_member.iter().map(|p| p.1).fold(0.0, f64::max);
    ModulusRecord { ratio, per_member, pass: ratio <= 1.0 + tol }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergent {
    /// Labels of the chain, in increasing member order.
    pub chain: Vec<u32>,
    /// Label of the limit candidate (the last member).
    pub limit: u32,
    /// Whether a chain of length at least two was found.
    pub found: bool,
    /// `sup_K |X_n - id|` for every member.
    pub sup_dist_to_id: Vec<(u32, f64)>,
}

/// Greedy backward chaining from the last member: a member joins when it
/// is within `delta` of the most recently added one.
pub fn extract_convergent(family: &FlowFamily, delta: f64) -> Result<Convergent> {
    let m = family.members().len();
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two members".into()));
    }
    let mut chain = vec![m - 1];
    for k in (0..m - 1).rev() {
        let cur = *chain.last().unwrap();
        if family.distance(k, cur) <= delta {
            chain.push(k);
        }
    }
    chain.reverse();
    let labels = |k: usize| family.members()[k].n;
    let sup_dist_to_id = (0..m)
        .into_par_iter()
        .map(|k| (labels(k), family.distance_to_identity(k)))
        .collect();
    Ok(Convergent {
        found: chain.len() >= 2,
        chain: chain.iter().map(|&k| labels(k)).collect(),
        limit: labels(m - 1),
        sup_dist_to_id,
    })
}

/// One row of the family report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemberReport {
    pub n: u32,
    pub c1_meas: f64,
    pub c2_meas: f64,
    pub bmax_meas: f64,
    /// `max_t` of the spatial total variation of `b(t, .)` over the window.
    pub tv_b: f64,
    pub modulus_ratio: f64,
    pub sup_dist_to_id: f64,
}

pub fn family_report(family: &FlowFamily, seed: u64) -> Vec<MemberReport> {
    let (c1, c2, b_max) = family.constants();
    let region = family.region();
    family
        .members()
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let g = *m.pair.grid();
            let b = m.pair.velocity();
            let tv_b = (0..=g.nt())
                .map(|i| b.slice(i).windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>())
                .fold(0.0, f64::max);
            MemberReport {
                n: m.n,
                c1_meas: m.pair.density().min(),
                c2_meas: m.pair.density().max(),
                bmax_meas: b.sup_abs(),
                tv_b,
                modulus_ratio: flow_modulus(&m.flow, &region, c2 / c1, b_max, RANDOM_PAIRS, seed).ratio,
                sup_dist_to_id: family.distance_to_identity(k),
            }
        })
        .collect()
}

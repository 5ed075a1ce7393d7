use serde::{Deserialize, Serialize};

use super::{solve_cauchy, TransportSolution};
use crate::error::{Error, Result};
use crate::field_kit::{InitialDatum, NearIncompressiblePair, SpaceTimeGrid, Tolerances};
use crate::flow::{build_flow, quarter_times, FlowMap};
use crate::hamiltonian::build_hamiltonian;
use crate::reference_oracles::{characteristics_solve, fv_upwind_solve};

/// RK4 steps per unit time used by the characteristics oracle.
pub const CHARACTERISTIC_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    FvUpwind,
    Characteristics,
}

impl OracleKind {
    pub fn name(&self) -> &'static str {
        match self {
            OracleKind::FvUpwind => "fv_upwind",
            OracleKind::Characteristics => "characteristics",
        }
    }

    pub fn solve(&self, pair: &NearIncompressiblePair, datum: &InitialDatum) -> Result<TransportSolution> {
        match self {
            OracleKind::FvUpwind => fv_upwind_solve(pair, datum),
            OracleKind::Characteristics => characteristics_solve(pair, datum, CHARACTERISTIC_STEPS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub oracle: OracleKind,
    pub times: Vec<f64>,
    /// L¹ distance over the padded region at each time.
    pub distances: Vec<f64>,
    pub max_distance: f64,
}

/// Distances between the pushforward solution and each oracle at the
/// quarter times.
pub fn cross_validate(
    pair: &NearIncompressiblePair,
    flow: &FlowMap,
    datum: &InitialDatum,
    oracles: &[OracleKind],
) -> Result<Vec<CrossValidation>> {
    let (lo, hi) = pair
        .padded_window()
        .ok_or_else(|| Error::Support("padded region is empty".into()))?;
    let ours = solve_cauchy(pair, flow, datum)?;
    let idx = quarter_times(flow);
    let g = *pair.grid();
    oracles
        .iter()
        .map(|&oracle| {
            let theirs = oracle.solve(pair, datum)?;
            let distances: Vec<f64> = idx.iter().map(|&i| ours.l1_distance(&theirs, i, lo, hi)).collect();
            let max_distance = distances.iter().copied().fold(0.0, f64::max);
            Ok(CrossValidation { oracle, times: idx.iter().map(|&i| g.t(i)).collect(), distances, max_distance })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub oracle: OracleKind,
    pub coarse: CrossValidation,
    pub fine: CrossValidation,
    /// `coarse.max_distance / fine.max_distance`.
    pub ratio: f64,
}

/// Repeats [`cross_validate`] on a finer grid; the pair must be backed by
/// a generator so that it can be resampled.
pub fn refinement_study(
    pair: &NearIncompressiblePair,
    datum: &InitialDatum,
    oracle: OracleKind,
    fine_grid: SpaceTimeGrid,
    tol: &Tolerances,
) -> Result<RefinementStudy> {
    let run = |p: &NearIncompressiblePair| -> Result<CrossValidation> {
        let h = build_hamiltonian(p, tol)?;
        let flow = build_flow(&h, tol)?;
        Ok(cross_validate(p, &flow, datum, &[oracle])?.remove(0))
    };
    let coarse = run(pair)?;
    let fine = run(&pair.resample(fine_grid)?)?;
    let ratio = coarse.max_distance / fine.max_distance;
    Ok(RefinementStudy { oracle, coarse, fine, ratio })
}

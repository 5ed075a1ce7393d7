//! Named end-to-end runs driven by a [`ScenarioConfig`].
//!
//! A run either fails up front with a configuration error or produces a
//! list of check suites plus CSV artifacts. Numerical failures after the
//! scenario is built are reported as failed suites.

use serde::{Deserialize, Serialize};

use crate::compactness_lab::{equicontinuity_modulus, extract_convergent, family_report, oscillatory_family};
use crate::error::{Error, Result};
use crate::export;
use crate::field_kit::{
    build_scenario, validate_pair, CompactnessConfig, InitialDatum, NearIncompressiblePair, ScenarioConfig,
};
use crate::flow::{build_flow, ode_residual, pushforward_check, FlowMap};
use crate::hamiltonian::{build_hamiltonian, cone_bound_check, ConeSample, HamiltonianField};
use crate::profile::Profile;
use crate::report::{Diagnostic, Suite};
use crate::transport::{
    conserved_observable, cross_validate, default_test_suite, solve_cauchy, uniqueness_probe, weak_residual,
    OracleKind, ProbeSetup, TransportSolution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    Solve,
    Flow,
    Verify,
    Compactness,
}

impl PipelineKind {
    pub const ALL: [PipelineKind; 4] = [PipelineKind::Solve, PipelineKind::Flow, PipelineKind::Verify, PipelineKind::Compactness];

    pub fn name(&self) -> &'static str {
        match self {
            PipelineKind::Solve => "solve",
            PipelineKind::Flow => "flow",
            PipelineKind::Verify => "verify",
            PipelineKind::Compactness => "compactness",
        }
    }
}

impl std::str::FromStr for PipelineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PipelineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown pipeline `{s}`")))
    }
}

/// A file produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub suites: Vec<Suite>,
    pub artifacts: Vec<Artifact>,
}

impl PipelineOutput {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
    }
}

/// Gaussian centred in the padded region, reaching a fifth of the way to
/// its edges at the cut-off.
pub fn default_datum(pair: &NearIncompressiblePair) -> Result<InitialDatum> {
    let (lo, hi) = pair
        .padded_window()
        .ok_or_else(|| Error::Config("padded region is empty; widen the window or shorten T".into()))?;
    Ok(InitialDatum::gaussian(0.5 * (lo + hi), (hi - lo) / 20.0))
}

/// Gaussian probe filling half of the padded region.
pub fn default_probe(pair: &NearIncompressiblePair) -> Result<Profile> {
    let (lo, hi) = pair
        .padded_window()
        .ok_or_else(|| Error::Config("padded region is empty; widen the window or shorten T".into()))?;
    Ok(Profile::Gaussian { center: 0.5 * (lo + hi), width: (hi - lo) / 32.0 })
}

/// Polynomial bump in level space around `H(t_i, centre of padded region)`.
pub fn default_level_profile(pair: &NearIncompressiblePair, h: &HamiltonianField, i: usize) -> Result<Profile> {
    let (lo, hi) = pair
        .padded_window()
        .ok_or_else(|| Error::Config("padded region is empty; widen the window or shorten T".into()))?;
    let t = h.grid().t(i);
    Ok(Profile::PolyBump { center: h.eval(t, 0.5 * (lo + hi)), half_width: pair.c1() * (hi - lo) / 8.0 })
}

struct Prepared {
    pair: NearIncompressiblePair,
    datum: InitialDatum,
}

fn prepare(cfg: &ScenarioConfig) -> Result<Prepared> {
    let grid = cfg.grid()?;
    let pair = build_scenario(&cfg.scenario, grid).map_err(|e| Error::Config(format!("scenario: {e}")))?;
    let datum = match cfg.datum()? {
        Some(d) => d,
        None => default_datum(&pair)?,
    };
    Ok(Prepared { pair, datum })
}

fn guarded(name: &str, f: impl FnOnce() -> Result<Vec<Diagnostic>>) -> Suite {
    match f() {
        Ok(records) => Suite::new(name, records),
        Err(e) => Suite::failed(name, &e.to_string()),
    }
}

/// Runs `kind`; `Err` means the configuration itself is unusable.
pub fn run(kind: PipelineKind, cfg: &ScenarioConfig) -> Result<PipelineOutput> {
    match kind {
        PipelineKind::Compactness => return run_compactness(cfg),
        _ => {}
    }
    let prep = prepare(cfg)?;
    let tol = cfg.tolerances;
    let pair = &prep.pair;
    let mut suites = Vec::new();
    let mut artifacts = Vec::new();

    let v = validate_pair(pair, tol.continuity);
    suites.push(Suite::new(
        "pair",
        vec![
            Diagnostic::info("rho_min", v.rho_min),
            Diagnostic::info("rho_max", v.rho_max),
            Diagnostic::info("b_sup", v.b_sup),
            Diagnostic::flag("declared_bounds", 0.0, v.bounds_hold),
            Diagnostic::at_most("continuity_residual", v.continuity_residual, tol.continuity),
        ],
    ));

    let h = match build_hamiltonian(pair, &tol) {
        Ok(h) => h,
        Err(e) => {
            suites.push(Suite::failed("hamiltonian", &e.to_string()));
            return Ok(PipelineOutput { suites, artifacts });
        }
    };
    suites.push(Suite::new("hamiltonian", h.diagnostics().records(pair.c1(), pair.c2(), pair.b_max(), tol.slope)));
    if kind == PipelineKind::Verify {
        let cone = cone_bound_check(&h, &ConeSample { seed: cfg.run.seed, ..ConeSample::default() });
        suites.push(Suite::new(
            "cone",
            vec![
                Diagnostic::info("pairs_checked", cone.pairs_checked as f64),
                Diagnostic::flag("worst_margin", cone.worst_margin, cone.pass),
            ],
        ));
    }

    let flow = match build_flow(&h, &tol) {
        Ok(f) => f,
        Err(e) => {
            suites.push(Suite::failed("flow", &e.to_string()));
            return Ok(PipelineOutput { suites, artifacts });
        }
    };
    suites.push(flow_suite(&flow, pair, &tol));

    if matches!(kind, PipelineKind::Flow | PipelineKind::Verify) {
        let ode = ode_residual(&flow, pair);
        suites.push(Suite::new(
            "ode",
            vec![Diagnostic::info("centered_residual", ode.centered), Diagnostic::info("integral_residual", ode.integral)],
        ));
        suites.push(guarded("pushforward", || {
            let r = pushforward_check(&flow, pair, &[default_probe(pair)?])?;
            Ok(vec![Diagnostic::info("level_defect", r.level_defect), Diagnostic::info("flow_defect", r.flow_defect)])
        }));
        artifacts.push(Artifact { file: "flow.csv".into(), contents: export::flow_csv(&flow) });
        artifacts.push(Artifact { file: "levels.csv".into(), contents: export::levels_csv(&flow) });
    }

    if matches!(kind, PipelineKind::Solve | PipelineKind::Verify) {
        match solve_cauchy(pair, &flow, &prep.datum) {
            Ok(sol) => {
                suites.push(solution_suite(&sol, &tol));
                artifacts.push(Artifact { file: "solution.csv".into(), contents: export::solution_csv(&sol) });
                if kind == PipelineKind::Verify {
                    verify_solution(cfg, pair, &h, &flow, &sol, &mut suites, &mut artifacts);
                }
            }
            Err(e) => suites.push(Suite::failed("solve", &e.to_string())),
        }
    }
    Ok(PipelineOutput { suites, artifacts })
}

fn flow_suite(flow: &FlowMap, pair: &NearIncompressiblePair, tol: &crate::field_kit::Tolerances) -> Suite {
    let d = flow.diagnostics();
    let (c1, c2) = (pair.c1(), pair.c2());
    Suite::new(
        "flow",
        vec![
            Diagnostic::at_most("defining_residual", d.defining_residual, tol.inversion),
            Diagnostic::at_most("identity_defect", d.identity_defect, tol.inversion),
            Diagnostic::at_most("h_lipschitz", d.h_lipschitz, 1.0 / c1 + tol.lipschitz),
            Diagnostic::at_most("t_lipschitz", d.t_lipschitz, pair.b_max() + tol.lipschitz),
            Diagnostic::at_least("min_quotient", d.min_quotient, c1 / c2 - tol.lipschitz),
            Diagnostic::at_most("max_quotient", d.max_quotient, c2 / c1 + tol.lipschitz),
            Diagnostic::at_most("compression", d.compression, c2 / c1 + tol.lipschitz),
            Diagnostic::at_most("inverse_defect", d.inverse_defect, 2.0 * tol.inversion),
        ],
    )
}

fn solution_suite(sol: &TransportSolution, tol: &crate::field_kit::Tolerances) -> Suite {
    let g = *sol.grid();
    let datum = sol.datum();
    let mut trace = 0.0_f64;
    for j in 0..=g.nx() {
        if let Some(v) = datum.value(g.x(j)) {
            trace = trace.max((sol.u().at(0, j) - v).abs());
        }
    }
    let mut records = vec![
        Diagnostic::at_most("initial_trace", trace, 1e3 * tol.inversion),
        Diagnostic::flag("finite", 0.0, sol.u().values().iter().all(|v| v.is_finite())),
        Diagnostic::info("mass_drift", sol.mass_drift()),
    ];
    if datum.is_nonnegative() {
        records.push(Diagnostic::at_least("min_u", sol.u().min(), 0.0));
    }
    Suite::new("solve", records)
}

fn verify_solution(
    cfg: &ScenarioConfig,
    pair: &NearIncompressiblePair,
    h: &HamiltonianField,
    flow: &FlowMap,
    sol: &TransportSolution,
    suites: &mut Vec<Suite>,
    artifacts: &mut Vec<Artifact>,
) {
    let tol = cfg.tolerances;
    let mut residuals = Vec::new();
    suites.push(guarded("weak_residual", || {
        residuals = weak_residual(sol, pair, &default_test_suite(pair)?)?;
        Ok(residuals.iter().enumerate().map(|(k, r)| Diagnostic::info(format!("test_{k}"), *r)).collect())
    }));
    if !residuals.is_empty() {
        artifacts.push(Artifact { file: "residuals.csv".into(), contents: export::residuals_csv(&residuals) });
    }
    suites.push(guarded("observable", || {
        let g = pair.grid();
        let times: Vec<f64> = g.times().collect();
        let r = conserved_observable(sol, h, &default_level_profile(pair, h, 0)?, &times)?;
        artifacts.push(Artifact { file: "observable.csv".into(), contents: export::series_csv("I", &r.times, &r.values) });
        Ok(vec![Diagnostic::info("target", r.target), Diagnostic::info("drift", r.drift)])
    }));
    let mut oracles = Vec::new();
    if sol.datum().is_bounded() {
        oracles.push(OracleKind::FvUpwind);
    }
    if pair.generator().is_some() {
        oracles.push(OracleKind::Characteristics);
    }
    if !oracles.is_empty() {
        suites.push(guarded("cross_validation", || {
            let rec = cross_validate(pair, flow, sol.datum(), &oracles)?;
            Ok(rec.iter().map(|c| Diagnostic::info(format!("l1_{}", c.oracle.name()), c.max_distance)).collect())
        }));
    }
    if let Some(probe) = &cfg.probe {
        suites.push(guarded("uniqueness_probe", || {
            let i_tau = pair.grid().nearest_time_index(probe.tau);
            let setup = ProbeSetup {
                eps: probe.eps.clone(),
                tau: probe.tau,
                level: default_level_profile(pair, h, i_tau)?,
                datum: sol.datum().clone(),
            };
            let rows = uniqueness_probe(pair, h, flow, &setup)?;
            artifacts.push(Artifact { file: "decay.csv".into(), contents: export::decay_csv(&rows) });
            let mut records: Vec<Diagnostic> =
                rows.iter().map(|r| Diagnostic::info(format!("D({})", r.eps), r.d)).collect();
            let monotone = rows.windows(2).all(|w| w[1].d < 1.1 * w[0].d || w[1].d <= tol.quadrature);
            records.push(Diagnostic::flag("monotone_decrease", 0.0, monotone));
            Ok(records)
        }));
    }
}

/// Default oscillatory family `n ∈ {1, 2, 4, ..., 64}`.
pub fn default_compactness() -> CompactnessConfig {
    CompactnessConfig { n_list: (0..7).map(|k| 1 << k).collect(), delta: 0.1 }
}

fn run_compactness(cfg: &ScenarioConfig) -> Result<PipelineOutput> {
    let grid = cfg.grid()?;
    let cc = cfg.compactness.clone().unwrap_or_else(default_compactness);
    let tol = cfg.tolerances;
    let family = match oscillatory_family(&cc.n_list, grid, &tol) {
        Ok(f) => f,
        Err(e @ (Error::InvalidGrid(_) | Error::InvalidParameter(_))) => return Err(Error::Config(e.to_string())),
        Err(e) => {
            return Ok(PipelineOutput { suites: vec![Suite::failed("family", &e.to_string())], artifacts: vec![] })
        }
    };
    let (c1, c2, b_max) = family.constants();
    let rows = family_report(&family, cfg.run.seed);
    let modulus = equicontinuity_modulus(&family, tol.lipschitz, cfg.run.seed);
    let scan = tol.lipschitz;
    let mut bounds = Vec::new();
    let mut rate = Vec::new();
    for r in &rows {
        bounds.push(Diagnostic::at_least(format!("c1_meas[{}]", r.n), r.c1_meas, c1 - scan));
        bounds.push(Diagnostic::at_most(format!("c2_meas[{}]", r.n), r.c2_meas, c2 + scan));
        bounds.push(Diagnostic::at_most(format!("bmax_meas[{}]", r.n), r.bmax_meas, b_max + scan));
        bounds.push(Diagnostic::info(format!("tv_b[{}]", r.n), r.tv_b));
        if r.n > 0 {
            rate.push(Diagnostic::at_most(format!("n_sup_dist[{}]", r.n), r.n as f64 * r.sup_dist_to_id, 2.1));
        }
    }
    let mut suites = vec![
        Suite::new("uniform_bounds", bounds),
        Suite::new(
            "modulus",
            modulus
                .per_member
                .iter()
                .map(|(n, q)| Diagnostic::at_most(format!("ratio[{n}]"), *q, 1.0 + tol.lipschitz))
                .collect(),
        ),
        Suite::new("convergence_rate", rate),
    ];
    if family.members().len() >= 2 {
        let conv = extract_convergent(&family, cc.delta)?;
        let mut rec: Vec<Diagnostic> = conv.chain.iter().map(|n| Diagnostic::info(format!("chain[{n}]"), *n as f64)).collect();
        rec.push(Diagnostic::info("chain_found", if conv.found { 1.0 } else { 0.0 }));
        suites.push(Suite::new("extraction", rec));
    }
    Ok(PipelineOutput { suites, artifacts: vec![Artifact { file: "family.csv".into(), contents: export::family_csv(&rows) }] })
}

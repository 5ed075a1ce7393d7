//! `levelflow --pipeline <name> --config <file.toml> --out <dir>`
//!
//! Exit status: 0 when every suite passes, 1 when a suite fails, 2 for
//! configuration, usage or output errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use levelflow_core::field_kit::Tolerances;
use levelflow_core::pipeline::{run, PipelineKind, PipelineOutput};
use levelflow_core::report::Suite;
use levelflow_core::ScenarioConfig;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "levelflow", version, about = "Run a levelflow pipeline on a scenario config")]
struct Args {
    /// solve, flow, verify or compactness.
    #[arg(long, value_parser = parse_pipeline)]
    pipeline: PipelineKind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `grid.nx`.
    #[arg(long)]
    nx: Option<usize>,
    /// Overrides `grid.nt`.
    #[arg(long)]
    nt: Option<usize>,
}

fn parse_pipeline(s: &str) -> Result<PipelineKind, String> {
    s.parse().map_err(|e: levelflow_core::Error| e.to_string())
}

#[derive(Serialize)]
struct RunManifest<'a> {
    config_path: String,
    pipeline: &'static str,
    out_dir: String,
    tolerances: Tolerances,
    seed: u64,
    /// Resolved config, overrides applied; rerunning it reproduces the outputs.
    scenario: &'a ScenarioConfig,
    artifacts: Vec<&'a str>,
}

#[derive(Serialize)]
struct Summary<'a> {
    pipeline: &'static str,
    pass: bool,
    suites: &'a [Suite],
}

fn load(args: &Args) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut cfg = ScenarioConfig::from_toml_str(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        // TOML integers are signed; a larger seed could not be echoed back.
        if seed > i64::MAX as u64 {
            return Err(format!("seed {seed} exceeds {}", i64::MAX));
        }
        cfg.run.seed = seed;
    }
    if let Some(nx) = args.nx {
        cfg.grid.nx = nx;
    }
    if let Some(nt) = args.nt {
        cfg.grid.nt = nt;
    }
    cfg.grid().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write_outputs(args: &Args, cfg: &ScenarioConfig, out: &PipelineOutput) -> std::io::Result<()> {
    std::fs::create_dir_all(&args.out)?;
    for a in &out.artifacts {
        std::fs::write(args.out.join(&a.file), &a.contents)?;
    }
    let manifest = RunManifest {
        config_path: args.config.display().to_string(),
        pipeline: args.pipeline.name(),
        out_dir: args.out.display().to_string(),
        tolerances: cfg.tolerances,
        seed: cfg.run.seed,
        scenario: cfg,
        artifacts: out.artifacts.iter().map(|a| a.file.as_str()).collect(),
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;
    let summary = Summary { pipeline: args.pipeline.name(), pass: out.pass(), suites: &out.suites };
    write_json(&args.out.join("summary.json"), &summary)
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

fn report(out: &PipelineOutput) {
    for s in &out.suites {
        println!("{:<18} {}", s.name, if s.pass { "pass" } else { "FAIL" });
        if let Some(d) = s.first_failure() {
            match d.bound {
                Some(b) => eprintln!("  {}: failed invariant `{}`: {:e} vs bound {:e}", s.name, d.name, d.value, b),
                None => eprintln!("  {}: failed invariant `{}` ({:e})", s.name, d.name, d.value),
            }
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = match run(args.pipeline, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_outputs(&args, &cfg, &out) {
        eprintln!("cannot write outputs to {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    report(&out);
    if out.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

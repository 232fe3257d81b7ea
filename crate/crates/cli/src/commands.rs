//! Command-line definition and dispatch.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sqg_core::constants::{admissible_c0, chain_check, derive, LedgerOptions};
use sqg_core::degiorgi::{
    default_shrink, degiorgi_recursion, isoperimetric_check, level_set_stats, oscillation_decay_sequence,
    recursion_threshold, Cylinder, ExtendedTrajectory, RecursionClass, RecursionSpec,
};
use sqg_core::extension::{default_z_levels, extend, geometric_levels, neumann_trace};
use sqg_core::solver::{decay_exponent, level_set_energy_check, run, Trajectory};
use sqg_core::spectral::{l2_norm, sup_norm, to_spectral};

use crate::checkpoint::{read_checkpoint, write_checkpoint};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{envelope, ledger_json, level_set_json, norms_json, outcome_json, write_report};
use crate::series::write_norms_csv;
use crate::verify::{self, ExtensionParts, SuiteParams};

#[derive(Debug, Parser)]
#[command(name = "sqg", version, about = "Dissipative SQG solver and regularity diagnostics")]
pub struct Cli {
    /// Print reports, and errors, as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a configured run; writes the norm series, final checkpoint and report.
    Simulate(ConfigArg),
    /// Extend a checkpointed field into the upper half-space and report its Neumann trace.
    Extend(ExtendArgs),
    /// De Giorgi diagnostics.
    #[command(subcommand)]
    Diagnose(Diagnose),
    /// Constants ledger and chain verdicts at one (alpha, c0), or a sweep in alpha.
    Constants(ConstantsArgs),
    /// Fit the sup-norm decay of a configured run.
    Decay(DecayArgs),
    /// Run verification checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Side of the torus the checkpoint lives on.
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
    pub length: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub z_min: f64,
    #[arg(long, default_value_t = 8.0)]
    pub z_max: f64,
    #[arg(long, default_value_t = 48)]
    pub levels: usize,
}

#[derive(Debug, Subcommand)]
pub enum Diagnose {
    /// Oscillation over nested cylinders ending at t_end.
    Oscillation(CylinderArgs),
    /// Weighted level-set measures on a cylinder ending at t_end.
    Levelsets(CylinderArgs),
    /// Isoperimetric inequality on B4* for the final snapshot.
    Isoperimetric(ConfigArg),
    /// Classify the abstract De Giorgi recursion.
    Recursion(RecursionArgs),
}

#[derive(Debug, Args)]
pub struct CylinderArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Radius of the outer cylinder (default: min(1, t_end^(1/alpha))).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub k_max: usize,
}

#[derive(Debug, Args)]
pub struct RecursionArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub beta: f64,
    /// Seed triple (A_0, A_1, A_2), comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
    pub seed: Vec<f64>,
    #[arg(long, default_value_t = 5000)]
    pub k_max: usize,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Default: midpoint of the admissible window.
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Sweep `start:stop:step` in alpha with c0 at each window midpoint.
    #[arg(long, conflicts_with_all = ["alpha", "c0"])]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0.02)]
    pub t_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyWhat {
    Riesz,
    ExtensionIdentity,
    Neumann,
    Energy,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub what: VerifyWhat,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What a successful command hands back: a report and a one-screen summary.
pub struct Output {
    pub report: Value,
    pub text: String,
    /// A check ran but did not pass.
    pub failed: bool,
}

pub fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Validation("--jobs must be positive".into()));
        }
        // a second call within one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Extend(a) => extend_cmd(a),
        Command::Diagnose(d) => match d {
            Diagnose::Oscillation(a) => oscillation_cmd(a),
            Diagnose::Levelsets(a) => levelsets_cmd(a),
            Diagnose::Isoperimetric(a) => isoperimetric_cmd(a),
            Diagnose::Recursion(a) => recursion_cmd(a),
        },
        Command::Constants(a) => constants_cmd(a),
        Command::Decay(a) => decay_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn integrate(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    let solver = cfg.solver_config()?;
    match run(&solver) {
        Ok(t) => Ok(t),
        Err(f) => {
            if let Some((t, field)) = f.partial.snapshots().last() {
                std::fs::create_dir_all(&cfg.output.dir)?;
                write_checkpoint(&cfg.output_path("last_valid.sqgf"), field, *t)?;
            }
            Err(CliError::from(f.error))
        }
    }
}

fn simulate(a: &ConfigArg) -> Result<Output, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let traj = integrate(&cfg)?;
    std::fs::create_dir_all(&cfg.output.dir)?;
    write_norms_csv(BufWriter::new(File::create(cfg.output_path("norms.csv"))?), traj.norms())?;
    let (t_end, last) = traj.snapshots().last().expect("initial snapshot");
    write_checkpoint(&cfg.output_path("final.sqgf"), last, *t_end)?;
    let norms = traj.norms();
    let sup0 = norms[0].sup;
    let mut levels = Vec::new();
    if *t_end > 0.0 {
        for frac in &cfg.diagnostics.levels {
            levels.push(level_set_energy_check(&traj, frac * sup0, 0.0, *t_end, 0.0)?);
        }
    }
    let report = envelope(
        "simulate",
        serde_json::to_value(&cfg)?,
        json!({
            "initial": norms_json(&norms[0]),
            "final": norms_json(norms.last().expect("norms")),
            "level_sets": levels.iter().map(level_set_json).collect::<Vec<_>>(),
        }),
    );
    write_report(&cfg.output_path("report.json"), &report)?;
    let last_n = norms.last().expect("norms");
    let text = format!(
        "t = {}: l2 {:.6e} -> {:.6e}, sup {:.6e} -> {:.6e}; wrote {}",
        t_end,
        norms[0].l2,
        last_n.l2,
        sup0,
        last_n.sup,
        cfg.output.dir.display()
    );
    Ok(Output { report, text, failed: levels.iter().any(|l| !l.satisfied) })
}

fn extend_cmd(a: &ExtendArgs) -> Result<Output, CliError> {
    let field = read_checkpoint(&a.checkpoint)?.to_field(a.length)?;
    let levels = geometric_levels(a.z_min, a.z_max, a.levels)?;
    let e = extend(&to_spectral(&field), &levels)?;
    let trace = neumann_trace(&e)?;
    let sups: Vec<f64> = (0..levels.len()).map(|i| sup_norm(&e.level_field(i))).collect();
    let report = envelope(
        "extend",
        json!({ "checkpoint": a.checkpoint, "length": a.length, "z_levels": levels }),
        json!({
            "level_sup": sups,
            "trace_l2": l2_norm(&trace.trace),
            "trace_ratio": trace.ratio,
            "trace_ratio_spread": trace.ratio_spread,
            "extrapolation_spread": trace.extrapolation_spread,
        }),
    );
    let text = format!(
        "{} levels; Neumann trace / Lambda^alpha ratio {:?} (spread {:.2e})",
        levels.len(),
        trace.ratio,
        trace.ratio_spread
    );
    Ok(Output { report, text, failed: false })
}

fn c0_for(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.diagnostics.c0 {
        Some(c) => Ok(c),
        None => Ok(admissible_c0(cfg.grid.alpha, None)?.midpoint()),
    }
}

fn anchored_cylinder(cfg: &RunConfig, radius: Option<f64>) -> Result<Cylinder, CliError> {
    let alpha = cfg.grid.alpha;
    let r = radius.unwrap_or_else(|| cfg.t_end.powf(1.0 / alpha).min(1.0));
    Ok(Cylinder::anchored(r, alpha, cfg.t_end)?)
}

fn extended(cfg: &RunConfig, cyl: &Cylinder) -> Result<ExtendedTrajectory, CliError> {
    let traj = integrate(cfg)?;
    let z = cfg.diagnostics.z_levels.clone().unwrap_or_else(default_z_levels);
    Ok(ExtendedTrajectory::from_trajectory(&traj, &z, Some((cyl.t_start(), cfg.t_end)))?)
}

fn oscillation_cmd(a: &CylinderArgs) -> Result<Output, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let cyl = anchored_cylinder(&cfg, a.radius)?;
    let rho = match cfg.diagnostics.shrink {
        Some(r) => r,
        None => default_shrink(cfg.grid.alpha, c0_for(&cfg)?),
    };
    let ext = extended(&cfg, &cyl)?;
    let seq = oscillation_decay_sequence(&ext, &cyl, rho, a.k_max, 2)?;
    let report = envelope(
        "oscillation",
        json!({ "config": a.config, "radius": cyl.r, "rho": rho, "k_max": a.k_max }),
        json!({
            "levels": seq.levels.iter().map(|(r, o)| json!({"r": r, "oscillation": o})).collect::<Vec<_>>(),
            "truncated": seq.truncated,
            "exponent": seq.exponent,
            "skip": seq.skip,
        }),
    );
    let text = format!("{} levels (truncated: {}), fitted exponent {:?}", seq.levels.len(), seq.truncated, seq.exponent);
    Ok(Output { report, text, failed: false })
}

fn levelsets_cmd(a: &CylinderArgs) -> Result<Output, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let cyl = anchored_cylinder(&cfg, a.radius)?;
    let ext = extended(&cfg, &cyl)?;
    let s = level_set_stats(&ext, &cyl)?;
    let report = envelope(
        "levelsets",
        json!({ "config": a.config, "radius": cyl.r }),
        json!({
            "meas_a": s.meas_a, "meas_b": s.meas_b, "meas_c": s.meas_c,
            "s": s.s, "dirichlet": s.dirichlet, "total": s.total,
        }),
    );
    let text = format!("|A| {:.6e} |B| {:.6e} |C| {:.6e} S {:.3e} energy {:.6e}", s.meas_a, s.meas_b, s.meas_c, s.s, s.dirichlet);
    Ok(Output { report, text, failed: false })
}

fn isoperimetric_cmd(a: &ConfigArg) -> Result<Output, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let traj = integrate(&cfg)?;
    let (_, last) = traj.snapshots().last().expect("initial snapshot");
    let z = cfg.diagnostics.z_levels.clone().unwrap_or_else(|| geometric_levels(1e-3, 4.5, 28).expect("ladder"));
    let c = isoperimetric_check(&extend(&to_spectral(last), &z)?, 0.0)?;
    let report = envelope(
        "isoperimetric",
        json!({ "config": a.config }),
        json!({
            "meas_a": c.meas_a, "meas_b": c.meas_b, "meas_c": c.meas_c, "energy": c.energy,
            "c_star": c.c_star, "lhs": c.lhs, "rhs": c.rhs, "satisfied": c.satisfied,
            "required_constant": c.required_constant,
        }),
    );
    let text = format!(
        "C**|C| = {:.6e} vs |A|^2|B|^2 = {:.6e}: {}; required constant {:.6e}",
        c.lhs,
        c.rhs,
        if c.satisfied { "holds" } else { "fails" },
        c.required_constant
    );
    Ok(Output { report, text, failed: false })
}

fn recursion_cmd(a: &RecursionArgs) -> Result<Output, CliError> {
    if a.seed.len() != 3 {
        return Err(CliError::Validation(format!("--seed takes three values, got {}", a.seed.len())));
    }
    let spec = RecursionSpec::new(a.c, a.beta, [a.seed[0], a.seed[1], a.seed[2]], a.k_max)?;
    let out = degiorgi_recursion(&spec)?;
    let (lo, hi) = recursion_threshold(&spec)?;
    let class = match out.class {
        RecursionClass::Converges => "converges",
        RecursionClass::Diverges => "diverges",
        RecursionClass::Unclassified => "unclassified",
    };
    let report = envelope(
        "recursion",
        json!({ "c": a.c, "beta": a.beta, "seed": a.seed, "k_max": a.k_max }),
        json!({ "class": class, "steps": out.steps, "threshold": hi, "bracket": [lo, hi] }),
    );
    let text = format!("{class} after {} steps; threshold scale {hi}", out.steps);
    Ok(Output { report, text, failed: false })
}

fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("bad sweep `{s}`, expected start:stop:step"));
    let parts: Vec<f64> = s.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [a, b, h] = parts[..] else { return Err(bad()) };
    if !(h > 0.0 && b >= a) {
        return Err(bad());
    }
    let count = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + i as f64 * h).collect())
}

fn constants_cmd(a: &ConstantsArgs) -> Result<Output, CliError> {
    let opts = LedgerOptions { alpha0: a.alpha0, ..LedgerOptions::default() };
    if let Some(s) = &a.sweep {
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        let mut failed = false;
        for alpha in parse_sweep(s)? {
            let w = admissible_c0(alpha, a.alpha0)?;
            if w.empty {
                lines.push(format!("alpha {alpha:.4}: window empty ({} > {})", w.lower, w.upper));
                continue;
            }
            let l = derive(alpha, w.midpoint(), &opts)?;
            let chain = chain_check(&l);
            failed |= !chain.all_hold;
            lines.push(format!("alpha {alpha:.4}: c0 {:.6} r0 {:.6e} chain {}", l.c0, l.r0, if chain.all_hold { "holds" } else { "FAILS" }));
            rows.push(ledger_json(&l, &chain));
        }
        let report = envelope("constants_sweep", json!({ "sweep": s, "alpha0": a.alpha0 }), Value::Array(rows));
        return Ok(Output { report, text: lines.join("\n"), failed });
    }
    let alpha = a.alpha.ok_or_else(|| CliError::Validation("--alpha or --sweep is required".into()))?;
    let c0 = match a.c0 {
        Some(c) => c,
        None => admissible_c0(alpha, a.alpha0)?.midpoint(),
    };
    let l = derive(alpha, c0, &opts)?;
    let chain = chain_check(&l);
    let mut text = format!(
        "alpha {} c0 {} r0 {:e} C1 {:e} C_alpha {:e} K+ {} eta {}\nwindow ({}, {}){}",
        l.alpha,
        l.c0,
        l.r0,
        l.c1,
        l.c_alpha,
        l.k_plus,
        l.eta,
        l.window.lower,
        l.window.upper,
        if l.window.empty { " empty" } else { "" }
    );
    for v in &chain.verdicts {
        text.push_str(&format!("\n  {:<30} slack {:+.6e} {}", v.name, v.slack, if v.holds { "ok" } else { "FAILS" }));
    }
    let report = envelope("constants", json!({ "alpha": alpha, "c0": c0, "alpha0": a.alpha0 }), ledger_json(&l, &chain));
    Ok(Output { report, text, failed: !chain.all_hold })
}

fn decay_cmd(a: &DecayArgs) -> Result<Output, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let traj = integrate(&cfg)?;
    let fit = decay_exponent(&traj, (a.t_min, a.t_max))?;
    let expected = -(cfg.grid.dim as f64) / (2.0 * cfg.grid.alpha);
    let report = envelope(
        "decay",
        json!({ "config": a.config, "window": [a.t_min, a.t_max] }),
        json!({
            "fitted_slope": fit.fitted_slope, "expected_slope": expected, "intercept": fit.intercept,
            "c_estimate": fit.c_estimate, "power_residual": fit.power_residual,
            "exponential_residual": fit.exponential_residual, "power_law": fit.power_law, "points": fit.points,
        }),
    );
    let text = format!(
        "slope {:.4} (rate -n/2alpha = {expected:.4}), C {:.6e}, power law {}",
        fit.fitted_slope, fit.c_estimate, fit.power_law
    );
    Ok(Output { report, text, failed: false })
}

fn verify_cmd(a: &VerifyArgs) -> Result<Output, CliError> {
    let mut p = SuiteParams { alpha: a.alpha, n: a.n, ..SuiteParams::default() };
    if let Some(s) = a.seed {
        p.seed = s;
    }
    if let Some(alpha) = p.alpha {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CliError::Validation(format!("--alpha {alpha} must lie in (0, 1)")));
        }
    }
    if let Some(n) = p.n {
        if !(n >= 16 && n.is_power_of_two()) {
            return Err(CliError::Validation(format!("--n {n} must be a power of two >= 16")));
        }
    }
    let outcomes = match a.what {
        VerifyWhat::Riesz => vec![verify::riesz_check(&p), verify::criterion_1(&p)],
        VerifyWhat::ExtensionIdentity => vec![verify::criterion_2(&p)],
        VerifyWhat::Neumann => {
            vec![verify::extension_check(&p, ExtensionParts { multiplier: false, neumann: true, energy: false })]
        }
        VerifyWhat::Energy => vec![verify::criterion_4(&p)],
        VerifyWhat::All => verify::run_all(&p),
    };
    let failed = outcomes.iter().any(|o| !o.passed);
    let text = outcomes.iter().map(|o| o.line()).collect::<Vec<_>>().join("\n");
    let report = envelope(
        "verify",
        json!({ "what": format!("{:?}", a.what).to_lowercase(), "alpha": p.alpha, "n": p.n, "seed": p.seed }),
        Value::Array(outcomes.iter().map(outcome_json).collect()),
    );
    Ok(Output { report, text, failed })
}

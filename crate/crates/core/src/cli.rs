//! Command-line front end.
//!
//! Exit codes: 0 success, 1 counterexample (or operator disagreement),
//! 2 usage error, 3 numeric degeneracy or I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::disk::{subordination_probe, DEFAULT_ANGULAR_COUNT, DEFAULT_RADII};
use crate::error::{Error, Result};
use crate::forms::{k_series, p_series, BaseMode};
use crate::lashin::{apply_lashin, check_recurrence, lashin_quadrature};
use crate::literal::{parse_literal, SeriesLiteral};
use crate::presets::{all_presets, default_preset, find_preset, Preset};
use crate::report::{
    emit_curves, emit_report, CurveSummary, CurvesPayload, OperatorEval, OperatorSample, Payload, ReportDocument,
    ToleranceBlock, SCHEMA_VERSION,
};
use crate::series::{circle_points, DEFAULT_ORDER};
use crate::verifier::{
    fuzz_theorem, preset_dominants, random_sigma_function, threads_from_env, verify_preset, Classification,
    FuzzConfig, Generator, TheoremId, DEFAULT_AMPLITUDE,
};
use crate::{Grid, Lashin, Meromorphic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Largest accepted operator oracle residual in `op eval`.
pub const OPERATOR_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "merosub", version, about = "Numerical checks of subordination theorems for the Lashin operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operator utilities.
    Op {
        #[command(subcommand)]
        action: OpCommand,
    },
    /// Run one implication trial.
    Verify(TrialArgs),
    /// Run a seeded fuzz suite.
    Fuzz(FuzzArgs),
    /// List the preset registry.
    Presets {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write boundary curves of the dominant and the principal expression.
    Curves(CurveArgs),
}

#[derive(Debug, Subcommand)]
enum OpCommand {
    /// Evaluate P^alpha_beta f by series and by quadrature and compare.
    Eval(OpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    AsWritten,
    Convex,
}

impl From<ModeArg> for BaseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AsWritten => BaseMode::AsWritten,
            ModeArg::Convex => BaseMode::ConvexCombination,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct FunctionArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_AMPLITUDE)]
    amplitude: f64,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Series literal file holding f (a "meromorphic K" literal).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    grid_radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_ANGULAR_COUNT)]
    grid_n: usize,
}

#[derive(Debug, Clone, Args)]
struct TrialArgs {
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "convex")]
    mode: ModeArg,
    #[arg(long)]
    mutate_conclusion: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, Args)]
struct FuzzArgs {
    #[command(flatten)]
    trial: TrialArgs,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Debug, Clone, Args)]
struct OpArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    #[arg(long, default_value_t = 16)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct CurveArgs {
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, value_enum, default_value = "convex")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0.95)]
    radius: f64,
    #[arg(long, default_value_t = DEFAULT_ANGULAR_COUNT)]
    grid_n: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Parse { .. } | Error::Spec(_) | Error::InvalidParams { .. } => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> i32 {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("merosub: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, argv: &[String]) -> Result<i32> {
    match cmd {
        Command::Op { action: OpCommand::Eval(a) } => op_eval(a, argv),
        Command::Verify(a) => verify(a, argv),
        Command::Fuzz(a) => fuzz(a, argv),
        Command::Presets { out } => presets(out, argv),
        Command::Curves(a) => curves(a, argv),
    }
}

fn grid_from(a: &GridArgs) -> Result<Grid> {
    let radii = a.grid_radii.clone().unwrap_or_else(|| DEFAULT_RADII.to_vec());
    Grid::new(radii, a.grid_n).map_err(|e| Error::Usage(e.to_string()))
}

fn resolve_preset(theorem: Option<&str>, preset: Option<&str>) -> Result<Preset> {
    let theorem = theorem.map(str::parse::<TheoremId>).transpose()?;
    match (theorem, preset) {
        (_, Some(id)) => {
            let p = find_preset(id).ok_or_else(|| Error::Usage(format!("unknown preset '{id}'")))?;
            match theorem {
                Some(t) if t != p.theorem => {
                    Err(Error::Usage(format!("preset {id} belongs to theorem {}, not {t}", p.theorem)))
                }
                _ => Ok(p),
            }
        }
        (Some(t), None) => Ok(default_preset(t)),
        (None, None) => Err(Error::Usage("one of --theorem or --preset is required".into())),
    }
}

fn load_function(a: &FunctionArgs) -> Result<(Meromorphic, Generator)> {
    match &a.input {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            match parse_literal::<f64>(&text)? {
                SeriesLiteral::Meromorphic(f) => Ok((f, Generator::Given)),
                SeriesLiteral::Analytic(_) => Err(Error::Usage("input must be a meromorphic literal".into())),
            }
        }
        None => {
            let f = random_sigma_function(a.seed, a.order, a.amplitude).map_err(|e| match e {
                Error::GeneratorStuck(_) => e,
                other => Error::Usage(other.to_string()),
            })?;
            Ok((f, Generator::Random))
        }
    }
}

fn config_from(a: &TrialArgs, trials: usize) -> Result<FuzzConfig> {
    Ok(FuzzConfig {
        trials,
        seed: a.function.seed,
        amplitude: a.function.amplitude,
        order: a.function.order,
        mode: a.mode.into(),
        mutate: a.mutate_conclusion,
        grid: grid_from(&a.grid)?,
        threads: threads_from_env()?,
    })
}

fn preset_notes(p: &Preset) -> Vec<String> {
    let mut notes = vec![
        "subordination verdicts compare ranges on the disk |z| <= containment_radius".to_string(),
        format!("preset {}: {}", p.id, p.note),
    ];
    if p.theorem == TheoremId::L26 {
        notes.push("lemma parameters: its alpha, beta, sigma are the delta, eta, sigma fields".into());
    }
    notes
}

fn document(
    argv: &[String],
    preset: Option<&Preset>,
    payload: Payload,
    grid: &Grid,
    wall_time: Option<f64>,
) -> ReportDocument {
    ReportDocument {
        schema_version: SCHEMA_VERSION,
        command: argv.to_vec(),
        theorem: preset.map(|p| p.theorem),
        preset: preset.map(|p| p.id.to_string()),
        payload,
        tolerances: ToleranceBlock::new(grid),
        wall_time,
        notes: preset.map(preset_notes).unwrap_or_default(),
    }
}

fn publish(doc: &ReportDocument, out: Option<&Path>, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            emit_report(doc, path)?;
            println!("{summary}");
        }
        None => print!("{}", doc.to_json()),
    }
    Ok(())
}

fn op_eval(a: OpArgs, argv: &[String]) -> Result<i32> {
    let prm = Lashin::new(a.alpha, a.beta).map_err(|e| Error::Usage(e.to_string()))?;
    if a.points == 0 {
        return Err(Error::Usage("points must be positive".into()));
    }
    let (f, _) = load_function(&a.function)?;
    let image = apply_lashin(&f, &prm);
    let mut samples = Vec::with_capacity(a.points);
    for z in circle_points(a.radius, a.points) {
        let series = image.evaluate(z).map_err(|e| Error::Usage(e.to_string()))?;
        let quadrature = lashin_quadrature(&f, &prm, z).map_err(|e| match e {
            Error::Domain { .. } => Error::Usage(e.to_string()),
            other => other,
        })?;
        samples.push(OperatorSample {
            z: [z.re, z.im],
            series: [series.re, series.im],
            quadrature: [quadrature.re, quadrature.im],
            residual: (series - quadrature).norm(),
        });
    }
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let payload = OperatorEval {
        alpha: a.alpha,
        beta: a.beta,
        radius: a.radius,
        recurrence_residual: check_recurrence(&f, &prm),
        max_residual,
        tolerance: OPERATOR_TOL,
        samples,
    };
    let doc = document(argv, None, Payload::OperatorEval(payload), &Grid::default(), None);
    publish(&doc, a.out.as_deref(), &format!("max residual {max_residual:.3e}"))?;
    Ok(if max_residual < OPERATOR_TOL { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

fn verify(a: TrialArgs, argv: &[String]) -> Result<i32> {
    let preset = resolve_preset(a.theorem.as_deref(), a.preset.as_deref())?;
    let config = config_from(&a, 1)?;
    let (f, generator) = load_function(&a.function)?;
    let start = Instant::now();
    let report = verify_preset(&preset, &f, generator, &config)?;
    let wall = a.timing.then(|| start.elapsed().as_secs_f64());
    let class = report.classification;
    let summary = format!("{} {}: {:?}", preset.theorem, preset.id, class);
    let doc = document(argv, Some(&preset), Payload::Trial(report), &config.grid, wall);
    publish(&doc, a.out.as_deref(), &summary)?;
    Ok(if class == Classification::Counterexample { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

fn fuzz(a: FuzzArgs, argv: &[String]) -> Result<i32> {
    if a.trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    let preset = resolve_preset(a.trial.theorem.as_deref(), a.trial.preset.as_deref())?;
    let config = config_from(&a.trial, a.trials)?;
    let start = Instant::now();
    let mut summary = fuzz_theorem(&preset, &config)?;
    let wall = a.trial.timing.then(|| start.elapsed().as_secs_f64());
    summary.wall_time = wall;
    let c = &summary.counts;
    let line = format!(
        "{} {}: confirming {} vacuous {} counterexample {} inconclusive {}",
        preset.theorem, preset.id, c.confirming, c.vacuous, c.counterexample, c.inconclusive
    );
    let found = c.counterexample > 0;
    let doc = document(argv, Some(&preset), Payload::Fuzz(summary), &config.grid, wall);
    publish(&doc, a.trial.out.as_deref(), &line)?;
    Ok(if found { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

fn presets(out: Option<PathBuf>, argv: &[String]) -> Result<i32> {
    let all = all_presets();
    match out {
        Some(path) => {
            let doc = document(argv, None, Payload::Presets(all), &Grid::default(), None);
            emit_report(&doc, &path)?;
        }
        None => {
            for p in &all {
                println!("{:<9} {:<10} {}", p.id, p.theorem.as_str(), p.note);
            }
        }
    }
    Ok(EXIT_OK)
}

fn curves(a: CurveArgs, argv: &[String]) -> Result<i32> {
    let preset = resolve_preset(a.theorem.as_deref(), a.preset.as_deref())?;
    if !(a.radius > 0.0 && a.radius <= 0.95) {
        return Err(Error::Usage(format!("radius {} outside (0, 0.95]", a.radius)));
    }
    if a.grid_n == 0 {
        return Err(Error::Usage("grid-n must be positive".into()));
    }
    let grid = Grid::new(vec![a.radius], a.grid_n.max(crate::disk::MIN_ANGULAR_COUNT))
        .map_err(|e| Error::Usage(e.to_string()))?;
    let (f, _) = load_function(&a.function)?;
    let (q, lower) = preset_dominants(&preset, &grid)?;
    let mode: BaseMode = a.mode.into();
    let principal = if preset.theorem.uses_k() { k_series(&f, &preset.params, mode)? } else { p_series(&f, &preset.params)? };

    fs::create_dir_all(&a.out).map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    let mut series = vec![("q", q.series.clone()), ("principal", principal.clone())];
    if let Some(l) = &lower {
        series.push(("q1", l.series.clone()));
    }
    let mut summaries = Vec::new();
    for (label, s) in &series {
        let path = a.out.join(format!("{label}.csv"));
        let c = emit_curves(label, s, a.radius, a.grid_n, &path)?;
        summaries.push(CurveSummary {
            label: c.label,
            radius: c.radius,
            count: c.rows.len(),
            path: path.display().to_string(),
        });
    }
    let (subordination, error) = match subordination_probe(&principal, &q.series, &grid) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let verdict = subordination.as_ref().map(|v| format!("{:?}", v.status)).unwrap_or_else(|| "error".into());
    let payload = CurvesPayload { curves: summaries, subordination, error };
    let doc = document(argv, Some(&preset), Payload::Curves(payload), &grid, None);
    emit_report(&doc, &a.out.join("curves.json"))?;
    println!("wrote {} curves to {}; principal subordinate to q: {verdict}", series.len(), a.out.display());
    Ok(EXIT_OK)
}

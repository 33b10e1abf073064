use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use noisefit::dataset::save_circuits;
use noisefit::generators::{FamilySpec, MeasureBasis, Shots, Topology};
use noisefit::harness::{
    cmd_data_efficiency, cmd_evaluate, cmd_fit, cmd_report, efficiency_csv, to_json, DatasetSource, ExperimentConfig,
    FitReport, SynthConfig,
};
use noisefit::metrics::default_objective;
use noisefit::{Dataset, GateTag, Method, NoiseParams, Split, SplitRule};

#[derive(Parser)]
#[command(name = "noisefit", version, about = "Fit parameterized noise models to measured circuit outcomes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit noise parameters on a dataset's train split.
    Fit(FitArgs),
    /// Evaluate fixed parameters (or the default model) on a dataset.
    Evaluate(EvaluateArgs),
    /// Synthesize a dataset from hidden parameters.
    Synth(SynthArgs),
    /// Generate benchmark circuits with a manifest.
    Gen(GenArgs),
    /// Refit on nested train subsets of several sizes.
    DataEfficiency(EfficiencyArgs),
    /// Write scatter, convergence and summary files from a fit report.
    Report(ReportArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config (.json or .toml).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset directory; overrides the config's dataset source.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Largest qubit count assigned to the train split.
    #[arg(long)]
    train_max_qubits: Option<usize>,
    #[arg(long)]
    max_qubits: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Output directory for the report, study and best parameters.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue the study saved in the output directory.
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Parameters JSON with all 20 fields.
    #[arg(long, required_unless_present = "default_model", conflicts_with = "default_model")]
    params: Option<PathBuf>,
    /// Evaluate the calibration-derived default model instead.
    #[arg(long)]
    default_model: bool,
    #[arg(long, value_enum)]
    split: Option<SplitArg>,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Synth config (.json or .toml).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Shot count, or `exact` for the infinite-shot distribution.
    #[arg(long)]
    shots: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Comma-separated qubit counts.
    #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8,9")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    per_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, default_value_t = 2)]
    reps: usize,
    #[arg(long, value_enum, default_value = "cx")]
    entangler: EntanglerArg,
    /// Also emit the X-basis variant of each hardware-efficient circuit.
    #[arg(long)]
    x_basis: bool,
    #[arg(long, value_enum, default_value = "linear")]
    topology: TopologyArg,
    #[arg(long, default_value_t = 6)]
    train_max_qubits: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EfficiencyArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    #[arg(long, value_delimiter = ',', default_value = "9,12,15,18")]
    sizes: Vec<usize>,
    /// Write the table as CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// fit_report.json written by `fit`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tpe,
    Rs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Qaoa,
    HwEfficient,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum EntanglerArg {
    Cx,
    Cz,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Linear,
    AllToAll,
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(anyhow::Error::from)
    } else {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn experiment(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = match &args.config {
        Some(p) => read_config(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = &args.dataset {
        cfg.dataset = DatasetSource::Path(d.clone());
    }
    if let Some(m) = args.method {
        cfg.optimizer.method = match m {
            MethodArg::Tpe => Method::Tpe,
            MethodArg::Rs => Method::Rs,
        };
    }
    if let Some(s) = args.seed {
        cfg.optimizer.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.optimizer.trials = t;
    }
    if let Some(n) = args.train_max_qubits {
        cfg.split = Some(SplitRule { train_max_qubits: n });
    }
    if let Some(n) = args.max_qubits {
        cfg.sim.max_qubits = n;
    }
    Ok(cfg)
}

fn parse_shots(s: &str) -> Result<Shots> {
    if s == "exact" {
        return Ok(Shots::Exact);
    }
    match s.parse::<u64>() {
        Ok(n) if n > 0 => Ok(Shots::Finite(n)),
        _ => bail!("invalid shot count `{s}`"),
    }
}

fn fit(args: FitArgs) -> Result<()> {
    let mut cfg = experiment(&args.exp)?;
    if args.out.is_some() {
        cfg.output = args.out;
    }
    cfg.resume |= args.resume;
    let report = cmd_fit(&cfg)?;
    println!(
        "{}",
        to_json(&json!({
            "method": report.method,
            "trials": report.trials,
            "best_trial": report.best_trial,
            "best_value": report.best_value,
            "default_train": report.train.default.mean,
            "fitted_train": report.train.fitted.mean,
            "reduction_train": report.reduction_train,
            "default_validate": report.validate.as_ref().map(|v| v.default.mean),
            "fitted_validate": report.validate.as_ref().map(|v| v.fitted.mean),
            "reduction_validate": report.reduction_validate,
            "best_params": report.best_params,
        }))
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let ds = Dataset::load(&args.dataset)?;
    let split = args.split.map(|s| match s {
        SplitArg::Train => Split::Train,
        SplitArg::Validate => Split::Validate,
    });
    let sim = Default::default();
    let report = match &args.params {
        Some(p) => {
            let params: NoiseParams = read_json(p)?;
            cmd_evaluate(&params, &ds, split, &sim)?
        }
        None => {
            let entries = match split {
                Some(s) => ds.split(s),
                None => ds.entries.iter().collect(),
            };
            default_objective(&entries, &ds.calibration, &sim)?
        }
    };
    if args.csv {
        print!("{}", report.to_csv());
    } else {
        println!("{}", to_json(&report));
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let mut cfg: SynthConfig = match &args.config {
        Some(p) => read_config(p)?,
        None => SynthConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(s) = &args.shots {
        cfg.shots = parse_shots(s)?;
    }
    let synth = cfg.run(&Default::default())?;
    synth.save(&args.out)?;
    let ds = &synth.dataset;
    println!(
        "{}",
        to_json(&json!({
            "out": args.out,
            "circuits": ds.entries.len(),
            "train": ds.train().len(),
            "validate": ds.validate().len(),
            "shots": cfg.shots.to_string(),
        }))
    );
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let rule = SplitRule {
        train_max_qubits: args.train_max_qubits,
    };
    let entangler = match args.entangler {
        EntanglerArg::Cx => GateTag::Cx,
        EntanglerArg::Cz => GateTag::Cz,
    };
    let mut specs = Vec::new();
    for &n in &args.sizes {
        for k in 0..args.per_size {
            let seed = args.seed + k as u64;
            match args.family {
                FamilyArg::Qaoa => specs.push(FamilySpec::Qaoa {
                    n,
                    layers: args.layers,
                    seed,
                    swap_network: true,
                }),
                FamilyArg::HwEfficient => {
                    let bases: &[MeasureBasis] = if args.x_basis {
                        &[MeasureBasis::Z, MeasureBasis::XMiddle]
                    } else {
                        &[MeasureBasis::Z]
                    };
                    for &basis in bases {
                        specs.push(FamilySpec::HwEfficient {
                            n,
                            reps: args.reps,
                            seed,
                            entangler,
                            basis,
                        });
                    }
                }
                FamilyArg::Random => specs.push(FamilySpec::Random {
                    n,
                    seed,
                    topology: match args.topology {
                        TopologyArg::Linear => Topology::Linear,
                        TopologyArg::AllToAll => Topology::AllToAll,
                    },
                }),
            }
        }
    }
    let circuits = specs
        .iter()
        .map(|s| {
            let c = s.build()?;
            let split = rule.assign(&c);
            Ok((c, s.family().to_owned(), split))
        })
        .collect::<Result<Vec<_>>>()?;
    save_circuits(&args.out, &circuits)?;
    println!("{}", to_json(&json!({ "out": args.out, "circuits": circuits.len() })));
    Ok(())
}

fn data_efficiency(args: EfficiencyArgs) -> Result<()> {
    let cfg = experiment(&args.exp)?;
    cfg.validate()?;
    let ds = cfg.load_dataset()?;
    let rows = cmd_data_efficiency(&ds, &cfg.optimizer, &cfg.sim, &args.sizes)?;
    let csv = efficiency_csv(&rows);
    match &args.out {
        Some(p) => fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let r: FitReport = read_json(&args.report)?;
    let files = cmd_report(&r, &args.out)?;
    println!("{}", to_json(&json!({ "files": files })));
    Ok(())
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim().to_owned()),
    };
    let result = match cli.command {
        Command::Fit(a) => fit(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Synth(a) => synth(a),
        Command::Gen(a) => gen(a),
        Command::DataEfficiency(a) => data_efficiency(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail("runtime", format!("{e:#}")),
    }
}

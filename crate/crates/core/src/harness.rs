//! End-to-end experiment driver: fit on the train split, evaluate both splits
//! against the default model, study training-set size, and write reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{circuit_stats, GateTag};
use crate::dataset::{create_dir, read, write, Dataset, DatasetEntry, DatasetError, Split, SplitRule};
use crate::generators::{qaoa_suite, synth_experiment, synthetic_calibration, FamilySpec, GenError, Shots, SyntheticDataset};
use crate::metrics::{default_objective, evaluate_with, mean_objective, MetricError, ObjectiveReport};
use crate::noise::{build_parameterized_model, ClampTally, NoiseParams};
use crate::optimizer::{resume_study, run_study, Method, OptimizerError, SearchSpace, Study, TpeConfig};
use crate::seeds::stream_seed;
use crate::simulator::SimOptions;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("train split is empty")]
    EmptyTrain,
    #[error("validate split is empty")]
    EmptyValidate,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("requested {requested} train circuits, only {available} available")]
    SubsetTooLarge { requested: usize, available: usize },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    pub seed: u64,
    pub trials: usize,
    pub tpe: TpeConfig,
    /// Per-parameter `[low, high]` overrides of the default search space.
    pub bounds: BTreeMap<String, [f64; 2]>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Tpe,
            seed: 0,
            trials: 200,
            tpe: TpeConfig::default(),
            bounds: BTreeMap::new(),
        }
    }
}

impl OptimizerConfig {
    pub fn space(&self) -> Result<SearchSpace, HarnessError> {
        let mut space = SearchSpace::default_noise();
        for (name, [lo, hi]) in &self.bounds {
            space.set_bounds(name, *lo, *hi)?;
        }
        Ok(space)
    }
}

/// Synthetic device used by `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSpec {
    pub qubits: usize,
    pub seed: u64,
    pub entangler: GateTag,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        Self {
            qubits: 9,
            seed: 0,
            entangler: GateTag::Cx,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub device: DeviceSpec,
    /// Circuits to generate; empty means the QAOA suite below.
    pub families: Vec<FamilySpec>,
    pub qaoa_sizes: Vec<usize>,
    pub qaoa_per_size: usize,
    pub hidden: NoiseParams,
    pub shots: Shots,
    pub seed: u64,
    pub split: SplitRule,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            device: DeviceSpec::default(),
            families: Vec::new(),
            qaoa_sizes: vec![4, 5, 6, 7, 8, 9],
            qaoa_per_size: 4,
            hidden: reference_hidden_params(),
            shots: Shots::Finite(30_000),
            seed: 0,
            split: SplitRule::default(),
        }
    }
}

impl SynthConfig {
    pub fn families(&self) -> Vec<FamilySpec> {
        if self.families.is_empty() {
            qaoa_suite(&self.qaoa_sizes, self.qaoa_per_size, stream_seed(self.seed, "circuits"))
        } else {
            self.families.clone()
        }
    }

    pub fn run(&self, opts: &SimOptions) -> Result<SyntheticDataset, HarnessError> {
        let cal = synthetic_calibration(self.device.qubits, self.device.seed, self.device.entangler)?;
        Ok(synth_experiment(
            &self.families(),
            &cal,
            &self.hidden,
            self.shots,
            stream_seed(self.seed, "sampling"),
            self.split,
            opts,
        )?)
    }
}

/// Ground truth used for synthetic experiments: moderate depolarizing,
/// damping and dephasing excess over calibration, small coherent
/// over-rotations and crosstalk, correlated ZZ dephasing and readout.
pub fn reference_hidden_params() -> NoiseParams {
    NoiseParams {
        k_dep: 3.0,
        b_dep: 0.002,
        b_amp: 0.002,
        theta_x: 0.04,
        theta_y: -0.02,
        theta_z: 0.03,
        beta_1q: 1.5,
        k_dep_2q: 3.0,
        b_dep_2q: 0.01,
        b_amp_2q: 0.005,
        b_phi_2q: 0.01,
        theta_ix: 0.03,
        theta_zx: -0.05,
        theta_zz: 0.06,
        beta_2q: 1.2,
        k_zz: 0.05,
        ro_a_0011: 0.6,
        ro_b_0011: 0.004,
        ro_a_0110: 0.4,
        ro_b_0110: 0.003,
    }
}

/// Where a fit's dataset comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Path(PathBuf),
    Synth(SynthConfig),
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Synth(SynthConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub optimizer: OptimizerConfig,
    pub output: Option<PathBuf>,
    pub sim: SimOptions,
    /// Overrides the split stored with the dataset.
    pub split: Option<SplitRule>,
    /// Continue the study stored in `<output>/study.jsonl` if present.
    pub resume: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.optimizer.trials == 0 {
            return Err(HarnessError::NoTrials);
        }
        if let DatasetSource::Path(p) = &self.dataset {
            if !p.join("manifest.json").is_file() {
                return Err(HarnessError::Config(format!("{} has no manifest.json", p.display())));
            }
        }
        self.optimizer.space()?;
        Ok(())
    }

    pub fn load_dataset(&self) -> Result<Dataset, HarnessError> {
        let mut ds = match &self.dataset {
            DatasetSource::Path(p) => Dataset::load(p)?,
            DatasetSource::Synth(s) => s.run(&self.sim)?.dataset,
        };
        if let Some(rule) = self.split {
            ds.resplit(rule);
        }
        Ok(ds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReports {
    pub fitted: ObjectiveReport,
    pub default: ObjectiveReport,
}

impl SplitReports {
    pub fn reduction(&self) -> f64 {
        reduction(self.fitted.mean, self.default.mean)
    }
}

/// `100 (1 - fitted / default)`.
pub fn reduction(fitted: f64, default: f64) -> f64 {
    100.0 * (1.0 - fitted / default)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub name: String,
    pub family: String,
    pub split: Split,
    pub num_qubits: usize,
    pub depth: usize,
    pub two_qubit_gates: usize,
    pub single_qubit_gates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub method: Method,
    pub trials: usize,
    pub best_trial: usize,
    pub best_value: f64,
    pub best_params: NoiseParams,
    pub train: SplitReports,
    pub validate: Option<SplitReports>,
    pub reduction_train: f64,
    pub reduction_validate: Option<f64>,
    pub best_so_far_curve: Vec<(usize, f64)>,
    /// Clamp events summed over every model built during the study.
    pub clamp_event_totals: ClampTally,
    pub seeds: BTreeMap<String, u64>,
    pub circuits: Vec<CircuitSummary>,
}

/// Runs the study on `train` only.
pub fn fit_study(
    train: &[&DatasetEntry],
    cal: &crate::calibration::DeviceCalibration,
    opt: &OptimizerConfig,
    sim: &SimOptions,
    previous: Option<Study>,
) -> Result<(Study, ClampTally), HarnessError> {
    if train.is_empty() {
        return Err(HarnessError::EmptyTrain);
    }
    if opt.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let space = opt.space()?;
    let clamps = Mutex::new(ClampTally::default());
    let objective = |x: &[f64]| -> Result<f64, HarnessError> {
        let params = space.to_params(x)?;
        let ev = evaluate_with(train, sim, |m| build_parameterized_model(&params, cal, m))?;
        clamps.lock().expect("clamp tally").merge(&ev.clamps);
        Ok(ev.report.mean)
    };
    let study = match previous {
        Some(s) => resume_study(s, &space, opt.trials, opt.method, opt.seed, &opt.tpe, objective)?,
        None => run_study(&space, opt.trials, opt.method, opt.seed, &opt.tpe, objective)?,
    };
    Ok((study, clamps.into_inner().expect("clamp tally")))
}

fn split_reports(
    entries: &[&DatasetEntry],
    params: &NoiseParams,
    ds: &Dataset,
    sim: &SimOptions,
) -> Result<Option<SplitReports>, HarnessError> {
    if entries.is_empty() {
        return Ok(None);
    }
    Ok(Some(SplitReports {
        fitted: mean_objective(params, entries, &ds.calibration, sim)?,
        default: default_objective(entries, &ds.calibration, sim)?,
    }))
}

/// Fits on the dataset's train split and evaluates the best parameters and
/// the default model on both splits.
pub fn fit_dataset(
    ds: &Dataset,
    opt: &OptimizerConfig,
    sim: &SimOptions,
    previous: Option<Study>,
) -> Result<(FitReport, Study), HarnessError> {
    let train = ds.train();
    let (study, clamp_event_totals) = fit_study(&train, &ds.calibration, opt, sim, previous)?;
    let best = study.best_trial().expect("study has a completed trial");
    let best_params = opt.space()?.to_params(&best.params)?;
    let train_rep = split_reports(&train, &best_params, ds, sim)?.ok_or(HarnessError::EmptyTrain)?;
    let validate = split_reports(&ds.validate(), &best_params, ds, sim)?;
    let circuits = ds
        .entries
        .iter()
        .map(|e| {
            let st = circuit_stats(&e.circuit);
            CircuitSummary {
                name: e.circuit.name().to_owned(),
                family: e.family.clone(),
                split: e.split,
                num_qubits: e.circuit.measured_qubits().len(),
                depth: st.depth,
                two_qubit_gates: st.two_qubit_gates,
                single_qubit_gates: st.single_qubit_gates,
            }
        })
        .collect();
    let report = FitReport {
        method: opt.method,
        trials: study.len(),
        best_trial: best.index,
        best_value: best.value.expect("completed"),
        best_params,
        reduction_train: train_rep.reduction(),
        reduction_validate: validate.as_ref().map(SplitReports::reduction),
        train: train_rep,
        validate,
        best_so_far_curve: study.best_so_far(),
        clamp_event_totals,
        seeds: BTreeMap::from([("optimizer".to_owned(), opt.seed)]),
        circuits,
    };
    Ok((report, study))
}

pub const STUDY_FILE: &str = "study.jsonl";
pub const REPORT_FILE: &str = "fit_report.json";
pub const PARAMS_FILE: &str = "best_params.json";

/// Loads the dataset, fits, and writes the report, study and best
/// parameters to the output directory if one is set.
pub fn cmd_fit(cfg: &ExperimentConfig) -> Result<FitReport, HarnessError> {
    cfg.validate()?;
    let ds = cfg.load_dataset()?;
    let previous = match (&cfg.output, cfg.resume) {
        (Some(out), true) if out.join(STUDY_FILE).is_file() => {
            Some(Study::from_jsonl(&read(&out.join(STUDY_FILE))?)?)
        }
        _ => None,
    };
    let (mut report, study) = fit_dataset(&ds, &cfg.optimizer, &cfg.sim, previous)?;
    if let DatasetSource::Synth(s) = &cfg.dataset {
        report.seeds.insert("synth".into(), s.seed);
        report.seeds.insert("sampling".into(), stream_seed(s.seed, "sampling"));
        report.seeds.insert("device".into(), s.device.seed);
    }
    if let Some(out) = &cfg.output {
        create_dir(out)?;
        write(&out.join(STUDY_FILE), &study.to_jsonl())?;
        write(&out.join(REPORT_FILE), &to_json(&report))?;
        write(&out.join(PARAMS_FILE), &to_json(&report.best_params))?;
        cmd_report(&report, out)?;
    }
    Ok(report)
}

/// Per-circuit and mean distance for fixed parameters.
pub fn cmd_evaluate(
    params: &NoiseParams,
    ds: &Dataset,
    split: Option<Split>,
    sim: &SimOptions,
) -> Result<ObjectiveReport, HarnessError> {
    let entries: Vec<&DatasetEntry> = match split {
        Some(s) => ds.split(s),
        None => ds.entries.iter().collect(),
    };
    Ok(mean_objective(params, &entries, &ds.calibration, sim)?)
}

/// Train entries ordered round-robin over qubit counts (by name within each
/// count), so every prefix covers the sizes as evenly as possible.
pub fn nested_train_order(ds: &Dataset) -> Vec<&DatasetEntry> {
    let mut groups: BTreeMap<usize, Vec<&DatasetEntry>> = BTreeMap::new();
    for e in ds.train() {
        groups.entry(e.circuit.measured_qubits().len()).or_default().push(e);
    }
    for g in groups.values_mut() {
        g.sort_by(|a, b| a.circuit.name().cmp(b.circuit.name()));
    }
    let mut out = Vec::new();
    let longest = groups.values().map(Vec::len).max().unwrap_or(0);
    for i in 0..longest {
        for g in groups.values() {
            if let Some(e) = g.get(i) {
                out.push(*e);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub size: usize,
    pub best_value: f64,
    pub fitted_validate: f64,
    pub default_validate: f64,
    pub reduction_train: f64,
    pub reduction_validate: f64,
}

/// Refits on nested train subsets of each size and reports the reductions
/// on the full validate split.
pub fn cmd_data_efficiency(
    ds: &Dataset,
    opt: &OptimizerConfig,
    sim: &SimOptions,
    sizes: &[usize],
) -> Result<Vec<EfficiencyRow>, HarnessError> {
    let order = nested_train_order(ds);
    let validate = ds.validate();
    if validate.is_empty() {
        return Err(HarnessError::EmptyValidate);
    }
    let default_validate = default_objective(&validate, &ds.calibration, sim)?.mean;
    let space = opt.space()?;
    sizes
        .iter()
        .map(|&size| {
            if size > order.len() {
                return Err(HarnessError::SubsetTooLarge {
                    requested: size,
                    available: order.len(),
                });
            }
            let subset = &order[..size];
            let (study, _) = fit_study(subset, &ds.calibration, opt, sim, None)?;
            let best = study.best_trial().expect("completed trial");
            let params = space.to_params(&best.params)?;
            let fitted_train = best.value.expect("completed");
            let default_train = default_objective(subset, &ds.calibration, sim)?.mean;
            let fitted_validate = mean_objective(&params, &validate, &ds.calibration, sim)?.mean;
            Ok(EfficiencyRow {
                size,
                best_value: fitted_train,
                fitted_validate,
                default_validate,
                reduction_train: reduction(fitted_train, default_train),
                reduction_validate: reduction(fitted_validate, default_validate),
            })
        })
        .collect()
}

pub fn efficiency_csv(rows: &[EfficiencyRow]) -> String {
    let mut s = String::from("size,best_train,fitted_validate,default_validate,reduction_train,reduction_validate\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{},{}",
            r.size, r.best_value, r.fitted_validate, r.default_validate, r.reduction_train, r.reduction_validate
        );
    }
    s
}

pub const SCATTER_FILE: &str = "scatter.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const SUMMARY_FILE: &str = "summary.md";

/// One row per circuit: default vs fitted distance and split label.
pub fn scatter_csv(r: &FitReport) -> String {
    let mut s = String::from("circuit,split,num_qubits,default_d_h,fitted_d_h\n");
    let splits = [(Split::Train, Some(&r.train)), (Split::Validate, r.validate.as_ref())];
    for c in &r.circuits {
        let rep = splits.iter().find(|(sp, _)| *sp == c.split).and_then(|(_, rep)| *rep);
        let (d, f) = rep
            .map(|rep| (rep.default.get(&c.name), rep.fitted.get(&c.name)))
            .unwrap_or((None, None));
        let fmt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{}", c.name, c.split, c.num_qubits, fmt(d), fmt(f));
    }
    s
}

pub fn convergence_csv(r: &FitReport) -> String {
    let mut s = String::from("trial,best_so_far\n");
    for (i, v) in &r.best_so_far_curve {
        let _ = writeln!(s, "{i},{v:e}");
    }
    s
}

/// Markdown table per split: circuits, mean size and gate counts, default
/// and fitted mean distance, reduction.
pub fn summary_md(r: &FitReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Fit summary\n");
    let _ = writeln!(
        s,
        "method `{}`, {} trials, best trial {} (objective {})\n",
        r.method, r.trials, r.best_trial, r.best_value
    );
    let _ = writeln!(
        s,
        "| split | circuits | qubits | depth | 2q gates | 1q gates | default D_H | fitted D_H | reduction % |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|");
    for (split, rep) in [(Split::Train, Some(&r.train)), (Split::Validate, r.validate.as_ref())] {
        let Some(rep) = rep else { continue };
        let cs: Vec<&CircuitSummary> = r.circuits.iter().filter(|c| c.split == split).collect();
        let mean = |f: fn(&CircuitSummary) -> usize| cs.iter().map(|c| f(c) as f64).sum::<f64>() / cs.len().max(1) as f64;
        let _ = writeln!(
            s,
            "| {split} | {} | {:.1} | {:.1} | {:.1} | {:.1} | {:.4} | {:.4} | {} |",
            cs.len(),
            mean(|c| c.num_qubits),
            mean(|c| c.depth),
            mean(|c| c.two_qubit_gates),
            mean(|c| c.single_qubit_gates),
            rep.default.mean,
            rep.fitted.mean,
            rep.reduction()
        );
    }
    let c = &r.clamp_event_totals;
    let _ = writeln!(
        s,
        "\nclamp events: depolarizing {}, amplitude {}, phase {}, zz {}, readout {}",
        c.depolarizing, c.amplitude, c.phase, c.zz, c.readout
    );
    s
}

/// Writes scatter, convergence and summary files into `dir`.
pub fn cmd_report(r: &FitReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    create_dir(dir)?;
    let files = [
        (SCATTER_FILE, scatter_csv(r)),
        (CONVERGENCE_FILE, convergence_csv(r)),
        (SUMMARY_FILE, summary_md(r)),
    ];
    let mut out = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        write(&p, &body)?;
        out.push(p);
    }
    Ok(out)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

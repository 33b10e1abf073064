
use noisefit::calibration::{DeviceCalibration, EdgeCal, GateCal, QubitCal};
use noisefit::dataset::{Dataset, Observation, Split, SplitRule};
use noisefit::generators::{qaoa_suite, synth_experiment, synthetic_calibration, Shots, SyntheticDataset};
use noisefit::harness::*;
use noisefit::optimizer::Method;
use noisefit::simulator::{sample_counts, simulate, ProbDist, SimOptions};
use noisefit::{GateTag, NoiseParams};

fn small(shots: Shots) -> SyntheticDataset {
    let cal = synthetic_calibration(7, 2, GateTag::Cx).unwrap();
    let mut fams = qaoa_suite(&[3, 4], 2, 1);
    fams.extend(qaoa_suite(&[7], 1, 1));
    synth_experiment(&fams, &cal, &reference_hidden_params(), shots, 9, SplitRule { train_max_qubits: 4 }, &SimOptions::default())
        .unwrap()
}

fn opt(method: Method, trials: usize) -> OptimizerConfig {
    OptimizerConfig { method, trials, seed: 3, ..Default::default() }
}

#[test]
fn single_trial_report_is_well_formed() {
    let ds = small(Shots::Finite(2000)).dataset;
    let (r, study) = fit_dataset(&ds, &opt(Method::Rs, 1), &SimOptions::default(), None).unwrap();
    assert_eq!(r.best_so_far_curve.len(), 1);
    assert_eq!(study.len(), 1);
    assert_eq!(r.train.fitted.per_circuit.len(), 4);
    assert_eq!(r.validate.as_ref().unwrap().fitted.per_circuit.len(), 1);
    let red = 100.0 * (1.0 - r.train.fitted.mean / r.train.default.mean);
    assert_eq!(r.reduction_train, red);
    assert_eq!(r.best_value, r.train.fitted.mean);
}

#[test]
fn fit_never_reads_validation_data() {
    let ds = small(Shots::Finite(2000)).dataset;
    let mut poisoned = ds.clone();
    for e in poisoned.entries.iter_mut().filter(|e| e.split == Split::Validate) {
        let n = e.circuit.measured_qubits().len();
        let mut probs = vec![0.0; 1 << n];
        probs[1] = 1.0;
        e.observed = Observation::Exact(ProbDist::new(e.circuit.measured_qubits(), probs));
    }
    let o = opt(Method::Tpe, 25);
    let (a, sa) = fit_dataset(&ds, &o, &SimOptions::default(), None).unwrap();
    let (b, sb) = fit_dataset(&poisoned, &o, &SimOptions::default(), None).unwrap();
    assert_eq!(sa, sb);
    assert_eq!(a.train, b.train);
    assert_ne!(a.validate, b.validate);
}

#[test]
fn empty_train_split_is_an_error() {
    let mut ds = small(Shots::Exact).dataset;
    ds.resplit(SplitRule { train_max_qubits: 2 });
    assert!(matches!(
        fit_dataset(&ds, &opt(Method::Rs, 2), &SimOptions::default(), None),
        Err(HarnessError::EmptyTrain)
    ));
}

#[test]
fn evaluate_hidden_and_perturbed() {
    let s = small(Shots::Exact);
    let sim = SimOptions::default();
    let hidden = *s.hidden.reveal();
    let at_hidden = cmd_evaluate(&hidden, &s.dataset, None, &sim).unwrap();
    assert!(at_hidden.mean < 1e-12);
    let mut perturbed = hidden;
    perturbed.theta_zx += 0.05;
    assert!(cmd_evaluate(&perturbed, &s.dataset, None, &sim).unwrap().mean > at_hidden.mean);
}

fn ideal_calibration(n: usize) -> DeviceCalibration {
    let g = GateCal { error: 0.0, duration: 3.5e-8 };
    let q = QubitCal {
        t1: 1e30,
        t2: 2e30,
        readout_p01: 0.0,
        readout_p10: 0.0,
        gates: [(GateTag::Id, g), (GateTag::Sx, g), (GateTag::X, g)].into_iter().collect(),
    };
    let edges = (0..n - 1)
        .map(|i| EdgeCal { qubits: (i, i + 1), gate: GateTag::Cx, error: 0.0, duration: 3e-7 })
        .collect();
    DeviceCalibration::new(vec![q; n], edges, None, None).unwrap()
}

#[test]
fn zero_params_on_ideal_device_match_ideal_counts() {
    let cal = ideal_calibration(4);
    let shots = 20_000;
    let fams = qaoa_suite(&[4], 2, 8);
    let mut ds = synth_experiment(&fams, &cal, &NoiseParams::zero(), Shots::Exact, 0, SplitRule::default(), &SimOptions::default())
        .unwrap()
        .dataset;
    for (i, e) in ds.entries.iter_mut().enumerate() {
        let ideal = simulate(&e.circuit, None, &SimOptions::default()).unwrap();
        e.observed = Observation::Counts(sample_counts(&ideal, shots, i as u64).unwrap());
    }
    let r = cmd_evaluate(&NoiseParams::zero(), &ds, None, &SimOptions::default()).unwrap();
    // sampling floor sqrt((K-1)/(8N)) for K = 16 outcomes
    let floor = (15.0 / (8.0 * shots as f64)).sqrt();
    assert!(r.mean < 2.0 * floor, "{} vs {floor}", r.mean);
}

#[test]
fn data_efficiency_rows_and_full_size() {
    let ds = small(Shots::Finite(3000)).dataset;
    let o = opt(Method::Tpe, 22);
    let sim = SimOptions::default();
    let rows = cmd_data_efficiency(&ds, &o, &sim, &[2, 4]).unwrap();
    assert_eq!(rows.len(), 2);
    let (fit, _) = fit_dataset(&ds, &o, &sim, None).unwrap();
    let full = &rows[1];
    assert_eq!(full.best_value, fit.best_value);
    assert_eq!(full.reduction_validate, fit.reduction_validate.unwrap());
    assert_eq!(full.reduction_train, fit.reduction_train);
    assert!(matches!(
        cmd_data_efficiency(&ds, &o, &sim, &[5]),
        Err(HarnessError::SubsetTooLarge { requested: 5, available: 4 })
    ));
    let order: Vec<usize> = nested_train_order(&ds).iter().map(|e| e.circuit.num_qubits()).collect();
    assert_eq!(order, vec![3, 4, 3, 4]);
}

#[test]
fn report_files() {
    let ds = small(Shots::Finite(2000)).dataset;
    let (r, _) = fit_dataset(&ds, &opt(Method::Rs, 3), &SimOptions::default(), None).unwrap();
    let scatter = scatter_csv(&r);
    let rows: Vec<&str> = scatter.lines().skip(1).collect();
    assert_eq!(rows.len(), ds.entries.len());
    assert!(rows.iter().all(|l| l.contains(",train,") || l.contains(",validate,")));
    assert_eq!(convergence_csv(&r).lines().count(), 4);
    let summary = summary_md(&r);
    let reductions: Vec<f64> = summary
        .lines()
        .filter(|l| l.starts_with("| train") || l.starts_with("| validate"))
        .map(|l| l.trim_end_matches(" |").rsplit("| ").next().unwrap().parse().unwrap())
        .collect();
    assert!((reductions[0] - r.reduction_train).abs() < 1e-9);
    assert!((reductions[1] - r.reduction_validate.unwrap()).abs() < 1e-9);
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cmd_report(&r, tmp.path()).unwrap().len(), 3);
}

#[test]
fn dataset_round_trips_through_disk() {
    for shots in [Shots::Finite(1000), Shots::Exact] {
        let s = small(shots);
        let tmp = tempfile::tempdir().unwrap();
        s.save(tmp.path()).unwrap();
        assert!(tmp.path().join("hidden_params.json").is_file());
        let back = Dataset::load(tmp.path()).unwrap();
        assert_eq!(back, s.dataset);
    }
}

#[test]
fn cmd_fit_writes_outputs_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let synth = SynthConfig {
        device: DeviceSpec { qubits: 7, seed: 1, entangler: GateTag::Cx },
        qaoa_sizes: vec![3, 7],
        qaoa_per_size: 1,
        shots: Shots::Finite(1000),
        ..Default::default()
    };
    let cfg = ExperimentConfig {
        dataset: DatasetSource::Synth(synth),
        optimizer: opt(Method::Tpe, 3),
        output: Some(tmp.path().join("out")),
        ..Default::default()
    };
    let a = cmd_fit(&cfg).unwrap();
    for f in [STUDY_FILE, REPORT_FILE, PARAMS_FILE, SCATTER_FILE, CONVERGENCE_FILE, SUMMARY_FILE] {
        assert!(tmp.path().join("out").join(f).is_file(), "{f}");
    }
    assert!(a.seeds.contains_key("sampling"));
    let b = cmd_fit(&cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let bad = ExperimentConfig { optimizer: opt(Method::Tpe, 0), ..cfg };
    assert!(matches!(cmd_fit(&bad), Err(HarnessError::NoTrials)));
}

#[test]
fn config_parses_with_overrides() {
    let cfg: ExperimentConfig = serde_json::from_str(
        r#"{"dataset": {"synth": {"qaoa_sizes": [4], "shots": {"finite": 100}}},
            "optimizer": {"method": "rs", "bounds": {"k_zz": [0.0, 0.2]}}}"#,
    )
    .unwrap();
    assert_eq!(cfg.optimizer.space().unwrap().dim("k_zz").unwrap().high, 0.2);
    assert_eq!(cfg.optimizer.trials, 200);
    let bad: ExperimentConfig = serde_json::from_str(r#"{"optimizer": {"bounds": {"nope": [0.0, 1.0]}}}"#).unwrap();
    assert!(bad.validate().is_err());
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"optimiser": {}}"#).is_err());
}

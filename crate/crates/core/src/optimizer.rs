//! Bounded black-box minimization: random search and a univariate
//! tree-structured Parzen estimator.
//!
//! Every trial draws from its own ChaCha20 stream (`trial_rng(seed, index)`),
//! so a study is fully determined by (method, seed, space, objective) and a
//! resumed study continues exactly where an uninterrupted one would.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use thiserror::Error;

use crate::noise::NoiseParams;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizerError {
    #[error("dimension `{name}`: lower bound {low} is not below upper bound {high}")]
    Bounds { name: String, low: f64, high: f64 },
    #[error("dimension `{0}`: log scale needs a positive lower bound")]
    LogBound(String),
    #[error("duplicate dimension `{0}`")]
    DuplicateDim(String),
    #[error("unknown dimension `{0}`")]
    UnknownDim(String),
    #[error("search space is empty")]
    EmptySpace,
    #[error("point has {got} coordinates, space has {expected}")]
    PointSize { expected: usize, got: usize },
    #[error("study needs at least one trial")]
    NoTrials,
    #[error("all {0} trials failed; last error: {1}")]
    AllFailed(usize, String),
    #[error("study file line {line}: {message}")]
    Persist { line: usize, message: String },
    #[error("resumed study was run with {found} (seed {found_seed}), requested {expected} (seed {expected_seed})")]
    ResumeMismatch {
        expected: Method,
        expected_seed: u64,
        found: Method,
        found_seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dim {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub scale: Scale,
}

impl Dim {
    pub fn linear(name: &str, low: f64, high: f64) -> Self {
        Self {
            name: name.to_owned(),
            low,
            high,
            scale: Scale::Linear,
        }
    }

    /// Bounds in the coordinates the samplers work in (ln for log dims).
    fn internal_bounds(&self) -> (f64, f64) {
        match self.scale {
            Scale::Linear => (self.low, self.high),
            Scale::Log => (self.low.ln(), self.high.ln()),
        }
    }

    fn to_internal(&self, x: f64) -> f64 {
        match self.scale {
            Scale::Linear => x,
            Scale::Log => x.ln(),
        }
    }

    fn from_internal(&self, u: f64) -> f64 {
        let x = match self.scale {
            Scale::Linear => u,
            Scale::Log => u.exp(),
        };
        x.clamp(self.low, self.high)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Dim>", into = "Vec<Dim>")]
pub struct SearchSpace {
    dims: Vec<Dim>,
}

impl TryFrom<Vec<Dim>> for SearchSpace {
    type Error = OptimizerError;

    fn try_from(dims: Vec<Dim>) -> Result<Self, Self::Error> {
        SearchSpace::new(dims)
    }
}

impl From<SearchSpace> for Vec<Dim> {
    fn from(s: SearchSpace) -> Self {
        s.dims
    }
}

impl SearchSpace {
    pub fn new(dims: Vec<Dim>) -> Result<Self, OptimizerError> {
        if dims.is_empty() {
            return Err(OptimizerError::EmptySpace);
        }
        let mut seen = BTreeSet::new();
        for d in &dims {
            if !seen.insert(d.name.as_str()) {
                return Err(OptimizerError::DuplicateDim(d.name.clone()));
            }
            validate_dim(d)?;
        }
        Ok(Self { dims })
    }

    /// The 20 noise parameters with their default bounds.
    pub fn default_noise() -> Self {
        let dims = NoiseParams::NAMES
            .iter()
            .map(|&name| {
                let (low, high) = default_bounds(name);
                Dim::linear(name, low, high)
            })
            .collect();
        Self { dims }
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, name: &str) -> Option<&Dim> {
        self.dims.iter().find(|d| d.name == name)
    }

    pub fn set_bounds(&mut self, name: &str, low: f64, high: f64) -> Result<(), OptimizerError> {
        let d = self
            .dims
            .iter_mut()
            .find(|d| d.name == name)
            .ok_or_else(|| OptimizerError::UnknownDim(name.to_owned()))?;
        let mut next = d.clone();
        next.low = low;
        next.high = high;
        validate_dim(&next)?;
        *d = next;
        Ok(())
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dims.len() && self.dims.iter().zip(point).all(|(d, &x)| x >= d.low && x <= d.high)
    }

    /// Maps a point onto noise parameters; parameters without a dimension keep
    /// their `NoiseParams::zero()` value.
    pub fn to_params(&self, point: &[f64]) -> Result<NoiseParams, OptimizerError> {
        if point.len() != self.dims.len() {
            return Err(OptimizerError::PointSize {
                expected: self.dims.len(),
                got: point.len(),
            });
        }
        let mut values = NoiseParams::zero().to_array();
        for (d, &x) in self.dims.iter().zip(point) {
            let i = NoiseParams::NAMES
                .iter()
                .position(|&n| n == d.name)
                .ok_or_else(|| OptimizerError::UnknownDim(d.name.clone()))?;
            values[i] = x;
        }
        Ok(NoiseParams::from_array(values))
    }
}

fn validate_dim(d: &Dim) -> Result<(), OptimizerError> {
    if !(d.low < d.high) || !d.low.is_finite() || !d.high.is_finite() {
        return Err(OptimizerError::Bounds {
            name: d.name.clone(),
            low: d.low,
            high: d.high,
        });
    }
    if d.scale == Scale::Log && d.low <= 0.0 {
        return Err(OptimizerError::LogBound(d.name.clone()));
    }
    Ok(())
}

fn default_bounds(name: &str) -> (f64, f64) {
    match name {
        "k_dep" | "k_dep_2q" => (0.0, 20.0),
        "theta_x" | "theta_y" | "theta_z" | "theta_ix" | "theta_zx" | "theta_zz" => (-0.15, 0.15),
        "beta_1q" | "beta_2q" => (0.3, 3.0),
        "k_zz" => (0.0, 0.5),
        "ro_a_0011" | "ro_a_0110" => (0.0, 2.0),
        _ => (0.0, 0.05),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tpe,
    Rs,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Tpe => "tpe",
            Method::Rs => "rs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub params: Vec<f64>,
    /// `None` for failed trials.
    pub value: Option<f64>,
    pub status: TrialStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub method: Method,
    pub seed: u64,
    trials: Vec<Trial>,
    best: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct StudyHeader {
    method: Method,
    seed: u64,
}

impl Study {
    pub fn new(method: Method, seed: u64) -> Self {
        Self {
            method,
            seed,
            trials: Vec::new(),
            best: None,
        }
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    /// Index of the minimal completed value; ties go to the lowest index.
    pub fn best(&self) -> Option<usize> {
        self.best
    }

    pub fn best_trial(&self) -> Option<&Trial> {
        self.best.map(|i| &self.trials[i])
    }

    pub fn best_value(&self) -> Option<f64> {
        self.best_trial().and_then(|t| t.value)
    }

    pub fn completed(&self) -> impl Iterator<Item = &Trial> {
        self.trials.iter().filter(|t| t.status == TrialStatus::Complete)
    }

    pub fn push(&mut self, mut trial: Trial) {
        trial.index = self.trials.len();
        if trial.status == TrialStatus::Complete {
            let v = trial.value.expect("completed trial has a value");
            if self.best_value().is_none_or(|b| v < b) {
                self.best = Some(trial.index);
            }
        }
        self.trials.push(trial);
    }

    /// `(trial index, best completed value so far)` for every trial from the
    /// first completed one on.
    pub fn best_so_far(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(self.trials.len());
        let mut best = f64::INFINITY;
        for t in &self.trials {
            if let Some(v) = t.value {
                best = best.min(v);
            }
            if best.is_finite() {
                out.push((t.index, best));
            }
        }
        out
    }

    /// Header line followed by one trial per line.
    pub fn to_jsonl(&self) -> String {
        let mut s = serde_json::to_string(&StudyHeader {
            method: self.method,
            seed: self.seed,
        })
        .expect("header serializes");
        s.push('\n');
        for t in &self.trials {
            s.push_str(&serde_json::to_string(t).expect("trial serializes"));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(text: &str) -> Result<Self, OptimizerError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(OptimizerError::Persist {
            line: 1,
            message: "missing header".into(),
        })?;
        let header: StudyHeader = serde_json::from_str(first).map_err(|e| OptimizerError::Persist {
            line: 1,
            message: e.to_string(),
        })?;
        let mut study = Study::new(header.method, header.seed);
        for (i, line) in lines {
            let t: Trial = serde_json::from_str(line).map_err(|e| OptimizerError::Persist {
                line: i + 1,
                message: e.to_string(),
            })?;
            if t.index != study.len() || (t.status == TrialStatus::Complete) != t.value.is_some() {
                return Err(OptimizerError::Persist {
                    line: i + 1,
                    message: format!("inconsistent trial {}", t.index),
                });
            }
            study.push(t);
        }
        Ok(study)
    }
}

/// The PRNG stream used for trial `index` of a study seeded with `seed`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Independent uniform draw per dimension (log-uniform for log dims).
pub fn random_suggest<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Vec<f64> {
    space
        .dims
        .iter()
        .map(|d| {
            let (lo, hi) = d.internal_bounds();
            d.from_internal(lo + (hi - lo) * rng.gen::<f64>())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TpeConfig {
    pub gamma: f64,
    pub n_startup: usize,
    pub n_candidates: usize,
}

impl Default for TpeConfig {
    fn default() -> Self {
        Self {
            gamma: 0.25,
            n_startup: 20,
            n_candidates: 24,
        }
    }
}

/// One-dimensional Parzen mixture on `[low, high]`: a truncated Gaussian per
/// observation plus a uniform prior component, all weighted `1/(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parzen {
    low: f64,
    high: f64,
    mus: Vec<f64>,
    sigmas: Vec<f64>,
    // truncation mass Φ(b) − Φ(a) and Φ(a) per kernel
    mass: Vec<f64>,
    cdf_low: Vec<f64>,
}

impl Parzen {
    pub fn fit(observations: &[f64], low: f64, high: f64) -> Self {
        let width = high - low;
        let mut xs: Vec<f64> = observations.iter().map(|x| x.clamp(low, high)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let min_sigma = width / (n as f64 + 1.0).min(100.0);
        let sigmas: Vec<f64> = (0..n)
            .map(|i| {
                let left = if i > 0 { xs[i] - xs[i - 1] } else { 0.0 };
                let right = if i + 1 < n { xs[i + 1] - xs[i] } else { 0.0 };
                let s = if n == 1 { width } else { left.max(right) };
                s.clamp(min_sigma, width)
            })
            .collect();
        let std = std_normal();
        let (mut mass, mut cdf_low) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for (&mu, &s) in xs.iter().zip(&sigmas) {
            let a = std.cdf((low - mu) / s);
            let b = std.cdf((high - mu) / s);
            cdf_low.push(a);
            mass.push((b - a).max(f64::MIN_POSITIVE));
        }
        Self {
            low,
            high,
            mus: xs,
            sigmas,
            mass,
            cdf_low,
        }
    }

    fn weight(&self) -> f64 {
        1.0 / (self.mus.len() as f64 + 1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.low || x > self.high {
            return 0.0;
        }
        let std = std_normal();
        let kernels: f64 = self
            .mus
            .iter()
            .zip(&self.sigmas)
            .zip(&self.mass)
            .map(|((&mu, &s), &m)| std.pdf((x - mu) / s) / (s * m))
            .sum();
        self.weight() * (kernels + 1.0 / (self.high - self.low))
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).max(f64::MIN_POSITIVE).ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = ((rng.gen::<f64>() * (self.mus.len() + 1) as f64) as usize).min(self.mus.len());
        let u = rng.gen::<f64>();
        if k == self.mus.len() {
            return self.low + (self.high - self.low) * u;
        }
        let p = (self.cdf_low[k] + u * self.mass[k]).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        (self.mus[k] + self.sigmas[k] * std_normal().inverse_cdf(p)).clamp(self.low, self.high)
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// TPE suggestion. Falls back to `random_suggest` while fewer than
/// `n_startup` trials have completed.
pub fn tpe_suggest<R: Rng + ?Sized>(study: &Study, space: &SearchSpace, cfg: &TpeConfig, rng: &mut R) -> Vec<f64> {
    let mut done: Vec<(f64, usize, &[f64])> = study
        .completed()
        .filter(|t| t.params.len() == space.len())
        .map(|t| (t.value.expect("completed"), t.index, t.params.as_slice()))
        .collect();
    if done.len() < cfg.n_startup.max(2) {
        return random_suggest(space, rng);
    }
    done.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n_good = ((cfg.gamma * done.len() as f64).ceil() as usize).clamp(1, done.len() - 1);
    let (good, bad) = done.split_at(n_good);

    let n_cand = cfg.n_candidates.max(1);
    let mut candidates = vec![vec![0.0; space.len()]; n_cand];
    let mut scores = vec![0.0; n_cand];
    for (j, d) in space.dims.iter().enumerate() {
        let (lo, hi) = d.internal_bounds();
        let obs = |set: &[(f64, usize, &[f64])]| set.iter().map(|t| d.to_internal(t.2[j])).collect::<Vec<_>>();
        let l = Parzen::fit(&obs(good), lo, hi);
        let g = Parzen::fit(&obs(bad), lo, hi);
        for (c, score) in candidates.iter_mut().zip(scores.iter_mut()) {
            let u = l.sample(rng);
            *score += l.ln_pdf(u) - g.ln_pdf(u);
            c[j] = d.from_internal(u);
        }
    }
    let mut best = 0;
    for i in 1..n_cand {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    candidates.swap_remove(best)
}

/// Runs `n_trials` new trials, appending to `study`. The objective may fail
/// (error or non-finite value); failed trials are recorded and skipped by the
/// surrogate.
pub fn continue_study<F, E>(
    study: &mut Study,
    space: &SearchSpace,
    n_trials: usize,
    cfg: &TpeConfig,
    mut objective: F,
) -> Result<(), OptimizerError>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    E: fmt::Display,
{
    for _ in 0..n_trials {
        let index = study.len();
        let mut rng = trial_rng(study.seed, index);
        let params = match study.method {
            Method::Rs => random_suggest(space, &mut rng),
            Method::Tpe => tpe_suggest(study, space, cfg, &mut rng),
        };
        let (value, status, error) = match objective(&params) {
            Ok(v) if v.is_finite() => (Some(v), TrialStatus::Complete, None),
            Ok(v) => (None, TrialStatus::Failed, Some(format!("non-finite objective {v}"))),
            Err(e) => (None, TrialStatus::Failed, Some(e.to_string())),
        };
        study.push(Trial {
            index,
            params,
            value,
            status,
            error,
        });
    }
    if study.best().is_none() && !study.is_empty() {
        let last = study.trials().last().and_then(|t| t.error.clone()).unwrap_or_default();
        return Err(OptimizerError::AllFailed(study.len(), last));
    }
    Ok(())
}

pub fn run_study<F, E>(
    space: &SearchSpace,
    n_trials: usize,
    method: Method,
    seed: u64,
    cfg: &TpeConfig,
    objective: F,
) -> Result<Study, OptimizerError>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    E: fmt::Display,
{
    if n_trials == 0 {
        return Err(OptimizerError::NoTrials);
    }
    let mut study = Study::new(method, seed);
    continue_study(&mut study, space, n_trials, cfg, objective)?;
    Ok(study)
}

/// Continues `study` up to `total` trials, checking that it was started with
/// the same method and seed.
pub fn resume_study<F, E>(
    mut study: Study,
    space: &SearchSpace,
    total: usize,
    method: Method,
    seed: u64,
    cfg: &TpeConfig,
    objective: F,
) -> Result<Study, OptimizerError>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    E: fmt::Display,
{
    if study.method != method || study.seed != seed {
        return Err(OptimizerError::ResumeMismatch {
            expected: method,
            expected_seed: seed,
            found: study.method,
            found_seed: study.seed,
        });
    }
    if total == 0 {
        return Err(OptimizerError::NoTrials);
    }
    let remaining = total.saturating_sub(study.len());
    continue_study(&mut study, space, remaining, cfg, objective)?;
    Ok(study)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn unit() -> SearchSpace {
        SearchSpace::new(vec![Dim::linear("x", 0.0, 1.0)]).unwrap()
    }

    #[test]
    fn default_space_matches_params() {
        let s = SearchSpace::default_noise();
        assert_eq!(s.len(), 20);
        let names: Vec<&str> = s.dims().iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, NoiseParams::NAMES);
        assert_eq!(s.dim("beta_2q").unwrap().low, 0.3);
        assert_eq!(s.dim("ro_b_0110").unwrap().high, 0.05);
        let mid: Vec<f64> = s.dims().iter().map(|d| 0.5 * (d.low + d.high)).collect();
        assert_eq!(s.to_params(&mid).unwrap().k_dep, 10.0);
    }

    #[test]
    fn space_validation() {
        assert!(SearchSpace::new(vec![Dim::linear("x", 1.0, 1.0)]).is_err());
        assert!(SearchSpace::new(vec![Dim::linear("x", 0.0, 1.0), Dim::linear("x", 0.0, 2.0)]).is_err());
        let log = Dim {
            scale: Scale::Log,
            ..Dim::linear("x", 0.0, 1.0)
        };
        assert_eq!(SearchSpace::new(vec![log]), Err(OptimizerError::LogBound("x".into())));
        let mut s = SearchSpace::default_noise();
        assert!(s.set_bounds("k_zz", 0.0, 0.1).is_ok());
        assert!(s.set_bounds("nope", 0.0, 0.1).is_err());
        assert!(s.set_bounds("k_zz", 0.2, 0.1).is_err());
    }

    #[test]
    fn random_suggest_degenerate_width_and_reproducible() {
        let s = SearchSpace::new(vec![Dim::linear("x", 2.0, 2.0 + 1e-12)]).unwrap();
        for i in 0..100 {
            let x = random_suggest(&s, &mut trial_rng(3, i))[0];
            assert!((2.0..=2.0 + 1e-12).contains(&x));
        }
        let a = random_suggest(&SearchSpace::default_noise(), &mut trial_rng(7, 4));
        let b = random_suggest(&SearchSpace::default_noise(), &mut trial_rng(7, 4));
        assert_eq!(a, b);
    }

    #[test]
    fn log_scale_sampling_stays_in_bounds() {
        let s = SearchSpace::new(vec![Dim {
            scale: Scale::Log,
            ..Dim::linear("x", 1e-4, 1.0)
        }])
        .unwrap();
        let mut rng = trial_rng(1, 0);
        let below = (0..4000).filter(|_| random_suggest(&s, &mut rng)[0] < 1e-2).count();
        // half the log-range lies below 1e-2
        assert!((below as f64 / 4000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn startup_is_random_search() {
        let s = SearchSpace::default_noise();
        let study = Study::new(Method::Tpe, 5);
        let a = tpe_suggest(&study, &s, &TpeConfig::default(), &mut trial_rng(5, 0));
        let b = random_suggest(&s, &mut trial_rng(5, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn parzen_integrates_to_one() {
        let p = Parzen::fit(&[0.0, 0.1, 0.11, 0.9, 1.0], 0.0, 1.0);
        let n = 200_000;
        let h = 1.0 / n as f64;
        let integral: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * p.pdf(i as f64 * h)
            })
            .sum::<f64>()
            * h;
        assert!((integral - 1.0).abs() < 1e-6, "{integral}");
    }

    #[test]
    fn tpe_converges_on_bowl() {
        let study = run_study(&unit(), 100, Method::Tpe, 11, &TpeConfig::default(), |x| {
            Ok::<_, Infallible>((x[0] - 0.3).powi(2))
        })
        .unwrap();
        let mut last: Vec<f64> = study.trials()[80..].iter().map(|t| t.params[0]).collect();
        last.sort_by(f64::total_cmp);
        let median = 0.5 * (last[9] + last[10]);
        assert!((median - 0.3).abs() < 0.1, "{median}");
    }

    #[test]
    fn tpe_respects_bounds_with_boundary_history() {
        let s = unit();
        let mut study = Study::new(Method::Tpe, 0);
        for i in 0..40 {
            let x = if i % 2 == 0 { 0.0 } else { 1.0 };
            study.push(Trial {
                index: i,
                params: vec![x],
                value: Some(i as f64),
                status: TrialStatus::Complete,
                error: None,
            });
        }
        for i in 0..200 {
            let x = tpe_suggest(&study, &s, &TpeConfig::default(), &mut trial_rng(1, i))[0];
            assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn single_trial_study() {
        let st = run_study(&unit(), 1, Method::Tpe, 0, &TpeConfig::default(), |x| Ok::<_, Infallible>(x[0])).unwrap();
        assert_eq!(st.len(), 1);
        assert_eq!(st.best(), Some(0));
        assert!(run_study(&unit(), 0, Method::Rs, 0, &TpeConfig::default(), |x| Ok::<_, Infallible>(x[0])).is_err());
    }

    #[test]
    fn rs_best_matches_replayed_sequence() {
        let st = run_study(&unit(), 100, Method::Rs, 42, &TpeConfig::default(), |x| Ok::<_, Infallible>(x[0])).unwrap();
        let replay = (0..100)
            .map(|i| trial_rng(42, i).gen::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(st.best_value(), Some(replay));
        let curve = st.best_so_far();
        assert_eq!(curve.len(), 100);
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let st = run_study(&unit(), 10, Method::Rs, 1, &TpeConfig::default(), |_| Ok::<_, Infallible>(1.0)).unwrap();
        assert_eq!(st.best(), Some(0));
    }

    #[test]
    fn failed_trials_are_recorded_and_skipped() {
        let mut n = 0;
        let st = run_study(&unit(), 30, Method::Tpe, 2, &TpeConfig::default(), |x| {
            n += 1;
            if n % 3 == 0 {
                Err("boom")
            } else {
                Ok(x[0])
            }
        })
        .unwrap();
        assert_eq!(st.trials().iter().filter(|t| t.status == TrialStatus::Failed).count(), 10);
        assert_eq!(st.trials()[2].error.as_deref(), Some("boom"));
        let all_fail = run_study(&unit(), 5, Method::Rs, 2, &TpeConfig::default(), |_| Err::<f64, _>("nope"));
        assert_eq!(all_fail, Err(OptimizerError::AllFailed(5, "nope".into())));
        let nan = run_study(&unit(), 3, Method::Rs, 2, &TpeConfig::default(), |_| Ok::<_, Infallible>(f64::NAN));
        assert!(matches!(nan, Err(OptimizerError::AllFailed(3, _))));
    }

    #[test]
    fn resume_equals_uninterrupted() {
        let f = |x: &[f64]| Ok::<_, Infallible>((x[0] - 0.7).abs());
        let cfg = TpeConfig::default();
        let full = run_study(&unit(), 40, Method::Tpe, 9, &cfg, f).unwrap();
        let part = run_study(&unit(), 25, Method::Tpe, 9, &cfg, f).unwrap();
        let reloaded = Study::from_jsonl(&part.to_jsonl()).unwrap();
        assert_eq!(reloaded, part);
        let resumed = resume_study(reloaded, &unit(), 40, Method::Tpe, 9, &cfg, f).unwrap();
        assert_eq!(resumed, full);
        assert!(resume_study(part, &unit(), 40, Method::Rs, 9, &cfg, f).is_err());
    }

    #[test]
    fn jsonl_rejects_garbage() {
        assert!(Study::from_jsonl("").is_err());
        assert!(Study::from_jsonl("{\"method\":\"tpe\",\"seed\":1}\nnot json\n").is_err());
    }
}

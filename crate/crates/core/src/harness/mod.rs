//! Experiment registry, runner and reports.
//!
//! Every experiment is a problem, a starting point and a list of optimizer
//! configurations. Running it yields one [`ResultRow`] per configuration; a
//! run that ends in an error still produces a row, with the error reflected
//! in its termination reason.

pub mod checks;
mod report;

pub use report::{emit_report, parse_csv, parse_jsonlines, ReportFormat, CSV_HEADER};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::calculus::Objective;
use crate::error::{Error, Result};
use crate::optimizers::{run, run_with, Algorithm, OptimizerConfig, RunReport};
use crate::problems::{problem, stochastic_griewank_stream, ProblemSpec, Tag, STOCHASTIC_GRIEWANK_DIM};

/// Iteration cap used around degenerate saddles, where iterates blow up fast.
pub const SADDLE_MAX_ITERS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentKind {
    /// A registered problem from one of its initial points.
    Deterministic { problem: String, start: String },
    /// Griewank in [`STOCHASTIC_GRIEWANK_DIM`] dimensions with a fresh batch
    /// of `batch` samples `ξ ~ N(1, σ²)` every iteration, started at `(10, …, 10)`.
    StochasticGriewank { batch: usize, sigma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentDef {
    pub id: String,
    pub kind: ExperimentKind,
    pub configs: Vec<OptimizerConfig>,
    /// Independent repetitions; repetition `r` uses seed `seed + r`.
    pub repeats: usize,
    /// Excluded from `run all` unless heavy experiments are requested.
    pub heavy: bool,
}

impl ExperimentDef {
    pub fn dim(&self) -> usize {
        match &self.kind {
            ExperimentKind::Deterministic { problem: id, .. } => {
                problem(id).map(|p| p.objective.dim()).expect("registry refers to known problems")
            }
            ExperimentKind::StochasticGriewank { .. } => STOCHASTIC_GRIEWANK_DIM,
        }
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.configs.iter().map(|c| c.algorithm).collect()
    }
}

/// Command-line style overrides applied on top of a registered experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Replaces the experiment's algorithm list when set.
    pub algorithms: Option<Vec<Algorithm>>,
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub seed: u64,
    pub include_heavy: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub algorithm: String,
    pub iterations: usize,
    pub f_final: f64,
    pub grad_norm_final: f64,
    pub time_seconds: f64,
    pub f_evals: usize,
    pub termination: String,
}

impl ResultRow {
    pub fn from_report(experiment: &str, report: &RunReport) -> Self {
        let last = report.final_record();
        Self {
            experiment: experiment.to_string(),
            algorithm: report.algorithm.label().to_string(),
            iterations: report.iterations(),
            f_final: last.f,
            grad_norm_final: last.grad_norm,
            time_seconds: report.total_time.as_secs_f64(),
            f_evals: report.f_evals,
            termination: report.termination.label().to_string(),
        }
    }

    /// Equality ignoring the timing column, with NaN equal to NaN.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let bits = |a: f64, b: f64| a.to_bits() == b.to_bits();
        self.experiment == other.experiment
            && self.algorithm == other.algorithm
            && self.iterations == other.iterations
            && bits(self.f_final, other.f_final)
            && bits(self.grad_norm_final, other.grad_norm_final)
            && self.f_evals == other.f_evals
            && self.termination == other.termination
    }
}

fn configs(algorithms: &[Algorithm], dim: usize, max_iters: usize) -> Vec<OptimizerConfig> {
    algorithms.iter().map(|&a| OptimizerConfig::new(a, dim).with_max_iters(max_iters)).collect()
}

fn deterministic(id: &str, problem_id: &str, start: &str, configs: Vec<OptimizerConfig>) -> ExperimentDef {
    ExperimentDef {
        id: id.to_string(),
        kind: ExperimentKind::Deterministic { problem: problem_id.to_string(), start: start.to_string() },
        configs,
        repeats: 1,
        heavy: false,
    }
}

/// All experiments, in report order.
pub fn registry() -> Vec<ExperimentDef> {
    use Algorithm::*;
    let mut defs = Vec::new();

    let protein = crate::problems::PROTEIN_THETA0.len();
    let mut protein_configs = configs(&[V1, V2, Newton, Nqn, UtbGd], protein, 1000);
    // Newton wanders off quickly on this landscape
    protein_configs[2].max_iters = SADDLE_MAX_ITERS;
    defs.push(deterministic("protein-10mer", "protein-10mer", "theta0", protein_configs));

    let stochastic_algs = [Newton, Nqn, V1, V2, V3, V4, UtbGd];
    for (batch, heavy) in [(10, false), (100, false), (500, true), (1000, true)] {
        for (sigma_label, sigma) in [("0.1", 0.1f64.sqrt()), ("1", 1.0)] {
            let max_iters = if heavy { 1000 } else { 200 };
            defs.push(ExperimentDef {
                id: format!("griewank-stochastic-n{batch}-var{sigma_label}"),
                kind: ExperimentKind::StochasticGriewank { batch, sigma },
                configs: configs(&stochastic_algs, STOCHASTIC_GRIEWANK_DIM, max_iters),
                repeats: 1,
                heavy,
            });
        }
    }

    let bench_algs = [Newton, Nqn, V1, V2, UtbGd];
    for id in ["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"] {
        let p = problem(id).expect("registered problem");
        let dim = p.objective.dim();
        for start in &p.initial_points {
            let exp_id = if p.initial_points.len() > 1 { format!("bench-{id}-{}", start.label) } else { format!("bench-{id}") };
            defs.push(deterministic(&exp_id, id, &start.label, configs(&bench_algs, dim, 1000)));
        }
    }

    let saddle_algs = [Newton, Nqn, V1, V2, V3, V4, UtbGd];
    for id in ["f9", "f10", "f11", "f12"] {
        let dim = problem(id).expect("registered problem").objective.dim();
        defs.push(deterministic(&format!("saddle-{id}"), id, "x0", configs(&saddle_algs, dim, SADDLE_MAX_ITERS)));
    }

    defs
}

pub fn lookup(id: &str) -> Result<ExperimentDef> {
    registry().into_iter().find(|d| d.id == id).ok_or_else(|| Error::UnknownExperiment(id.to_string()))
}

fn apply_overrides(def: &ExperimentDef, opts: &RunOptions) -> Vec<OptimizerConfig> {
    let mut cfgs = match &opts.algorithms {
        None => def.configs.clone(),
        Some(algs) => algs
            .iter()
            .map(|&a| {
                def.configs.iter().find(|c| c.algorithm == a).cloned().unwrap_or_else(|| {
                    let max_iters = def.configs.first().map_or(1000, |c| c.max_iters);
                    OptimizerConfig::new(a, def.dim()).with_max_iters(max_iters)
                })
            })
            .collect(),
    };
    for c in &mut cfgs {
        if let Some(n) = opts.max_iters {
            c.max_iters = n;
        }
        if let Some(t) = opts.grad_tol {
            c.grad_tol = t;
        }
        c.seed = opts.seed;
    }
    cfgs
}

/// Full run reports of one experiment, one per configuration and repetition.
pub fn run_experiment_reports(def: &ExperimentDef, opts: &RunOptions) -> Result<Vec<(String, RunReport)>> {
    let cfgs = apply_overrides(def, opts);
    let mut out = Vec::new();
    for rep in 0..def.repeats {
        let label = if def.repeats > 1 { format!("{}#{rep}", def.id) } else { def.id.clone() };
        let seed = opts.seed.wrapping_add(rep as u64);
        match &def.kind {
            ExperimentKind::Deterministic { problem: id, start } => {
                let p = problem(id).ok_or_else(|| Error::UnknownExperiment(id.clone()))?;
                let x0 = p.start_by_label(start).ok_or_else(|| Error::UnknownExperiment(format!("{id}:{start}")))?;
                for c in &cfgs {
                    out.push((label.clone(), run(&p.objective, &x0.point, c)));
                }
            }
            ExperimentKind::StochasticGriewank { batch, sigma } => {
                let x0 = [10.0; STOCHASTIC_GRIEWANK_DIM];
                for c in &cfgs {
                    // every algorithm sees the same sequence of batches
                    let report = run_with(stochastic_griewank_stream(seed, *sigma, *batch), &x0, c);
                    out.push((label.clone(), report));
                }
            }
        }
    }
    Ok(out)
}

/// One row per configuration (and repetition); deterministic given `opts.seed`.
pub fn run_experiment(def: &ExperimentDef, opts: &RunOptions) -> Result<Vec<ResultRow>> {
    Ok(run_experiment_reports(def, opts)?.iter().map(|(id, r)| ResultRow::from_report(id, r)).collect())
}

/// Runs the registered experiments in parallel; rows come back in registry order.
pub fn run_all(opts: &RunOptions) -> Result<Vec<ResultRow>> {
    let defs: Vec<ExperimentDef> = registry().into_iter().filter(|d| opts.include_heavy || !d.heavy).collect();
    let tables: Vec<Result<Vec<ResultRow>>> = defs.par_iter().map(|d| run_experiment(d, opts)).collect();
    let mut rows = Vec::new();
    for t in tables {
        rows.extend(t?);
    }
    Ok(rows)
}

fn uniform_in_ball(rng: &mut impl Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let m = center.len();
    let dir = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
    let r = radius * rng.random::<f64>().powf(1.0 / m as f64);
    center.iter().zip(dir.iter()).map(|(c, d)| c + r * d).collect()
}

/// Fraction of runs started uniformly in the `radius`-ball around the
/// problem's saddle that escape it.
///
/// A run escapes when its final value is below `f(saddle) − 10·radius²` or
/// its final iterate is more than 1 away from the saddle. Each run is capped
/// at [`SADDLE_MAX_ITERS`] iterations.
pub fn saddle_avoidance_stats(
    problem: &ProblemSpec,
    algorithm: Algorithm,
    radius: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let saddle = match (&problem.saddle, problem.has_tag(Tag::SaddleTest)) {
        (Some(s), true) => s,
        _ => return Err(Error::UnknownExperiment(format!("{} has no saddle to test", problem.id))),
    };
    let f = &problem.objective;
    let threshold = f.value(saddle) - 10.0 * radius * radius;
    let cfg = OptimizerConfig::new(algorithm, f.dim()).with_max_iters(SADDLE_MAX_ITERS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut escaped = 0;
    for _ in 0..trials {
        let x0 = uniform_in_ball(&mut rng, saddle, radius);
        let last = run(f, &x0, &cfg).final_record().clone();
        let dist = last.x.iter().zip(saddle).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if last.f < threshold || dist > 1.0 {
            escaped += 1;
        }
    }
    Ok(escaped as f64 / trials.max(1) as f64)
}

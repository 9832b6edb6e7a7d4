//! The numbered acceptance checks, each returning a pass/fail verdict with a
//! short explanation. Used by the `acceptance` test target and `qnbt check`.

use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{run_all, RunOptions};
use crate::calculus::{fd_gradient, fd_hessian, FnObjective, Objective};
use crate::optimizers::{
    convergence_order, is_nonincreasing, run, run_with, Algorithm, LineSearchRule, OptimizerConfig, RunReport,
    Termination,
};
use crate::problems::{benchmark_suite, griewank, problem, stochastic_griewank_draw, stochastic_griewank_stream};
use crate::spectral::{step_direction, symmetric_eigendecompose, DeltaSchedule, SymmetricMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2} {}: {} ({:.2?})", self.id, self.name, self.detail, self.elapsed)
    }
}

type CheckFn = fn() -> (bool, String);

/// `(id, name, check)` for every acceptance criterion.
pub const CHECKS: [(u8, &str, CheckFn); 14] = [
    (1, "beale-v1", beale_v1),
    (2, "ackley-v1-v2", ackley),
    (3, "f3-v2-descent", f3_v2),
    (4, "rastrigin-v2", rastrigin_v2),
    (5, "protein-v1-v2", protein),
    (6, "initial-values", initial_values),
    (7, "saddle-contrast-f9", saddle_contrast),
    (8, "pigeonhole-shift", pigeonhole),
    (9, "direction-bounds", direction_bounds),
    (10, "descent-fuzz", descent_fuzz),
    (11, "quadratic-rate", quadratic_rate),
    (12, "derivative-validation", derivative_validation),
    (13, "stochastic-griewank", stochastic_sanity),
    (14, "determinism", determinism),
];

pub fn run_check(id: u8) -> Option<CheckOutcome> {
    let (id, name, check) = CHECKS.iter().copied().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (passed, detail) = check();
    Some(CheckOutcome { id, name, passed, detail, elapsed: start.elapsed() })
}

pub fn run_all_checks() -> Vec<CheckOutcome> {
    CHECKS.iter().filter_map(|c| run_check(c.0)).collect()
}

fn run_problem(id: &str, start: &str, alg: Algorithm, max_iters: usize) -> RunReport {
    let p = problem(id).expect("registered problem");
    let x0 = &p.start_by_label(start).expect("registered start").point;
    run(&p.objective, x0, &OptimizerConfig::new(alg, p.objective.dim()).with_max_iters(max_iters))
}

fn listing(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(": {}", items.join(", "))
    }
}

fn summary(r: &RunReport) -> String {
    let last = r.final_record();
    format!("{} it={} f={:.3e} |g|={:.3e} {}", r.algorithm, r.iterations(), last.f, last.grad_norm, r.termination)
}

fn beale_v1() -> (bool, String) {
    let r = run_problem("f6", "x0", Algorithm::V1, 30);
    let ok = r.final_record().f < 1e-12 && r.total_time < Duration::from_secs(5);
    (ok, summary(&r))
}

fn ackley() -> (bool, String) {
    let runs: Vec<RunReport> = [Algorithm::V1, Algorithm::V2].map(|a| run_problem("f4", "x0", a, 50)).to_vec();
    let ok = runs.iter().all(|r| r.final_record().f < 1e-8 && r.total_time < Duration::from_secs(10));
    (ok, runs.iter().map(summary).collect::<Vec<_>>().join("; "))
}

fn f3_v2() -> (bool, String) {
    let r = run_problem("f3", "x0", Algorithm::V2, 200);
    let monotone = is_nonincreasing(&r.trace);
    (r.final_record().f < 0.01 && monotone, format!("{} monotone={monotone}", summary(&r)))
}

fn rastrigin_v2() -> (bool, String) {
    let r = run_problem("f5", "x0", Algorithm::V2, 1000);
    let last = r.final_record();
    (last.grad_norm < 1e-6 && last.f <= 50.0, summary(&r))
}

fn protein() -> (bool, String) {
    let runs: Vec<RunReport> = [Algorithm::V1, Algorithm::V2].map(|a| run_problem("protein-10mer", "theta0", a, 100)).to_vec();
    let ok = runs.iter().all(|r| {
        let last = r.final_record();
        last.f <= 21.0 && last.grad_norm <= 1e-6 && r.total_time < Duration::from_secs(60)
    });
    (ok, runs.iter().map(summary).collect::<Vec<_>>().join("; "))
}

fn initial_values() -> (bool, String) {
    let mut misses = Vec::new();
    let mut checked = 0;
    for p in benchmark_suite() {
        for s in &p.initial_points {
            if let Some(f0) = s.reference_f0 {
                checked += 1;
                let v = p.objective.value(&s.point);
                let rel = (v - f0).abs() / f0.abs();
                if rel > 1e-3 {
                    misses.push(format!("{} {}: {v:.6} vs {f0} (rel {rel:.1e})", p.id, s.label));
                }
            }
        }
    }
    let detail = if misses.is_empty() {
        format!("{checked} values within 1e-3")
    } else {
        format!("{}/{checked} outside 1e-3: {}", misses.len(), misses.join(", "))
    };
    (misses.is_empty(), detail)
}

fn saddle_contrast() -> (bool, String) {
    let newton = run_problem("f9", "x0", Algorithm::Newton, 50);
    let others: Vec<RunReport> = [Algorithm::V1, Algorithm::V2].map(|a| run_problem("f9", "x0", a, 50)).to_vec();
    let ok = newton.final_record().f.abs() <= 1e-6 && others.iter().all(|r| r.final_record().f < -1.0);
    let detail = std::iter::once(&newton).chain(&others).map(summary).collect::<Vec<_>>().join("; ");
    (ok, detail)
}

fn random_symmetric(rng: &mut impl Rng, m: usize) -> SymmetricMatrix {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let g = DMatrix::from_fn(m, m, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    SymmetricMatrix::new(&g + g.transpose()).expect("finite")
}

fn pigeonhole() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    for _ in 0..1000 {
        let m = rng.random_range(1..=6);
        let a = random_symmetric(&mut rng, m);
        let eps = rng.random_range(-5.0..5.0);
        let sched = DeltaSchedule::theoretical(m);
        let s = symmetric_eigendecompose(&a).expect("decomposes");
        let found = sched.deltas().iter().any(|&d| s.shifted(d * eps).min_abs_eigenvalue() >= sched.kappa() * eps.abs());
        if !found {
            failures += 1;
        }
    }
    (failures == 0, format!("{failures} failures in 1000 cases"))
}

fn direction_bounds() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut cases, mut failures) = (0, 0);
    let slack = 1.0 + 1e-9;
    while cases < 1000 {
        let m = rng.random_range(1..=8);
        let a = random_symmetric(&mut rng, m);
        let s = symmetric_eigendecompose(&a).expect("decomposes");
        if !s.is_numerically_invertible() {
            continue;
        }
        cases += 1;
        let g = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let w = step_direction(&s, &g).expect("invertible");
        let (sp, minsp) = (s.spectral_radius(), s.min_abs_eigenvalue());
        let (gn, wn, wg) = (g.norm(), w.norm(), w.dot(&g));
        let ok = gn / sp <= wn * slack
            && wn <= gn / minsp * slack
            && gn * gn / sp <= wg * slack
            && wg <= gn * gn / minsp * slack
            && minsp * wn * wn <= wg * slack
            && wg <= sp * wn * wn * slack
            && wg > 0.0;
        if !ok {
            failures += 1;
        }
    }
    (failures == 0, format!("{failures} failures in {cases} cases"))
}

fn random_quadratic(rng: &mut impl Rng, m: usize) -> FnObjective {
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    // alternate between convex and indefinite quadratics
    let q = if rng.random_bool(0.5) { g.transpose() * &g + DMatrix::identity(m, m) * 0.1 } else { &g + g.transpose() };
    let b = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let (q1, q2, q3, b1, b2) = (q.clone(), q.clone(), q, b.clone(), b);
    FnObjective::new("quadratic", m, move |x| {
        let v = DVector::from_column_slice(x);
        0.5 * v.dot(&(&q1 * &v)) + b1.dot(&v)
    })
    .with_gradient(move |x| &q2 * DVector::from_column_slice(x) + &b2)
    .with_hessian(move |_| q3.clone())
}

/// Descent algorithms exercised by the fuzz and stochastic checks.
const DESCENT_ALGS: [Algorithm; 7] =
    [Algorithm::NqnB, Algorithm::NqnBS, Algorithm::V1, Algorithm::V2, Algorithm::V3, Algorithm::V4, Algorithm::UtbGd];

fn descent_fuzz() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut violations = Vec::new();
    for i in 0..200 {
        let alg = DESCENT_ALGS[i % DESCENT_ALGS.len()];
        let f = match i % 4 {
            0 => {
                let m = rng.random_range(2..=5);
                random_quadratic(&mut rng, m)
            }
            k => griewank([2, 5, 10][k - 1]),
        };
        let x0: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-10.0..10.0)).collect();
        let r = run(&f, &x0, &OptimizerConfig::new(alg, f.dim()).with_max_iters(100));
        if !is_nonincreasing(&r.trace) {
            violations.push(format!("run {i} ({alg} on {})", f.name()));
        }
    }
    (violations.is_empty(), format!("{} violations in 200 runs{}", violations.len(), listing(&violations)))
}

fn quadratic_rate() -> (bool, String) {
    let p = problem("f6").expect("beale");
    let x_star = [3.0, 0.5];
    let r = run(&p.objective, &[2.8, 0.45], &OptimizerConfig::new(Algorithm::NqnB, 2).with_max_iters(100));
    let order = convergence_order(&r.points(), &x_star);
    let tail_gammas: Vec<f64> = r
        .trace
        .iter()
        .filter(|t| t.x.iter().zip(&x_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < 1e-2)
        .filter_map(|t| t.gamma)
        .collect();
    let unit = !tail_gammas.is_empty() && tail_gammas.iter().all(|&g| g == 1.0);
    let ok = order.is_some_and(|o| o >= 1.7) && unit;
    (ok, format!("{} order={order:?} tail gammas={tail_gammas:?}", summary(&r)))
}

/// A named objective with analytic derivatives next to its derivative-free copy.
type DerivativePair = (String, Box<dyn Objective>, Box<dyn Objective>);

fn derivative_validation() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut objectives: Vec<DerivativePair> = Vec::new();
    for p in benchmark_suite().into_iter().filter(|p| p.objective.has_analytic_gradient()) {
        let plain = p.objective.without_derivatives();
        objectives.push((p.id.clone(), Box::new(p.objective), Box::new(plain)));
    }
    let batch = stochastic_griewank_draw(12, 1.0, 10);
    objectives.push(("griewank-batch".into(), Box::new(batch.clone()), Box::new(FnObjective::new("batch", 10, move |x| batch.value(x)))));

    let mut failures = Vec::new();
    let mut points = 0;
    for (id, analytic, plain) in &objectives {
        for _ in 0..20 {
            points += 1;
            let x: Vec<f64> = (0..analytic.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
            let g = analytic.gradient(&x).expect("analytic gradient");
            let h = analytic.hessian(&x).expect("analytic Hessian");
            let (gd, hd) = match (fd_gradient(plain.as_ref(), &x), fd_hessian(plain.as_ref(), &x)) {
                (Ok(g), Ok(h)) => (g, h),
                _ => {
                    failures.push(format!("{id}: non-finite probe"));
                    continue;
                }
            };
            let g_err = (&g - &gd).norm() / g.norm().max(1.0);
            let h_err = (&h - hd.as_matrix()).norm() / h.norm().max(1.0);
            if g_err > 1e-6 || h_err > 1e-4 {
                failures.push(format!("{id}: grad {g_err:.1e} hess {h_err:.1e}"));
            }
        }
    }
    let detail = format!("{} objectives, {points} points, {} failures{}", objectives.len(), failures.len(), listing(&failures));
    (failures.is_empty(), detail)
}

/// Re-checks each accepted step of a stochastic run against its own batch.
fn recheck_stochastic(r: &RunReport, seed: u64, sigma: f64, n: usize) -> Vec<String> {
    let mut stream = stochastic_griewank_stream(seed, sigma, n);
    let mut bad = Vec::new();
    for w in r.trace.windows(2) {
        let (cur, next) = (&w[0], &w[1]);
        let batch = stream(cur.index);
        let (f_cur, f_next) = (batch.value(&cur.x), batch.value(&next.x));
        let gamma = cur.gamma.expect("step recorded");
        let slope = cur.slope.expect("step recorded");
        let holds = match r.algorithm {
            Algorithm::UtbGd => f_next - f_cur <= -0.5 * gamma * slope,
            alg => match alg.variant().map(|v| v.search) {
                Some(LineSearchRule::Armijo) => f_next - f_cur <= -gamma * slope / 2.0,
                Some(LineSearchRule::WeakDescent) => f_next <= f_cur,
                _ => true,
            },
        };
        if !holds {
            bad.push(format!("{} step {}", r.algorithm, cur.index));
        }
    }
    bad
}

fn stochastic_sanity() -> (bool, String) {
    let (seed, sigma, n) = (0, 1.0, 10);
    let x0 = [10.0; 10];
    let mut problems = Vec::new();
    let mut summaries = Vec::new();
    for alg in DESCENT_ALGS {
        let cfg = OptimizerConfig::new(alg, 10).with_max_iters(100);
        let r = run_with(stochastic_griewank_stream(seed, sigma, n), &x0, &cfg);
        problems.extend(recheck_stochastic(&r, seed, sigma, n));
        let v_family = matches!(alg, Algorithm::V1 | Algorithm::V2 | Algorithm::V3 | Algorithm::V4);
        if v_family && (r.termination == Termination::NonFinite || r.trace.iter().any(|t| t.x.iter().any(|v| !v.is_finite()))) {
            problems.push(format!("{alg} produced a non-finite iterate"));
        }
        summaries.push(format!("{alg}:{}", r.iterations()));
    }
    let detail = format!("{} problems{} (iterations {})", problems.len(), listing(&problems), summaries.join(" "));
    (problems.is_empty(), detail)
}

fn determinism() -> (bool, String) {
    let opts = RunOptions { seed: 7, ..Default::default() };
    match (run_all(&opts), run_all(&opts)) {
        (Ok(a), Ok(b)) => {
            let same = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.same_outcome(y));
            (same, format!("{} rows, identical modulo time: {same}", a.len()))
        }
        (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_are_numbered_consecutively() {
        for (i, c) in CHECKS.iter().enumerate() {
            assert_eq!(c.0 as usize, i + 1);
        }
        assert!(run_check(0).is_none() && run_check(15).is_none());
    }

    #[test]
    fn outcome_line_shows_verdict() {
        let o = CheckOutcome { id: 3, name: "x", passed: false, detail: "d".into(), elapsed: Duration::ZERO };
        assert!(o.to_string().starts_with("[FAIL]  3 x: d"));
    }
}

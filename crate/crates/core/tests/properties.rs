use qnbt_core::harness::{
    emit_report, lookup, parse_csv, parse_jsonlines, run_experiment, saddle_avoidance_stats, ReportFormat, RunOptions,
};
use qnbt_core::optimizers::{projective_distance, LineSearchRule};
use qnbt_core::problems::{beale, griewank, problem, rastrigin};
use qnbt_core::{run, Algorithm, FnObjective, Objective, OptimizerConfig, RunReport, Termination};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMILY: [Algorithm; 7] =
    [Algorithm::Nqn, Algorithm::NqnB, Algorithm::NqnBS, Algorithm::V1, Algorithm::V2, Algorithm::V3, Algorithm::V4];

fn random_runs(seed: u64) -> Vec<RunReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objectives = [griewank(3), griewank(6), rastrigin(2), rastrigin(4), beale()];
    let mut out = Vec::new();
    for f in &objectives {
        for alg in FAMILY {
            let x0: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-4.0..4.0)).collect();
            out.push(run(f, &x0, &OptimizerConfig::new(alg, f.dim()).with_max_iters(60)));
        }
    }
    out
}

fn steps(r: &RunReport) -> impl Iterator<Item = (&qnbt_core::IterationRecord, &qnbt_core::IterationRecord)> {
    r.trace.windows(2).map(|w| (&w[0], &w[1]))
}

#[test]
fn direction_is_always_a_descent_direction() {
    for r in random_runs(1) {
        for (cur, _) in steps(&r) {
            let slope = cur.slope.unwrap();
            assert!(slope > 0.0, "{} step {}: slope {slope}", r.algorithm, cur.index);
        }
    }
}

#[test]
fn accepted_armijo_steps_satisfy_the_condition() {
    let mut checked = 0;
    for r in random_runs(2) {
        if r.algorithm.variant().map(|v| v.search) != Some(LineSearchRule::Armijo) {
            continue;
        }
        for (cur, next) in steps(&r) {
            // steps taken at the halving floor only promise f(x_{k+1}) ≤ f(x_k)
            if cur.halvings == Some(60) {
                assert!(next.f <= cur.f);
                continue;
            }
            let gamma = cur.gamma.unwrap();
            assert!(next.f - cur.f <= -gamma * cur.slope.unwrap() / 2.0, "{} step {}", r.algorithm, cur.index);
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn runs_stopping_on_gradient_tolerance_end_at_critical_points() {
    for r in random_runs(3) {
        if r.termination == Termination::GradTol {
            assert!(r.final_record().grad_norm <= 1e-10);
        }
    }
}

fn assert_same_trace(a: &RunReport, b: &RunReport) {
    assert_eq!(a.trace.len(), b.trace.len());
    for (p, q) in a.trace.iter().zip(&b.trace) {
        assert_eq!(p.x, q.x);
        assert_eq!(p.gamma, q.gamma);
    }
}

#[test]
fn capping_is_invisible_for_short_directions() {
    let f = beale();
    let x0 = [2.9, 0.48];
    let run_alg = |alg| run(&f, &x0, &OptimizerConfig::new(alg, 2));
    let (v1, v2, v3, v4) = (run_alg(Algorithm::V1), run_alg(Algorithm::V2), run_alg(Algorithm::V3), run_alg(Algorithm::V4));
    assert!(v1.trace.iter().filter_map(|t| t.w_norm).all(|w| w <= 1.0));
    assert!(v2.trace.iter().filter_map(|t| t.w_norm).all(|w| w <= 1.0));
    assert_same_trace(&v1, &v3);
    assert_same_trace(&v2, &v4);
}

/// `½xᵀQx + Σxᵢ⁴`: strictly convex, minimised at the origin.
fn quartic_bowl() -> FnObjective {
    let q = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.5, 0.5, -0.5, 2.0]);
    let (q1, q2, q3) = (q.clone(), q.clone(), q);
    FnObjective::new("quartic-bowl", 3, move |x| {
        let v = DVector::from_column_slice(x);
        0.5 * v.dot(&(&q1 * &v)) + x.iter().map(|t| t.powi(4)).sum::<f64>()
    })
    .with_gradient(move |x| &q2 * DVector::from_column_slice(x) + DVector::from_iterator(3, x.iter().map(|t| 4.0 * t.powi(3))))
    .with_hessian(move |x| &q3 + DMatrix::from_diagonal(&DVector::from_iterator(3, x.iter().map(|t| 12.0 * t * t))))
}

#[test]
fn backtracking_reproduces_plain_iterates_near_a_minimum() {
    // On an exact quadratic the full step meets the sufficient-decrease test with
    // equality and rounding decides. A quartic term that steepens the bowl keeps
    // the full step comfortably inside it.
    for (f, x0) in [(beale(), vec![2.95, 0.49]), (quartic_bowl(), vec![0.1, 0.2, -0.3])] {
        let plain = run(&f, &x0, &OptimizerConfig::new(Algorithm::Nqn, f.dim()));
        let backtracking = run(&f, &x0, &OptimizerConfig::new(Algorithm::NqnB, f.dim()));
        assert!(backtracking.trace.iter().filter_map(|t| t.gamma).all(|g| g == 1.0));
        assert_eq!(plain.trace.len(), backtracking.trace.len());
        for (p, q) in plain.trace.iter().zip(&backtracking.trace) {
            for (a, b) in p.x.iter().zip(&q.x) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{}", f.name());
            }
        }
    }
}

#[test]
fn projective_steps_vanish_on_convergent_runs() {
    let p = problem("f6").unwrap();
    for (f, x0) in [(p.objective.clone(), p.default_start().point.clone()), (beale(), vec![2.5, 0.3])] {
        let r = run(&f, &x0, &OptimizerConfig::new(Algorithm::NqnB, f.dim()));
        assert_eq!(r.termination, Termination::GradTol);
        let d: Vec<f64> = r.trace.windows(2).map(|w| projective_distance(&w[0].x, &w[1].x)).collect();
        let tail = &d[d.len() - 3..];
        assert!(tail.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        assert!(tail[2] < 1e-6, "{d:?}");
    }
}

#[test]
fn saddle_avoidance_statistics() {
    let f9 = problem("f9").unwrap();
    let escaped = saddle_avoidance_stats(&f9, Algorithm::NqnB, 1e-3, 100, 5).unwrap();
    assert!(escaped >= 0.95, "NQN_B escaped {escaped}");
    let newton = saddle_avoidance_stats(&f9, Algorithm::Newton, 1e-3, 100, 5).unwrap();
    assert!(newton <= 0.05, "Newton escaped {newton}");
}

#[test]
fn experiment_reports_round_trip() {
    let rows = run_experiment(&lookup("saddle-f9").unwrap(), &RunOptions::default()).unwrap();
    assert_eq!(rows.len(), 7);
    for (fmt, parse) in [
        (ReportFormat::Csv, parse_csv as fn(&[u8]) -> qnbt_core::Result<Vec<qnbt_core::harness::ResultRow>>),
        (ReportFormat::JsonLines, parse_jsonlines),
    ] {
        let back = parse(&emit_report(&rows, fmt).unwrap()).unwrap();
        assert_eq!(back, rows);
    }
}

#[test]
fn protein_rows_cover_the_expected_algorithms() {
    let rows = run_experiment(&lookup("protein-10mer").unwrap(), &RunOptions::default()).unwrap();
    let algs: Vec<&str> = rows.iter().map(|r| r.algorithm.as_str()).collect();
    assert_eq!(algs, ["V1", "V2", "Newton", "NQN", "UTB_GD"]);
    let v1 = &rows[0];
    assert!(v1.f_final <= 21.0 && v1.grad_norm_final <= 1e-6);
    assert!(rows[2].iterations <= 50);
}

//! Trace diagnostics: empirical convergence order, projective step length,
//! monotonicity.

use super::run::IterationRecord;

const ORDER_WINDOW: (f64, f64) = (1e-14, 1e-2);

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
}

/// Least-squares slope of `log eₙ₊₁` against `log eₙ`, `eₙ = ‖xₙ − x*‖`,
/// over consecutive pairs with both errors inside `(1e-14, 1e-2)`.
///
/// Returns `None` with fewer than two usable pairs (three points) or when all
/// usable errors coincide.
pub fn convergence_order(points: &[Vec<f64>], x_star: &[f64]) -> Option<f64> {
    let errors: Vec<f64> = points.iter().map(|p| distance(p, x_star)).collect();
    let inside = |e: f64| e > ORDER_WINDOW.0 && e < ORDER_WINDOW.1;
    let pairs: Vec<(f64, f64)> = errors
        .windows(2)
        .filter(|w| inside(w[0]) && inside(w[1]))
        .map(|w| (w[0].ln(), w[1].ln()))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// `arccos((1 + ⟨x, y⟩) / (√(1 + ‖x‖²)·√(1 + ‖y‖²)))`, the angle between
/// `(x, 1)` and `(y, 1)`.
pub fn projective_distance(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum();
    let ny: f64 = y.iter().map(|a| a * a).sum();
    let c = (1.0 + dot) / ((1.0 + nx).sqrt() * (1.0 + ny).sqrt());
    c.clamp(-1.0, 1.0).acos()
}

/// `f(x_{k+1}) ≤ f(x_k)` along the whole trace.
pub fn is_nonincreasing(trace: &[IterationRecord]) -> bool {
    trace.windows(2).all(|w| w[1].f <= w[0].f)
}

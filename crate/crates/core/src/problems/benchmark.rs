//! Benchmark functions f1–f8 and the degenerate-saddle functions f9–f12.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};

use crate::calculus::FnObjective;

/// `|x|^{4/3}`.
pub fn f1() -> FnObjective {
    FnObjective::new("f1", 1, |x| x[0].abs().powf(4.0 / 3.0))
}

/// `x³ sin(1/x)`, extended by 0 at the origin.
pub fn f2() -> FnObjective {
    FnObjective::new("f2", 1, |x| if x[0] == 0.0 { 0.0 } else { x[0].powi(3) * (1.0 / x[0]).sin() })
}

/// `100(y − |x|)² + |1 − x|`.
pub fn f3() -> FnObjective {
    FnObjective::new("f3", 2, |x| 100.0 * (x[1] - x[0].abs()).powi(2) + (1.0 - x[0]).abs())
}

pub fn ackley_value(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sq / d).sqrt()).exp() - (cos / d).exp() + E + 20.0
}

/// Ackley's function in `dim` dimensions. The first term is a cone at the
/// origin; there its gradient and Hessian contributions are taken as zero.
pub fn ackley(dim: usize) -> FnObjective {
    let d = dim as f64;
    let grad = move |x: &[f64]| {
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let r = (sq / d).sqrt();
        let e2 = (x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d).exp();
        let cone = if r > 0.0 { 4.0 * (-0.2 * r).exp() / (d * r) } else { 0.0 };
        DVector::from_fn(x.len(), |i, _| cone * x[i] + 2.0 * PI / d * e2 * (2.0 * PI * x[i]).sin())
    };
    let hess = move |x: &[f64]| {
        let m = x.len();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let r = (sq / d).sqrt();
        let e2 = (x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d).exp();
        // cone term: φ(r)·xᵢ with φ = 4e^{−0.2r}/(d r), ∂r/∂xⱼ = xⱼ/(d r)
        let (phi, dphi) = if r > 0.0 {
            let ex = (-0.2 * r).exp();
            (4.0 * ex / (d * r), 4.0 / d * ex * (-0.2 / r - 1.0 / (r * r)))
        } else {
            (0.0, 0.0)
        };
        let s: Vec<f64> = x.iter().map(|v| (2.0 * PI * v).sin()).collect();
        DMatrix::from_fn(m, m, |i, j| {
            let mut h = -(2.0 * PI / d).powi(2) * e2 * s[i] * s[j];
            if r > 0.0 {
                h += dphi * x[i] * x[j] / (d * r);
            }
            if i == j {
                h += phi + 4.0 * PI * PI / d * e2 * (2.0 * PI * x[i]).cos();
            }
            h
        })
    };
    FnObjective::new("f4", dim, ackley_value).with_gradient(grad).with_hessian(hess)
}

/// Rastrigin with `A = 10` in `dim` dimensions.
pub fn rastrigin(dim: usize) -> FnObjective {
    const A: f64 = 10.0;
    FnObjective::new("f5", dim, |x| {
        A * x.len() as f64 + x.iter().map(|v| v * v - A * (2.0 * PI * v).cos()).sum::<f64>()
    })
    .with_gradient(|x| DVector::from_iterator(x.len(), x.iter().map(|v| 2.0 * v + 2.0 * PI * A * (2.0 * PI * v).sin())))
    .with_hessian(|x| {
        let diag = DVector::from_iterator(x.len(), x.iter().map(|v| 2.0 + 4.0 * PI * PI * A * (2.0 * PI * v).cos()));
        DMatrix::from_diagonal(&diag)
    })
}

const BEALE_C: [f64; 3] = [1.5, 2.25, 2.625];

/// `Σₖ (cₖ − x + x yᵏ)²` for `k = 1, 2, 3`.
pub fn beale() -> FnObjective {
    FnObjective::new("f6", 2, |v| {
        let (x, y) = (v[0], v[1]);
        (1..=3).map(|k| (BEALE_C[k - 1] - x + x * y.powi(k as i32)).powi(2)).sum()
    })
    .with_gradient(|v| {
        let (x, y) = (v[0], v[1]);
        let mut g = DVector::zeros(2);
        for k in 1..=3i32 {
            let r = BEALE_C[k as usize - 1] - x + x * y.powi(k);
            g[0] += 2.0 * r * (y.powi(k) - 1.0);
            g[1] += 2.0 * r * f64::from(k) * x * y.powi(k - 1);
        }
        g
    })
    .with_hessian(|v| {
        let (x, y) = (v[0], v[1]);
        let mut h = DMatrix::zeros(2, 2);
        for k in 1..=3i32 {
            let kf = f64::from(k);
            let r = BEALE_C[k as usize - 1] - x + x * y.powi(k);
            let rx = y.powi(k) - 1.0;
            let ry = kf * x * y.powi(k - 1);
            let rxy = kf * y.powi(k - 1);
            let ryy = if k >= 2 { kf * (kf - 1.0) * x * y.powi(k - 2) } else { 0.0 };
            h[(0, 0)] += 2.0 * rx * rx;
            h[(0, 1)] += 2.0 * (rx * ry + r * rxy);
            h[(1, 1)] += 2.0 * (ry * ry + r * ryy);
        }
        h[(1, 0)] = h[(0, 1)];
        h
    })
}

/// Bukin #6, `100√|y − 0.01x²| + 0.01|x + 10|`.
pub fn bukin6() -> FnObjective {
    FnObjective::new("f7", 2, |v| 100.0 * (v[1] - 0.01 * v[0] * v[0]).abs().sqrt() + 0.01 * (v[0] + 10.0).abs())
}

/// Schaffer #2, `½ + (sin²(x² − y²) − ½)/(1 + 0.001(x² + y²))²`.
pub fn schaffer2() -> FnObjective {
    FnObjective::new("f8", 2, |v| {
        let (x2, y2) = (v[0] * v[0], v[1] * v[1]);
        0.5 + ((x2 - y2).sin().powi(2) - 0.5) / (1.0 + 0.001 * (x2 + y2)).powi(2)
    })
}

/// Monkey saddle `x³ − 3xy²`.
pub fn f9() -> FnObjective {
    FnObjective::new("f9", 2, |v| v[0].powi(3) - 3.0 * v[0] * v[1] * v[1])
        .with_gradient(|v| DVector::from_vec(vec![3.0 * v[0] * v[0] - 3.0 * v[1] * v[1], -6.0 * v[0] * v[1]]))
        .with_hessian(|v| DMatrix::from_row_slice(2, 2, &[6.0 * v[0], -6.0 * v[1], -6.0 * v[1], -6.0 * v[0]]))
}

/// `x²y + y²`.
pub fn f10() -> FnObjective {
    FnObjective::new("f10", 2, |v| v[0] * v[0] * v[1] + v[1] * v[1])
        .with_gradient(|v| DVector::from_vec(vec![2.0 * v[0] * v[1], v[0] * v[0] + 2.0 * v[1]]))
        .with_hessian(|v| DMatrix::from_row_slice(2, 2, &[2.0 * v[1], 2.0 * v[0], 2.0 * v[0], 2.0]))
}

/// Coefficients of [`f11`].
pub const F11_Q: [[f64; 3]; 3] = [
    [-6.53899332, -4.918748445, -1.884110645],
    [-4.918748445, -8.26397796, 2.280742435],
    [-1.884110645, 2.280742435, 1.36728532],
];

/// `Σᵢⱼ qᵢⱼ xᵢ² xⱼ²` with `q =` [`F11_Q`].
pub fn f11() -> FnObjective {
    FnObjective::new("f11", 3, |x| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += F11_Q[i][j] * x[i] * x[i] * x[j] * x[j];
            }
        }
        s
    })
    .with_gradient(|x| {
        DVector::from_fn(3, |k, _| 4.0 * x[k] * (0..3).map(|j| F11_Q[k][j] * x[j] * x[j]).sum::<f64>())
    })
    .with_hessian(|x| {
        DMatrix::from_fn(3, 3, |k, l| {
            if k == l {
                4.0 * (0..3).map(|j| F11_Q[k][j] * x[j] * x[j]).sum::<f64>() + 8.0 * F11_Q[k][k] * x[k] * x[k]
            } else {
                8.0 * F11_Q[k][l] * x[k] * x[l]
            }
        })
    })
}

/// `(x²y + y²)t`.
pub fn f12() -> FnObjective {
    FnObjective::new("f12", 3, |v| (v[0] * v[0] * v[1] + v[1] * v[1]) * v[2])
        .with_gradient(|v| {
            let (x, y, t) = (v[0], v[1], v[2]);
            DVector::from_vec(vec![2.0 * x * y * t, (x * x + 2.0 * y) * t, x * x * y + y * y])
        })
        .with_hessian(|v| {
            let (x, y, t) = (v[0], v[1], v[2]);
            DMatrix::from_row_slice(
                3,
                3,
                &[2.0 * y * t, 2.0 * x * t, 2.0 * x * y, 2.0 * x * t, 2.0 * t, x * x + 2.0 * y, 2.0 * x * y, x * x + 2.0 * y, 0.0],
            )
        })
}

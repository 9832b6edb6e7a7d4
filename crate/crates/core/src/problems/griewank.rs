use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::calculus::{FnObjective, Objective};

/// Dimension of the stochastic Griewank experiments.
pub const STOCHASTIC_GRIEWANK_DIM: usize = 10;

/// `1 + ‖x‖²/4000 − Π cos(xᵢ/√i)` with `i` counted from 1.
pub fn griewank_value(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v).sum();
    let prod: f64 = x.iter().enumerate().map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos()).product();
    1.0 + sum / 4000.0 - prod
}

fn scaled_terms(x: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let scale: Vec<f64> = (1..=x.len()).map(|i| (i as f64).sqrt()).collect();
    let cos = x.iter().zip(&scale).map(|(v, s)| (v / s).cos()).collect();
    let sin = x.iter().zip(&scale).map(|(v, s)| (v / s).sin()).collect();
    (scale, cos, sin)
}

fn product_except(c: &[f64], skip: &[usize]) -> f64 {
    c.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, v)| v).product()
}

pub fn griewank_gradient(x: &[f64]) -> DVector<f64> {
    let (scale, cos, sin) = scaled_terms(x);
    DVector::from_fn(x.len(), |i, _| x[i] / 2000.0 + sin[i] / scale[i] * product_except(&cos, &[i]))
}

pub fn griewank_hessian(x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let (scale, cos, sin) = scaled_terms(x);
    let prod: f64 = cos.iter().product();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            1.0 / 2000.0 + prod / (scale[i] * scale[i])
        } else {
            -sin[i] / scale[i] * sin[j] / scale[j] * product_except(&cos, &[i, j])
        }
    })
}

/// Deterministic Griewank function in `m` dimensions, analytic derivatives included.
pub fn griewank(m: usize) -> FnObjective {
    FnObjective::new(format!("griewank-{m}"), m, griewank_value)
        .with_gradient(griewank_gradient)
        .with_hessian(griewank_hessian)
}

/// Mini-batch objective `Fₙ(x) = (1/N) Σ f(x, ξᵢ)` with
/// `f(x, ξ) = 1 + ‖ξx‖²/4000 − Π cos(xᵢξ/√i)`, i.e. Griewank at `ξx`.
///
/// The samples are fixed at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticGriewankBatch {
    sigma: f64,
    samples: Vec<f64>,
}

impl StochasticGriewankBatch {
    /// Draws `n` samples of `ξ ~ Normal(1, σ²)`.
    pub fn draw(rng: &mut impl Rng, sigma: f64, n: usize) -> Self {
        assert!(n >= 1, "batch needs at least one sample");
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        let normal = Normal::new(1.0, sigma).expect("valid normal parameters");
        Self { sigma, samples: normal.sample_iter(rng).take(n).collect() }
    }

    /// Batch with explicit samples.
    pub fn from_samples(sigma: f64, samples: Vec<f64>) -> Self {
        Self { sigma, samples }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn scaled(x: &[f64], xi: f64) -> Vec<f64> {
        x.iter().map(|v| v * xi).collect()
    }
}

impl Objective for StochasticGriewankBatch {
    fn dim(&self) -> usize {
        STOCHASTIC_GRIEWANK_DIM
    }

    fn name(&self) -> &str {
        "stochastic-griewank"
    }

    fn value(&self, x: &[f64]) -> f64 {
        let total: f64 = self.samples.iter().map(|&xi| griewank_value(&Self::scaled(x, xi))).sum();
        total / self.samples.len() as f64
    }

    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        let mut g = DVector::zeros(x.len());
        for &xi in &self.samples {
            g += griewank_gradient(&Self::scaled(x, xi)) * xi;
        }
        Some(g / self.samples.len() as f64)
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let m = x.len();
        let mut h = DMatrix::zeros(m, m);
        for &xi in &self.samples {
            h += griewank_hessian(&Self::scaled(x, xi)) * (xi * xi);
        }
        Some(h / self.samples.len() as f64)
    }
}

/// Single seeded batch.
pub fn stochastic_griewank_draw(seed: u64, sigma: f64, n: usize) -> StochasticGriewankBatch {
    StochasticGriewankBatch::draw(&mut ChaCha8Rng::seed_from_u64(seed), sigma, n)
}

/// Fresh batch per iteration `k`, drawn from stream `k` of the seeded generator,
/// so every algorithm sees the same batch at the same iteration.
pub fn stochastic_griewank_stream(seed: u64, sigma: f64, n: usize) -> impl FnMut(usize) -> StochasticGriewankBatch {
    move |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        StochasticGriewankBatch::draw(&mut rng, sigma, n)
    }
}

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::spectral::{DeltaRule, DeltaSchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// New Q-Newton: unit step along `w`, no line search.
    Nqn,
    /// New Q-Newton Backtracking.
    NqnB,
    /// New Q-Newton Backtracking with the uncapped direction.
    NqnBS,
    V1,
    V2,
    V3,
    V4,
    Newton,
    /// Unbounded Two-way Backtracking gradient descent.
    UtbGd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Nqn,
        Algorithm::NqnB,
        Algorithm::NqnBS,
        Algorithm::V1,
        Algorithm::V2,
        Algorithm::V3,
        Algorithm::V4,
        Algorithm::Newton,
        Algorithm::UtbGd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Nqn => "NQN",
            Algorithm::NqnB => "NQN_B",
            Algorithm::NqnBS => "NQN_B_S",
            Algorithm::V1 => "V1",
            Algorithm::V2 => "V2",
            Algorithm::V3 => "V3",
            Algorithm::V4 => "V4",
            Algorithm::Newton => "Newton",
            Algorithm::UtbGd => "UTB_GD",
        }
    }

    /// Switch settings for the New Q-Newton family; `None` for the baselines.
    pub fn variant(self) -> Option<Variant> {
        use DeltaRule::{Determinant as Det, MinSpectrum as MinSp};
        use LineSearchRule::{Armijo, WeakDescent as Weak};
        let (rule, cap, search) = match self {
            Algorithm::Nqn => (Det, false, LineSearchRule::None),
            Algorithm::NqnB => (MinSp, true, Armijo),
            Algorithm::NqnBS => (MinSp, false, Armijo),
            Algorithm::V1 => (Det, true, Weak),
            Algorithm::V2 => (Det, true, Armijo),
            Algorithm::V3 => (Det, false, Weak),
            Algorithm::V4 => (Det, false, Armijo),
            Algorithm::Newton | Algorithm::UtbGd => return None,
        };
        Some(Variant { rule, cap, search })
    }

    /// Whether the method guarantees `f(x_{k+1}) ≤ f(x_k)`.
    pub fn is_descent(self) -> bool {
        !matches!(self, Algorithm::Nqn | Algorithm::Newton)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        let alg = match key.as_str() {
            "NQN" | "NEWQ" => Algorithm::Nqn,
            "NQN_B" => Algorithm::NqnB,
            "NQN_B_S" | "S" => Algorithm::NqnBS,
            "V1" => Algorithm::V1,
            "V2" => Algorithm::V2,
            "V3" => Algorithm::V3,
            "V4" => Algorithm::V4,
            "NEWTON" => Algorithm::Newton,
            "UTB_GD" | "BACK" => Algorithm::UtbGd,
            _ => return Err(Error::UnknownAlgorithm(s.to_string())),
        };
        Ok(alg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineSearchRule {
    /// Unit step.
    None,
    /// `f(x − γd) ≤ f(x)`.
    WeakDescent,
    /// `f(x − γd) − f(x) ≤ −γ⟨d, ∇f(x)⟩/2`.
    Armijo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Variant {
    pub rule: DeltaRule,
    pub cap: bool,
    pub search: LineSearchRule,
}

/// Hyperparameters of the gradient-descent baseline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdConfig {
    pub delta0: f64,
    /// Armijo constant.
    pub armijo_alpha: f64,
    /// Backtracking factor; steps grow by `1/β` in the two-way phase.
    pub beta: f64,
    /// Exponent of the unbounded cap `max(δ₀, δ₀‖∇f‖^{−κ})`.
    pub kappa: f64,
    pub max_reductions: usize,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self { delta0: 1.0, armijo_alpha: 0.5, beta: 0.7, kappa: 0.5, max_reductions: 120 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub schedule: DeltaSchedule,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    pub seed: u64,
    pub gd: GdConfig,
}

impl OptimizerConfig {
    /// Defaults for a problem of dimension `dim`.
    ///
    /// The minsp-rule methods (NQN_B, NQN_B_S) get the `m + 1` entry schedule
    /// `δⱼ = 2j`; every other method uses the short `(0, 1, −1)` schedule.
    pub fn new(algorithm: Algorithm, dim: usize) -> Self {
        let schedule = match algorithm.variant() {
            Some(v) if v.rule == DeltaRule::MinSpectrum => DeltaSchedule::theoretical(dim),
            _ => DeltaSchedule::experiment(),
        };
        Self {
            algorithm,
            alpha: 1.0,
            schedule,
            grad_tol: 1e-10,
            max_iters: 1000,
            max_halvings: 60,
            seed: 0,
            gd: GdConfig::default(),
        }
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_grad_tol(mut self, tol: f64) -> Self {
        self.grad_tol = tol;
        self
    }

    pub fn with_schedule(mut self, schedule: DeltaSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_table() {
        use DeltaRule::*;
        use LineSearchRule::*;
        let expect = [
            (Algorithm::Nqn, Determinant, false, None),
            (Algorithm::NqnB, MinSpectrum, true, Armijo),
            (Algorithm::NqnBS, MinSpectrum, false, Armijo),
            (Algorithm::V1, Determinant, true, WeakDescent),
            (Algorithm::V2, Determinant, true, Armijo),
            (Algorithm::V3, Determinant, false, WeakDescent),
            (Algorithm::V4, Determinant, false, Armijo),
        ];
        for (alg, rule, cap, search) in expect {
            assert_eq!(alg.variant(), Some(Variant { rule, cap, search }), "{alg}");
        }
        assert_eq!(Algorithm::Newton.variant(), Option::None);
        assert_eq!(Algorithm::UtbGd.variant(), Option::None);
    }

    #[test]
    fn labels_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.label().parse::<Algorithm>().unwrap(), alg);
        }
        assert_eq!("back".parse::<Algorithm>().unwrap(), Algorithm::UtbGd);
        assert!("bfgs".parse::<Algorithm>().is_err());
    }

    #[test]
    fn defaults() {
        let cfg = OptimizerConfig::new(Algorithm::V1, 3);
        assert_eq!(cfg.alpha, 1.0);
        assert_eq!(cfg.grad_tol, 1e-10);
        assert_eq!(cfg.max_halvings, 60);
        assert_eq!(cfg.schedule, DeltaSchedule::experiment());
        assert_eq!(OptimizerConfig::new(Algorithm::NqnB, 3).schedule.len(), 4);
        let gd = GdConfig::default();
        assert_eq!((gd.delta0, gd.armijo_alpha, gd.beta, gd.kappa), (1.0, 0.5, 0.7, 0.5));
    }
}

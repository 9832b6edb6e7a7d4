//! Test objectives with their reference initial points and known optima.

mod benchmark;
mod griewank;
mod protein;

pub use benchmark::{
    ackley, ackley_value, beale, bukin6, f1, f10, f11, f12, f2, f3, f9, rastrigin, schaffer2, F11_Q,
};
pub use griewank::{
    griewank, griewank_gradient, griewank_hessian, griewank_value, stochastic_griewank_draw,
    stochastic_griewank_stream, StochasticGriewankBatch, STOCHASTIC_GRIEWANK_DIM,
};
pub use protein::{interaction_coefficient, protein_energy, protein_objective, ProteinChain};

use crate::calculus::FnObjective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Smooth,
    Nonsmooth,
    SaddleTest,
    Stochastic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialPoint {
    pub label: String,
    pub point: Vec<f64>,
    /// Known value of the objective at `point`, if any.
    pub reference_f0: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub id: String,
    pub objective: FnObjective,
    pub initial_points: Vec<InitialPoint>,
    /// `(point, value)` pairs.
    pub known_optima: Vec<(Vec<f64>, f64)>,
    /// Degenerate saddle for the saddle-test problems.
    pub saddle: Option<Vec<f64>>,
    pub tags: Vec<Tag>,
}

impl ProblemSpec {
    fn new(id: &str, objective: FnObjective, tags: &[Tag]) -> Self {
        Self {
            id: id.to_string(),
            objective,
            initial_points: Vec::new(),
            known_optima: Vec::new(),
            saddle: None,
            tags: tags.to_vec(),
        }
    }

    fn start(mut self, label: &str, point: &[f64], f0: Option<f64>) -> Self {
        self.initial_points.push(InitialPoint { label: label.to_string(), point: point.to_vec(), reference_f0: f0 });
        self
    }

    fn optimum(mut self, point: &[f64], value: f64) -> Self {
        self.known_optima.push((point.to_vec(), value));
        self
    }

    fn saddle_at(mut self, point: &[f64]) -> Self {
        self.saddle = Some(point.to_vec());
        self
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    /// The first initial point; every registered problem has one.
    pub fn default_start(&self) -> &InitialPoint {
        &self.initial_points[0]
    }

    pub fn start_by_label(&self, label: &str) -> Option<&InitialPoint> {
        self.initial_points.iter().find(|p| p.label == label)
    }
}

/// Protein sequence used in the folding experiment.
pub const PROTEIN_SEQUENCE: &str = "ABBBABABAB";

/// Starting bend angles `θ₂…θ₉` for [`PROTEIN_SEQUENCE`].
pub const PROTEIN_THETA0: [f64; 8] =
    [-1.3335047, 2.76782837, -1.89518385, 2.52345111, -0.33519698, -1.98794015, 0.02088706, -1.09200044];

/// Every deterministic test problem, in a fixed order.
pub fn benchmark_suite() -> Vec<ProblemSpec> {
    use Tag::*;
    let chain = ProteinChain::from_sequence(PROTEIN_SEQUENCE).expect("valid sequence");
    vec![
        ProblemSpec::new("f1", f1(), &[Nonsmooth]).start("x0", &[1.0], Some(1.0)).optimum(&[0.0], 0.0),
        ProblemSpec::new("f2", f2(), &[Nonsmooth]).start("x0", &[0.75134554], Some(0.41200773)),
        ProblemSpec::new("f3", f3(), &[Nonsmooth])
            .start("x0", &[-0.99998925, 2.00001188], Some(102.004))
            .optimum(&[1.0, 1.0], 0.0),
        ProblemSpec::new("f4", ackley(3), &[Smooth])
            .start("x0", &[0.01, 0.02, -0.07], Some(0.262))
            .optimum(&[0.0; 3], 0.0),
        ProblemSpec::new("f5", rastrigin(4), &[Smooth])
            .start("x0", &[-4.66266579, -2.69585675, -3.08589085, -2.25482451], Some(83.892))
            .optimum(&[0.0; 4], 0.0),
        ProblemSpec::new("f6", beale(), &[Smooth])
            .start("x0", &[-0.52012358, -1.28227229], Some(28.879))
            .optimum(&[3.0, 0.5], 0.0),
        ProblemSpec::new("f7", bukin6(), &[Nonsmooth])
            .start("p1", &[4.38848192, -3.47943683], Some(191.769))
            .start("p2", &[-9.7, 0.7], Some(49.084))
            .optimum(&[-10.0, 1.0], 0.0),
        ProblemSpec::new("f8", schaffer2(), &[Smooth])
            .start("x0", &[-57.32135254, -17.85920667], Some(0.514))
            .optimum(&[0.0, 0.0], 0.0),
        ProblemSpec::new("f9", f9(), &[Smooth, SaddleTest]).start("x0", &[-0.0004322, 0.00093845], None).saddle_at(&[0.0; 2]),
        ProblemSpec::new("f10", f10(), &[Smooth, SaddleTest]).start("x0", &[0.0007154, 0.00088668], None).saddle_at(&[0.0; 2]),
        ProblemSpec::new("f11", f11(), &[Smooth, SaddleTest])
            .start("x0", &[8.52766549e-05, -4.64890817e-04, 2.75958449e-04], None)
            .saddle_at(&[0.0; 3]),
        ProblemSpec::new("f12", f12(), &[Smooth, SaddleTest])
            .start("x0", &[0.00040449, 0.00029101, -0.00029746], None)
            .saddle_at(&[0.0; 3]),
        ProblemSpec::new("griewank-10", griewank(10), &[Smooth])
            .start("x0", &[10.0; 10], Some(1.264))
            .optimum(&[0.0; 10], 0.0),
        ProblemSpec::new("protein-10mer", protein_objective(chain), &[Smooth]).start(
            "theta0",
            &PROTEIN_THETA0,
            Some(579425.218039767),
        ),
    ]
}

pub fn problem(id: &str) -> Option<ProblemSpec> {
    benchmark_suite().into_iter().find(|p| p.id == id)
}

//! Two-species (AB) toy protein: bend angles `θ₂…θ_{n−1}` of an `n`-bead chain.
//!
//! `Φ = Σᵢ V₁(θᵢ) + Σ_{j ≥ i+2} V₂(r_{ij}, ξᵢ, ξⱼ)` with
//! `V₁(θ) = ¼(1 − cos θ)`, `V₂ = 4(r⁻¹² − C(ξᵢ, ξⱼ) r⁻⁶)`,
//! `C(a, b) = (1 + a + b + 5ab)/8`, and
//! `r²ᵢⱼ = (Σ_{k=i+1}^{j−1} cos φₖ)² + (Σ_{k=i+1}^{j−1} sin φₖ)²`, `φₖ = Σ_{l=i+1}^{k} θₗ`.

use crate::calculus::FnObjective;
use crate::error::{Error, Result};

/// Bead species, `+1` for A and `−1` for B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProteinChain {
    xi: Vec<i8>,
}

impl ProteinChain {
    pub fn new(xi: Vec<i8>) -> Result<Self> {
        if xi.len() < 3 || xi.iter().any(|v| *v != 1 && *v != -1) {
            return Err(Error::InvalidChain(format!(
                "need at least 3 beads of species +1/-1, got {xi:?}"
            )));
        }
        Ok(Self { xi })
    }

    /// Parses a sequence such as `"ABBBABABAB"`.
    pub fn from_sequence(seq: &str) -> Option<Self> {
        let xi = seq
            .chars()
            .map(|c| match c {
                'A' | 'a' => Some(1),
                'B' | 'b' => Some(-1),
                _ => None,
            })
            .collect::<Option<Vec<i8>>>()?;
        Self::new(xi).ok()
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Number of free bend angles, `n − 2`.
    pub fn angle_count(&self) -> usize {
        self.xi.len() - 2
    }

    pub fn species(&self) -> &[i8] {
        &self.xi
    }

    pub fn sequence(&self) -> String {
        self.xi.iter().map(|&v| if v == 1 { 'A' } else { 'B' }).collect()
    }
}

/// `C(a, b) = (1 + a + b + 5ab)/8`.
pub fn interaction_coefficient(a: i8, b: i8) -> f64 {
    let (a, b) = (f64::from(a), f64::from(b));
    (1.0 + a + b + 5.0 * a * b) / 8.0
}

/// Energy `Φ(θ)`; `theta[0]` is `θ₂`. Coincident beads give `+∞`.
pub fn protein_energy(chain: &ProteinChain, theta: &[f64]) -> f64 {
    let n = chain.len();
    assert_eq!(theta.len(), n - 2, "expected {} bend angles", n - 2);
    // θₗ for 1-based bead index l ∈ [2, n−1]
    let angle = |l: usize| theta[l - 2];

    let bend: f64 = theta.iter().map(|t| 0.25 * (1.0 - t.cos())).sum();
    let mut pair = 0.0;
    for i in 1..=n - 2 {
        let (mut phi, mut cx, mut sy) = (0.0, 0.0, 0.0);
        // extend the partial sums one k at a time; after adding k = j−1, (cx, sy) spans i+1..=j−1
        for j in i + 2..=n {
            let k = j - 1;
            phi += angle(k);
            cx += phi.cos();
            sy += phi.sin();
            let r2 = cx * cx + sy * sy;
            let r6 = r2 * r2 * r2;
            let c = interaction_coefficient(chain.xi[i - 1], chain.xi[j - 1]);
            pair += 4.0 * (1.0 / (r6 * r6) - c / r6);
        }
    }
    bend + pair
}

/// The energy as an objective over the `n − 2` bend angles (finite differences only).
pub fn protein_objective(chain: ProteinChain) -> FnObjective {
    let name = format!("protein-{}", chain.sequence());
    let dim = chain.angle_count();
    FnObjective::new(name, dim, move |theta| protein_energy(&chain, theta))
}

//! Fixtures shared by the `solvers` benchmarks.

use qnbt_core::problems::{problem, ProblemSpec};
use qnbt_core::SymmetricMatrix;

/// A dense symmetric `n × n` matrix with a spread-out, indefinite spectrum.
pub fn dense_symmetric(n: usize) -> SymmetricMatrix {
    let entries: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let off = ((i + j) as f64).sin() / (1.0 + i.abs_diff(j) as f64);
            if i == j { i as f64 - n as f64 / 2.0 + off } else { off }
        })
        .collect();
    SymmetricMatrix::from_row_slice(n, &entries).expect("fixture is symmetric")
}

pub fn registered(id: &str) -> ProblemSpec {
    problem(id).unwrap_or_else(|| panic!("no problem {id}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(dense_symmetric(16).dim(), 16);
        assert_eq!(registered("protein-10mer").id, "protein-10mer");
    }
}

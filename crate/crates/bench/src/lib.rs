//! Fixtures shared by the benchmarks.

use treentropy_core::entropy::OperatorMatrix;
use treentropy_core::sumop::SummationOperator;
use treentropy_core::tree::random_tree;
use treentropy_core::Exponent;

/// Deterministic dense `rows x cols` operator with entries in `[-1, 1]`.
pub fn fixed_operator(rows: usize, cols: usize, p: Exponent, q: Exponent) -> OperatorMatrix {
    let entries = (0..rows)
        .map(|r| (0..cols).map(|c| ((r * 7 + c * 3) % 11) as f64 / 5.0 - 1.0).collect())
        .collect();
    OperatorMatrix::new(entries, p, q).expect("valid fixture")
}

/// Summation operator on a random tree with weights decaying along the
/// vertex order.
pub fn tree_operator(vertices: usize, k: usize, p: Exponent, q: Exponent) -> SummationOperator {
    let tree = random_tree(7, vertices, k);
    let u = (0..vertices).map(|i| 1.0 / (1.0 + i as f64).sqrt()).collect();
    let w = (0..vertices).map(|i| 1.0 / (1.0 + i as f64)).collect();
    SummationOperator::new(tree, u, w, p, q).expect("valid fixture")
}

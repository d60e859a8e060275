use crate::error::{Error, Result};
use crate::spaces::{lp_norm, Exponent};

/// A dense operator `l_p^cols -> l_q^rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    entries: Vec<f64>,
    pub source_p: Exponent,
    pub target_q: Exponent,
}

impl OperatorMatrix {
    pub fn new(rows: Vec<Vec<f64>>, source_p: Exponent, target_q: Exponent) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidMatrix("dimensions must be at least 1".into()));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_row_major(nrows, ncols, entries, source_p, target_q)
    }

    pub fn from_row_major(
        rows: usize,
        cols: usize,
        entries: Vec<f64>,
        source_p: Exponent,
        target_q: Exponent,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(OperatorMatrix {
            rows,
            cols,
            entries,
            source_p,
            target_q,
        })
    }

    /// The identity `I_nu : l_p^nu -> l_q^nu`.
    pub fn identity(nu: usize, source_p: Exponent, target_q: Exponent) -> Result<Self> {
        Self::diagonal(&vec![1.0; nu], source_p, target_q)
    }

    /// The diagonal operator `D_sigma` truncated to `sigma.len()` coordinates.
    pub fn diagonal(sigma: &[f64], source_p: Exponent, target_q: Exponent) -> Result<Self> {
        let n = sigma.len();
        let mut entries = vec![0.0; n * n];
        for (i, s) in sigma.iter().enumerate() {
            entries[i * n + i] = *s;
        }
        Self::from_row_major(n, n, entries, source_p, target_q)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == 0.0)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Writes `T x` into `out` without allocating.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn scaled(&self, lambda: f64) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.iter().map(|v| v * lambda).collect(),
            ..self.clone()
        }
    }

    /// `self + other`; both must map between the same spaces.
    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidMatrix("shape mismatch in sum".into()));
        }
        if self.source_p != other.source_p || self.target_q != other.target_q {
            return Err(Error::InvalidMatrix("exponent mismatch in sum".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_row_major(self.rows, self.cols, entries, self.source_p, self.target_q)
    }

    /// The product `self * inner` (apply `inner` first).
    pub fn compose(&self, inner: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.cols != inner.rows {
            return Err(Error::InvalidMatrix("shape mismatch in product".into()));
        }
        if self.source_p != inner.target_q {
            return Err(Error::InvalidMatrix(
                "intermediate spaces differ in product".into(),
            ));
        }
        let mut entries = vec![0.0; self.rows * inner.cols];
        for r in 0..self.rows {
            for c in 0..inner.cols {
                entries[r * inner.cols + c] =
                    (0..self.cols).map(|k| self.get(r, k) * inner.get(k, c)).sum();
            }
        }
        Self::from_row_major(self.rows, inner.cols, entries, inner.source_p, self.target_q)
    }

    pub fn with_exponents(&self, source_p: Exponent, target_q: Exponent) -> OperatorMatrix {
        OperatorMatrix {
            source_p,
            target_q,
            ..self.clone()
        }
    }
}

/// A certified upper bound on `||T||_{p->q}`.
///
/// Two bounds are combined: the `l_1 -> l_q` norm (maximal column norm, exact
/// when `p = 1`) times `||id : l_p -> l_1|| = cols^(1 - 1/p)`, and the
/// row-wise Hoelder bound `( sum_i ||row_i||_{p'}^q )^(1/q)`, which is exact
/// for `q = inf`. The smaller of the two is returned.
pub fn norm_upper_bound(t: &OperatorMatrix) -> f64 {
    let p = t.source_p;
    let q = t.target_q;
    let max_col = (0..t.cols())
        .map(|c| lp_norm(&t.column(c), q))
        .fold(0.0f64, f64::max);
    let factorized = (t.cols() as f64).powf(1.0 - p.recip()) * max_col;
    let row_norms: Vec<f64> = (0..t.rows()).map(|r| lp_norm(t.row(r), p.dual())).collect();
    let hoelder = lp_norm(&row_norms, q);
    factorized.min(hoelder)
}

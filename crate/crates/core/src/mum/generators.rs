//! Hilbert–Schmidt orthonormal SU(d) generators (generalized Gell-Mann matrices).

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;

/// Which of the three generator families an operator belongs to.
///
/// The derive order fixes the partition order: symmetric, antisymmetric, diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    Symmetric,
    Antisymmetric,
    Diagonal,
}

/// 1-based Gell-Mann index `(n, b)` plus the family of the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorLabel {
    pub kind: GeneratorKind,
    pub n: usize,
    pub b: usize,
}

/// The `d² − 1` traceless Hermitian generators with `Tr(F_i F_j) = δ_ij`.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub d: usize,
    pub ops: Vec<ComplexMatrix>,
    pub labels: Vec<GeneratorLabel>,
}

/// Builds the generator family on `C^d`:
///
/// - `(|n><b| + |b><n|)/√2` for `n < b`,
/// - `i(|n><b| − |b><n|)/√2` for `b < n`,
/// - `(Σ_{k≤n} |k><k| − n|n+1><n+1|)/√(n(n+1))` for `n = b = 1..d−1`.
pub fn su_generators(d: usize) -> Result<GeneratorSet> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "SU(d) generators need d >= 2, got {d}"
        )));
    }
    let mut ops = Vec::with_capacity(d * d - 1);
    let mut labels = Vec::with_capacity(d * d - 1);

    for n in 1..=d {
        for b in 1..=d {
            if n == b {
                continue;
            }
            let (row, col) = (n - 1, b - 1);
            let mut m = ComplexMatrix::zeros(d)?;
            let kind = if n < b {
                m[(row, col)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
                m[(col, row)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
                GeneratorKind::Symmetric
            } else {
                m[(row, col)] = Complex64::new(0.0, FRAC_1_SQRT_2);
                m[(col, row)] = Complex64::new(0.0, -FRAC_1_SQRT_2);
                GeneratorKind::Antisymmetric
            };
            ops.push(m);
            labels.push(GeneratorLabel { kind, n, b });
        }
    }
    for n in 1..d {
        let norm = 1.0 / ((n * (n + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for entry in diag.iter_mut().take(n) {
            *entry = norm;
        }
        diag[n] = -(n as f64) * norm;
        ops.push(ComplexMatrix::diag(&diag)?);
        labels.push(GeneratorLabel {
            kind: GeneratorKind::Diagonal,
            n,
            b: n,
        });
    }
    Ok(GeneratorSet { d, ops, labels })
}

/// Splits the generators into `d + 1` disjoint groups of `d − 1`.
///
/// Operators are sorted by `(kind, n, b)` and chunked consecutively; group `b`
/// (0-based here) supplies `F_{n,b}` for `n = 1..d−1` in chunk order. Returns
/// indices into `g.ops`.
pub fn partition_generators(g: &GeneratorSet) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..g.ops.len()).collect();
    order.sort_by_key(|&i| g.labels[i]);
    order.chunks(g.d - 1).map(|c| c.to_vec()).collect()
}

//! Complete sets of `d + 1` mutually unbiased measurements in any dimension.
//!
//! The generators are partitioned into `d + 1` groups of `d − 1`, each group
//! yields `d` traceless operators `F_n^(b)`, and the measurement elements are
//! `P_n^(b) = I/d + t F_n^(b)`. The largest admissible `t` gives the largest
//! efficiency `kappa = 1/d + t²(1+√d)²(d−1)`.

mod generators;
mod mub;
mod verify;

pub use generators::{
    partition_generators, su_generators, GeneratorKind, GeneratorLabel, GeneratorSet,
};
pub use mub::{is_prime, mub_prime, Basis};
pub use verify::{verify_f_conditions, verify_mums, FVerification, MumVerification};

use crate::error::{Error, Result};
use crate::opalg::{min_eigenvalue, ComplexMatrix, HERMITIAN_TOL};

/// Measurement elements with eigenvalues below `-PSD_TOL` are rejected.
pub const PSD_TOL: f64 = 1e-10;

/// Default tolerance for [`verify_mums`] and [`verify_f_conditions`].
pub const VERIFY_TOL: f64 = 1e-9;

/// Grid of operators indexed `[b][n]`, both 0-based.
pub type OperatorGrid = Vec<Vec<ComplexMatrix>>;

/// `F_n^(b) = F^(b) − (d+√d) F_{n,b}` for `n < d` and `F_d^(b) = (1+√d) F^(b)`,
/// where `F^(b)` is the sum of the generators in group `b`.
pub fn build_f_operators(d: usize) -> Result<OperatorGrid> {
    let g = su_generators(d)?;
    let groups = partition_generators(&g);
    let sqrt_d = (d as f64).sqrt();
    let mut grid = Vec::with_capacity(d + 1);
    for group in groups {
        let mut total = ComplexMatrix::zeros(d)?;
        for &i in &group {
            total = total.add_scaled(&g.ops[i], 1.0)?;
        }
        let mut row = Vec::with_capacity(d);
        for &i in &group {
            row.push(total.add_scaled(&g.ops[i], -(d as f64 + sqrt_d))?);
        }
        row.push(total.scale_real(1.0 + sqrt_d));
        grid.push(row);
    }
    Ok(grid)
}

/// Efficiency of the generator construction at parameter `t`.
pub fn kappa_from_t(d: usize, t: f64) -> f64 {
    let df = d as f64;
    let s = 1.0 + df.sqrt();
    1.0 / df + t * t * s * s * (df - 1.0)
}

/// Largest `t` with `I/d + t F_n^(b) ⪰ 0` for every element.
pub fn max_t(d: usize) -> Result<f64> {
    max_t_for(d, &build_f_operators(d)?)
}

fn max_t_for(d: usize, f_ops: &OperatorGrid) -> Result<f64> {
    let mut best = f64::INFINITY;
    for f in f_ops.iter().flatten() {
        let lambda = min_eigenvalue(f, HERMITIAN_TOL)?;
        if lambda < 0.0 {
            best = best.min(1.0 / (d as f64) / lambda.abs());
        }
    }
    if !best.is_finite() {
        return Err(Error::Contract(
            "no generator operator has a negative eigenvalue".into(),
        ));
    }
    Ok(best)
}

/// A set of `M` measurements with `d` elements each on `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct MumSet {
    d: usize,
    t: f64,
    kappa: f64,
    operators: OperatorGrid,
    f_ops: OperatorGrid,
}

impl MumSet {
    /// Assembles a set without checking any invariant; use [`verify_mums`].
    ///
    /// `f_ops` may be empty when the traceless parts are unknown.
    pub fn from_parts(
        d: usize,
        t: f64,
        kappa: f64,
        operators: OperatorGrid,
        f_ops: OperatorGrid,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!(
                "MUM dimension must be >= 2, got {d}"
            )));
        }
        if operators.is_empty() {
            return Err(Error::Shape(
                "a measurement set needs at least one measurement".into(),
            ));
        }
        for (b, row) in operators.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Shape(format!(
                    "measurement {} has {} elements, expected {d}",
                    b + 1,
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|p| p.dim() != d) {
                return Err(Error::Shape(format!(
                    "measurement {} holds a {}x{} element, expected {d}x{d}",
                    b + 1,
                    bad.dim(),
                    bad.dim()
                )));
            }
        }
        if !f_ops.is_empty()
            && (f_ops.len() != operators.len() || f_ops.iter().any(|r| r.len() != d))
        {
            return Err(Error::Shape(
                "f_ops grid does not match the operator grid".into(),
            ));
        }
        Ok(Self {
            d,
            t,
            kappa,
            operators,
            f_ops,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of measurements `M`.
    pub fn m(&self) -> usize {
        self.operators.len()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `P_n^(b)` grid, `[b][n]`.
    pub fn operators(&self) -> &OperatorGrid {
        &self.operators
    }

    /// Measurement `b` (0-based).
    pub fn measurement(&self, b: usize) -> &[ComplexMatrix] {
        &self.operators[b]
    }

    /// `F_n^(b)` grid; empty if unknown.
    pub fn f_ops(&self) -> &OperatorGrid {
        &self.f_ops
    }

    /// The first `m` measurements, an incomplete set with the same efficiency.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.m() {
            return Err(Error::Configuration(format!(
                "cannot truncate a set of {} measurements to {m}",
                self.m()
            )));
        }
        Ok(Self {
            d: self.d,
            t: self.t,
            kappa: self.kappa,
            operators: self.operators[..m].to_vec(),
            f_ops: if self.f_ops.is_empty() {
                Vec::new()
            } else {
                self.f_ops[..m].to_vec()
            },
        })
    }
}

/// Builds the complete set of `d + 1` MUMs.
///
/// `t` defaults to [`max_t`]; an explicit `t` must satisfy `0 < t ≤ max_t(d)`,
/// otherwise the first element with an eigenvalue below `-PSD_TOL` is reported.
pub fn build_mums(d: usize, t: Option<f64>) -> Result<MumSet> {
    let f_ops = build_f_operators(d)?;
    let t = match t {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => {
            return Err(Error::Contract(format!(
                "construction parameter t must be positive and finite, got {t}"
            )))
        }
        None => max_t_for(d, &f_ops)?,
    };
    let identity_part = ComplexMatrix::identity(d)?.scale_real(1.0 / d as f64);
    let mut operators = Vec::with_capacity(d + 1);
    for (b, row) in f_ops.iter().enumerate() {
        let mut elems = Vec::with_capacity(d);
        for (n, f) in row.iter().enumerate() {
            let p = identity_part.add_scaled(f, t)?;
            let lambda = min_eigenvalue(&p, HERMITIAN_TOL)?;
            if lambda < -PSD_TOL {
                return Err(Error::PositivityViolation {
                    b: b + 1,
                    n: n + 1,
                    min_eigenvalue: lambda,
                });
            }
            elems.push(p);
        }
        operators.push(elems);
    }
    MumSet::from_parts(d, t, kappa_from_t(d, t), operators, f_ops)
}

/// Replaces every element (and every `F_n^(b)`) by its transpose.
pub fn transpose_mums(s: &MumSet) -> MumSet {
    let tr = |grid: &OperatorGrid| -> OperatorGrid {
        grid.iter()
            .map(|row| row.iter().map(ComplexMatrix::transpose).collect())
            .collect()
    };
    MumSet {
        d: s.d,
        t: s.t,
        kappa: s.kappa,
        operators: tr(&s.operators),
        f_ops: tr(&s.f_ops),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn qubit_f_operators() {
        let f = build_f_operators(2).unwrap();
        let g = su_generators(2).unwrap();
        let groups = partition_generators(&g);
        let s = 1.0 + SQRT_2;
        for (b, group) in groups.iter().enumerate() {
            let gen = &g.ops[group[0]];
            assert!(f[b][0].max_abs_diff(&gen.scale_real(-s)).unwrap() < 1e-14);
            assert!(f[b][1].max_abs_diff(&gen.scale_real(s)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn f_operators_sum_to_zero() {
        for d in 2..=6 {
            for row in build_f_operators(d).unwrap() {
                let mut total = ComplexMatrix::zeros(d).unwrap();
                for f in &row {
                    total = &total + f;
                    assert!(f.trace().norm() < 1e-10);
                    assert!(f.hermitian_deviation() < 1e-12);
                }
                assert!(total.max_abs() <= 1e-10, "d={d}");
            }
        }
    }

    #[test]
    fn f_gram_structure_qutrit() {
        let d = 3usize;
        let s = 1.0 + 3f64.sqrt();
        let f = build_f_operators(d).unwrap();
        for row in &f {
            for (n, a) in row.iter().enumerate() {
                for (m, b) in row.iter().enumerate() {
                    let want = if n == m { s * s * 2.0 } else { -s * s };
                    let got = a.trace_product(b).unwrap();
                    assert!((got - Complex64::new(want, 0.0)).norm() <= 1e-9);
                }
            }
        }
        assert_abs_diff_eq!(s * s * 2.0, 14.928203230275509, epsilon = 1e-12);
    }

    #[test]
    fn qubit_max_t_and_kappa() {
        let t = max_t(2).unwrap();
        assert_abs_diff_eq!(t, 1.0 / (2.0 + SQRT_2), epsilon = 1e-12);
        assert_abs_diff_eq!(t, 0.2928932188134524, epsilon = 1e-12);
        assert_abs_diff_eq!(kappa_from_t(2, t), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kappa_from_t(2, 1.0 / (2.0 + SQRT_2)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kappa_formula_edges() {
        for d in 2..=8 {
            assert_eq!(kappa_from_t(d, 0.0), 1.0 / d as f64);
            let mut prev = kappa_from_t(d, 0.0);
            for i in 1..=50 {
                let k = kappa_from_t(d, i as f64 * 0.01);
                assert!(k > prev);
                prev = k;
            }
        }
    }

    #[test]
    fn build_sets_satisfy_invariants() {
        for d in 2..=8 {
            let s = build_mums(d, None).unwrap();
            assert_eq!(s.m(), d + 1);
            assert!(s.kappa() > 1.0 / d as f64 && s.kappa() <= 1.0 + 1e-12);
            let report = verify_mums(&s, VERIFY_TOL);
            assert!(report.passed, "d={d}: {report:?}");
        }
    }

    #[test]
    fn qubit_set_is_projective() {
        let s = build_mums(2, None).unwrap();
        for p in s.operators().iter().flatten() {
            let p2 = p.matmul(p).unwrap();
            assert!(p2.max_abs_diff(p).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn half_t_qutrit_kappa() {
        let t = max_t(3).unwrap() / 2.0;
        let s = build_mums(3, Some(t)).unwrap();
        let s3 = 1.0 + 3f64.sqrt();
        let want = 1.0 / 3.0 + t * t * s3 * s3 * 2.0;
        assert_abs_diff_eq!(s.kappa(), want, epsilon = 1e-15);
        assert!(s.kappa() > 1.0 / 3.0 && s.kappa() < 1.0);
        assert!(verify_mums(&s, VERIFY_TOL).passed);
    }

    #[test]
    fn max_t_is_supremum() {
        for d in 2..=6 {
            let t = max_t(d).unwrap();
            match build_mums(d, Some(t * (1.0 + 1e-6))) {
                Err(Error::PositivityViolation {
                    b,
                    n,
                    min_eigenvalue,
                }) => {
                    assert!(b >= 1 && b <= d + 1 && n >= 1 && n <= d);
                    assert!(min_eigenvalue < -PSD_TOL);
                }
                other => panic!("d={d}: expected positivity violation, got {other:?}"),
            }
        }
        assert!(matches!(build_mums(3, Some(0.0)), Err(Error::Contract(_))));
        assert!(matches!(build_mums(3, Some(-0.1)), Err(Error::Contract(_))));
    }

    #[test]
    fn transpose_is_involution_and_valid() {
        for d in 2..=6 {
            let s = build_mums(d, None).unwrap();
            let t = transpose_mums(&s);
            assert_eq!(t.kappa(), s.kappa());
            assert!(verify_mums(&t, VERIFY_TOL).passed);
            assert_eq!(transpose_mums(&t), s);
        }
    }

    #[test]
    fn truncation() {
        let s = build_mums(3, None).unwrap();
        let t = s.truncated(2).unwrap();
        assert_eq!(t.m(), 2);
        assert_eq!(t.kappa(), s.kappa());
        assert!(s.truncated(0).is_err());
        assert!(s.truncated(5).is_err());
    }
}

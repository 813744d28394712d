//! Definitional checks for measurement sets. Failures are data, not errors.

use serde::{Deserialize, Serialize};

use super::{kappa_from_t, MumSet, OperatorGrid};
use crate::opalg::{min_eigenvalue, ComplexMatrix};

/// Largest absolute deviation per MUM condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MumVerification {
    pub tol: f64,
    pub hermitian: f64,
    pub unit_trace: f64,
    /// `max(0, −λ_min)` over all elements.
    pub psd: f64,
    pub completeness: f64,
    /// Worst deviation from the pairwise trace relations.
    pub trace_relations: f64,
    pub kappa_formula: f64,
    /// `1/d < kappa ≤ 1` (with `tol` slack at the top, strict margin at the bottom).
    pub kappa_in_range: bool,
    pub passed: bool,
}

/// Checks unit trace, positivity, completeness and
/// `Tr(P_n^(b) P_n'^(b')) = δ_nn' δ_bb' κ + (1−δ_nn') δ_bb' (1−κ)/(d−1) + (1−δ_bb')/d`.
pub fn verify_mums(s: &MumSet, tol: f64) -> MumVerification {
    let d = s.d();
    let df = d as f64;
    let kappa = s.kappa();
    let ops = s.operators();
    let identity = ComplexMatrix::identity(d).expect("d >= 2");

    let mut hermitian: f64 = 0.0;
    let mut unit_trace: f64 = 0.0;
    let mut psd: f64 = 0.0;
    let mut completeness: f64 = 0.0;
    for row in ops {
        let mut total = ComplexMatrix::zeros(d).expect("d >= 2");
        for p in row {
            hermitian = hermitian.max(p.hermitian_deviation());
            unit_trace = unit_trace.max((p.trace() - 1.0).norm());
            let sym = (p + &p.dagger()).scale_real(0.5);
            let lambda = min_eigenvalue(&sym, f64::INFINITY).unwrap_or(f64::NEG_INFINITY);
            psd = psd.max(-lambda);
            total = &total + p;
        }
        completeness = completeness.max(total.max_abs_diff(&identity).expect("same dim"));
    }

    let mut trace_relations: f64 = 0.0;
    for (b, row) in ops.iter().enumerate() {
        for (n, p) in row.iter().enumerate() {
            for (b2, row2) in ops.iter().enumerate() {
                for (n2, q) in row2.iter().enumerate() {
                    let want = match (b == b2, n == n2) {
                        (true, true) => kappa,
                        (true, false) => (1.0 - kappa) / (df - 1.0),
                        (false, _) => 1.0 / df,
                    };
                    let got = p.trace_product(q).expect("same dim");
                    trace_relations = trace_relations.max((got - want).norm());
                }
            }
        }
    }

    let kappa_formula = (kappa - kappa_from_t(d, s.t())).abs();
    let kappa_in_range = kappa > 1.0 / df + tol && kappa <= 1.0 + tol;
    let passed = hermitian <= tol
        && unit_trace <= tol
        && psd <= tol
        && completeness <= tol
        && trace_relations <= tol
        && kappa_formula <= tol
        && kappa_in_range;
    MumVerification {
        tol,
        hermitian,
        unit_trace,
        psd,
        completeness,
        trace_relations,
        kappa_formula,
        kappa_in_range,
        passed,
    }
}

/// Largest absolute deviation per traceless-operator condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FVerification {
    pub tol: f64,
    /// `Tr(F_n^(b) F_n'^(b)) = (1+√d)²[δ_nn'(d−1) − (1−δ_nn')]`.
    pub gram: f64,
    /// `Σ_n F_n^(b) = 0`.
    pub sum_zero: f64,
    /// `Tr(F_n^(b) F_n'^(b')) = 0` for `b ≠ b'`.
    pub orthogonality: f64,
    pub passed: bool,
}

pub fn verify_f_conditions(f_ops: &OperatorGrid, d: usize, tol: f64) -> FVerification {
    let df = d as f64;
    let s2 = (1.0 + df.sqrt()).powi(2);
    let mut gram: f64 = 0.0;
    let mut sum_zero: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    let shape_ok = !f_ops.is_empty()
        && f_ops
            .iter()
            .all(|row| row.len() == d && row.iter().all(|f| f.dim() == d));
    if shape_ok {
        for (b, row) in f_ops.iter().enumerate() {
            let mut total = ComplexMatrix::zeros(d).expect("d >= 1");
            for (n, f) in row.iter().enumerate() {
                total = &total + f;
                for (b2, row2) in f_ops.iter().enumerate() {
                    for (n2, g) in row2.iter().enumerate() {
                        let got = f.trace_product(g).expect("same dim");
                        if b == b2 {
                            let want = if n == n2 { s2 * (df - 1.0) } else { -s2 };
                            gram = gram.max((got - want).norm());
                        } else {
                            orthogonality = orthogonality.max(got.norm());
                        }
                    }
                }
            }
            sum_zero = sum_zero.max(total.max_abs());
        }
    }
    FVerification {
        tol,
        gram,
        sum_zero,
        orthogonality,
        passed: shape_ok && gram <= tol && sum_zero <= tol && orthogonality <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_f_operators, build_mums, VERIFY_TOL};
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn f_conditions_hold_for_constructed_grids() {
        for d in 2..=8 {
            let f = build_f_operators(d).unwrap();
            let r = verify_f_conditions(&f, d, VERIFY_TOL);
            assert!(r.passed, "d={d}: {r:?}");
        }
    }

    #[test]
    fn inter_group_orthogonality_d4() {
        let f = build_f_operators(4).unwrap();
        for (b, row) in f.iter().enumerate() {
            for (b2, row2) in f.iter().enumerate() {
                if b == b2 {
                    continue;
                }
                for x in row {
                    for y in row2 {
                        assert!(x.trace_product(y).unwrap().norm() <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn perturbation_is_caught() {
        let s = build_mums(3, None).unwrap();
        let mut ops = s.operators().clone();
        ops[0][0][(0, 0)] += Complex64::new(1e-3, 0.0);
        let bad = MumSet::from_parts(3, s.t(), s.kappa(), ops, s.f_ops().clone()).unwrap();
        let r = verify_mums(&bad, VERIFY_TOL);
        assert!(!r.passed);
        assert!((r.unit_trace - 1e-3).abs() < 1e-12);
        assert!(r.completeness >= 1e-3 - 1e-12);
        assert!(r.trace_relations >= 1e-4, "{r:?}");
    }

    #[test]
    fn trivial_set_is_rejected() {
        for d in 2..=5 {
            let p = ComplexMatrix::identity(d)
                .unwrap()
                .scale_real(1.0 / d as f64);
            let ops = vec![vec![p; d]; d + 1];
            let trivial = MumSet::from_parts(d, 0.0, 1.0 / d as f64, ops, Vec::new()).unwrap();
            let r = verify_mums(&trivial, VERIFY_TOL);
            assert!(!r.kappa_in_range);
            assert!(!r.passed);
            // everything else about it is fine
            assert!(r.trace_relations <= 1e-12 && r.completeness <= 1e-12);
        }
    }

    #[test]
    fn empty_f_grid_fails() {
        assert!(!verify_f_conditions(&Vec::new(), 3, VERIFY_TOL).passed);
    }
}

//! Index of coincidence and the MUB baseline index.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mum::{Basis, MumSet};
use crate::opalg::ComplexMatrix;
use crate::states::DensityMatrix;

/// Expectations with a larger imaginary part raise [`Error::NumericIntegrity`].
pub const IMAG_TOL: f64 = 1e-10;

/// `Re Tr(op · ρ)` after checking the imaginary part.
pub fn real_expectation(op: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    let z = op.trace_product(rho)?;
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NumericIntegrity {
            imag: z.im.abs(),
            tol: IMAG_TOL,
        });
    }
    Ok(z.re)
}

/// `C(P|ρ) = Σ_n [Tr(P_n ρ)]²` for one measurement.
pub fn coincidence(measurement: &[ComplexMatrix], rho: &DensityMatrix) -> Result<f64> {
    let mut total = 0.0;
    for p in measurement {
        if p.dim() != rho.dim() {
            return Err(Error::Shape(format!(
                "measurement acts on dimension {}, state has {}",
                p.dim(),
                rho.dim()
            )));
        }
        let prob = real_expectation(p, rho.matrix())?;
        total += prob * prob;
    }
    Ok(total)
}

/// `Σ_b C(P^(b)|ρ)` over every measurement of the set.
pub fn coincidence_sum(set: &MumSet, rho: &DensityMatrix) -> Result<f64> {
    set.operators().iter().map(|m| coincidence(m, rho)).sum()
}

/// Upper bound `(M−1)/d + [1 − κ + (κd − 1) Tr(ρ²)]/(d − 1)` on the coincidence
/// sum of `M` MUMs; an identity when `M = d + 1`.
pub fn coincidence_bound(m: usize, d: usize, kappa: f64, purity: f64) -> Result<f64> {
    let df = d as f64;
    const SLACK: f64 = 1e-12;
    if m == 0 || d < 2 {
        return Err(Error::Contract(format!(
            "need M >= 1 and d >= 2, got M={m}, d={d}"
        )));
    }
    if !(kappa > 1.0 / df && kappa <= 1.0 + SLACK) {
        return Err(Error::Contract(format!("kappa {kappa} outside (1/d, 1]")));
    }
    if !(purity >= 1.0 / df - SLACK && purity <= 1.0 + SLACK) {
        return Err(Error::Contract(format!("purity {purity} outside [1/d, 1]")));
    }
    Ok((m as f64 - 1.0) / df + (1.0 - kappa + (kappa * df - 1.0) * purity) / (df - 1.0))
}

/// How the second party's basis vectors are paired with the first party's.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MubPairing {
    /// `<b| ⊗ <b|`, as the index is usually written.
    Same,
    /// `<b| ⊗ <b*|`, which aligns with `|Φ+>`.
    Conjugate,
}

/// `I_m(ρ)` together with its separable bound `1 + (m − 1)/d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MubIndex {
    pub value: f64,
    pub bound: f64,
    pub m: usize,
}

/// `I_m(ρ) = Σ_{i,j} <b_ij| ⊗ <b_ij| ρ |b_ij> ⊗ |b_ij>` on `C^d ⊗ C^d`.
pub fn mub_index(mubs: &[Basis], rho: &DensityMatrix, pairing: MubPairing) -> Result<MubIndex> {
    let d = mubs
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Configuration("no bases supplied".into()))?;
    if rho.dims() != [d, d] {
        return Err(Error::UnsupportedDimension(format!(
            "MUB index needs a state on ({d}, {d}), got {:?}",
            rho.dims()
        )));
    }
    let m = rho.matrix();
    let mut value = 0.0;
    for basis in mubs {
        for b in basis {
            if b.len() != d {
                return Err(Error::Shape("basis vector of wrong length".into()));
            }
            let second: Vec<Complex64> = match pairing {
                MubPairing::Same => b.clone(),
                MubPairing::Conjugate => b.iter().map(|z| z.conj()).collect(),
            };
            let psi: Vec<Complex64> = b
                .iter()
                .flat_map(|x| second.iter().map(move |y| x * y))
                .collect();
            // <psi| ρ |psi>
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, pr) in psi.iter().enumerate() {
                for (c, pc) in psi.iter().enumerate() {
                    acc += pr.conj() * m[(r, c)] * pc;
                }
            }
            if acc.im.abs() > IMAG_TOL {
                return Err(Error::NumericIntegrity {
                    imag: acc.im.abs(),
                    tol: IMAG_TOL,
                });
            }
            value += acc.re;
        }
    }
    let count = mubs.len();
    Ok(MubIndex {
        value,
        bound: 1.0 + (count as f64 - 1.0) / d as f64,
        m: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mum::{build_mums, mub_prime};
    use crate::states::{isotropic, maximally_mixed, random_density, random_product};

    #[test]
    fn maximally_mixed_coincidence() {
        for d in 2..=5 {
            let set = build_mums(d, None).unwrap();
            let rho = maximally_mixed(&[d]).unwrap();
            for b in 0..set.m() {
                let c = coincidence(set.measurement(b), &rho).unwrap();
                assert!((c - 1.0 / d as f64).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn shape_error() {
        let set = build_mums(2, None).unwrap();
        let rho = maximally_mixed(&[3]).unwrap();
        assert!(matches!(
            coincidence(set.measurement(0), &rho),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn bound_special_cases() {
        for d in 2..=5 {
            let kappa = 0.5 + 0.4 / d as f64;
            let complete = coincidence_bound(d + 1, d, kappa, 1.0).unwrap();
            assert!((complete - (1.0 + kappa)).abs() <= 1e-12);
            let purity = 0.7;
            let df = d as f64;
            let exact = 1.0 + (1.0 - kappa + (kappa * df - 1.0) * purity) / (df - 1.0);
            assert!((coincidence_bound(d + 1, d, kappa, purity).unwrap() - exact).abs() <= 1e-15);
        }
        assert!(coincidence_bound(3, 2, 0.5, 0.7).is_err());
        assert!(coincidence_bound(3, 2, 0.9, 0.2).is_err());
        assert!(coincidence_bound(0, 2, 0.9, 0.7).is_err());
    }

    #[test]
    fn incomplete_pair_never_exceeds_bound() {
        let set = build_mums(3, None).unwrap().truncated(2).unwrap();
        for seed in 0..100 {
            let rho = random_density(&[3], seed).unwrap();
            let sum = coincidence_sum(&set, &rho).unwrap();
            let bound = coincidence_bound(2, 3, set.kappa(), crate::states::purity(&rho)).unwrap();
            assert!(sum <= bound + 1e-9);
        }
    }

    #[test]
    fn mub_index_maximally_mixed() {
        for d in [2, 3, 5] {
            let mubs = mub_prime(d).unwrap();
            let rho = maximally_mixed(&[d, d]).unwrap();
            for m in 1..=d + 1 {
                let r = mub_index(&mubs[..m], &rho, MubPairing::Same).unwrap();
                assert!((r.value - m as f64 / d as f64).abs() <= 1e-12);
                assert!(r.value <= r.bound);
            }
        }
    }

    #[test]
    fn mub_index_bell_state() {
        // |Φ+>: Z and X bases contribute 1 each; Y contributes 0 (same pairing) or 1 (conjugate).
        let mubs = mub_prime(2).unwrap();
        let phi = isotropic(2, 1.0).unwrap();
        let same = mub_index(&mubs, &phi, MubPairing::Same).unwrap();
        assert!((same.value - 2.0).abs() <= 1e-12);
        assert_eq!(same.bound, 2.0);
        let conj = mub_index(&mubs, &phi, MubPairing::Conjugate).unwrap();
        assert!((conj.value - 3.0).abs() <= 1e-12);
        assert!(conj.value > conj.bound);
    }

    #[test]
    fn mub_index_product_states_respect_bound() {
        let mubs = mub_prime(3).unwrap();
        for seed in 0..50 {
            let rho = random_product(&[3, 3], seed).unwrap();
            let r = mub_index(&mubs, &rho, MubPairing::Same).unwrap();
            assert!(r.value <= 2.0 + 1e-9);
        }
        assert!(mub_index(&mubs, &maximally_mixed(&[3, 2]).unwrap(), MubPairing::Same).is_err());
    }
}

//! Complete MUB family in prime dimension (comparison baseline only).

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::error::{Error, Result};

/// An orthonormal basis as a list of `d` state vectors.
pub type Basis = Vec<Vec<Complex64>>;

pub fn is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    (2..)
        .take_while(|k| k * k <= d)
        .all(|k| !d.is_multiple_of(k))
}

/// The computational basis followed by `d` Fourier-type bases.
///
/// For odd prime `d`, basis `a` has vectors `|ψ_{a,j}> = d^{-1/2} Σ_k ω^{a k² + j k} |k>`
/// with `ω = exp(2πi/d)`. For `d = 2` the Pauli X and Y eigenbases are used.
pub fn mub_prime(d: usize) -> Result<Vec<Basis>> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension(format!(
            "prime-dimension MUB construction needs a prime, got {d}"
        )));
    }
    let standard: Basis = (0..d)
        .map(|j| {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[j] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    let mut bases = vec![standard];
    if d == 2 {
        let s = FRAC_1_SQRT_2;
        let c = |re, im| Complex64::new(re, im);
        bases.push(vec![
            vec![c(s, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), c(-s, 0.0)],
        ]);
        bases.push(vec![
            vec![c(s, 0.0), c(0.0, s)],
            vec![c(s, 0.0), c(0.0, -s)],
        ]);
        return Ok(bases);
    }
    let norm = 1.0 / (d as f64).sqrt();
    for a in 0..d {
        let basis = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        let exponent = (a * k * k + j * k) % d;
                        Complex64::from_polar(norm, TAU * exponent as f64 / d as f64)
                    })
                    .collect()
            })
            .collect();
        bases.push(basis);
    }
    Ok(bases)
}

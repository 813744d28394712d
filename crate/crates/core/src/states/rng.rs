//! Seeded random streams for state generation.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)`: the 64-bit
//! seed goes through `SeedableRng::seed_from_u64` and the stream id selects
//! one of ChaCha's independent stream counters. Derived draws are spelled out
//! so they can be reproduced outside Rust:
//!
//! - uniform: `(next_u64 >> 11) · 2⁻⁵³`, in `[0, 1)`;
//! - complex standard normal: Box–Muller on two uniforms,
//!   `r = sqrt(−2 ln(1 − u1))`, `re = r cos(2π u2)`, `im = r sin(2π u2)`;
//! - exponential: `−ln(1 − u)`.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub struct StateRng {
    inner: ChaCha8Rng,
}

impl StateRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        Complex64::from_polar(r, TAU * u2)
    }

    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.uniform()).ln()
    }
}

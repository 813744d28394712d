//! Separable-state bounds of the five witnesses.

/// `(x_1 ⋯ x_n) ≤ ((x_1² + … + x_n²)/n)^{n/2}` for nonnegative `x_i`; returns the
/// right-hand side. This is the product inequality the full-separability
/// bounds rest on.
pub fn amgm_square_bound(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_sq = xs.iter().map(|x| x * x).sum::<f64>() / n;
    mean_sq.powf(n / 2.0)
}

/// Per-party quantity `(M − 1)/d_i + κ_i`.
pub fn party_term(m: usize, d: usize, kappa: f64) -> f64 {
    (m as f64 - 1.0) / d as f64 + kappa
}

/// `m` parties of equal dimension: `(M − 1)/d + mean(κ_i)`.
pub fn bound_equal_dims(m: usize, d: usize, kappas: &[f64]) -> f64 {
    (m as f64 - 1.0) / d as f64 + kappas.iter().sum::<f64>() / kappas.len() as f64
}

/// Bipartite arithmetic-mean bound `½[(M−1)(1/d1 + 1/d2) + κ1 + κ2]`.
pub fn bound_bipartite_mean(m: usize, d1: usize, d2: usize, k1: f64, k2: f64) -> f64 {
    0.5 * ((m as f64 - 1.0) * (1.0 / d1 as f64 + 1.0 / d2 as f64) + k1 + k2)
}

/// Bipartite Cauchy–Schwarz bound `√((M−1)/d1 + κ1) · √((M−1)/d2 + κ2)`.
pub fn bound_bipartite_geometric(m: usize, d1: usize, d2: usize, k1: f64, k2: f64) -> f64 {
    party_term(m, d1, k1).sqrt() * party_term(m, d2, k2).sqrt()
}

/// Multipartite mean bound `(1/m) Σ_i [(M−1)/d_i + κ_i]`.
pub fn bound_multipartite_mean(m: usize, dims: &[usize], kappas: &[f64]) -> f64 {
    dims.iter()
        .zip(kappas)
        .map(|(&d, &k)| party_term(m, d, k))
        .sum::<f64>()
        / dims.len() as f64
}

/// Multipartite pairwise bound `min_{i≠j} √((M−1)/d_i + κ_i) √((M−1)/d_j + κ_j)`.
pub fn bound_multipartite_pairwise(m: usize, dims: &[usize], kappas: &[f64]) -> f64 {
    let terms: Vec<f64> = dims
        .iter()
        .zip(kappas)
        .map(|(&d, &k)| party_term(m, d, k).sqrt())
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            best = best.min(terms[i] * terms[j]);
        }
    }
    best
}

//! Density matrices on composite spaces and the standard state families.

mod rng;

pub use rng::StateRng;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::opalg::{min_eigenvalue, ComplexMatrix};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_TOL` are accepted as eigensolver noise.
pub const PSD_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;

/// A trace-one positive semidefinite Hermitian operator on `C^{d_1} ⊗ … ⊗ C^{d_m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every invariant and reports all that fail.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDimension(format!(
                "subsystem dimensions must be non-empty and positive, got {dims:?}"
            )));
        }
        let total: usize = dims.iter().product();
        if total != matrix.dim() {
            return Err(Error::Shape(format!(
                "dims {dims:?} give total dimension {total}, matrix is {0}x{0}",
                matrix.dim()
            )));
        }
        let violations = validate(&matrix);
        if !violations.is_empty() {
            return Err(Error::InvalidDensity(violations));
        }
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension `Π d_i`.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Same operator, reinterpreted over coarser subsystem dimensions.
    pub fn regrouped(&self, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != self.dim() || dims.contains(&0) {
            return Err(Error::Shape(format!(
                "cannot regroup dims {:?} as {dims:?}",
                self.dims
            )));
        }
        Ok(Self {
            dims,
            matrix: self.matrix.clone(),
        })
    }
}

/// Lists the violated density-matrix invariants of `m`.
pub fn validate(m: &ComplexMatrix) -> Vec<String> {
    let mut out = Vec::new();
    let herm = m.hermitian_deviation();
    if herm > HERMITIAN_TOL {
        out.push(format!("not Hermitian (deviation {herm:e})"));
    }
    let tr = m.trace();
    if (tr - 1.0).norm() > TRACE_TOL {
        out.push(format!("trace is {} + {}i, expected 1", tr.re, tr.im));
    }
    let sym = (m + &m.dagger()).scale_real(0.5);
    match min_eigenvalue(&sym, f64::INFINITY) {
        Ok(lambda) if lambda < -PSD_TOL => out.push(format!(
            "not positive semidefinite (min eigenvalue {lambda:e})"
        )),
        Ok(_) => {}
        Err(e) => out.push(format!("eigenvalue check failed: {e}")),
    }
    out
}

fn check_factory_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDimension(format!(
            "every subsystem dimension must be >= 2, got {dims:?}"
        )));
    }
    Ok(dims.iter().product())
}

/// `I / D`.
pub fn maximally_mixed(dims: &[usize]) -> Result<DensityMatrix> {
    let total = check_factory_dims(dims)?;
    let m = ComplexMatrix::identity(total)?.scale_real(1.0 / total as f64);
    DensityMatrix::new(dims.to_vec(), m)
}

/// Normalized projector onto `v`.
pub fn pure(v: &[Complex64], dims: &[usize]) -> Result<DensityMatrix> {
    let total = check_factory_dims(dims)?;
    if v.len() != total {
        return Err(Error::Shape(format!(
            "state vector has length {}, dims {dims:?} need {total}",
            v.len()
        )));
    }
    DensityMatrix::new(dims.to_vec(), ComplexMatrix::outer(v)?)
}

/// `p |Φ+><Φ+| + (1 − p) I/d²` with `|Φ+> = d^{-1/2} Σ_k |kk>`.
///
/// Positive exactly for `−1/(d²−1) ≤ p ≤ 1`.
pub fn isotropic(d: usize, p: f64) -> Result<DensityMatrix> {
    check_factory_dims(&[d])?;
    let d2 = d * d;
    let lower = -1.0 / (d2 as f64 - 1.0);
    if !(lower - WEIGHT_TOL..=1.0 + WEIGHT_TOL).contains(&p) {
        return Err(Error::NotPositive(format!(
            "isotropic weight p = {p} outside [{lower}, 1]"
        )));
    }
    let mut m = ComplexMatrix::identity(d2)?.scale_real((1.0 - p) / d2 as f64);
    let entangled = p / d as f64;
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] += entangled;
        }
    }
    DensityMatrix::new(vec![d, d], m)
}

/// `d^{-1/2} Σ_k |k…k>` on `m` qudits.
pub fn ghz(d: usize, m: usize) -> Result<DensityMatrix> {
    ghz_vector(d, m).and_then(|(v, dims)| pure(&v, &dims))
}

fn ghz_vector(d: usize, m: usize) -> Result<(Vec<Complex64>, Vec<usize>)> {
    if m < 2 {
        return Err(Error::InvalidDimension(format!(
            "GHZ states need at least two parties, got {m}"
        )));
    }
    let dims = vec![d; m];
    let total = check_factory_dims(&dims)?;
    let mut v = vec![Complex64::new(0.0, 0.0); total];
    // |k…k> sits at k·(1 + d + d² + … + d^{m−1})
    let stride: usize = (0..m).map(|i| d.pow(i as u32)).sum();
    for k in 0..d {
        v[k * stride] = Complex64::new(1.0, 0.0);
    }
    Ok((v, dims))
}

/// `p · GHZ + (1 − p) I/d^m`, positive for `−1/(d^m − 1) ≤ p ≤ 1`.
pub fn noisy_ghz(d: usize, m: usize, p: f64) -> Result<DensityMatrix> {
    let target = ghz(d, m)?;
    let total = target.dim();
    let lower = -1.0 / (total as f64 - 1.0);
    if !(lower - WEIGHT_TOL..=1.0 + WEIGHT_TOL).contains(&p) {
        return Err(Error::NotPositive(format!(
            "GHZ weight p = {p} outside [{lower}, 1]"
        )));
    }
    let noise = ComplexMatrix::identity(total)?.scale_real((1.0 - p) / total as f64);
    let m_ = noise.add_scaled(target.matrix(), p)?;
    DensityMatrix::new(target.dims.clone(), m_)
}

/// Tensor product with concatenated dimensions.
pub fn product(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidState("product of zero states".into()))?;
    let mut dims = first.dims.clone();
    let mut m = first.matrix.clone();
    for s in &states[1..] {
        dims.extend_from_slice(&s.dims);
        m = m.kron(&s.matrix);
    }
    DensityMatrix::new(dims, m)
}

/// Convex mixture `Σ w_i ρ_i`.
pub fn mixture(states: &[DensityMatrix], weights: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::InvalidMixture(format!(
            "{} states with {} weights",
            states.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidMixture("weights must be nonnegative".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidMixture(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    let dims = states[0].dims.clone();
    if let Some(bad) = states.iter().find(|s| s.dims != dims) {
        return Err(Error::Shape(format!(
            "mixture components have dims {dims:?} and {:?}",
            bad.dims
        )));
    }
    let mut m = ComplexMatrix::zeros(states[0].dim())?;
    for (s, &w) in states.iter().zip(weights) {
        m = m.add_scaled(&s.matrix, w)?;
    }
    DensityMatrix::new(dims, m)
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix
        .trace_product(&rho.matrix)
        .expect("square matrix")
        .re
}

fn ginibre_density(total: usize, rng: &mut StateRng) -> Result<ComplexMatrix> {
    let g = ComplexMatrix::from_vec(
        total,
        (0..total * total).map(|_| rng.complex_normal()).collect(),
    )?;
    let gg = g.matmul(&g.dagger())?;
    let tr = gg.trace().re;
    Ok(gg.scale_real(1.0 / tr))
}

/// `G G† / Tr(G G†)` with `G` complex Ginibre from stream `(seed, 0)`.
pub fn random_density(dims: &[usize], seed: u64) -> Result<DensityMatrix> {
    let total = check_factory_dims(dims)?;
    let mut rng = StateRng::new(seed, 0);
    DensityMatrix::new(dims.to_vec(), ginibre_density(total, &mut rng)?)
}

/// Normalized complex Gaussian vector from stream `(seed, 0)`.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<DensityMatrix> {
    let total = check_factory_dims(dims)?;
    let mut rng = StateRng::new(seed, 0);
    let v: Vec<Complex64> = (0..total).map(|_| rng.complex_normal()).collect();
    pure(&v, dims)
}

fn product_from_streams(dims: &[usize], seed: u64, first_stream: u64) -> Result<DensityMatrix> {
    let mut m: Option<ComplexMatrix> = None;
    for (i, &d) in dims.iter().enumerate() {
        let mut rng = StateRng::new(seed, first_stream + i as u64);
        let factor = ginibre_density(d, &mut rng)?;
        m = Some(match m {
            None => factor,
            Some(acc) => acc.kron(&factor),
        });
    }
    DensityMatrix::new(dims.to_vec(), m.expect("dims checked non-empty"))
}

/// Kronecker product of independent single-party random densities; party `i`
/// draws from stream `(seed, 1 + i)`.
pub fn random_product(dims: &[usize], seed: u64) -> Result<DensityMatrix> {
    check_factory_dims(dims)?;
    product_from_streams(dims, seed, 1)
}

/// Convex mixture of `terms` random product states.
///
/// Weights are normalized exponentials from stream `(seed, 0)` (uniform on the
/// simplex); term `j` party `i` uses stream `(seed, 1 + j·N + i)`, so term 0 is
/// `random_product(dims, seed)`.
pub fn random_separable(dims: &[usize], terms: usize, seed: u64) -> Result<DensityMatrix> {
    check_factory_dims(dims)?;
    if terms == 0 {
        return Err(Error::InvalidMixture("need at least one term".into()));
    }
    let mut wrng = StateRng::new(seed, 0);
    let raw: Vec<f64> = (0..terms).map(|_| wrng.exponential()).collect();
    let total: f64 = raw.iter().sum();
    let stride = dims.len() as u64;
    let mut m = ComplexMatrix::zeros(dims.iter().product())?;
    for (j, w) in raw.iter().enumerate() {
        let term = product_from_streams(dims, seed, 1 + j as u64 * stride)?;
        m = m.add_scaled(term.matrix(), w / total)?;
    }
    DensityMatrix::new(dims.to_vec(), m)
}

/// A partition of parties `0..N` into `k ≥ 2` disjoint non-empty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    groups: Vec<Vec<usize>>,
    parties: usize,
}

impl PartitionSpec {
    /// `groups` holds 0-based party indices.
    pub fn new(groups: Vec<Vec<usize>>, parties: usize) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::UnsupportedPartition(format!(
                "need at least two blocks, got {}",
                groups.len()
            )));
        }
        let mut seen = vec![false; parties];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::UnsupportedPartition("empty block".into()));
            }
            for &p in g {
                if p >= parties {
                    return Err(Error::UnsupportedPartition(format!(
                        "party {} out of range 1..={parties}",
                        p + 1
                    )));
                }
                if seen[p] {
                    return Err(Error::UnsupportedPartition(format!(
                        "party {} appears twice",
                        p + 1
                    )));
                }
                seen[p] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::UnsupportedPartition(format!(
                "party {} is not covered",
                missing + 1
            )));
        }
        Ok(Self { groups, parties })
    }

    /// Parses 1-based blocks such as `"1,2|3"`.
    pub fn parse(text: &str, parties: usize) -> Result<Self> {
        let groups = text
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|s| {
                        let idx: usize = s.trim().parse().map_err(|_| {
                            Error::UnsupportedPartition(format!("bad party index {s:?}"))
                        })?;
                        idx.checked_sub(1).ok_or_else(|| {
                            Error::UnsupportedPartition("party indices are 1-based".into())
                        })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups, parties)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// True when every block is a run of consecutive parties.
    pub fn is_adjacent(&self) -> bool {
        self.groups.iter().all(|g| {
            let mut s = g.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[1] == w[0] + 1)
        })
    }

    /// Products of member dimensions, block by block.
    pub fn block_dims(&self, dims: &[usize]) -> Result<Vec<usize>> {
        if dims.len() != self.parties {
            return Err(Error::Shape(format!(
                "partition covers {} parties, state has {}",
                self.parties,
                dims.len()
            )));
        }
        Ok(self
            .groups
            .iter()
            .map(|g| g.iter().map(|&p| dims[p]).product())
            .collect())
    }
}

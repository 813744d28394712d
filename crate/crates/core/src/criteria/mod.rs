//! Separability witnesses built on mutually unbiased measurements.
//!
//! Every witness has the form `J(ρ) = Σ_b Σ_pos Tr[(⊗_i P_{i,σ_i(pos)}^(b)) ρ]`,
//! maximized over the allowed selections `σ`, and is compared with a bound
//! that no fully separable state can exceed. Because each fixed selection is a
//! linear functional bounded on product states, any feasible selection gives
//! a sound lower bound on the maximum; exact maximization only sharpens it.
//!
//! When sets with different numbers of measurements are combined, all are cut
//! to the smallest `M` and the report carries `truncated_m = true`.

mod assignment;
mod bounds;
mod coincidence;
mod report;

pub use assignment::{
    assignment_max, multi_assignment_max, selection_count, Assignment, JointTensor,
    MultiAssignment, Strategy, WeightMatrix, DEFAULT_BUDGET,
};
pub use bounds::{
    amgm_square_bound, bound_bipartite_geometric, bound_bipartite_mean, bound_equal_dims,
    bound_multipartite_mean, bound_multipartite_pairwise, party_term,
};
pub use coincidence::{
    coincidence, coincidence_bound, coincidence_sum, mub_index, real_expectation, MubIndex,
    MubPairing, IMAG_TOL,
};
pub use report::{
    CriterionReport, Selection, SelectionLabel, SelectionRecord, Theorem, Tolerances, Verdict,
    DETECT_TOL,
};

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::mum::{Basis, MumSet};
use crate::opalg::ComplexMatrix;
use crate::states::{DensityMatrix, PartitionSpec};

/// Cuts every set to the smallest `M`; the flag says whether anything changed.
fn common_sets<'a>(sets: &[&'a MumSet]) -> Result<(Vec<Cow<'a, MumSet>>, usize, bool)> {
    let m = sets
        .iter()
        .map(|s| s.m())
        .min()
        .ok_or_else(|| Error::Configuration("no measurement sets supplied".into()))?;
    let truncated = sets.iter().any(|s| s.m() != m);
    let out = sets
        .iter()
        .map(|s| {
            if s.m() == m {
                Ok(Cow::Borrowed(*s))
            } else {
                s.truncated(m).map(Cow::Owned)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, m, truncated))
}

fn check_state_dims(sets: &[&MumSet], rho: &DensityMatrix) -> Result<Vec<usize>> {
    let dims: Vec<usize> = sets.iter().map(|s| s.d()).collect();
    if rho.dims() != dims.as_slice() {
        return Err(Error::Shape(format!(
            "measurement sets act on {dims:?}, state has dims {:?}",
            rho.dims()
        )));
    }
    Ok(dims)
}

/// `Re Tr[(⊗_i P_{i,n_i}^(b)) ρ]` for one outcome tuple.
fn joint_probability(
    sets: &[Cow<'_, MumSet>],
    rho: &DensityMatrix,
    b: usize,
    outcome: &[usize],
) -> Result<f64> {
    let op = ComplexMatrix::kron_all(sets.iter().zip(outcome).map(|(s, &n)| &s.measurement(b)[n]))
        .ok_or_else(|| Error::Configuration("no parties".into()))?;
    real_expectation(&op, rho.matrix())
}

/// Full table `W_b(n_1, …, n_m) = Re Tr[(⊗_i P_{i,n_i}^(b)) ρ]`.
pub fn joint_tensor(sets: &[&MumSet], rho: &DensityMatrix, b: usize) -> Result<JointTensor> {
    check_state_dims(sets, rho)?;
    let owned: Vec<Cow<'_, MumSet>> = sets.iter().map(|s| Cow::Borrowed(*s)).collect();
    if sets.iter().any(|s| b >= s.m()) {
        return Err(Error::Configuration(format!(
            "measurement index {b} out of range"
        )));
    }
    joint_tensor_inner(&owned, rho, b)
}

fn joint_tensor_inner(
    sets: &[Cow<'_, MumSet>],
    rho: &DensityMatrix,
    b: usize,
) -> Result<JointTensor> {
    let shape: Vec<usize> = sets.iter().map(|s| s.d()).collect();
    let len: usize = shape.iter().product();
    let mut data = Vec::with_capacity(len);
    let mut idx = vec![0usize; shape.len()];
    for _ in 0..len {
        data.push(joint_probability(sets, rho, b, &idx)?);
        for i in (0..idx.len()).rev() {
            idx[i] += 1;
            if idx[i] < shape[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    JointTensor::new(shape, data)
}

/// Witness value for a fixed selection (linear in `ρ`).
pub fn evaluate_selection(
    sets: &[&MumSet],
    rho: &DensityMatrix,
    selection: &Selection,
) -> Result<f64> {
    let dims = check_state_dims(sets, rho)?;
    selection.validate(&dims)?;
    let (sets, m, _) = common_sets(sets)?;
    if selection.0.len() > m {
        return Err(Error::Configuration(format!(
            "selection covers {} measurements, sets have {m}",
            selection.0.len()
        )));
    }
    let mut total = 0.0;
    let mut outcome = vec![0usize; dims.len()];
    for (b, per_party) in selection.0.iter().enumerate() {
        for pos in 0..per_party[0].len() {
            for (slot, list) in outcome.iter_mut().zip(per_party) {
                *slot = list[pos];
            }
            total += joint_probability(&sets, rho, b, &outcome)?;
        }
    }
    Ok(total)
}

/// Equal-dimension criterion: `J = Σ_b Σ_n Tr[(⊗_i P_{i,n}^(b)) ρ]` against
/// `(M − 1)/d + mean(κ_i)`.
pub fn theorem1(sets: &[&MumSet], rho: &DensityMatrix) -> Result<CriterionReport> {
    if sets.len() < 2 {
        return Err(Error::Configuration("need at least two parties".into()));
    }
    let d = sets[0].d();
    if sets.iter().any(|s| s.d() != d) {
        return Err(Error::Configuration(
            "all parties must share one dimension for this criterion".into(),
        ));
    }
    let dims = check_state_dims(sets, rho)?;
    let (owned, m, truncated) = common_sets(sets)?;
    let mut j = 0.0;
    for b in 0..m {
        for n in 0..d {
            j += joint_probability(&owned, rho, b, &vec![n; sets.len()])?;
        }
    }
    let kappas: Vec<f64> = sets.iter().map(|s| s.kappa()).collect();
    let bound = bound_equal_dims(m, d, &kappas);
    let mut report = CriterionReport::with_bound(
        Theorem::T1,
        j,
        bound,
        Strategy::Diagonal,
        SelectionRecord::Label(SelectionLabel::FullDiagonal),
        dims,
        m,
        kappas,
    );
    report.truncated_m = truncated;
    Ok(report)
}

struct Maximized {
    j: f64,
    selection: Selection,
    m: usize,
    truncated: bool,
    fallback_used: bool,
}

fn maximize(
    sets: &[&MumSet],
    rho: &DensityMatrix,
    strategy: Strategy,
    budget: u64,
) -> Result<Maximized> {
    if sets.len() < 2 {
        return Err(Error::Configuration("need at least two parties".into()));
    }
    check_state_dims(sets, rho)?;
    let (owned, m, truncated) = common_sets(sets)?;
    let size = sets.iter().map(|s| s.d()).min().expect("non-empty");
    let mut j = 0.0;
    let mut selection = Vec::with_capacity(m);
    let mut fallback_used = false;
    for b in 0..m {
        let tensor = joint_tensor_inner(&owned, rho, b)?;
        let best = multi_assignment_max(&tensor, size, strategy, budget)?;
        j += best.value;
        fallback_used |= best.fallback_used;
        selection.push(best.per_party);
    }
    Ok(Maximized {
        j,
        selection: Selection(selection),
        m,
        truncated,
        fallback_used,
    })
}

fn bipartite(
    p: &MumSet,
    q: &MumSet,
    rho: &DensityMatrix,
    strategy: Strategy,
    theorem: Theorem,
) -> Result<CriterionReport> {
    let best = maximize(&[p, q], rho, strategy, DEFAULT_BUDGET)?;
    let bound = match theorem {
        Theorem::T2 => bound_bipartite_mean(best.m, p.d(), q.d(), p.kappa(), q.kappa()),
        _ => bound_bipartite_geometric(best.m, p.d(), q.d(), p.kappa(), q.kappa()),
    };
    let mut report = CriterionReport::with_bound(
        theorem,
        best.j,
        bound,
        strategy,
        SelectionRecord::Explicit(best.selection),
        vec![p.d(), q.d()],
        best.m,
        vec![p.kappa(), q.kappa()],
    );
    report.truncated_m = best.truncated;
    Ok(report)
}

/// Bipartite criterion with bound `½[(M−1)(1/d1 + 1/d2) + κ1 + κ2]`.
pub fn theorem2(
    p: &MumSet,
    q: &MumSet,
    rho: &DensityMatrix,
    strategy: Strategy,
) -> Result<CriterionReport> {
    bipartite(p, q, rho, strategy, Theorem::T2)
}

/// Bipartite criterion with bound `√((M−1)/d1 + κ1) · √((M−1)/d2 + κ2)`.
pub fn theorem3(
    p: &MumSet,
    q: &MumSet,
    rho: &DensityMatrix,
    strategy: Strategy,
) -> Result<CriterionReport> {
    bipartite(p, q, rho, strategy, Theorem::T3)
}

/// Multipartite criterion with both the mean bound (primary, `T4`) and the
/// pairwise bound (`bound2`, T5). Use [`CriterionReport::with_primary`] to
/// headline T5 instead.
pub fn theorem45(
    sets: &[&MumSet],
    rho: &DensityMatrix,
    strategy: Strategy,
) -> Result<CriterionReport> {
    theorem45_with_budget(sets, rho, strategy, DEFAULT_BUDGET)
}

/// [`theorem45`] with an explicit enumeration budget for the exact strategy.
pub fn theorem45_with_budget(
    sets: &[&MumSet],
    rho: &DensityMatrix,
    strategy: Strategy,
    budget: u64,
) -> Result<CriterionReport> {
    let best = maximize(sets, rho, strategy, budget)?;
    let dims: Vec<usize> = sets.iter().map(|s| s.d()).collect();
    let kappas: Vec<f64> = sets.iter().map(|s| s.kappa()).collect();
    let mut report = CriterionReport::with_bound(
        Theorem::T4,
        best.j,
        bound_multipartite_mean(best.m, &dims, &kappas),
        strategy,
        SelectionRecord::Explicit(best.selection),
        dims.clone(),
        best.m,
        kappas.clone(),
    );
    report.set_second_bound(bound_multipartite_pairwise(best.m, &dims, &kappas));
    report.truncated_m = best.truncated;
    report.fallback_used = best.fallback_used;
    Ok(report)
}

/// k-nonseparability with respect to a fixed partition into blocks of adjacent
/// parties: the state is read as a k-partite state over the block dimensions
/// and evaluated with [`theorem45`]. `sets[i]` measures block `i` as given.
pub fn k_nonsep_check(
    rho: &DensityMatrix,
    partition: &PartitionSpec,
    sets: &[&MumSet],
    strategy: Strategy,
) -> Result<CriterionReport> {
    if partition.parties() != rho.dims().len() {
        return Err(Error::Shape(format!(
            "partition covers {} parties, state has {}",
            partition.parties(),
            rho.dims().len()
        )));
    }
    if sets.len() != partition.k() {
        return Err(Error::Configuration(format!(
            "{} blocks but {} measurement sets",
            partition.k(),
            sets.len()
        )));
    }
    if !partition.is_adjacent() {
        return Err(Error::UnsupportedPartition(
            "every block must consist of adjacent parties".into(),
        ));
    }
    let block_dims = partition.block_dims(rho.dims())?;
    let mut order: Vec<usize> = (0..partition.k()).collect();
    order.sort_by_key(|&i| partition.groups()[i].iter().min().copied());
    let ordered_sets: Vec<&MumSet> = order.iter().map(|&i| sets[i]).collect();
    let ordered_dims: Vec<usize> = order.iter().map(|&i| block_dims[i]).collect();
    for (i, (s, &d)) in ordered_sets.iter().zip(&ordered_dims).enumerate() {
        if s.d() != d {
            return Err(Error::Shape(format!(
                "block {} has dimension {d}, its measurement set acts on {}",
                order[i] + 1,
                s.d()
            )));
        }
    }
    let regrouped = rho.regrouped(ordered_dims)?;
    let mut report = theorem45(&ordered_sets, &regrouped, strategy)?;
    report.partition = Some(
        order
            .iter()
            .map(|&i| partition.groups()[i].clone())
            .collect(),
    );
    Ok(report)
}

/// Baseline MUB index as a report (`kappa = 1` for projective bases).
pub fn mub_criterion(
    mubs: &[Basis],
    rho: &DensityMatrix,
    pairing: MubPairing,
) -> Result<CriterionReport> {
    let idx = mub_index(mubs, rho, pairing)?;
    Ok(CriterionReport::with_bound(
        Theorem::Mub,
        idx.value,
        idx.bound,
        Strategy::Diagonal,
        SelectionRecord::Label(SelectionLabel::FullDiagonal),
        rho.dims().to_vec(),
        idx.m,
        vec![1.0, 1.0],
    ))
}

//! Maximum-weight selection of position-wise paired outcome indices.
//!
//! For two parties this is the rectangular assignment problem, solved exactly
//! with the Hungarian method on a padded square matrix. For three or more
//! parties the exact route enumerates selections within a budget and falls
//! back to greedy beyond it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the maximization over selections is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// True maximum (Hungarian for two parties, bounded enumeration beyond).
    Exact,
    /// Repeatedly take the largest entry whose indices are all unused.
    Greedy,
    /// Same index for every party (requires equal dimensions).
    Diagonal,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exact => "exact",
            Strategy::Greedy => "greedy",
            Strategy::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Strategy::Exact),
            "greedy" => Ok(Strategy::Greedy),
            "diagonal" => Ok(Strategy::Diagonal),
            other => Err(Error::Configuration(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Dense real `rows x cols` weights, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} weights need {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged weight rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// Result of a two-party selection; `pairs` sorted by row.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub value: f64,
    pub pairs: Vec<(usize, usize)>,
}

/// Best total weight over `size` one-to-one `(row, col)` pairs.
pub fn assignment_max(w: &WeightMatrix, size: usize, strategy: Strategy) -> Result<Assignment> {
    if size > w.rows.min(w.cols) {
        return Err(Error::Configuration(format!(
            "cannot pick {size} pairs from a {}x{} matrix",
            w.rows, w.cols
        )));
    }
    let mut pairs = match strategy {
        Strategy::Exact => hungarian_pairs(w, size)?,
        Strategy::Greedy => greedy_pairs(w, size),
        Strategy::Diagonal => {
            if w.rows != w.cols {
                return Err(Error::Configuration(format!(
                    "diagonal selection needs a square matrix, got {}x{}",
                    w.rows, w.cols
                )));
            }
            let mut diag: Vec<usize> = (0..w.rows).collect();
            diag.sort_by(|&a, &b| w.get(b, b).total_cmp(&w.get(a, a)));
            diag.into_iter().take(size).map(|i| (i, i)).collect()
        }
    };
    pairs.sort_unstable();
    let value = pairs.iter().map(|&(r, c)| w.get(r, c)).sum();
    Ok(Assignment { value, pairs })
}

fn greedy_pairs(w: &WeightMatrix, size: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..w.data.len()).collect();
    order.sort_by(|&a, &b| w.data[b].total_cmp(&w.data[a]));
    let mut row_used = vec![false; w.rows];
    let mut col_used = vec![false; w.cols];
    let mut out = Vec::with_capacity(size);
    for flat in order {
        if out.len() == size {
            break;
        }
        let (r, c) = (flat / w.cols, flat % w.cols);
        if !row_used[r] && !col_used[c] {
            row_used[r] = true;
            col_used[c] = true;
            out.push((r, c));
        }
    }
    out
}

/// Exact selection of exactly `size` pairs.
///
/// With `r` rows, `c` columns and `k = size`, the square problem has side
/// `r + c − k`: `c − k` dummy rows and `r − k` dummy columns cost 0 against real
/// lines and are forbidden against each other, which forces exactly `k`
/// real-real pairs.
fn hungarian_pairs(w: &WeightMatrix, size: usize) -> Result<Vec<(usize, usize)>> {
    if size == 0 {
        return Ok(Vec::new());
    }
    let (r, c) = (w.rows, w.cols);
    let n = r + c - size;
    let cost = |i: usize, j: usize| -> f64 {
        match (i < r, j < c) {
            (true, true) => -w.get(i, j),
            (false, false) => f64::INFINITY,
            _ => 0.0,
        }
    };
    let row_to_col = hungarian_min(n, cost)?;
    Ok(row_to_col
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < r && j < c)
        .map(|(i, &j)| (i, j))
        .collect())
}

/// Minimum-cost perfect matching on an `n x n` cost function (potentials form).
/// Returns the column matched to each row.
fn hungarian_min(n: usize, cost: impl Fn(usize, usize) -> f64) -> Result<Vec<usize>> {
    // 1-based internally; index 0 is the virtual start column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == 0 || !delta.is_finite() {
                return Err(Error::Contract(
                    "assignment problem has no feasible matching".into(),
                ));
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    Ok(row_to_col)
}

/// Dense real tensor over `shape`, last index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl JointTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if shape.is_empty() || data.len() != len {
            return Err(Error::Shape(format!(
                "tensor of shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, &s) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = flat % s;
            flat /= s;
        }
        idx
    }
}

/// Multi-party selection: `per_party[i][pos]` is party `i`'s outcome at `pos`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiAssignment {
    pub value: f64,
    pub per_party: Vec<Vec<usize>>,
    /// Exact enumeration exceeded the budget and greedy was used instead.
    pub fallback_used: bool,
}

/// Default cap on `Π_i d_i!/(d_i − d)!` for exact multi-party enumeration.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Number of ordered selections `Π_i d_i!/(d_i − size)!`, saturating.
pub fn selection_count(shape: &[usize], size: usize) -> u64 {
    shape.iter().fold(1u64, |acc, &d| {
        let perms = (0..size).fold(1u64, |p, k| p.saturating_mul(d.saturating_sub(k) as u64));
        acc.saturating_mul(perms)
    })
}

/// Best total over `size` tuples with distinct indices per party.
pub fn multi_assignment_max(
    t: &JointTensor,
    size: usize,
    strategy: Strategy,
    budget: u64,
) -> Result<MultiAssignment> {
    let parties = t.shape.len();
    let min_dim = *t.shape.iter().min().expect("non-empty shape");
    if size > min_dim {
        return Err(Error::Configuration(format!(
            "cannot pick {size} tuples from shape {:?}",
            t.shape
        )));
    }
    if parties == 2 {
        let w = WeightMatrix::new(t.shape[0], t.shape[1], t.data.clone())?;
        let a = assignment_max(&w, size, strategy)?;
        return Ok(MultiAssignment {
            value: a.value,
            per_party: vec![
                a.pairs.iter().map(|p| p.0).collect(),
                a.pairs.iter().map(|p| p.1).collect(),
            ],
            fallback_used: false,
        });
    }
    let (tuples, fallback_used) = match strategy {
        Strategy::Diagonal => {
            if t.shape.iter().any(|&d| d != t.shape[0]) {
                return Err(Error::Configuration(format!(
                    "diagonal selection needs equal dimensions, got {:?}",
                    t.shape
                )));
            }
            let mut diag: Vec<usize> = (0..t.shape[0]).collect();
            let val = |n: usize| t.get(&vec![n; parties]);
            diag.sort_by(|&a, &b| val(b).total_cmp(&val(a)));
            let tuples = diag
                .into_iter()
                .take(size)
                .map(|n| vec![n; parties])
                .collect();
            (tuples, false)
        }
        Strategy::Greedy => (greedy_tuples(t, size), false),
        Strategy::Exact => {
            if selection_count(&t.shape, size) <= budget {
                (enumerate_best(t, size), false)
            } else {
                (greedy_tuples(t, size), true)
            }
        }
    };
    let mut tuples = tuples;
    tuples.sort();
    let value = tuples.iter().map(|idx| t.get(idx)).sum();
    let per_party = (0..parties)
        .map(|i| tuples.iter().map(|idx| idx[i]).collect())
        .collect();
    Ok(MultiAssignment {
        value,
        per_party,
        fallback_used,
    })
}

fn greedy_tuples(t: &JointTensor, size: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..t.data.len()).collect();
    order.sort_by(|&a, &b| t.data[b].total_cmp(&t.data[a]));
    let mut used: Vec<Vec<bool>> = t.shape.iter().map(|&d| vec![false; d]).collect();
    let mut out = Vec::with_capacity(size);
    for flat in order {
        if out.len() == size {
            break;
        }
        let idx = t.unflatten(flat);
        if idx.iter().enumerate().all(|(i, &n)| !used[i][n]) {
            for (i, &n) in idx.iter().enumerate() {
                used[i][n] = true;
            }
            out.push(idx);
        }
    }
    out
}

/// Party 0 picks a sorted subset (tuples are unordered), the rest pick
/// ordered injections; the first strict maximum wins.
fn enumerate_best(t: &JointTensor, size: usize) -> Vec<Vec<usize>> {
    let choices: Vec<Vec<Vec<usize>>> = t
        .shape
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == 0 {
                combinations(d, size)
            } else {
                injections(d, size)
            }
        })
        .collect();
    let parties = t.shape.len();
    let mut counter = vec![0usize; parties];
    let mut best_value = f64::NEG_INFINITY;
    let mut best = counter.clone();
    let mut idx = vec![0usize; parties];
    'outer: loop {
        let mut value = 0.0;
        for pos in 0..size {
            for (slot, (party, &c)) in idx.iter_mut().zip(choices.iter().zip(&counter)) {
                *slot = party[c][pos];
            }
            value += t.get(&idx);
        }
        if value > best_value {
            best_value = value;
            best.copy_from_slice(&counter);
        }
        for i in (0..parties).rev() {
            counter[i] += 1;
            if counter[i] < choices[i].len() {
                continue 'outer;
            }
            counter[i] = 0;
        }
        break;
    }
    (0..size)
        .map(|pos| (0..parties).map(|i| choices[i][best[i]][pos]).collect())
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(n, k, used, cur, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(
        n,
        k,
        &mut vec![false; n],
        &mut Vec::with_capacity(k),
        &mut out,
    );
    out
}

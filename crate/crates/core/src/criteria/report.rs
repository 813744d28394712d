use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::assignment::Strategy;
use super::coincidence::IMAG_TOL;
use crate::error::{Error, Result};

/// Margins above this are detections; within `±DETECT_TOL` they are inconclusive.
pub const DETECT_TOL: f64 = 1e-9;

/// Which witness produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// Equal-dimension parties, same-index pairing.
    T1,
    /// Bipartite, arithmetic-mean bound.
    T2,
    /// Bipartite, Cauchy–Schwarz bound.
    T3,
    /// Multipartite, arithmetic-mean bound.
    T4,
    /// Multipartite, pairwise Cauchy–Schwarz bound.
    T5,
    /// Prime-dimension MUB baseline.
    #[serde(rename = "MUB")]
    Mub,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
            Theorem::Mub => "MUB",
        })
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" => Ok(Theorem::T1),
            "T2" => Ok(Theorem::T2),
            "T3" => Ok(Theorem::T3),
            "T4" => Ok(Theorem::T4),
            "T5" => Ok(Theorem::T5),
            "MUB" => Ok(Theorem::Mub),
            other => Err(Error::Configuration(format!("unknown theorem {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Detected,
    NotDetected,
    InconclusiveAtTolerance,
}

impl Verdict {
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if margin > tol {
            Verdict::Detected
        } else if margin < -tol {
            Verdict::NotDetected
        } else {
            Verdict::InconclusiveAtTolerance
        }
    }
}

/// Outcome indices `[b][party][position]`, 0-based; positions are paired
/// across parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Selection(pub Vec<Vec<Vec<usize>>>);

impl Selection {
    /// Checks index ranges, distinctness and equal lengths `min(dims)`.
    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        let size = dims.iter().copied().min().unwrap_or(0);
        for (b, per_party) in self.0.iter().enumerate() {
            if per_party.len() != dims.len() {
                return Err(Error::Configuration(format!(
                    "selection for b={} covers {} parties, expected {}",
                    b + 1,
                    per_party.len(),
                    dims.len()
                )));
            }
            for (i, list) in per_party.iter().enumerate() {
                if list.len() != size {
                    return Err(Error::Configuration(format!(
                        "selection list (b={}, party {}) has length {}, expected {size}",
                        b + 1,
                        i + 1,
                        list.len()
                    )));
                }
                let mut seen = vec![false; dims[i]];
                for &n in list {
                    if n >= dims[i] || seen[n] {
                        return Err(Error::Configuration(format!(
                            "selection list (b={}, party {}) has a repeated or out-of-range index",
                            b + 1,
                            i + 1
                        )));
                    }
                    seen[n] = true;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionLabel {
    #[serde(rename = "full diagonal")]
    FullDiagonal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SelectionRecord {
    Label(SelectionLabel),
    Explicit(Selection),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub detect: f64,
    pub imag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            detect: DETECT_TOL,
            imag: IMAG_TOL,
        }
    }
}

/// Witness value, separable bound(s) and verdict for one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub theorem: Theorem,
    #[serde(rename = "J")]
    pub j: f64,
    pub bound: f64,
    pub margin: f64,
    pub detected: bool,
    pub verdict: Verdict,
    /// Second bound of the multipartite witness (the one not named by `theorem`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detected2: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict2: Option<Verdict>,
    pub strategy: Strategy,
    pub selection: SelectionRecord,
    pub dims: Vec<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    pub kappas: Vec<f64>,
    pub tolerances: Tolerances,
    pub fallback_used: bool,
    /// Sets of different sizes were cut down to the smallest `M`.
    pub truncated_m: bool,
    /// 0-based party blocks for k-nonseparability checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
}

impl CriterionReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn with_bound(
        theorem: Theorem,
        j: f64,
        bound: f64,
        strategy: Strategy,
        selection: SelectionRecord,
        dims: Vec<usize>,
        m: usize,
        kappas: Vec<f64>,
    ) -> Self {
        let tolerances = Tolerances::default();
        let margin = j - bound;
        let verdict = Verdict::from_margin(margin, tolerances.detect);
        Self {
            theorem,
            j,
            bound,
            margin,
            detected: verdict == Verdict::Detected,
            verdict,
            bound2: None,
            margin2: None,
            detected2: None,
            verdict2: None,
            strategy,
            selection,
            dims,
            m,
            kappas,
            tolerances,
            fallback_used: false,
            truncated_m: false,
            partition: None,
        }
    }

    pub(crate) fn set_second_bound(&mut self, bound2: f64) {
        let margin2 = self.j - bound2;
        let verdict2 = Verdict::from_margin(margin2, self.tolerances.detect);
        self.bound2 = Some(bound2);
        self.margin2 = Some(margin2);
        self.detected2 = Some(verdict2 == Verdict::Detected);
        self.verdict2 = Some(verdict2);
    }

    /// For a multipartite report, makes `theorem` (T4 or T5) the primary bound
    /// and moves the other to `bound2`.
    pub fn with_primary(mut self, theorem: Theorem) -> Result<Self> {
        match (self.theorem, theorem) {
            (a, b) if a == b => return Ok(self),
            (Theorem::T4, Theorem::T5) | (Theorem::T5, Theorem::T4) => {}
            (a, b) => {
                return Err(Error::Configuration(format!(
                    "a {a} report cannot be relabelled as {b}"
                )))
            }
        }
        let bound2 = self
            .bound2
            .ok_or_else(|| Error::Configuration("report carries a single bound".into()))?;
        let old_bound = self.bound;
        let j = self.j;
        let tol = self.tolerances.detect;
        self.theorem = theorem;
        self.bound = bound2;
        self.margin = j - bound2;
        self.verdict = Verdict::from_margin(self.margin, tol);
        self.detected = self.verdict == Verdict::Detected;
        self.set_second_bound(old_bound);
        Ok(self)
    }

    /// Largest margin across the bounds this report carries.
    pub fn max_margin(&self) -> f64 {
        self.margin2.map_or(self.margin, |m2| self.margin.max(m2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::from_margin(2e-9, DETECT_TOL), Verdict::Detected);
        assert_eq!(
            Verdict::from_margin(5e-10, DETECT_TOL),
            Verdict::InconclusiveAtTolerance
        );
        assert_eq!(
            Verdict::from_margin(-5e-10, DETECT_TOL),
            Verdict::InconclusiveAtTolerance
        );
        assert_eq!(
            Verdict::from_margin(-2e-9, DETECT_TOL),
            Verdict::NotDetected
        );
    }

    #[test]
    fn selection_validation() {
        let ok = Selection(vec![vec![vec![0, 1], vec![2, 0]]]);
        assert!(ok.validate(&[2, 3]).is_ok());
        let repeated = Selection(vec![vec![vec![0, 0], vec![2, 0]]]);
        assert!(repeated.validate(&[2, 3]).is_err());
        let short = Selection(vec![vec![vec![0], vec![2]]]);
        assert!(short.validate(&[2, 3]).is_err());
        let range = Selection(vec![vec![vec![0, 2], vec![2, 0]]]);
        assert!(range.validate(&[2, 3]).is_err());
    }

    #[test]
    fn relabel_swaps_bounds() {
        let mut r = CriterionReport::with_bound(
            Theorem::T4,
            1.0,
            2.0,
            Strategy::Exact,
            SelectionRecord::Label(SelectionLabel::FullDiagonal),
            vec![2, 2],
            3,
            vec![1.0, 1.0],
        );
        r.set_second_bound(0.5);
        assert!(r.detected2.unwrap());
        assert!(!r.detected);
        let t5 = r.clone().with_primary(Theorem::T5).unwrap();
        assert_eq!(t5.theorem, Theorem::T5);
        assert_eq!(t5.bound, 0.5);
        assert!(t5.detected);
        assert_eq!(t5.bound2, Some(2.0));
        assert_eq!(t5.with_primary(Theorem::T4).unwrap(), r);
        assert!(r.clone().with_primary(Theorem::T2).is_err());
    }
}

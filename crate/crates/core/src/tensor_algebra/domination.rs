use serde::{Deserialize, Serialize};

use super::ops::shuffle_exp;
use super::truncated::TruncatedTensor;
use super::word::Word;

/// Absolute slack allowed in coefficient comparisons.
pub const DOMINATION_SLACK: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessSide {
    /// `a ⊗ e^⊔b`
    Left,
    /// `e^⊔b ⊗ a`
    Right,
}

/// Single-letter combinations `a`, `b` describing the dominating series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationWitness {
    pub a_coeffs: Vec<f64>,
    pub b_coeffs: Vec<f64>,
    pub side: WitnessSide,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationReport {
    pub holds: bool,
    /// First word, in storage order, where `|q^v|` exceeds the bound.
    pub violation: Option<Word>,
}

impl DominationWitness {
    /// The dominating tensor at the shape of `like`.
    pub fn tensor(&self, like: &TruncatedTensor) -> TruncatedTensor {
        let alphabet = like.alphabet();
        let m = like.level_cap();
        let a = TruncatedTensor::letters(alphabet, m, &self.a_coeffs);
        let e = shuffle_exp(&TruncatedTensor::letters(alphabet, m, &self.b_coeffs));
        match self.side {
            WitnessSide::Left => a.concat(&e),
            WitnessSide::Right => e.concat(&a),
        }
    }
}

/// Checks `q ⪯ w` coefficient-wise on every retained word.
pub fn dominates(q: &TruncatedTensor, w: &DominationWitness) -> DominationReport {
    dominated_by(q, &w.tensor(q))
}

/// Checks `|q^v| ≤ bound^v` on every retained word.
pub fn dominated_by(q: &TruncatedTensor, bound: &TruncatedTensor) -> DominationReport {
    assert!(q.same_shape(bound), "shape mismatch in domination check");
    let d = q.dim();
    for n in 0..=q.level_cap() {
        for (i, (x, b)) in q.level(n).iter().zip(bound.level(n)).enumerate() {
            if x.abs() > b + DOMINATION_SLACK {
                return DominationReport { holds: false, violation: Some(Word::from_index(n, i, d)) };
            }
        }
    }
    DominationReport { holds: true, violation: None }
}

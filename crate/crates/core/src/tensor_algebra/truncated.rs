use serde::{Deserialize, Serialize};

use super::word::{Alphabet, Word};
use crate::error::{Error, Result};

/// An element of `T^M(R^d)` stored densely, level after level.
///
/// Level `n` occupies `d^n` consecutive slots ordered lexicographically, so
/// word `v` of length `n` lives at `offset(n) + v.index_in_level(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensor {
    dim: usize,
    level_cap: usize,
    coeffs: Vec<f64>,
}

pub(crate) fn level_offset(d: usize, n: usize) -> usize {
    (d.pow(n as u32) - 1) / (d - 1)
}

impl TruncatedTensor {
    pub fn zeros(alphabet: Alphabet, level_cap: usize) -> Self {
        let d = alphabet.size();
        Self { dim: d, level_cap, coeffs: vec![0.0; alphabet.words_up_to(level_cap)] }
    }

    /// The unit `ø`.
    pub fn unit(alphabet: Alphabet, level_cap: usize) -> Self {
        Self::scalar(alphabet, level_cap, 1.0)
    }

    pub fn scalar(alphabet: Alphabet, level_cap: usize, value: f64) -> Self {
        let mut t = Self::zeros(alphabet, level_cap);
        t.coeffs[0] = value;
        t
    }

    /// `c · w`; words longer than the cap are dropped.
    pub fn from_word(alphabet: Alphabet, level_cap: usize, word: &Word, c: f64) -> Self {
        let mut t = Self::zeros(alphabet, level_cap);
        t.add_to(word, c);
        t
    }

    /// The single-letter combination `Σ cᵢ 𝚒` from `coeffs[i-1] = cᵢ`.
    pub fn letters(alphabet: Alphabet, level_cap: usize, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), alphabet.size(), "one coefficient per letter");
        let mut t = Self::zeros(alphabet, level_cap);
        if level_cap >= 1 {
            t.level_mut(1).copy_from_slice(coeffs);
        }
        t
    }

    /// Builds a tensor from `(word, coefficient)` pairs, summing repeats.
    pub fn from_terms<'a>(
        alphabet: Alphabet,
        level_cap: usize,
        terms: impl IntoIterator<Item = (&'a Word, f64)>,
    ) -> Self {
        let mut t = Self::zeros(alphabet, level_cap);
        for (w, c) in terms {
            t.add_to(w, c);
        }
        t
    }

    /// Wraps raw level-major coefficients.
    pub fn from_coeffs(alphabet: Alphabet, level_cap: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != alphabet.words_up_to(level_cap) {
            return Err(Error::Dimension(format!(
                "expected {} coefficients for d={}, M={}, got {}",
                alphabet.words_up_to(level_cap),
                alphabet.size(),
                level_cap,
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coefficient {bad}")));
        }
        Ok(Self { dim: alphabet.size(), level_cap, coeffs })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.dim).expect("stored alphabet is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn level(&self, n: usize) -> &[f64] {
        let start = level_offset(self.dim, n);
        &self.coeffs[start..start + self.dim.pow(n as u32)]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        let start = level_offset(self.dim, n);
        let len = self.dim.pow(n as u32);
        &mut self.coeffs[start..start + len]
    }

    /// `ℓ^ø`.
    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    fn slot(&self, word: &Word) -> Option<usize> {
        if word.len() > self.level_cap {
            return None;
        }
        assert!(word.max_letter() <= self.dim, "word {word} uses a letter outside d={}", self.dim);
        Some(level_offset(self.dim, word.len()) + word.index_in_level(self.dim))
    }

    /// Coefficient of `word`; zero beyond the cap.
    pub fn get(&self, word: &Word) -> f64 {
        self.slot(word).map_or(0.0, |i| self.coeffs[i])
    }

    /// Sets the coefficient of `word`; ignored beyond the cap.
    pub fn set(&mut self, word: &Word, value: f64) {
        if let Some(i) = self.slot(word) {
            self.coeffs[i] = value;
        }
    }

    pub fn add_to(&mut self, word: &Word, value: f64) {
        if let Some(i) = self.slot(word) {
            self.coeffs[i] += value;
        }
    }

    /// Nonzero `(word, coefficient)` pairs in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        (0..=self.level_cap).flat_map(move |n| {
            self.level(n)
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(move |(i, &c)| (Word::from_index(n, i, self.dim), c))
        })
    }

    /// Highest level holding a nonzero coefficient, `None` for the zero tensor.
    pub fn degree(&self) -> Option<usize> {
        (0..=self.level_cap).rev().find(|&n| self.level(n).iter().any(|&c| c != 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.level_cap == other.level_cap
    }

    pub(crate) fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "(d={}, M={}) vs (d={}, M={})",
                self.dim, self.level_cap, other.dim, other.level_cap
            )))
        }
    }

    /// Same coefficients with a different cap: truncates or pads with zeros.
    pub fn with_level_cap(&self, level_cap: usize) -> Self {
        let mut out = Self::zeros(self.alphabet(), level_cap);
        let n = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Keeps levels `≤ m` and zeroes the rest, preserving the cap.
    pub fn truncated(&self, m: usize) -> Self {
        let mut out = self.clone();
        if m < self.level_cap {
            let start = level_offset(self.dim, m + 1);
            out.coeffs[start..].iter_mut().for_each(|c| *c = 0.0);
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(c);
        out
    }

    pub fn scale_in_place(&mut self, c: f64) {
        self.coeffs.iter_mut().for_each(|x| *x *= c);
    }

    /// `self += c · other`. Panics on shape mismatch.
    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        assert!(self.same_shape(other), "shape mismatch in add_scaled");
        self.coeffs.iter_mut().zip(&other.coeffs).for_each(|(x, y)| *x += c * y);
    }

    /// `self + other`. Panics on shape mismatch.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(1.0, other);
        out
    }

    /// `self − other`. Panics on shape mismatch.
    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    /// Largest absolute coefficient difference over levels `≤ max_level`.
    pub fn max_abs_diff(&self, other: &Self, max_level: usize) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let top = max_level.min(self.level_cap).min(other.level_cap);
        let end = level_offset(self.dim, top + 1);
        self.coeffs[..end].iter().zip(&other.coeffs[..end]).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest absolute coefficient over levels `≤ max_level`.
    pub fn max_abs(&self, max_level: usize) -> f64 {
        let end = level_offset(self.dim, max_level.min(self.level_cap) + 1);
        self.coeffs[..end].iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// JSON debug form `{"d":…,"M":…,"levels":[[…],…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&TensorJson::from(self)).expect("tensor serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TensorJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    levels: Vec<Vec<f64>>,
}

impl From<&TruncatedTensor> for TensorJson {
    fn from(t: &TruncatedTensor) -> Self {
        Self { d: t.dim, m: t.level_cap, levels: (0..=t.level_cap).map(|n| t.level(n).to_vec()).collect() }
    }
}

impl TryFrom<TensorJson> for TruncatedTensor {
    type Error = Error;
    fn try_from(j: TensorJson) -> Result<Self> {
        let alphabet = Alphabet::new(j.d)?;
        if j.levels.len() != j.m + 1 {
            return Err(Error::Parse(format!("expected {} levels, got {}", j.m + 1, j.levels.len())));
        }
        for (n, lvl) in j.levels.iter().enumerate() {
            if lvl.len() != alphabet.words_at_level(n) {
                return Err(Error::Parse(format!("level {n} has {} entries", lvl.len())));
            }
        }
        TruncatedTensor::from_coeffs(alphabet, j.m, j.levels.concat())
    }
}

impl Serialize for TruncatedTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        TensorJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

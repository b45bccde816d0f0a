//! Signature coordinates restricted to a prefix-closed set of words.
//!
//! The segment update of a word only reads its prefixes, so a prefix-closed
//! set evolves on its own. Functionals supported on words `1^n 2` need a
//! few dozen coordinates instead of the full level-`M` tensor.

use std::collections::BTreeMap;

use super::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::tensor_algebra::{TruncatedTensor, Word};

#[derive(Clone, Debug)]
pub struct SparseSignature {
    /// Sorted by length, then lexicographically; index 0 is `ø`.
    words: Vec<Word>,
    /// `prefixes[w][p]` is the index of the length-`p` prefix of word `w`.
    prefixes: Vec<Vec<usize>>,
    letters: Vec<Vec<usize>>,
    dims: usize,
    index: BTreeMap<Word, usize>,
}

impl SparseSignature {
    /// The prefix closure of `words` over an alphabet of `d` letters.
    pub fn new(words: impl IntoIterator<Item = Word>, d: usize) -> Result<Self> {
        let mut closure: Vec<Word> = vec![Word::empty()];
        for w in words {
            if w.max_letter() > d {
                return Err(Error::Argument(format!("word {w} outside an alphabet of {d} letters")));
            }
            let letters: Vec<usize> = w.letters().collect();
            for p in 1..=letters.len() {
                closure.push(Word::new(&letters[..p]));
            }
        }
        closure.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        closure.dedup();
        let index: BTreeMap<Word, usize> = closure.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let letters: Vec<Vec<usize>> = closure.iter().map(|w| w.letters().collect()).collect();
        let prefixes = letters
            .iter()
            .map(|ls| (0..ls.len()).map(|p| index[&Word::new(&ls[..p])]).collect())
            .collect();
        Ok(Self { words: closure, prefixes, letters, dims: d - 1, index })
    }

    /// The prefix closure of the support of `l`.
    pub fn for_support(l: &TruncatedTensor) -> Result<Self> {
        Self::new(l.terms().map(|(w, _)| w), l.dim())
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Coefficients of `l` in word order; fails if `l` has support outside the set.
    pub fn coords_of(&self, l: &TruncatedTensor) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.words.len()];
        for (w, c) in l.terms() {
            let i = self.position(&w).ok_or_else(|| Error::Argument(format!("word {w} is not tracked")))?;
            out[i] = c;
        }
        Ok(out)
    }

    /// Calls `f(k, coords_k)` at every grid point; `coords_k[i]` is the
    /// signature coordinate of `words()[i]` over `[0, t_k]`.
    pub fn walk(&self, path: &BrownianPath, mut f: impl FnMut(usize, &[f64])) -> Result<()> {
        if path.dims() != self.dims {
            return Err(Error::Dimension(format!("path has {} Brownian dims, set expects {}", path.dims(), self.dims)));
        }
        let max_len = self.letters.last().map_or(0, Vec::len);
        let inv_fact: Vec<f64> = (0..=max_len)
            .scan(1.0, |acc, k| {
                if k > 0 {
                    *acc /= k as f64;
                }
                Some(*acc)
            })
            .collect();
        let mut s = vec![0.0; self.words.len()];
        s[0] = 1.0;
        let mut dx = vec![0.0; self.dims + 1];
        f(0, &s);
        let grid = *path.grid();
        for k in 0..grid.steps() {
            dx[0] = grid.dt();
            dx[1..].copy_from_slice(path.increments_at(k));
            // Longest words first so prefixes still hold the old values.
            for w in (1..self.words.len()).rev() {
                let ls = &self.letters[w];
                let n = ls.len();
                let mut prod = 1.0;
                let mut add = 0.0;
                for p in (0..n).rev() {
                    prod *= dx[ls[p] - 1];
                    add += s[self.prefixes[w][p]] * prod * inv_fact[n - p];
                }
                s[w] += add;
            }
            f(k + 1, &s);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature_engine::{sample_brownian, signature_stream, TimeGrid};

    #[test]
    fn closure_contains_prefixes() {
        let s = SparseSignature::new(["1122".parse().unwrap()], 2).unwrap();
        let names: Vec<String> = s.words().iter().map(ToString::to_string).collect();
        assert_eq!(names, ["ø", "1", "11", "112", "1122"]);
    }

    #[test]
    fn agrees_with_dense_stream() {
        let grid = TimeGrid::new(1.0, 60).unwrap();
        let path = sample_brownian(grid, 2, 4, 2).unwrap();
        let words: Vec<Word> = ["1112", "2131", "33", "1213"].iter().map(|s| s.parse().unwrap()).collect();
        let sparse = SparseSignature::new(words, 3).unwrap();
        let dense = signature_stream(path.clone(), 4).unwrap();
        sparse
            .walk(&path, |k, coords| {
                for (w, c) in sparse.words().iter().zip(coords) {
                    assert!((dense.at(k).get(w) - c).abs() < 1e-13, "{w} at step {k}");
                }
            })
            .unwrap();
    }

    #[test]
    fn rejects_untracked_support() {
        let s = SparseSignature::new(["12".parse().unwrap()], 2).unwrap();
        let l = TruncatedTensor::from_word(crate::tensor_algebra::Alphabet::new(2).unwrap(), 3, &"21".parse().unwrap(), 1.0);
        assert!(s.coords_of(&l).is_err());
    }
}

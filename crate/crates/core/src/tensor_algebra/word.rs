use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of letters of the alphabet `{1, …, d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("alphabet needs d >= 2, got {d}")));
        }
        Ok(Self(d))
    }

    pub fn size(self) -> usize {
        self.0
    }

    /// Number of words of length exactly `n`.
    pub fn words_at_level(self, n: usize) -> usize {
        self.0.pow(n as u32)
    }

    /// Number of words of length at most `m`.
    pub fn words_up_to(self, m: usize) -> usize {
        (self.0.pow(m as u32 + 1) - 1) / (self.0 - 1)
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

/// A word over `{1, …, d}`; letters are stored one-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<u16>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Panics if a letter is zero.
    pub fn new(letters: &[usize]) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are one-based");
        Self { letters: letters.iter().map(|&l| l as u16).collect() }
    }

    pub fn letter(i: usize) -> Self {
        Self::new(&[i])
    }

    /// The word `i i … i` of length `n`.
    pub fn repeat(i: usize, n: usize) -> Self {
        Self::new(&vec![i; n])
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.iter().map(|&l| l as usize)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `x(v)`, the number of time letters.
    pub fn ones(&self) -> usize {
        self.letters.iter().filter(|&&l| l == 1).count()
    }

    pub fn max_letter(&self) -> usize {
        self.letters.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn push(&mut self, letter: usize) {
        assert!(letter >= 1, "letters are one-based");
        self.letters.push(letter as u16);
    }

    /// Position of the word inside its level under base-`d` lexicographic encoding.
    pub fn index_in_level(&self, d: usize) -> usize {
        self.letters.iter().fold(0, |acc, &l| acc * d + (l as usize - 1))
    }

    /// Inverse of [`Word::index_in_level`].
    pub fn from_index(level: usize, mut index: usize, d: usize) -> Word {
        let mut letters = vec![0u16; level];
        for slot in letters.iter_mut().rev() {
            *slot = (index % d) as u16 + 1;
            index /= d;
        }
        Word { letters }
    }

    /// All words of length exactly `n`, in lexicographic order.
    pub fn all_of_level(n: usize, d: usize) -> impl Iterator<Item = Word> {
        (0..d.pow(n as u32)).map(move |i| Word::from_index(n, i, d))
    }

    /// All words of length at most `m`, level by level.
    pub fn all_up_to(m: usize, d: usize) -> impl Iterator<Item = Word> {
        (0..=m).flat_map(move |n| Word::all_of_level(n, d))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "ø");
        }
        let wide = self.letters.iter().any(|&l| l > 9);
        for (k, l) in self.letters.iter().enumerate() {
            if wide && k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `ø` or the empty string for the empty word, `122` for short
    /// letters and `1.10.2` when letters exceed 9.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "ø" {
            return Ok(Word::empty());
        }
        let bad = || Error::Parse(format!("not a word: {s:?}"));
        let letters: Vec<usize> = if s.contains('.') {
            s.split('.').map(|p| p.parse::<usize>().map_err(|_| bad())).collect::<Result<_>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|v| v as usize).ok_or_else(bad)).collect::<Result<_>>()?
        };
        if letters.iter().any(|&l| l == 0) {
            return Err(bad());
        }
        Ok(Word::new(&letters))
    }
}

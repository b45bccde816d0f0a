use std::fmt;
use std::sync::Arc;

use crate::tensor_algebra::{Alphabet, TruncatedTensor};

type Builder = dyn Fn(f64) -> TruncatedTensor + Send + Sync;

/// `t ↦ ℓ_t`, rebuilt from its coefficient functions at every query time.
#[derive(Clone)]
pub struct TimeVaryingFunctional {
    alphabet: Alphabet,
    level_cap: usize,
    builder: Arc<Builder>,
}

impl TimeVaryingFunctional {
    /// `builder` must return tensors of shape `(alphabet, level_cap)`.
    pub fn new(
        alphabet: Alphabet,
        level_cap: usize,
        builder: impl Fn(f64) -> TruncatedTensor + Send + Sync + 'static,
    ) -> Self {
        Self { alphabet, level_cap, builder: Arc::new(builder) }
    }

    pub fn at(&self, t: f64) -> TruncatedTensor {
        let l = (self.builder)(t);
        debug_assert!(l.alphabet() == self.alphabet && l.level_cap() == self.level_cap);
        l
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap
    }
}

impl fmt::Debug for TimeVaryingFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeVaryingFunctional")
            .field("d", &self.alphabet.size())
            .field("level_cap", &self.level_cap)
            .finish_non_exhaustive()
    }
}

/// Anything that can be paired against a signature stream.
#[derive(Clone, Debug)]
pub enum Functional {
    Fixed(TruncatedTensor),
    TimeVarying(TimeVaryingFunctional),
}

impl Functional {
    pub fn alphabet(&self) -> Alphabet {
        match self {
            Functional::Fixed(t) => t.alphabet(),
            Functional::TimeVarying(f) => f.alphabet(),
        }
    }

    pub fn level_cap(&self) -> usize {
        match self {
            Functional::Fixed(t) => t.level_cap(),
            Functional::TimeVarying(f) => f.level_cap(),
        }
    }

    pub fn at(&self, t: f64) -> TruncatedTensor {
        match self {
            Functional::Fixed(l) => l.clone(),
            Functional::TimeVarying(f) => f.at(t),
        }
    }
}

impl From<TruncatedTensor> for Functional {
    fn from(t: TruncatedTensor) -> Self {
        Functional::Fixed(t)
    }
}

impl From<TimeVaryingFunctional> for Functional {
    fn from(f: TimeVaryingFunctional) -> Self {
        Functional::TimeVarying(f)
    }
}

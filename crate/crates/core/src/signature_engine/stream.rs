//! Signatures of the piecewise-linear interpolation of `(t, W_t)`.

use std::sync::Arc;

use super::brownian::{BrownianPath, TimeGrid};
use super::functional::Functional;
use crate::error::{Error, Result};
use crate::tensor_algebra::{pair, Alphabet, TruncatedTensor};

/// Scratch space for [`extend_by_segment`].
#[derive(Clone, Debug, Default)]
pub struct SegmentScratch {
    acc: Vec<f64>,
    next: Vec<f64>,
}

/// `sig ← sig ⊗ exp(Σ dxᵢ 𝚒)` in place.
///
/// Level `n` of the product is `Σ_{k≤n} sig_{n−k} ⊗ dx^{⊗k}/k!`, evaluated by
/// a Horner scheme from the top level down so lower levels are still the old
/// values when they are read.
pub fn extend_by_segment(sig: &mut TruncatedTensor, dx: &[f64], scratch: &mut SegmentScratch) {
    let d = sig.dim();
    assert_eq!(dx.len(), d, "segment needs one increment per letter");
    let m = sig.level_cap();
    let top = d.pow(m as u32);
    scratch.acc.resize(top, 0.0);
    scratch.next.resize(top, 0.0);
    let inv: Vec<f64> = (0..=m).map(|k| if k == 0 { 0.0 } else { 1.0 / k as f64 }).collect();
    for n in (1..=m).rev() {
        let s0 = sig.level(0)[0];
        let c = s0 * inv[n];
        for (a, x) in scratch.acc[..d].iter_mut().zip(dx) {
            *a = c * x;
        }
        for j in 1..n {
            let width = d.pow(j as u32);
            let s = sig.level(j);
            let f = inv[n - j];
            let (acc, next) = (&scratch.acc[..width], &mut scratch.next[..width * d]);
            if d == 2 {
                let (x0, x1) = (dx[0] * f, dx[1] * f);
                for ((a, sv), dst) in acc.iter().zip(s).zip(next.chunks_exact_mut(2)) {
                    let v = a + sv;
                    dst[0] = v * x0;
                    dst[1] = v * x1;
                }
            } else {
                for ((a, sv), dst) in acc.iter().zip(s).zip(next.chunks_exact_mut(d)) {
                    let v = (a + sv) * f;
                    for (o, x) in dst.iter_mut().zip(dx) {
                        *o = v * x;
                    }
                }
            }
            std::mem::swap(&mut scratch.acc, &mut scratch.next);
        }
        let width = d.pow(n as u32);
        for (s, a) in sig.level_mut(n).iter_mut().zip(&scratch.acc[..width]) {
            *s += a;
        }
    }
}

/// Walks the signature along a path one grid step at a time.
pub struct SignatureWalker<'a> {
    path: &'a BrownianPath,
    sig: TruncatedTensor,
    step: usize,
    dx: Vec<f64>,
    scratch: SegmentScratch,
}

impl<'a> SignatureWalker<'a> {
    pub fn new(path: &'a BrownianPath, level_cap: usize) -> Result<Self> {
        if level_cap == 0 {
            return Err(Error::Argument("signature level must be at least 1".into()));
        }
        let alphabet = Alphabet::new(path.dims() + 1)?;
        Ok(Self {
            path,
            sig: TruncatedTensor::unit(alphabet, level_cap),
            step: 0,
            dx: vec![0.0; path.dims() + 1],
            scratch: SegmentScratch::default(),
        })
    }

    /// Current grid index `k`.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Signature over `[0, t_k]`.
    pub fn signature(&self) -> &TruncatedTensor {
        &self.sig
    }

    /// Advances one step; returns `false` at the end of the grid.
    pub fn advance(&mut self) -> bool {
        if self.step >= self.path.grid().steps() {
            return false;
        }
        self.dx[0] = self.path.grid().dt();
        self.dx[1..].copy_from_slice(self.path.increments_at(self.step));
        extend_by_segment(&mut self.sig, &self.dx, &mut self.scratch);
        self.step += 1;
        // Pin the time coordinate to the grid so repeated additions of dt do not drift.
        self.sig.level_mut(1)[0] = self.path.grid().time(self.step);
        true
    }

    /// Calls `f(k, sig_{t_k})` for every grid point including `k = 0`.
    pub fn for_each(mut self, mut f: impl FnMut(usize, &TruncatedTensor)) {
        f(0, &self.sig);
        while self.advance() {
            f(self.step, &self.sig);
        }
    }
}

/// Truncated signatures at every grid point, together with the driving path.
#[derive(Clone, Debug)]
pub struct SignatureStream {
    sigs: Vec<TruncatedTensor>,
    path: Arc<BrownianPath>,
}

impl SignatureStream {
    pub fn grid(&self) -> &TimeGrid {
        self.path.grid()
    }

    pub fn level_cap(&self) -> usize {
        self.sigs[0].level_cap()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.sigs[0].alphabet()
    }

    pub fn sigs(&self) -> &[TruncatedTensor] {
        &self.sigs
    }

    pub fn at(&self, k: usize) -> &TruncatedTensor {
        &self.sigs[k]
    }

    /// The very path the stream was built from.
    pub fn path(&self) -> &BrownianPath {
        &self.path
    }

    pub fn shared_path(&self) -> Arc<BrownianPath> {
        Arc::clone(&self.path)
    }
}

/// Builds the stream `sig_{t_0}, …, sig_{t_K}` at level `level_cap ≥ 1`.
pub fn signature_stream(path: impl Into<Arc<BrownianPath>>, level_cap: usize) -> Result<SignatureStream> {
    let path = path.into();
    let mut sigs = Vec::with_capacity(path.grid().steps() + 1);
    SignatureWalker::new(&path, level_cap)?.for_each(|_, s| sigs.push(s.clone()));
    Ok(SignatureStream { sigs, path })
}

/// `⟨ℓ_{t_k}, sig_{t_k}⟩` along the stream.
pub fn evaluate(l: &Functional, stream: &SignatureStream) -> Result<Vec<f64>> {
    if l.alphabet() != stream.alphabet() {
        return Err(Error::Dimension(format!(
            "functional over d={} against signatures over d={}",
            l.alphabet().size(),
            stream.alphabet().size()
        )));
    }
    let times = stream.grid().times();
    Ok(match l {
        Functional::Fixed(t) => stream.sigs().iter().map(|s| pair(t, s)).collect(),
        Functional::TimeVarying(f) => stream.sigs().iter().zip(times).map(|(s, t)| pair(&f.at(t), s)).collect(),
    })
}

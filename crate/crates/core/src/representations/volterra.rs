//! Time-independent representation of linear Volterra equations
//!
//! `Y_t = y + Σᵢ ∫ Kᵢ(t−s)(aᵢ + bᵢY_s) dX^i_s`, `X¹ = t`, `X^j = W^j`,
//! with kernels `Kᵢ(u) = ∫ e^{−xu} μᵢ(dx)` for Dirac mixtures `μᵢ`.

use serde::{Deserialize, Serialize};

use super::kernels::DiracMixture;
use crate::error::{Error, Result};
use crate::tensor_algebra::{resolvent, Alphabet, DominationWitness, TruncatedTensor, WitnessSide, Word};

/// Coefficients per letter: index 0 is time, index `j−1` is `W^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolterraParams {
    pub y: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mu: Vec<DiracMixture>,
}

impl VolterraParams {
    /// The scalar-noise case `d = 2`.
    pub fn scalar(y: f64, a1: f64, b1: f64, a2: f64, b2: f64, mu1: DiracMixture, mu2: DiracMixture) -> Self {
        Self { y, a: vec![a1, a2], b: vec![b1, b2], mu: vec![mu1, mu2] }
    }

    /// `dY = (a₁ + b₁Y)dt + a₂dW` started at `y`.
    pub fn ornstein_uhlenbeck(y: f64, a1: f64, b1: f64, a2: f64) -> Self {
        Self::scalar(y, a1, b1, a2, 0.0, DiracMixture::dirac_zero(), DiracMixture::dirac_zero())
    }

    /// `dY = b₁Y dt + b₂Y dW` started at `y`.
    pub fn geometric_brownian(y: f64, b1: f64, b2: f64) -> Self {
        Self::scalar(y, 0.0, b1, 0.0, b2, DiracMixture::dirac_zero(), DiracMixture::dirac_zero())
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        let d = self.a.len();
        if self.b.len() != d || self.mu.len() != d {
            return Err(Error::Dimension(format!(
                "Volterra parameters need one a, b and μ per letter (got {}, {}, {})",
                d,
                self.b.len(),
                self.mu.len()
            )));
        }
        Alphabet::new(d)
    }
}

/// `∫ e^⊔(−x𝟷) μ(dx) = Σᵢ cᵢ Σₙ (−xᵢ)^n 𝟷^{⊗n}`.
pub fn laplace_exp_integral(mu: &DiracMixture, alphabet: Alphabet, level_cap: usize) -> TruncatedTensor {
    let mut out = TruncatedTensor::zeros(alphabet, level_cap);
    for n in 0..=level_cap {
        out.set(&Word::repeat(1, n), mu.signed_moment(n));
    }
    out
}

/// `𝚒 ⊗ L` for a tensor `L` supported on powers of `𝟷`, written directly.
fn letter_then_time_series(alphabet: Alphabet, level_cap: usize, letter: usize, l: &TruncatedTensor) -> TruncatedTensor {
    let mut out = TruncatedTensor::zeros(alphabet, level_cap);
    for n in 0..level_cap {
        let mut w = Word::letter(letter);
        for _ in 0..n {
            w.push(1);
        }
        out.set(&w, l.get(&Word::repeat(1, n)));
    }
    out
}

/// `(p^VOL, q^VOL)`.
pub fn volterra_pq(params: &VolterraParams, level_cap: usize) -> Result<(TruncatedTensor, TruncatedTensor)> {
    let alphabet = params.alphabet()?;
    let d = alphabet.size();
    let mut p = TruncatedTensor::scalar(alphabet, level_cap, params.y);
    let mut q = TruncatedTensor::zeros(alphabet, level_cap);
    for i in 1..=d {
        let l = laplace_exp_integral(&params.mu[i - 1], alphabet, level_cap);
        let il = letter_then_time_series(alphabet, level_cap, i, &l);
        p.add_scaled(params.a[i - 1], &il);
        q.add_scaled(params.b[i - 1], &il);
        if i >= 2 {
            let one_l = letter_then_time_series(alphabet, level_cap, 1, &l);
            let k0 = params.mu[i - 1].k0();
            let (ai, bi) = (params.a[i - 1], params.b[i - 1]);
            p.add_scaled(-0.5 * ai * bi * k0, &one_l);
            q.add_scaled(-0.5 * bi * bi * k0, &one_l);
        }
    }
    Ok((p, q))
}

/// `ℓ^VOL = p^VOL (ø − q^VOL)^{-1}`.
pub fn volterra_ell(params: &VolterraParams, level_cap: usize) -> Result<TruncatedTensor> {
    let (p, q) = volterra_pq(params, level_cap)?;
    Ok(p.concat(&resolvent(&q)?))
}

/// A left witness `s(𝟷 + … + 𝚍) e^⊔(m̂𝟷)` for `q^VOL`.
///
/// With `Λₙ = Σᵢ ∫xⁿ|μᵢ|(dx)` every coefficient of `q^VOL` on a word of
/// length `n+1` is bounded by `s₀Λₙ`, where
/// `s₀ = |b₁| + Σⱼ|bⱼ| + ½Σⱼ|bⱼ²Kⱼ(0)|`. Normalising by `λ = max(1, Λ₀)` gives
/// `s = s₀λ` and `m̂ = maxₙ (Λₙ/λ)^{1/n}` over the retained levels.
pub fn volterra_witness(params: &VolterraParams, level_cap: usize) -> Result<DominationWitness> {
    let d = params.alphabet()?.size();
    let mut s0 = params.b[0].abs();
    for j in 2..=d {
        let bj = params.b[j - 1];
        s0 += bj.abs() + 0.5 * (bj * bj * params.mu[j - 1].k0()).abs();
    }
    let lambda = |n: usize| params.mu.iter().map(|m| m.abs_moment(n)).sum::<f64>();
    let norm = lambda(0).max(1.0);
    let rate = (1..level_cap).map(|n| (lambda(n) / norm).powf(1.0 / n as f64)).fold(0.0, f64::max);
    let mut b_coeffs = vec![0.0; d];
    b_coeffs[0] = rate;
    Ok(DominationWitness { a_coeffs: vec![s0 * norm; d], b_coeffs, side: WitnessSide::Left })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_algebra::{project, shuffle_exp};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn laplace_integral_examples() {
        let a = Alphabet::new(2).unwrap();
        assert_eq!(laplace_exp_integral(&DiracMixture::dirac_zero(), a, 4), TruncatedTensor::unit(a, 4));
        let m = DiracMixture::new(vec![(1.0, 1.0), (1.0, 2.0)]).unwrap();
        let l = laplace_exp_integral(&m, a, 3);
        assert_eq!((l.get(&w("1")), l.get(&w("11")), l.get(&w("111"))), (-3.0, 5.0, -9.0));
    }

    #[test]
    fn ornstein_uhlenbeck_pq() {
        let (p, q) = volterra_pq(&VolterraParams::ornstein_uhlenbeck(0.5, 0.2, -1.0, 0.3), 4).unwrap();
        let a = Alphabet::new(2).unwrap();
        let terms = [(&Word::empty(), 0.5), (&w("1"), 0.2), (&w("2"), 0.3)];
        assert_eq!(p, TruncatedTensor::from_terms(a, 4, terms));
        assert_eq!(q, TruncatedTensor::letters(a, 4, &[-1.0, 0.0]));
        let l = volterra_ell(&VolterraParams::ornstein_uhlenbeck(0.5, 0.2, -1.0, 0.3), 4).unwrap();
        assert!(l.max_abs_diff(&p.concat(&shuffle_exp(&q)), 4) < 1e-15);
    }

    #[test]
    fn geometric_brownian_pq() {
        let (p, q) = volterra_pq(&VolterraParams::geometric_brownian(2.0, 0.1, 0.3), 3).unwrap();
        let a = Alphabet::new(2).unwrap();
        assert_eq!(p, TruncatedTensor::scalar(a, 3, 2.0));
        assert!(q.max_abs_diff(&TruncatedTensor::letters(a, 3, &[0.1 - 0.045, 0.3]), 3) < 1e-15);
        assert_eq!(q.scalar_part(), 0.0);
    }

    #[test]
    fn second_letter_projection() {
        let mu1 = DiracMixture::new(vec![(0.7, 0.5), (0.2, 3.0)]).unwrap();
        let mu2 = DiracMixture::new(vec![(1.1, 0.0), (-0.3, 2.0)]).unwrap();
        let params = VolterraParams::scalar(0.4, 0.3, -0.6, 0.8, 0.9, mu1, mu2.clone());
        let m = 6;
        let l = volterra_ell(&params, m).unwrap();
        let a = l.alphabet();
        let k0 = mu2.k0();
        let rhs = TruncatedTensor::scalar(a, m, 0.8).plus(&l.scaled(0.9)).scaled(k0);
        assert!(project(&l, &w("2")).max_abs_diff(&rhs, m - 1) < 1e-12);
        let rhs2 = rhs.scaled(k0 * 0.9);
        assert!(project(&l, &w("22")).max_abs_diff(&rhs2, m - 2) < 1e-12);
    }

    #[test]
    fn rejects_ragged_parameters() {
        let mut p = VolterraParams::geometric_brownian(1.0, 0.0, 0.1);
        p.b.push(0.0);
        assert!(volterra_pq(&p, 3).is_err());
    }
}

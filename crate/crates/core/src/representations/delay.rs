//! Time-independent representation of linear delay equations
//!
//! `dZ_t = Σᵢ (aᵢ + bᵢZ_t + ∫₀ᵗ kᵢ(t−s)Z_s ds) dX^i_t`, `Z₀ = z`,
//! with exponential-sum kernels `kᵢ(t) = Σ_m cᵢ^m e^{αᵢ^m t}`.

use serde::{Deserialize, Serialize};

use super::kernels::ExpSumKernel;
use crate::error::{Error, Result};
use crate::tensor_algebra::{resolvent, Alphabet, DominationWitness, TruncatedTensor, WitnessSide, Word};

/// Coefficients per letter: index 0 is time, index `j−1` is `W^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayParams {
    pub z: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub kernels: Vec<ExpSumKernel>,
}

impl DelayParams {
    /// The scalar-noise case `d = 2`.
    pub fn scalar(z: f64, a1: f64, b1: f64, a2: f64, b2: f64, k1: ExpSumKernel, k2: ExpSumKernel) -> Self {
        Self { z, a: vec![a1, a2], b: vec![b1, b2], kernels: vec![k1, k2] }
    }

    /// Scenario (a) of the delay experiments.
    pub fn scenario_a() -> Self {
        Self::scalar(0.0, 1.5, 0.0, 3.0, 0.0, ExpSumKernel::new(vec![(-1.0, -2.0)]), ExpSumKernel::new(vec![(-2.0, -1.0)]))
    }

    /// Scenario (b) of the delay experiments.
    pub fn scenario_b() -> Self {
        Self::scalar(0.0, -1.0, -2.0, 1.0, 1.0, ExpSumKernel::new(vec![(2.0, -3.0)]), ExpSumKernel::new(vec![(1.0, -3.0)]))
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        let d = self.a.len();
        if self.b.len() != d || self.kernels.len() != d {
            return Err(Error::Dimension(format!(
                "delay parameters need one a, b and kernel per letter (got {}, {}, {})",
                d,
                self.b.len(),
                self.kernels.len()
            )));
        }
        Alphabet::new(d)
    }
}

/// `Σ_m c^m 𝟷 e^⊔(α^m 𝟷) = Σₙ (Σ_m c^m (α^m)^n) 𝟷^{n+1}`.
pub fn kernel_integral_tensor(k: &ExpSumKernel, alphabet: Alphabet, level_cap: usize) -> TruncatedTensor {
    let mut out = TruncatedTensor::zeros(alphabet, level_cap);
    for n in 0..level_cap {
        out.set(&Word::repeat(1, n + 1), k.power_sum(n));
    }
    out
}

/// Right-concatenation by a single letter.
fn then_letter(t: &TruncatedTensor, letter: usize) -> TruncatedTensor {
    t.concat(&TruncatedTensor::from_word(t.alphabet(), t.level_cap(), &Word::letter(letter), 1.0))
}

/// `(p^DE, q^DE)`.
pub fn delay_pq(params: &DelayParams, level_cap: usize) -> Result<(TruncatedTensor, TruncatedTensor)> {
    let alphabet = params.alphabet()?;
    let d = alphabet.size();
    let time = Word::letter(1);
    let mut p = TruncatedTensor::scalar(alphabet, level_cap, params.z);
    let mut q = TruncatedTensor::zeros(alphabet, level_cap);
    for i in 1..=d {
        let (ai, bi) = (params.a[i - 1], params.b[i - 1]);
        p.add_to(&Word::letter(i), ai);
        q.add_to(&Word::letter(i), bi);
        let ki = kernel_integral_tensor(&params.kernels[i - 1], alphabet, level_cap);
        q.add_scaled(1.0, &then_letter(&ki, i));
        if i >= 2 {
            p.add_to(&time, -0.5 * ai * bi);
            q.add_to(&time, -0.5 * bi * bi);
            q.add_scaled(-0.5 * bi, &then_letter(&ki, 1));
        }
    }
    Ok((p, q))
}

/// `ℓ^DE = p^DE (ø − q^DE)^{-1}`.
pub fn delay_ell(params: &DelayParams, level_cap: usize) -> Result<TruncatedTensor> {
    let (p, q) = delay_pq(params, level_cap)?;
    Ok(p.concat(&resolvent(&q)?))
}

/// The right witness `s e^⊔((Σ α̂)𝟷)(𝟷 + 𝟸)` for scalar noise, with
/// `α̂ = max(|α|, 1)` summed over every exponential term and
///
/// `s = |b₁ − Σc₁/α̂₁ − ½b₂(b₂ − Σc₂/α̂₂)| + |b₂ − Σc₂/α̂₂| + |Σc₁/α̂₁ − ½b₂Σc₂/α̂₂| + |Σc₂/α̂₂|`.
pub fn delay_witness(params: &DelayParams) -> Result<DominationWitness> {
    if params.alphabet()?.size() != 2 {
        return Err(Error::Argument("the delay witness is stated for d = 2".into()));
    }
    let hat = |a: f64| a.abs().max(1.0);
    let ratio = |k: &ExpSumKernel| k.terms().iter().map(|&(c, a)| c / hat(a)).sum::<f64>();
    let (b1, b2) = (params.b[0], params.b[1]);
    let (r1, r2) = (ratio(&params.kernels[0]), ratio(&params.kernels[1]));
    let s = (b1 - r1 - 0.5 * b2 * (b2 - r2)).abs() + (b2 - r2).abs() + (r1 - 0.5 * b2 * r2).abs() + r2.abs();
    let rate: f64 = params.kernels.iter().flat_map(|k| k.terms().iter().map(|&(_, a)| hat(a))).sum();
    Ok(DominationWitness { a_coeffs: vec![s, s], b_coeffs: vec![rate, 0.0], side: WitnessSide::Right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{volterra_ell, DiracMixture, VolterraParams};

    #[test]
    fn vanishing_kernels_reduce_to_volterra() {
        let params = DelayParams::scalar(0.7, 0.2, -0.4, 0.5, 0.3, ExpSumKernel::zero(), ExpSumKernel::zero());
        let vol = VolterraParams::scalar(0.7, 0.2, -0.4, 0.5, 0.3, DiracMixture::dirac_zero(), DiracMixture::dirac_zero());
        let m = 6;
        assert!(delay_ell(&params, m).unwrap().max_abs_diff(&volterra_ell(&vol, m).unwrap(), m) < 1e-14);
    }

    #[test]
    fn scenario_a_pq_by_hand() {
        let (p, q) = delay_pq(&DelayParams::scenario_a(), 4).unwrap();
        let w = |s: &str| s.parse::<Word>().unwrap();
        assert_eq!((p.get(&w("1")), p.get(&w("2"))), (1.5, 3.0));
        // c₁ α₁ on 𝟷𝟷𝟷 and c₂ α₂² on 𝟷𝟷𝟷𝟸.
        assert_eq!(q.get(&w("111")), 2.0);
        assert_eq!(q.get(&w("1112")), -2.0);
        assert_eq!(q.get(&w("12")), -2.0);
        assert_eq!(q.scalar_part(), 0.0);
    }

    #[test]
    fn witness_constants_for_scenarios() {
        let wa = delay_witness(&DelayParams::scenario_a()).unwrap();
        assert!((wa.a_coeffs[0] - 5.0).abs() < 1e-15);
        assert_eq!(wa.b_coeffs, vec![3.0, 0.0]);
        let wb = delay_witness(&DelayParams::scenario_b()).unwrap();
        assert!((wb.a_coeffs[0] - 4.5).abs() < 1e-14);
        assert_eq!(wb.b_coeffs, vec![6.0, 0.0]);
    }
}

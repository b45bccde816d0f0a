//! Time-dependent representations of Gaussian Volterra processes
//! `X_t = ∫₀ᵗ K(t−s) dW_s`: `ℓ_t = Σ_{n<M} K^{(n)}(t)(−1)^n 𝟷^{⊗n}𝟸`.

use statrs::function::gamma::ln_gamma;

use super::kernels::{ln_rising_factorial, SmoothKernel};
use crate::error::{Error, Result};
use crate::signature_engine::TimeVaryingFunctional;
use crate::tensor_algebra::{Alphabet, TruncatedTensor, Word};

fn scalar_alphabet() -> Alphabet {
    Alphabet::new(2).expect("two letters")
}

/// The words `𝟷^n𝟸`, `n < level_cap`.
pub fn time_then_noise_words(level_cap: usize) -> Vec<Word> {
    (0..level_cap)
        .map(|n| {
            let mut w = Word::repeat(1, n);
            w.push(2);
            w
        })
        .collect()
}

/// `ℓ_t^GV` over `d = 2`; the zero tensor for `t ≤ 0`.
pub fn gaussian_volterra_ell(k: &SmoothKernel, t: f64, level_cap: usize) -> Result<TruncatedTensor> {
    let mut out = TruncatedTensor::zeros(scalar_alphabet(), level_cap);
    if t <= 0.0 {
        return Ok(out);
    }
    for (n, w) in time_then_noise_words(level_cap).iter().enumerate() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        out.set(w, sign * k.derivative(n, t)?);
    }
    Ok(out)
}

/// `ℓ_{t}^RL` for the kernel shifted by `eps`: the coefficient on `𝟷^n𝟸` is
/// `τ^{H−½−n}(½−H)^{n̄}/Γ(H+½)` with `τ = t + ε`.
pub fn rl_ell(hurst: f64, eps: f64, t: f64, level_cap: usize) -> Result<TruncatedTensor> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!("Hurst index must lie in (0,1), got {hurst}")));
    }
    let tau = t + eps;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("t + eps must be positive, got {tau}")));
    }
    let ln_tau = tau.ln();
    let ln_norm = ln_gamma(hurst + 0.5);
    let mut out = TruncatedTensor::zeros(scalar_alphabet(), level_cap);
    for (n, w) in time_then_noise_words(level_cap).iter().enumerate() {
        let (ln_rise, sign) = ln_rising_factorial(0.5 - hurst, n);
        if sign != 0.0 {
            out.set(w, sign * ((hurst - 0.5 - n as f64) * ln_tau + ln_rise - ln_norm).exp());
        }
    }
    Ok(out)
}

/// `t ↦ ℓ_t^RL` at shift `eps`.
pub fn rl_functional(hurst: f64, eps: f64, level_cap: usize) -> Result<TimeVaryingFunctional> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("shift must be nonnegative, got {eps}")));
    }
    rl_ell(hurst, eps, 1.0, level_cap)?;
    Ok(TimeVaryingFunctional::new(scalar_alphabet(), level_cap, move |t| {
        rl_ell(hurst, eps, t, level_cap).unwrap_or_else(|_| TruncatedTensor::zeros(scalar_alphabet(), level_cap))
    }))
}

/// `t ↦ ℓ_t^GV` for a smooth kernel; times where the oracle fails give zero.
pub fn gaussian_volterra_functional(k: SmoothKernel, level_cap: usize) -> TimeVaryingFunctional {
    TimeVaryingFunctional::new(scalar_alphabet(), level_cap, move |t| {
        gaussian_volterra_ell(&k, t, level_cap).unwrap_or_else(|_| TruncatedTensor::zeros(scalar_alphabet(), level_cap))
    })
}

/// `ℓ_t^OU = e^⊔(−κ(tø − 𝟷))𝟸`, representing `∫₀ᵗ e^{−κ(t−s)} dW_s`.
pub fn ou_time_dependent(kappa: f64, level_cap: usize) -> TimeVaryingFunctional {
    gaussian_volterra_functional(SmoothKernel::exponential(kappa), level_cap)
}

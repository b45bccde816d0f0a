//! Convolution kernels: Dirac mixtures, exponential sums and smooth kernels
//! with a derivative oracle.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// A kernel that can be evaluated at a lag.
pub trait Kernel: Send + Sync {
    fn eval(&self, t: f64) -> Result<f64>;
}

/// `K(u) = Σ c_i e^{−x_i u}`, the Laplace transform of `Σ c_i δ_{x_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct DiracMixture {
    atoms: Vec<(f64, f64)>,
}

impl DiracMixture {
    /// Atoms are `(weight, location)` with finite weights and locations `≥ 0`.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(c, x) in &atoms {
            if !c.is_finite() || !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Domain(format!("invalid atom (c={c}, x={x})")));
            }
        }
        Ok(Self { atoms })
    }

    /// `δ₀`, the constant kernel `K ≡ 1`.
    pub fn dirac_zero() -> Self {
        Self { atoms: vec![(1.0, 0.0)] }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn k0(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).sum()
    }

    pub fn value(&self, u: f64) -> f64 {
        self.atoms.iter().map(|&(c, x)| c * (-x * u).exp()).sum()
    }

    /// `Σ c_i (−x_i)^n`.
    pub fn signed_moment(&self, n: usize) -> f64 {
        self.atoms.iter().map(|&(c, x)| c * (-x).powi(n as i32)).sum()
    }

    /// `∫ x^n |μ|(dx)`, the quantity in the moment condition.
    pub fn abs_moment(&self, n: usize) -> f64 {
        self.atoms.iter().map(|&(c, x)| c.abs() * x.powi(n as i32)).sum()
    }

    /// The same kernel written as `Σ c e^{αt}` with `α = −x`.
    pub fn to_exp_sum(&self) -> ExpSumKernel {
        ExpSumKernel { terms: self.atoms.iter().map(|&(c, x)| (c, -x)).collect() }
    }
}

impl TryFrom<Vec<(f64, f64)>> for DiracMixture {
    type Error = Error;
    fn try_from(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<DiracMixture> for Vec<(f64, f64)> {
    fn from(m: DiracMixture) -> Self {
        m.atoms
    }
}

impl Kernel for DiracMixture {
    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.value(t))
    }
}

/// `K(t) = Σ c^m e^{α^m t}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct ExpSumKernel {
    terms: Vec<(f64, f64)>,
}

impl ExpSumKernel {
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `(c, α)` pairs.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(c, a)| c * (a * t).exp()).sum()
    }

    /// `Σ_m c^m (α^m)^n`, the coefficient of `𝟷^{n+1}` in `Σ_m c^m 𝟷 e^⊔(α^m 𝟷)`.
    pub fn power_sum(&self, n: usize) -> f64 {
        self.terms.iter().map(|&(c, a)| c * a.powi(n as i32)).sum()
    }
}

impl From<Vec<(f64, f64)>> for ExpSumKernel {
    fn from(terms: Vec<(f64, f64)>) -> Self {
        Self { terms }
    }
}

impl From<ExpSumKernel> for Vec<(f64, f64)> {
    fn from(k: ExpSumKernel) -> Self {
        k.terms
    }
}

impl Kernel for ExpSumKernel {
    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.value(t))
    }
}

type Oracle = dyn Fn(usize, f64) -> f64 + Send + Sync;

/// Closed forms with known derivatives, plus an escape hatch for user oracles.
#[derive(Clone)]
pub enum SmoothForm {
    Constant(f64),
    /// `e^{−κt}`
    Exponential { kappa: f64 },
    /// `t^{H−½}/Γ(H+½)`
    RiemannLiouville { hurst: f64 },
    /// `(n, t) ↦ K^{(n)}(t)`
    Oracle(Arc<Oracle>),
}

impl fmt::Debug for SmoothForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothForm::Constant(c) => write!(f, "Constant({c})"),
            SmoothForm::Exponential { kappa } => write!(f, "Exponential {{ kappa: {kappa} }}"),
            SmoothForm::RiemannLiouville { hurst } => write!(f, "RiemannLiouville {{ hurst: {hurst} }}"),
            SmoothForm::Oracle(_) => write!(f, "Oracle(..)"),
        }
    }
}

/// A kernel `t ↦ K(t + shift)` with derivatives of every order.
#[derive(Clone, Debug)]
pub struct SmoothKernel {
    form: SmoothForm,
    shift: f64,
}

impl SmoothKernel {
    pub fn constant(c: f64) -> Self {
        Self { form: SmoothForm::Constant(c), shift: 0.0 }
    }

    pub fn exponential(kappa: f64) -> Self {
        Self { form: SmoothForm::Exponential { kappa }, shift: 0.0 }
    }

    pub fn riemann_liouville(hurst: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::Domain(format!("Hurst index must lie in (0,1), got {hurst}")));
        }
        Ok(Self { form: SmoothForm::RiemannLiouville { hurst }, shift: 0.0 })
    }

    pub fn oracle(f: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { form: SmoothForm::Oracle(Arc::new(f)), shift: 0.0 }
    }

    /// `t ↦ K(t + ε)`.
    pub fn shifted(mut self, eps: f64) -> Self {
        self.shift += eps;
        self
    }

    pub fn form(&self) -> &SmoothForm {
        &self.form
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `K^{(n)}(t + shift)`.
    pub fn derivative(&self, n: usize, t: f64) -> Result<f64> {
        let tau = t + self.shift;
        let v = match &self.form {
            SmoothForm::Constant(c) => {
                if n == 0 {
                    *c
                } else {
                    0.0
                }
            }
            SmoothForm::Exponential { kappa } => (-kappa).powi(n as i32) * (-kappa * tau).exp(),
            SmoothForm::RiemannLiouville { hurst } => rl_derivative(*hurst, n, tau)?,
            SmoothForm::Oracle(f) => f(n, tau),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::KernelDomain { lag: t, reason: format!("derivative of order {n} is {v}") })
        }
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.derivative(0, t)
    }
}

impl Kernel for SmoothKernel {
    fn eval(&self, t: f64) -> Result<f64> {
        self.value(t)
    }
}

/// `log|x^{n̄}|` and the sign of the rising factorial `x(x+1)…(x+n−1)`.
/// The sign is zero when a factor vanishes.
pub fn ln_rising_factorial(x: f64, n: usize) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let f = x + k as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln += f.abs().ln();
        if f < 0.0 {
            sign = -sign;
        }
    }
    (ln, sign)
}

/// `K^{(n)}(τ) = K(τ)(−τ)^{−n}(½−H)^{n̄}` for `K(τ) = τ^{H−½}/Γ(H+½)`.
fn rl_derivative(hurst: f64, n: usize, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::KernelDomain { lag: tau, reason: "Riemann-Liouville kernel needs a positive lag".into() });
    }
    if n == 0 {
        return Ok(tau.powf(hurst - 0.5) / gamma(hurst + 0.5));
    }
    let (ln_rise, sign) = ln_rising_factorial(0.5 - hurst, n);
    if sign == 0.0 {
        return Ok(0.0);
    }
    let ln_abs = (hurst - 0.5) * tau.ln() - ln_gamma(hurst + 0.5) - n as f64 * tau.ln() + ln_rise;
    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(parity * sign * ln_abs.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_basics() {
        let m = DiracMixture::new(vec![(1.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(m.k0(), 2.0);
        assert_eq!(m.signed_moment(1), -3.0);
        assert_eq!(m.signed_moment(2), 5.0);
        assert!((m.value(0.5) - ((-0.5f64).exp() + (-1.0f64).exp())).abs() < 1e-15);
        assert!(DiracMixture::new(vec![(1.0, -0.1)]).is_err());
        assert!((m.to_exp_sum().value(0.7) - m.value(0.7)).abs() < 1e-15);
    }

    #[test]
    fn exponential_oracle_matches_finite_differences() {
        let k = SmoothKernel::exponential(1.7);
        let h = 1e-5;
        let fd = (k.value(0.3 + h).unwrap() - k.value(0.3 - h).unwrap()) / (2.0 * h);
        assert!((k.derivative(1, 0.3).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn rl_oracle_matches_finite_differences() {
        for &hurst in &[0.1, 0.3, 0.7, 0.9] {
            let k = SmoothKernel::riemann_liouville(hurst).unwrap();
            for n in 0..4 {
                let t = 0.4;
                let h = 1e-4;
                let fd = (k.derivative(n, t + h).unwrap() - k.derivative(n, t - h).unwrap()) / (2.0 * h);
                let exact = k.derivative(n + 1, t).unwrap();
                assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "H={hurst} n={n}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn rl_kernel_at_half_is_brownian() {
        let k = SmoothKernel::riemann_liouville(0.5).unwrap().shifted(0.1);
        assert!((k.value(0.3).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(k.derivative(3, 0.3).unwrap(), 0.0);
        assert!(matches!(
            SmoothKernel::riemann_liouville(0.2).unwrap().value(0.0),
            Err(Error::KernelDomain { .. })
        ));
    }

    #[test]
    fn rising_factorial_signs() {
        let (ln, s) = ln_rising_factorial(-0.4, 3);
        assert!((s * ln.exp() - (-0.4 * 0.6 * 1.6)).abs() < 1e-15);
        assert_eq!(ln_rising_factorial(0.0, 2).1, 0.0);
        assert_eq!(ln_rising_factorial(0.3, 0), (0.0, 1.0));
    }
}

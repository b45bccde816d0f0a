//! Signature coefficients `ℓ` such that `⟨ℓ, sig_t⟩` reproduces a process.

mod delay;
mod fractional;
mod gaussian;
mod kernels;
mod volterra;

pub use delay::{delay_ell, delay_pq, delay_witness, kernel_integral_tensor, DelayParams};
pub use fractional::{default_ratio, fractional_dirac_approx, fractional_dirac_approx_with_ratio, kernel_l2_error};
pub use gaussian::{
    gaussian_volterra_ell, gaussian_volterra_functional, ou_time_dependent, rl_ell, rl_functional,
    time_then_noise_words,
};
pub use kernels::{ln_rising_factorial, DiracMixture, ExpSumKernel, Kernel, SmoothForm, SmoothKernel};
pub use volterra::{laplace_exp_integral, volterra_ell, volterra_pq, volterra_witness, VolterraParams};

pub use crate::signature_engine::{Functional, TimeVaryingFunctional};

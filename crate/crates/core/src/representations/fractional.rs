//! Geometric Dirac-mixture approximation of the Riemann–Liouville kernel
//! `K(t) = t^{α−1}/Γ(α)`, `α = H + ½`, by `Σ_k c_k e^{−x_k t}`.

use statrs::function::gamma::gamma;

use super::kernels::{DiracMixture, SmoothKernel};
use crate::error::{Error, Result};

/// Default ratio `r_n = 1 + 10 n^{−0.9}`.
pub fn default_ratio(n: usize) -> f64 {
    1.0 + 10.0 * (n as f64).powf(-0.9)
}

/// The `n`-atom mixture with the default ratio.
pub fn fractional_dirac_approx(hurst: f64, n: usize) -> Result<DiracMixture> {
    fractional_dirac_approx_with_ratio(hurst, n, default_ratio(n))
}

/// The `n`-atom mixture with geometric ratio `r > 1`:
///
/// `c_k = (r^{1−α} − 1) r^{(α−1)(1+n/2)} r^{(1−α)k} / (Γ(α)Γ(2−α))`,
/// `x_k = (1−α)/(2−α) · (r^{2−α} − 1)/(r^{1−α} − 1) · r^{k−1−n/2}`.
pub fn fractional_dirac_approx_with_ratio(hurst: f64, n: usize, r: f64) -> Result<DiracMixture> {
    if !(hurst > 0.0 && hurst < 0.5) {
        return Err(Error::Domain(format!("the mixture approximation needs H in (0, 1/2), got {hurst}")));
    }
    if n == 0 {
        return Err(Error::Argument("need at least one atom".into()));
    }
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::Argument(format!("ratio must exceed 1, got {r}")));
    }
    let alpha = hurst + 0.5;
    let half = n as f64 / 2.0;
    let norm = gamma(alpha) * gamma(2.0 - alpha);
    let c_base = (r.powf(1.0 - alpha) - 1.0) * r.powf((alpha - 1.0) * (1.0 + half)) / norm;
    let x_base = (1.0 - alpha) / (2.0 - alpha) * (r.powf(2.0 - alpha) - 1.0) / (r.powf(1.0 - alpha) - 1.0);
    let atoms = (1..=n)
        .map(|k| {
            let k = k as f64;
            (c_base * r.powf((1.0 - alpha) * k), x_base * r.powf(k - 1.0 - half))
        })
        .collect();
    DiracMixture::new(atoms)
}

/// `∫₀ᵀ |K_n(t) − K(t)|² dt` for the Riemann–Liouville kernel.
///
/// The substitution `t = T s^q` with `q = 1/(2H)` removes the endpoint
/// singularity of `K²`; the smooth remainder is integrated by composite
/// Gauss–Legendre on uniform panels.
pub fn kernel_l2_error(mixture: &DiracMixture, hurst: f64, horizon: f64) -> Result<f64> {
    let k = SmoothKernel::riemann_liouville(hurst)?;
    let q = (1.0 / (2.0 * hurst)).max(1.0);
    let integrand = |s: f64| -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let t = horizon * s.powf(q);
        let jac = horizon * q * s.powf(q - 1.0);
        let diff = mixture.value(t) - k.value(t)?;
        Ok(diff * diff * jac)
    };
    gauss_legendre(integrand, 0.0, 1.0, 4000)
}

/// Composite 5-point Gauss–Legendre on `panels` equal subintervals.
fn gauss_legendre(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, panels: usize) -> Result<f64> {
    const NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * f(mid + 0.5 * h * x)?;
        }
    }
    Ok(total * 0.5 * h)
}

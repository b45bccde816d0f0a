//! Reference schemes sharing the Brownian increments of a signature stream.
//!
//! Convolutions are direct `O(K²)` sums over past grid values, which keeps
//! every kernel family on the same code path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::representations::{DelayParams, Kernel, VolterraParams};
use crate::signature_engine::{BrownianPath, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EulerVolterra,
    EulerDelay,
    MilsteinDelay,
    HeunDelay,
    GvQuadrature,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub scheme: Scheme,
}

/// `K(m·Δt + shift)` for `m = 0..=steps`; entries below `first` stay zero
/// and the kernel is never evaluated there.
fn lag_table(k: &dyn Kernel, grid: &TimeGrid, shift: f64, first: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; grid.steps() + 1];
    for (m, slot) in out.iter_mut().enumerate().skip(first) {
        let lag = m as f64 * grid.dt() + shift;
        let v = k.eval(lag)?;
        if !v.is_finite() {
            return Err(Error::KernelDomain { lag, reason: format!("kernel value {v}") });
        }
        *slot = v;
    }
    Ok(out)
}

/// Left-point Euler for the Volterra equation with one kernel per letter:
/// `Y_k = y + Σ_{j<k} K₁(t_k−t_j)(a₁+b₁Y_j)Δt + Σᵢ Σ_{j<k} Kᵢ(t_k−t_j)(aᵢ+bᵢY_j)ΔW^i_j`.
pub fn euler_volterra(params: &VolterraParams, kernels: &[&dyn Kernel], path: &BrownianPath) -> Result<ReferenceSeries> {
    let d = params.alphabet()?.size();
    if kernels.len() != d || path.dims() != d - 1 {
        return Err(Error::Dimension(format!(
            "{} letters, {} kernels, {} Brownian dims",
            d,
            kernels.len(),
            path.dims()
        )));
    }
    let grid = *path.grid();
    let dt = grid.dt();
    let lags: Vec<Vec<f64>> = kernels.iter().map(|k| lag_table(*k, &grid, 0.0, 1)).collect::<Result<_>>()?;
    let steps = grid.steps();
    // drivers[i][j] = (aᵢ + bᵢY_j)·ΔX^i_j, filled as Y_j becomes known.
    let mut drivers = vec![vec![0.0; steps]; d];
    let mut y = Vec::with_capacity(steps + 1);
    y.push(params.y);
    for k in 0..steps {
        let yk = y[k];
        drivers[0][k] = (params.a[0] + params.b[0] * yk) * dt;
        for (i, dw) in path.increments_at(k).iter().enumerate() {
            drivers[i + 1][k] = (params.a[i + 1] + params.b[i + 1] * yk) * dw;
        }
        let mut next = params.y;
        for (lag, drv) in lags.iter().zip(&drivers) {
            next += (0..=k).map(|j| lag[k + 1 - j] * drv[j]).sum::<f64>();
        }
        y.push(next);
    }
    Ok(ReferenceSeries { grid, values: y, scheme: Scheme::EulerVolterra })
}

/// [`euler_volterra`] with the Dirac-mixture kernels of `params`.
pub fn euler_volterra_mixture(params: &VolterraParams, path: &BrownianPath) -> Result<ReferenceSeries> {
    let kernels: Vec<&dyn Kernel> = params.mu.iter().map(|m| m as &dyn Kernel).collect();
    euler_volterra(params, &kernels, path)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayScheme {
    Euler,
    /// Euler plus `½ Σᵢⱼ bᵢσⱼ(ΔW^iΔW^j − δᵢⱼΔt)`, the symmetric part of the
    /// Milstein correction (exact Milstein for scalar noise).
    Milstein,
    /// Predictor-corrector trapezoid on the Stratonovich form, drift
    /// `σ₁ − ½ Σᵢ bᵢσᵢ`. Tracks the convolution terms inside the noise
    /// coefficient to second order on each step.
    #[default]
    Heun,
}

/// Running coefficients `aᵢ + bᵢZ_k + Cᵢ(t_k)` at `k = z.len() − 1`, with
/// trapezoidal convolutions `Cᵢ(t_k) ≈ ∫₀^{t_k} kᵢ(t_k−s)Z_s ds`.
fn delay_coefficients(params: &DelayParams, lags: &[Vec<f64>], dt: f64, z: &[f64], out: &mut [f64]) {
    let k = z.len() - 1;
    let zk = z[k];
    for (i, slot) in out.iter_mut().enumerate() {
        let lag = &lags[i];
        let conv = if params.kernels[i].terms().is_empty() || k == 0 {
            0.0
        } else {
            let inner: f64 = (1..k).map(|j| lag[k - j] * z[j]).sum();
            dt * (0.5 * lag[k] * z[0] + inner + 0.5 * lag[0] * zk)
        };
        *slot = params.a[i] + params.b[i] * zk + conv;
    }
}

/// Reference solution of the delay equation on the grid of `path`.
pub fn euler_delay(params: &DelayParams, path: &BrownianPath, scheme: DelayScheme) -> Result<ReferenceSeries> {
    let d = params.alphabet()?.size();
    if path.dims() != d - 1 {
        return Err(Error::Dimension(format!("{d} letters against {} Brownian dims", path.dims())));
    }
    let grid = *path.grid();
    let dt = grid.dt();
    let steps = grid.steps();
    let lags: Vec<Vec<f64>> =
        params.kernels.iter().map(|k| lag_table(k, &grid, 0.0, 0)).collect::<Result<_>>()?;
    let strat_drift = |c: &[f64]| c[0] - 0.5 * (1..d).map(|i| params.b[i] * c[i]).sum::<f64>();
    let mut z = Vec::with_capacity(steps + 1);
    z.push(params.z);
    let (mut c, mut c_pred) = (vec![0.0; d], vec![0.0; d]);
    for k in 0..steps {
        let zk = z[k];
        let dw = path.increments_at(k);
        delay_coefficients(params, &lags, dt, &z, &mut c);
        let next = match scheme {
            DelayScheme::Euler | DelayScheme::Milstein => {
                let mut next = zk + c[0] * dt;
                for i in 1..d {
                    next += c[i] * dw[i - 1];
                }
                if scheme == DelayScheme::Milstein {
                    for i in 1..d {
                        for j in 1..d {
                            let area = dw[i - 1] * dw[j - 1] - if i == j { dt } else { 0.0 };
                            next += 0.5 * params.b[i] * c[j] * area;
                        }
                    }
                }
                next
            }
            DelayScheme::Heun => {
                let noise = |c: &[f64]| (1..d).map(|i| c[i] * dw[i - 1]).sum::<f64>();
                z.push(zk + strat_drift(&c) * dt + noise(&c));
                delay_coefficients(params, &lags, dt, &z, &mut c_pred);
                z.pop();
                zk + 0.5 * ((strat_drift(&c) + strat_drift(&c_pred)) * dt + noise(&c) + noise(&c_pred))
            }
        };
        z.push(next);
    }
    let tag = match scheme {
        DelayScheme::Euler => Scheme::EulerDelay,
        DelayScheme::Milstein => Scheme::MilsteinDelay,
        DelayScheme::Heun => Scheme::HeunDelay,
    };
    Ok(ReferenceSeries { grid, values: z, scheme: tag })
}

/// Precomputed lags `K(mΔt + ε)` for [`gv_quadrature_with`].
#[derive(Clone, Debug)]
pub struct GvLags {
    lags: Vec<f64>,
    grid: TimeGrid,
}

impl GvLags {
    pub fn new(k: &dyn Kernel, shift: f64, grid: TimeGrid) -> Result<Self> {
        if !(shift >= 0.0) {
            return Err(Error::Argument(format!("shift must be nonnegative, got {shift}")));
        }
        Ok(Self { lags: lag_table(k, &grid, shift, 1)?, grid })
    }
}

/// `X_{t_k} = Σ_{j<k} K(t_k + ε − t_j) ΔW_j` for the first Brownian coordinate.
pub fn gv_quadrature(k: &dyn Kernel, shift: f64, path: &BrownianPath) -> Result<ReferenceSeries> {
    gv_quadrature_with(&GvLags::new(k, shift, *path.grid())?, path)
}

pub fn gv_quadrature_with(lags: &GvLags, path: &BrownianPath) -> Result<ReferenceSeries> {
    if lags.grid != *path.grid() {
        return Err(Error::Dimension("lag table built for a different grid".into()));
    }
    let steps = lags.grid.steps();
    let dw: Vec<f64> = (0..steps).map(|j| path.increments_at(j)[0]).collect();
    let mut values = Vec::with_capacity(steps + 1);
    values.push(0.0);
    for k in 1..=steps {
        values.push((0..k).map(|j| lags.lags[k - j] * dw[j]).sum());
    }
    Ok(ReferenceSeries { grid: lags.grid, values, scheme: Scheme::GvQuadrature })
}

/// `dY = (a₁ + b₁Y)dt + a₂dW`, `Y₀ = y`, by its exact Gaussian transition
/// with the noise term scaled from the shared increment.
pub fn closed_form_ou(y: f64, a1: f64, b1: f64, a2: f64, path: &BrownianPath) -> ReferenceSeries {
    let grid = *path.grid();
    let dt = grid.dt();
    let decay = (b1 * dt).exp();
    let (drift, noise) = if b1 == 0.0 {
        (a1 * dt, 1.0)
    } else {
        (a1 * (decay - 1.0) / b1, (((2.0 * b1 * dt).exp() - 1.0) / (2.0 * b1 * dt)).sqrt())
    };
    let mut values = Vec::with_capacity(grid.steps() + 1);
    values.push(y);
    for k in 0..grid.steps() {
        let prev = values[k];
        values.push(decay * prev + drift + a2 * noise * path.increments_at(k)[0]);
    }
    ReferenceSeries { grid, values, scheme: Scheme::ClosedForm }
}

/// `X_t = ∫₀ᵗ e^{−κ(t−s)} dW_s`.
pub fn closed_form_ou_kappa(kappa: f64, path: &BrownianPath) -> ReferenceSeries {
    closed_form_ou(0.0, 0.0, -kappa, 1.0, path)
}

/// `y·exp((b₁ − ½b₂²)t + b₂W_t)`.
pub fn closed_form_gbm(y: f64, b1: f64, b2: f64, path: &BrownianPath) -> ReferenceSeries {
    let grid = *path.grid();
    let w = path.values(0);
    let values = (0..=grid.steps()).map(|k| y * ((b1 - 0.5 * b2 * b2) * grid.time(k) + b2 * w[k]).exp()).collect();
    ReferenceSeries { grid, values, scheme: Scheme::ClosedForm }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{DiracMixture, ExpSumKernel, SmoothKernel};
    use crate::signature_engine::sample_brownian;

    fn path(steps: usize, seed: u64) -> BrownianPath {
        sample_brownian(TimeGrid::new(1.0, steps).unwrap(), 1, seed, 0).unwrap()
    }

    fn rms(a: &[f64], b: &[f64]) -> f64 {
        (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
    }

    #[test]
    fn constant_kernels_give_affine_path() {
        let p = path(40, 1);
        let params = VolterraParams::scalar(0.3, 1.5, 0.0, -0.7, 0.0, DiracMixture::dirac_zero(), DiracMixture::dirac_zero());
        let y = euler_volterra_mixture(&params, &p).unwrap();
        let w = p.values(0);
        for k in 0..=40 {
            assert!((y.values[k] - (0.3 + 1.5 * p.grid().time(k) - 0.7 * w[k])).abs() < 1e-13);
        }
    }

    #[test]
    fn mixture_and_exp_sum_routes_agree() {
        let p = path(60, 2);
        let mu1 = DiracMixture::new(vec![(0.5, 1.0), (0.3, 4.0)]).unwrap();
        let mu2 = DiracMixture::new(vec![(1.2, 0.2)]).unwrap();
        let params = VolterraParams::scalar(1.0, 0.2, -0.3, 0.4, 0.5, mu1.clone(), mu2.clone());
        let a = euler_volterra_mixture(&params, &p).unwrap();
        let (e1, e2) = (mu1.to_exp_sum(), mu2.to_exp_sum());
        let b = euler_volterra(&params, &[&e1, &e2], &p).unwrap();
        assert!(rms(&a.values, &b.values) < 1e-12);
    }

    #[test]
    fn gbm_euler_converges_at_half_order() {
        let params = VolterraParams::geometric_brownian(1.0, 0.1, 0.3);
        let mut err = [0.0; 2];
        for seed in 0..200 {
            let fine = path(512, seed);
            for (slot, factor) in [(0, 4), (1, 1)] {
                let p = fine.coarsen(factor).unwrap();
                let y = euler_volterra_mixture(&params, &p).unwrap();
                let exact = closed_form_gbm(1.0, 0.1, 0.3, &p);
                err[slot] += rms(&y.values, &exact.values).powi(2);
            }
        }
        let ratio = (err[0] / err[1]).sqrt();
        // Four times as many steps should shrink the RMS error by about 2.
        assert!((1.5..3.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn delay_without_kernels_is_affine() {
        let p = path(30, 3);
        let params = DelayParams::scalar(0.4, 1.0, 0.0, 2.0, 0.0, ExpSumKernel::zero(), ExpSumKernel::zero());
        let w = p.values(0);
        for scheme in [DelayScheme::Euler, DelayScheme::Milstein, DelayScheme::Heun] {
            let z = euler_delay(&params, &p, scheme).unwrap();
            for k in 0..=30 {
                assert!((z.values[k] - (0.4 + p.grid().time(k) + 2.0 * w[k])).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn milstein_improves_multiplicative_noise() {
        let params = DelayParams::scalar(1.0, 0.0, 0.1, 0.0, 0.8, ExpSumKernel::zero(), ExpSumKernel::zero());
        let mut err = [0.0; 3];
        for seed in 0..100 {
            let p = path(200, seed);
            let exact = closed_form_gbm(1.0, 0.1, 0.8, &p);
            for (slot, scheme) in [(0, DelayScheme::Euler), (1, DelayScheme::Milstein), (2, DelayScheme::Heun)] {
                err[slot] += rms(&euler_delay(&params, &p, scheme).unwrap().values, &exact.values);
            }
        }
        assert!(err[1] < 0.25 * err[0] && err[2] < 0.25 * err[0], "{err:?}");
    }

    #[test]
    fn heun_tracks_convolution_in_the_noise() {
        // Additive noise whose coefficient moves through the kernel. The
        // target is the solution driven by the piecewise-linear interpolation
        // of the coarse path, which signature evaluations reproduce.
        let params = DelayParams::scenario_a();
        let mut err = [0.0; 2];
        for seed in 0..20 {
            let coarse = path(100, seed);
            let split: Vec<f64> = coarse.increments().iter().flat_map(|&x| [x / 16.0; 16]).collect();
            let fine = BrownianPath::from_increments(TimeGrid::new(1.0, 1600).unwrap(), 1, split).unwrap();
            let truth = euler_delay(&params, &fine, DelayScheme::Heun).unwrap().values;
            let truth: Vec<f64> = truth.iter().step_by(16).copied().collect();
            for (slot, scheme) in [(0, DelayScheme::Euler), (1, DelayScheme::Heun)] {
                err[slot] += rms(&euler_delay(&params, &coarse, scheme).unwrap().values, &truth);
            }
        }
        assert!(err[1] < 0.6 * err[0], "{err:?}");
    }

    #[test]
    fn quadrature_examples() {
        let p = path(50, 4);
        let w = p.values(0);
        let x = gv_quadrature(&SmoothKernel::constant(1.0), 0.0, &p).unwrap();
        assert!(rms(&x.values, &w) < 1e-14);
        let rl = gv_quadrature(&SmoothKernel::riemann_liouville(0.5).unwrap(), 0.1, &p).unwrap();
        assert!(rms(&rl.values, &w) < 1e-14);
        assert!(gv_quadrature(&SmoothKernel::riemann_liouville(0.2).unwrap(), 0.0, &p).is_ok());
        assert!(matches!(
            gv_quadrature(&SmoothKernel::riemann_liouville(0.2).unwrap(), -1.0, &p),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn quadrature_variance_matches_quadratic_form() {
        let grid = TimeGrid::new(1.0, 20).unwrap();
        let k = SmoothKernel::riemann_liouville(0.3).unwrap();
        let eps = 1.0 / 52.0;
        let lags = GvLags::new(&k, eps, grid).unwrap();
        let n = 100_000u64;
        let mut sum_sq = 0.0;
        let mut sum_4 = 0.0;
        for i in 0..n {
            let x = *gv_quadrature_with(&lags, &sample_brownian(grid, 1, 77, i).unwrap()).unwrap().values.last().unwrap();
            sum_sq += x * x;
            sum_4 += x.powi(4);
        }
        let var = sum_sq / n as f64;
        let se = ((sum_4 / n as f64 - var * var) / n as f64).sqrt();
        let expect: f64 = (0..20).map(|j| k.value(1.0 + eps - grid.time(j)).unwrap().powi(2) * grid.dt()).sum();
        assert!((var - expect).abs() < 3.0 * se, "{var} vs {expect} (se {se})");
    }

    #[test]
    fn closed_forms() {
        let p = path(25, 5);
        let ou = closed_form_ou_kappa(0.0, &p);
        assert!(rms(&ou.values, &p.values(0)) < 1e-14);
        let gbm = closed_form_gbm(2.0, 0.3, 0.0, &p);
        for k in 0..=25 {
            assert!((gbm.values[k] - 2.0 * (0.3 * p.grid().time(k)).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn ou_closed_form_and_euler_agree_as_steps_grow() {
        let kappa = 1.0;
        let mut gaps = [0.0; 2];
        for seed in 0..100 {
            let fine = path(400, seed);
            for (slot, factor) in [(0, 4), (1, 1)] {
                let p = fine.coarsen(factor).unwrap();
                let params = VolterraParams::ornstein_uhlenbeck(0.0, 0.0, 0.0, 1.0);
                let k2 = SmoothKernel::exponential(kappa);
                let e = euler_volterra(&params, &[&SmoothKernel::constant(1.0), &k2], &p).unwrap();
                gaps[slot] += rms(&e.values, &closed_form_ou_kappa(kappa, &p).values);
            }
        }
        assert!(gaps[1] < 0.75 * gaps[0], "{gaps:?}");
    }
}

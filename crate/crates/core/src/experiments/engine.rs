//! Per-path evaluation shared by tables and trajectories: a reference
//! series and the signature approximation split by word length, so that
//! every truncation `M` is a prefix sum of one walk.

use crate::error::{Error, Result};
use crate::representations::{
    delay_ell, rl_ell, time_then_noise_words, volterra_ell, DelayParams, DiracMixture, SmoothKernel, VolterraParams,
};
use crate::signature_engine::{BrownianPath, SignatureWalker, SparseSignature, TimeGrid};
use crate::simulators::{
    closed_form_gbm, closed_form_ou_kappa, euler_delay, euler_volterra_mixture, gv_quadrature_with, DelayScheme, GvLags,
};
use crate::tensor_algebra::{pair_by_level, TruncatedTensor};

use super::config::DelayScenario;

#[derive(Clone, Debug)]
enum Reference {
    Delay(DelayParams),
    Volterra(VolterraParams),
    Ou(f64),
    Gbm(f64, f64, f64),
    Quadrature(GvLags),
}

impl Reference {
    fn series(&self, path: &BrownianPath) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Delay(p) => euler_delay(p, path, DelayScheme::default())?.values,
            Self::Volterra(p) => euler_volterra_mixture(p, path)?.values,
            Self::Ou(kappa) => closed_form_ou_kappa(*kappa, path).values,
            Self::Gbm(y, b1, b2) => closed_form_gbm(*y, *b1, *b2, path).values,
            Self::Quadrature(lags) => gv_quadrature_with(lags, path)?.values,
        })
    }
}

#[derive(Clone, Debug)]
enum Representation {
    Fixed(TruncatedTensor),
    /// Coefficients of `𝟷^n𝟸` at every grid time, stride `level_cap`.
    TimeNoise(Vec<f64>),
}

#[derive(Clone, Debug)]
struct Scenario {
    name: String,
    reference: Reference,
    repr: Representation,
}

/// Reference values and level contributions of one scenario on one path.
#[derive(Clone, Debug)]
pub struct PathSeries {
    pub reference: Vec<f64>,
    /// `levels[k·(cap+1) + n]` is the level-`n` part of `⟨ℓ, sig_{t_k}⟩`.
    pub levels: Vec<f64>,
    pub cap: usize,
}

impl PathSeries {
    /// `⟨ℓ, sig_{t_k}⟩` truncated at level `m`, for every `k`.
    pub fn approximation(&self, m: usize) -> Vec<f64> {
        let m = m.min(self.cap);
        self.levels.chunks_exact(self.cap + 1).map(|row| row[..=m].iter().sum()).collect()
    }

    /// Mean over grid points of the squared error at each truncation in `ms`.
    pub fn mean_squared_errors(&self, ms: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; ms.len()];
        // Visit the rows in increasing M while accumulating levels once.
        let mut order: Vec<usize> = (0..ms.len()).collect();
        order.sort_by_key(|&i| ms[i]);
        for (row, reference) in self.levels.chunks_exact(self.cap + 1).zip(&self.reference) {
            let mut partial = 0.0;
            let mut n = 0;
            for &i in &order {
                let m = ms[i].min(self.cap);
                while n <= m {
                    partial += row[n];
                    n += 1;
                }
                let e = reference - partial;
                out[i] += e * e;
            }
        }
        let count = self.reference.len() as f64;
        out.iter_mut().for_each(|x| *x /= count);
        out
    }
}

/// A set of scenarios sharing each Brownian path.
#[derive(Clone, Debug)]
pub struct Engine {
    grid: TimeGrid,
    level_cap: usize,
    scenarios: Vec<Scenario>,
    sparse: Option<(SparseSignature, Vec<usize>)>,
}

impl Engine {
    pub fn names(&self) -> Vec<String> {
        self.scenarios.iter().map(|s| s.name.clone()).collect()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap
    }

    fn fixed(grid: TimeGrid, level_cap: usize, scenarios: Vec<Scenario>) -> Self {
        Self { grid, level_cap, scenarios, sparse: None }
    }

    /// Shifted Riemann–Liouville processes, one scenario per Hurst index,
    /// against the quadrature reference.
    pub fn riemann_liouville(grid: TimeGrid, level_cap: usize, hurst: &[f64], eps: f64) -> Result<Self> {
        let words = time_then_noise_words(level_cap);
        let sparse = SparseSignature::new(words.clone(), 2)?;
        let positions = words.iter().map(|w| sparse.position(w).expect("tracked")).collect();
        let mut scenarios = Vec::with_capacity(hurst.len());
        for &h in hurst {
            let kernel = SmoothKernel::riemann_liouville(h)?;
            let lags = GvLags::new(&kernel, eps, grid)?;
            let mut coeffs = Vec::with_capacity((grid.steps() + 1) * level_cap);
            for k in 0..=grid.steps() {
                let l = rl_ell(h, eps, grid.time(k), level_cap)?;
                coeffs.extend(words.iter().map(|w| l.get(w)));
            }
            scenarios.push(Scenario {
                name: format!("H={h}"),
                reference: Reference::Quadrature(lags),
                repr: Representation::TimeNoise(coeffs),
            });
        }
        Ok(Self { grid, level_cap, scenarios, sparse: Some((sparse, positions)) })
    }

    /// Delay equations against the Milstein reference.
    pub fn delay(grid: TimeGrid, level_cap: usize, scenarios: &[DelayScenario]) -> Result<Self> {
        let scenarios = scenarios
            .iter()
            .map(|s| {
                Ok(Scenario {
                    name: s.name.clone(),
                    reference: Reference::Delay(s.params.clone()),
                    repr: Representation::Fixed(delay_ell(&s.params, level_cap)?),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self::fixed(grid, level_cap, scenarios))
    }

    /// A Volterra equation against its Euler scheme.
    pub fn volterra(grid: TimeGrid, level_cap: usize, params: &VolterraParams) -> Result<Self> {
        let s = Scenario {
            name: "volterra".into(),
            reference: Reference::Volterra(params.clone()),
            repr: Representation::Fixed(volterra_ell(params, level_cap)?),
        };
        Ok(Self::fixed(grid, level_cap, vec![s]))
    }

    /// `∫₀ᵗ e^{−κ(t−s)} dW_s` through its time-independent representation.
    pub fn ornstein_uhlenbeck(grid: TimeGrid, level_cap: usize, kappa: f64) -> Result<Self> {
        let params = VolterraParams::ornstein_uhlenbeck(0.0, 0.0, -kappa, 1.0);
        let s = Scenario {
            name: format!("kappa={kappa}"),
            reference: Reference::Ou(kappa),
            repr: Representation::Fixed(volterra_ell(&params, level_cap)?),
        };
        Ok(Self::fixed(grid, level_cap, vec![s]))
    }

    pub fn geometric_brownian(grid: TimeGrid, level_cap: usize, (y, b1, b2): (f64, f64, f64)) -> Result<Self> {
        let params = VolterraParams::geometric_brownian(y, b1, b2);
        let s = Scenario {
            name: "gbm".into(),
            reference: Reference::Gbm(y, b1, b2),
            repr: Representation::Fixed(volterra_ell(&params, level_cap)?),
        };
        Ok(Self::fixed(grid, level_cap, vec![s]))
    }

    /// `∫₀ᵗ K_n(t+ε−s) dW_s` with the Dirac-mixture kernel `K_n`, through
    /// `ℓ^VOL`, against the quadrature of the exact shifted kernel.
    pub fn rl_mixture(grid: TimeGrid, level_cap: usize, hurst: f64, mixture: &DiracMixture, eps: f64) -> Result<Self> {
        let shifted = DiracMixture::new(mixture.atoms().iter().map(|&(c, x)| (c * (-x * eps).exp(), x)).collect())?;
        let params = VolterraParams::scalar(0.0, 0.0, 0.0, 1.0, 0.0, DiracMixture::dirac_zero(), shifted);
        let kernel = SmoothKernel::riemann_liouville(hurst)?;
        let s = Scenario {
            name: format!("H={hurst},n={}", mixture.atoms().len()),
            reference: Reference::Quadrature(GvLags::new(&kernel, eps, grid)?),
            repr: Representation::Fixed(volterra_ell(&params, level_cap)?),
        };
        Ok(Self::fixed(grid, level_cap, vec![s]))
    }

    /// Evaluates every scenario on `path` with signatures truncated at `cap`.
    pub fn run(&self, path: &BrownianPath, cap: usize) -> Result<Vec<PathSeries>> {
        if cap == 0 || cap > self.level_cap {
            return Err(Error::Argument(format!("walk level {cap} outside 1..={}", self.level_cap)));
        }
        if *path.grid() != self.grid || path.dims() != 1 {
            return Err(Error::Dimension("path does not match the experiment grid".into()));
        }
        let stride = cap + 1;
        let points = self.grid.steps() + 1;
        let mut levels = vec![vec![0.0; points * stride]; self.scenarios.len()];
        match &self.sparse {
            Some((sparse, positions)) => {
                sparse.walk(path, |k, coords| {
                    for (s, out) in self.scenarios.iter().zip(levels.iter_mut()) {
                        let Representation::TimeNoise(c) = &s.repr else { unreachable!("sparse engines hold time-noise tables") };
                        let c = &c[k * self.level_cap..];
                        let row = &mut out[k * stride..(k + 1) * stride];
                        // The word 𝟷^n𝟸 sits at level n + 1.
                        for n in 0..cap {
                            row[n + 1] = c[n] * coords[positions[n]];
                        }
                    }
                })?;
            }
            None => {
                SignatureWalker::new(path, cap)?.for_each(|k, sig| {
                    for (s, out) in self.scenarios.iter().zip(levels.iter_mut()) {
                        let Representation::Fixed(l) = &s.repr else { unreachable!("dense engines hold fixed tensors") };
                        out[k * stride..(k + 1) * stride].copy_from_slice(&pair_by_level(l, sig));
                    }
                });
            }
        }
        self.scenarios
            .iter()
            .zip(levels)
            .map(|(s, levels)| Ok(PathSeries { reference: s.reference.series(path)?, levels, cap }))
            .collect()
    }
}

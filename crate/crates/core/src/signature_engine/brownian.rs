//! Uniform grids and seeded Brownian increments.
//!
//! Generator: ChaCha20 (`rand_chacha::ChaCha20Rng`) keyed by
//! `seed_from_u64(master_seed)` with the ChaCha stream id set to the path
//! index; normals come from `rand_distr::StandardNormal`. The triple
//! (algorithm, master seed, path index) fixes a path bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::Argument("a grid needs at least one step".into()));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// `t_k = kT/K`, with `t_K = T` exactly.
    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.horizon / self.steps as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }
}

/// The per-path random stream.
pub fn path_rng(master_seed: u64, path_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    rng
}

/// Increments of a `dims`-dimensional Brownian motion on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    grid: TimeGrid,
    dims: usize,
    master_seed: u64,
    path_index: u64,
    /// Time-major: `increments[k * dims + j]` is `ΔW^{j+2}_k`.
    increments: Vec<f64>,
}

impl BrownianPath {
    pub fn from_increments(grid: TimeGrid, dims: usize, increments: Vec<f64>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::Argument("a Brownian path needs dims >= 1".into()));
        }
        if increments.len() != grid.steps() * dims {
            return Err(Error::Dimension(format!(
                "expected {} increments, got {}",
                grid.steps() * dims,
                increments.len()
            )));
        }
        Ok(Self { grid, dims, master_seed: 0, path_index: 0, increments })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// `(master seed, path index)`; zeros for hand-built paths.
    pub fn provenance(&self) -> (u64, u64) {
        (self.master_seed, self.path_index)
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `(ΔW^2_k, …, ΔW^d_k)`.
    pub fn increments_at(&self, k: usize) -> &[f64] {
        &self.increments[k * self.dims..(k + 1) * self.dims]
    }

    /// `W^{j+2}` at every grid point, starting from 0.
    pub fn values(&self, j: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.steps() + 1);
        let mut w = 0.0;
        out.push(w);
        for k in 0..self.grid.steps() {
            w += self.increments[k * self.dims + j];
            out.push(w);
        }
        out
    }

    /// Sums increments over blocks of `factor` steps. The coarse path shares
    /// the noise of the fine one.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.grid.steps() % factor != 0 {
            return Err(Error::Argument(format!("cannot coarsen {} steps by {factor}", self.grid.steps())));
        }
        let steps = self.grid.steps() / factor;
        let mut increments = vec![0.0; steps * self.dims];
        for k in 0..self.grid.steps() {
            for j in 0..self.dims {
                increments[(k / factor) * self.dims + j] += self.increments[k * self.dims + j];
            }
        }
        Ok(Self { grid: TimeGrid::new(self.grid.horizon(), steps)?, increments, ..self.clone() })
    }

    /// The path restarted at step `k`, on the remaining `K − k` steps.
    pub fn tail(&self, k: usize) -> Result<Self> {
        let steps = self.grid.steps().checked_sub(k).filter(|&s| s > 0).ok_or_else(|| {
            Error::Argument(format!("cannot restart a {}-step path at step {k}", self.grid.steps()))
        })?;
        let grid = TimeGrid::new(steps as f64 * self.grid.dt(), steps)?;
        Ok(Self { grid, increments: self.increments[k * self.dims..].to_vec(), ..self.clone() })
    }
}

/// Draws the increments of path `path_index` under `master_seed`.
pub fn sample_brownian(grid: TimeGrid, dims: usize, master_seed: u64, path_index: u64) -> Result<BrownianPath> {
    if dims == 0 {
        return Err(Error::Argument("a Brownian path needs dims >= 1".into()));
    }
    let mut rng = path_rng(master_seed, path_index);
    let sd = grid.dt().sqrt();
    let increments = (0..grid.steps() * dims)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        })
        .collect();
    Ok(BrownianPath { grid, dims, master_seed, path_index, increments })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        assert_eq!(g.times(), vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert!(TimeGrid::new(0.0, 3).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed_and_index() {
        let g = TimeGrid::new(1.0, 50).unwrap();
        let a = sample_brownian(g, 2, 11, 3).unwrap();
        assert_eq!(a, sample_brownian(g, 2, 11, 3).unwrap());
        assert_ne!(a.increments(), sample_brownian(g, 2, 11, 4).unwrap().increments());
        assert_ne!(a.increments(), sample_brownian(g, 2, 12, 3).unwrap().increments());
        assert_eq!(a.provenance(), (11, 3));
    }

    #[test]
    fn increment_variance_within_three_standard_errors() {
        let g = TimeGrid::new(2.0, 100_000).unwrap();
        let p = sample_brownian(g, 1, 5, 0).unwrap();
        let n = p.increments().len() as f64;
        let var = p.increments().iter().map(|x| x * x).sum::<f64>() / n;
        // The sample mean of squares of N(0, σ²) has standard error σ²·√(2/N).
        let sigma2 = g.dt();
        assert!((var - sigma2).abs() < 3.0 * sigma2 * (2.0 / n).sqrt(), "var {var} vs {sigma2}");
    }

    #[test]
    fn distinct_indices_are_uncorrelated() {
        let g = TimeGrid::new(1.0, 100_000).unwrap();
        let a = sample_brownian(g, 1, 9, 0).unwrap();
        let b = sample_brownian(g, 1, 9, 1).unwrap();
        let n = a.increments().len() as f64;
        let dot: f64 = a.increments().iter().zip(b.increments()).map(|(x, y)| x * y).sum();
        let corr = dot / n / g.dt();
        assert!(corr.abs() < 3.0 / n.sqrt(), "correlation {corr}");
    }

    #[test]
    fn coarsen_and_tail_share_noise() {
        let g = TimeGrid::new(1.0, 8).unwrap();
        let p = sample_brownian(g, 2, 1, 0).unwrap();
        let c = p.coarsen(4).unwrap();
        assert_eq!(c.grid().steps(), 2);
        assert!((c.values(1)[2] - p.values(1)[8]).abs() < 1e-15);
        let t = p.tail(6).unwrap();
        assert_eq!(t.increments(), &p.increments()[12..]);
        assert!((t.grid().horizon() - 0.25).abs() < 1e-15);
        assert!(p.coarsen(3).is_err());
    }
}

//! Mean-squared-error tables: rows are truncations `M`, columns scenarios,
//! cells the joint average over paths and grid points of `(X_ref − X^{≤M})²`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::engine::Engine;
use super::parallel::map_paths;
use crate::error::{Error, Result};
use crate::representations::fractional_dirac_approx_with_ratio;
use crate::signature_engine::{sample_brownian, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    RlMse,
    DelayMse,
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rl-mse" => Ok(Self::RlMse),
            "delay-mse" => Ok(Self::DelayMse),
            _ => Err(Error::Parse(format!("unknown table {s:?} (expected rl-mse or delay-mse)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MseTable {
    pub scenarios: Vec<String>,
    pub truncations: Vec<usize>,
    /// Paths averaged in each row.
    pub paths: Vec<usize>,
    pub steps: usize,
    /// `cells[row][column]`.
    pub cells: Vec<Vec<f64>>,
    /// Standard error of each cell over paths.
    pub std_errors: Vec<Vec<f64>>,
}

impl MseTable {
    pub fn cell(&self, m: usize, scenario: &str) -> Option<f64> {
        self.lookup(&self.cells, m, scenario)
    }

    pub fn std_error(&self, m: usize, scenario: &str) -> Option<f64> {
        self.lookup(&self.std_errors, m, scenario)
    }

    fn lookup(&self, grid: &[Vec<f64>], m: usize, scenario: &str) -> Option<f64> {
        let r = self.truncations.iter().position(|&x| x == m)?;
        let c = self.scenarios.iter().position(|x| x == scenario)?;
        Some(grid[r][c])
    }

    /// `M,<scenario>,…` then one row per truncation.
    pub fn to_csv(&self) -> String {
        self.render(&self.cells)
    }

    /// The standard errors in the layout of [`MseTable::to_csv`].
    pub fn std_error_csv(&self) -> String {
        self.render(&self.std_errors)
    }

    fn render(&self, grid: &[Vec<f64>]) -> String {
        let mut out = String::from("M");
        for s in &self.scenarios {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (m, row) in self.truncations.iter().zip(grid) {
            write!(out, "{m}").expect("string write");
            for v in row {
                write!(out, ",{v:e}").expect("string write");
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `engine` over the configured paths and averages per row.
///
/// Path `i` is walked at the largest `M` whose row still includes it, so the
/// expensive high-level rows only pay for their own, smaller path count.
pub fn mse_table(engine: &Engine, cfg: &ExperimentConfig) -> Result<MseTable> {
    cfg.validate()?;
    let ms = &cfg.truncations;
    if cfg.max_truncation() > engine.level_cap() {
        return Err(Error::Argument(format!("truncation {} above the engine level {}", cfg.max_truncation(), engine.level_cap())));
    }
    let row_paths: Vec<usize> = ms.iter().map(|&m| cfg.paths_for(m)).collect();
    let total = row_paths.iter().copied().max().unwrap_or(0);
    let grid = *engine.grid();
    let per_path = map_paths(total, cfg.threads, |i| {
        let rows: Vec<usize> = (0..ms.len()).filter(|&r| (i as usize) < row_paths[r]).collect();
        let cap = rows.iter().map(|&r| ms[r]).max().expect("every path is in some row");
        let path = sample_brownian(grid, 1, cfg.seed, i)?;
        let series = engine.run(&path, cap)?;
        let row_ms: Vec<usize> = rows.iter().map(|&r| ms[r]).collect();
        let errs: Vec<Vec<f64>> = series.iter().map(|s| s.mean_squared_errors(&row_ms)).collect();
        Ok((rows, errs))
    })?;
    let cols = engine.names().len();
    let mut sums = vec![vec![0.0; cols]; ms.len()];
    let mut squares = vec![vec![0.0; cols]; ms.len()];
    for (rows, errs) in &per_path {
        for (j, &r) in rows.iter().enumerate() {
            for c in 0..cols {
                let e = errs[c][j];
                sums[r][c] += e;
                squares[r][c] += e * e;
            }
        }
    }
    let mut cells = sums.clone();
    let mut std_errors = sums;
    for r in 0..ms.len() {
        let n = row_paths[r] as f64;
        for c in 0..cols {
            let mean = cells[r][c] / n;
            let var = if n > 1.0 { ((squares[r][c] / n - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
            cells[r][c] = mean;
            std_errors[r][c] = (var / n).sqrt();
        }
    }
    Ok(MseTable {
        scenarios: engine.names(),
        truncations: ms.clone(),
        paths: row_paths,
        steps: cfg.steps,
        cells,
        std_errors,
    })
}

fn grid_of(cfg: &ExperimentConfig) -> Result<TimeGrid> {
    TimeGrid::new(cfg.horizon, cfg.steps)
}

/// Shifted Riemann–Liouville processes for every configured Hurst index.
pub fn rl_mse_table(cfg: &ExperimentConfig) -> Result<MseTable> {
    cfg.validate()?;
    let engine = Engine::riemann_liouville(grid_of(cfg)?, cfg.max_truncation(), &cfg.params.hurst, cfg.eps)?;
    mse_table(&engine, cfg)
}

/// Every configured delay scenario, sharing noise.
pub fn delay_mse_table(cfg: &ExperimentConfig) -> Result<MseTable> {
    cfg.validate()?;
    let engine = Engine::delay(grid_of(cfg)?, cfg.max_truncation(), &cfg.params.delay)?;
    mse_table(&engine, cfg)
}

/// `ℓ^VOL` of the `atoms`-term mixture, shifted by `ε`, against the
/// quadrature of the shifted Riemann–Liouville kernel.
pub fn mixture_mse_table(cfg: &ExperimentConfig, hurst: f64, atoms: usize) -> Result<MseTable> {
    cfg.validate()?;
    let mixture = fractional_dirac_approx_with_ratio(hurst, atoms, cfg.params.ratio_for(atoms))?;
    let engine = Engine::rl_mixture(grid_of(cfg)?, cfg.max_truncation(), hurst, &mixture, cfg.eps)?;
    mse_table(&engine, cfg)
}

pub fn table(kind: TableKind, cfg: &ExperimentConfig) -> Result<MseTable> {
    match kind {
        TableKind::RlMse => rl_mse_table(cfg),
        TableKind::DelayMse => delay_mse_table(cfg),
    }
}

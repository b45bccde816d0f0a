//! Long-format trajectories `t,path_id,series,value` of a reference process
//! and its truncated signature representations.

use std::fmt::Write as _;

use serde::Serialize;

use super::config::{DelayScenario, ExperimentConfig, ModelId};
use super::engine::Engine;
use super::parallel::map_paths;
use crate::error::{Error, Result};
use crate::signature_engine::{sample_brownian, TimeGrid};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub path_id: u64,
    pub series: String,
    pub value: f64,
}

/// Builds the engine for a single-scenario simulation of `cfg.model`.
pub fn simulation_engine(cfg: &ExperimentConfig) -> Result<Engine> {
    cfg.validate()?;
    let grid = TimeGrid::new(cfg.horizon, cfg.steps)?;
    let m = cfg.max_truncation();
    let p = &cfg.params;
    match cfg.model {
        ModelId::Rl => {
            let [h] = p.hurst[..] else {
                return Err(Error::Argument(format!("simulate takes one Hurst index, got {:?}", p.hurst)));
            };
            Engine::riemann_liouville(grid, m, &[h], cfg.eps)
        }
        ModelId::Delay => {
            let [s] = &p.delay[..] else {
                return Err(Error::Argument(format!("simulate takes one delay scenario, got {}", p.delay.len())));
            };
            Engine::delay(grid, m, std::slice::from_ref::<DelayScenario>(s))
        }
        ModelId::Volterra => Engine::volterra(grid, m, &p.volterra),
        ModelId::Ou => Engine::ornstein_uhlenbeck(grid, m, p.ou_kappa),
        ModelId::Gbm => Engine::geometric_brownian(grid, m, p.gbm),
    }
}

/// `cfg.paths` trajectories: series `ref` and `sig_M{M}` per truncation,
/// ordered by path, then series, then time.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<TrajectoryRecord>> {
    let engine = simulation_engine(cfg)?;
    let grid = *engine.grid();
    let times = grid.times();
    let m = cfg.max_truncation();
    let per_path = map_paths(cfg.paths, cfg.threads, |i| {
        let path = sample_brownian(grid, 1, cfg.seed, i)?;
        let series = engine.run(&path, m)?.remove(0);
        let mut out = Vec::with_capacity((cfg.truncations.len() + 1) * times.len());
        let mut push = |name: String, values: &[f64]| {
            for (t, v) in times.iter().zip(values) {
                out.push(TrajectoryRecord { t: *t, path_id: i, series: name.clone(), value: *v });
            }
        };
        push("ref".into(), &series.reference);
        for &mm in &cfg.truncations {
            push(format!("sig_M{mm}"), &series.approximation(mm));
        }
        Ok(out)
    })?;
    Ok(per_path.into_iter().flatten().collect())
}

/// CSV with header `t,path_id,series,value` and `\n` line endings.
pub fn trajectories_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from("t,path_id,series,value\n");
    for r in records {
        writeln!(out, "{},{},{},{:e}", r.t, r.path_id, r.series, r.value).expect("string write");
    }
    out
}

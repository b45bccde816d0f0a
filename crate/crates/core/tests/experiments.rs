//! Statistical consistency and reproducibility of the experiment runners.

use sigrep_core::experiments::{delay_mse_table, rl_mse_table, simulate, DelayScenario, MseTable};
use sigrep_core::{ExperimentConfig, ModelId};

fn small(paths: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        truncations: vec![2, 4, 8],
        paths,
        paths_high: paths,
        steps: 100,
        seed,
        ..Default::default()
    }
}

fn assert_consistent(a: &MseTable, b: &MseTable) {
    for &m in &a.truncations {
        for s in &a.scenarios {
            let (x, y) = (a.cell(m, s).unwrap(), b.cell(m, s).unwrap());
            let se = a.std_error(m, s).unwrap().hypot(b.std_error(m, s).unwrap());
            assert!((x - y).abs() < 5.0 * se, "{s} M={m}: {x:e} vs {y:e}, combined SE {se:e}");
        }
    }
}

#[test]
fn rl_cells_agree_when_paths_double() {
    let mut cfg = small(400, 3);
    cfg.params.hurst = vec![0.3, 0.7];
    let mut doubled = small(800, 4);
    doubled.params.hurst = cfg.params.hurst.clone();
    assert_consistent(&rl_mse_table(&cfg).unwrap(), &rl_mse_table(&doubled).unwrap());
}

#[test]
fn delay_cells_agree_when_paths_double() {
    let cfg = ExperimentConfig { model: ModelId::Delay, ..small(200, 5) };
    let doubled = ExperimentConfig { model: ModelId::Delay, ..small(400, 6) };
    assert_consistent(&delay_mse_table(&cfg).unwrap(), &delay_mse_table(&doubled).unwrap());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let mut one = ExperimentConfig { model: ModelId::Delay, threads: Some(1), ..small(24, 8) };
    one.params.delay = vec![DelayScenario::builtin("b").unwrap()];
    let four = ExperimentConfig { threads: Some(4), ..one.clone() };
    assert_eq!(delay_mse_table(&one).unwrap().to_csv(), delay_mse_table(&four).unwrap().to_csv());
    let traj = |c: &ExperimentConfig| simulate(&ExperimentConfig { paths: 3, ..c.clone() }).unwrap();
    assert_eq!(traj(&one), traj(&four));
}

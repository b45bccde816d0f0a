use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sigrep_core::experiments::{
    mixture_mse_table, run_check, simulate, table, trajectories_csv, CheckOptions, ConfigFile, ExperimentConfig,
    ModelId, TableKind,
};
use sigrep_core::representations::{fractional_dirac_approx_with_ratio, kernel_l2_error};

#[derive(Parser)]
#[command(name = "sigrep", version, about = "Signature representations of Volterra and delay processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suites and write a JSON report.
    Check {
        /// Truncation level of the algebraic and pathwise suites.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        level: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Paths of the moment suite.
        #[arg(long, default_value_t = 20_000)]
        paths: usize,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the report to DIR/check_report.json.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Simulate trajectories of a model and its truncated representations.
    Simulate(RunArgs),
    /// Reproduce an MSE table.
    Table {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Dirac-mixture approximations of the Riemann-Liouville kernel.
    ApproxKernel {
        #[command(flatten)]
        run: RunArgs,
        /// Atom counts n.
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        atoms: Vec<usize>,
        /// Geometric ratio; defaults to 1 + 10 n^-0.9 per n.
        #[arg(long)]
        ratio: Option<f64>,
        /// Also tabulate the MSE of the mixture representation against the
        /// exact kernel at every truncation.
        #[arg(long)]
        mse: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    RlMse,
    DelayMse,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Rl,
    Delay,
    Volterra,
    Ou,
    Gbm,
}

impl From<Model> for ModelId {
    fn from(m: Model) -> Self {
        match m {
            Model::Rl => ModelId::Rl,
            Model::Delay => ModelId::Delay,
            Model::Volterra => ModelId::Volterra,
            Model::Ou => ModelId::Ou,
            Model::Gbm => ModelId::Gbm,
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML file with run settings and model sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Paths; rows with M > 8 use at most --paths-high of them.
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    paths_high: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Truncation levels M.
    #[arg(long, value_delimiter = ',')]
    truncation: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Time horizon T.
    #[arg(long)]
    tmax: Option<f64>,
    /// Kernel shift.
    #[arg(long)]
    eps: Option<f64>,
    /// Hurst indices of the Riemann-Liouville model.
    #[arg(long, value_delimiter = ',')]
    hurst: Option<Vec<f64>>,
    /// Delay scenarios (built-ins a, b).
    #[arg(long, value_delimiter = ',')]
    scenario: Option<Vec<String>>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// 100,000 paths over 1,000 steps for every row.
    #[arg(long)]
    full_scale: bool,
}

impl RunArgs {
    /// Defaults, then the config file, then `--full-scale`, then explicit flags.
    fn resolve(&self, default_paths: Option<usize>) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(p) = default_paths {
            cfg.paths = p;
        }
        if let Some(path) = &self.config {
            let file = ConfigFile::read(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_file(file)?;
        }
        if self.full_scale {
            cfg.full_scale();
        }
        if let Some(m) = self.model {
            cfg.model = m.into();
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => { $(if let Some(v) = self.$flag.clone() { cfg.$field = v; })* };
        }
        set!(paths => paths, paths_high => paths_high, steps => steps, truncation => truncations, seed => seed,
             tmax => horizon, eps => eps);
        if let Some(h) = &self.hurst {
            cfg.params.hurst = h.clone();
        }
        if let Some(names) = &self.scenario {
            cfg.params.delay =
                names.iter().map(|n| sigrep_core::experiments::DelayScenario::builtin(n)).collect::<Result<_, _>>()?;
        }
        cfg.out = self.out.clone();
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn model_name(m: ModelId) -> &'static str {
    match m {
        ModelId::Rl => "rl",
        ModelId::Delay => "delay",
        ModelId::Volterra => "volterra",
        ModelId::Ou => "ou",
        ModelId::Gbm => "gbm",
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { level, seed, paths, threads, out } => {
            let report = run_check(&CheckOptions { level: level as usize, seed, paths, threads })?;
            let json = report.to_json();
            match out {
                Some(dir) => {
                    write_output(&dir, "check_report.json", &json)?;
                }
                None => println!("{json}"),
            }
            for f in report.failures() {
                eprintln!("FAILED {}: {} = {:e} (threshold {:e})", f.name, f.metric, f.measured, f.threshold);
            }
            Ok(report.passed)
        }
        Command::Simulate(args) => {
            let cfg = args.resolve(Some(1))?;
            let records = simulate(&cfg)?;
            write_output(&cfg.out, &format!("trajectories_{}.csv", model_name(cfg.model)), &trajectories_csv(&records))?;
            Ok(true)
        }
        Command::Table { which, run } => {
            let cfg = run.resolve(None)?;
            let (kind, name) = match which {
                Which::RlMse => (TableKind::RlMse, "rl_mse"),
                Which::DelayMse => (TableKind::DelayMse, "delay_mse"),
            };
            let t = table(kind, &cfg)?;
            write_output(&cfg.out, &format!("{name}.csv"), &t.to_csv())?;
            write_output(&cfg.out, &format!("{name}_stderr.csv"), &t.std_error_csv())?;
            Ok(true)
        }
        Command::ApproxKernel { run, atoms, ratio, mse } => {
            let mut cfg = run.resolve(None)?;
            if ratio.is_some() {
                cfg.params.mixture_ratio = ratio;
            }
            if atoms.is_empty() || atoms.contains(&0) {
                bail!("atom counts must be at least 1");
            }
            let mut csv = String::from("H,n,ratio,k0,l2_error\n");
            for &h in &cfg.params.hurst {
                for &n in &atoms {
                    let r = cfg.params.ratio_for(n);
                    let mix = fractional_dirac_approx_with_ratio(h, n, r)?;
                    let err = kernel_l2_error(&mix, h, cfg.horizon)?;
                    csv.push_str(&format!("{h},{n},{r:e},{:e},{err:e}\n", mix.k0()));
                }
            }
            write_output(&cfg.out, "approx_kernel.csv", &csv)?;
            if mse {
                for &h in &cfg.params.hurst {
                    for &n in &atoms {
                        let t = mixture_mse_table(&cfg, h, n)?;
                        write_output(&cfg.out, &format!("approx_kernel_mse_H{h}_n{n}.csv"), &t.to_csv())?;
                    }
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

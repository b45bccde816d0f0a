//! Experiment configuration: desk-scale defaults, TOML sections per model,
//! and the resolved [`ExperimentConfig`].

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::representations::{default_ratio, DelayParams, DiracMixture, ExpSumKernel, VolterraParams};

/// Rows with `M` above this level use `paths_high` paths.
pub const HIGH_LEVEL: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Rl,
    Delay,
    Volterra,
    Ou,
    Gbm,
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rl" => Ok(Self::Rl),
            "delay" => Ok(Self::Delay),
            "volterra" => Ok(Self::Volterra),
            "ou" => Ok(Self::Ou),
            "gbm" => Ok(Self::Gbm),
            _ => Err(Error::Parse(format!("unknown model {s:?} (expected rl, delay, volterra, ou or gbm)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlSection {
    #[serde(rename = "H", alias = "hurst")]
    hurst: Option<OneOrMany>,
    eps: Option<f64>,
    /// Geometric ratio override for the Dirac-mixture approximation.
    ratio: Option<f64>,
    atoms: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySection {
    /// Built-in parameter sets `a` and `b`.
    scenarios: Option<Vec<String>>,
    z: Option<f64>,
    a1: Option<f64>,
    b1: Option<f64>,
    a2: Option<f64>,
    b2: Option<f64>,
    k1: Option<Vec<(f64, f64)>>,
    k2: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolterraSection {
    #[serde(default)]
    y: f64,
    #[serde(default)]
    a1: f64,
    #[serde(default)]
    b1: f64,
    #[serde(default)]
    a2: f64,
    #[serde(default)]
    b2: f64,
    mu1: Option<Vec<(f64, f64)>>,
    mu2: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuSection {
    kappa: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbmSection {
    y: f64,
    b1: f64,
    b2: f64,
}

/// The TOML file as written; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    model: Option<ModelId>,
    truncations: Option<Vec<usize>>,
    paths: Option<usize>,
    paths_high: Option<usize>,
    steps: Option<usize>,
    #[serde(alias = "tmax")]
    horizon: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    rl: Option<RlSection>,
    delay: Option<DelaySection>,
    volterra: Option<VolterraSection>,
    ou: Option<OuSection>,
    gbm: Option<GbmSection>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// A named delay parameter set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayScenario {
    pub name: String,
    pub params: DelayParams,
}

impl DelayScenario {
    pub fn builtin(name: &str) -> Result<Self> {
        let params = match name {
            "a" => DelayParams::scenario_a(),
            "b" => DelayParams::scenario_b(),
            _ => return Err(Error::Parse(format!("unknown delay scenario {name:?} (built-ins are a and b)"))),
        };
        Ok(Self { name: name.to_string(), params })
    }
}

/// Parameters of every model; [`ExperimentConfig::model`] picks one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSet {
    pub hurst: Vec<f64>,
    pub mixture_ratio: Option<f64>,
    pub mixture_atoms: Vec<usize>,
    pub delay: Vec<DelayScenario>,
    pub volterra: VolterraParams,
    pub ou_kappa: f64,
    /// `(y, b₁, b₂)`.
    pub gbm: (f64, f64, f64),
}

impl Default for ModelSet {
    fn default() -> Self {
        Self {
            hurst: vec![0.1, 0.3, 0.7, 0.9],
            mixture_ratio: None,
            mixture_atoms: vec![10, 20, 40, 80],
            delay: vec![DelayScenario::builtin("a").expect("built-in"), DelayScenario::builtin("b").expect("built-in")],
            volterra: VolterraParams::ornstein_uhlenbeck(0.0, 0.0, -1.0, 1.0),
            ou_kappa: 1.0,
            gbm: (1.0, 0.1, 0.3),
        }
    }
}

impl ModelSet {
    /// Mixture ratio for `n` atoms: the override if set, else `1 + 10 n^{−0.9}`.
    pub fn ratio_for(&self, n: usize) -> f64 {
        self.mixture_ratio.unwrap_or_else(|| default_ratio(n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelId,
    pub params: ModelSet,
    pub truncations: Vec<usize>,
    /// Paths for rows with `M ≤ 8`.
    pub paths: usize,
    /// Paths for rows with `M > 8`, capped by `paths`.
    pub paths_high: usize,
    pub steps: usize,
    pub horizon: f64,
    pub seed: u64,
    pub eps: f64,
    pub out: PathBuf,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelId::Rl,
            params: ModelSet::default(),
            truncations: vec![2, 4, 8, 16],
            paths: 10_000,
            paths_high: 2_000,
            steps: 500,
            horizon: 1.0,
            seed: 1,
            eps: 1.0 / 52.0,
            out: PathBuf::from("out"),
            threads: None,
        }
    }
}

fn mixture(atoms: &[(f64, f64)]) -> Result<DiracMixture> {
    DiracMixture::new(atoms.to_vec())
}

impl ExperimentConfig {
    /// 100,000 paths over 1,000 steps for every row.
    pub fn full_scale(&mut self) {
        self.paths = 100_000;
        self.paths_high = 100_000;
        self.steps = 1_000;
    }

    /// Overrides defaults with every key present in `file`.
    pub fn apply_file(&mut self, file: ConfigFile) -> Result<()> {
        let ConfigFile { model, truncations, paths, paths_high, steps, horizon, seed, out, threads, rl, delay, volterra, ou, gbm } =
            file;
        macro_rules! set {
            ($($field:ident <- $src:expr),*) => { $(if let Some(v) = $src { self.$field = v; })* };
        }
        set!(model <- model, truncations <- truncations, paths <- paths, paths_high <- paths_high,
             steps <- steps, horizon <- horizon, seed <- seed, out <- out);
        if threads.is_some() {
            self.threads = threads;
        }
        if let Some(rl) = rl {
            match rl.hurst {
                Some(OneOrMany::One(h)) => self.params.hurst = vec![h],
                Some(OneOrMany::Many(hs)) => self.params.hurst = hs,
                None => {}
            }
            if let Some(eps) = rl.eps {
                self.eps = eps;
            }
            if rl.ratio.is_some() {
                self.params.mixture_ratio = rl.ratio;
            }
            if let Some(atoms) = rl.atoms {
                self.params.mixture_atoms = atoms;
            }
        }
        if let Some(delay) = delay {
            let custom = [delay.z, delay.a1, delay.b1, delay.a2, delay.b2].iter().any(Option::is_some)
                || delay.k1.is_some()
                || delay.k2.is_some();
            let mut scenarios = Vec::new();
            if let Some(names) = &delay.scenarios {
                for n in names {
                    scenarios.push(DelayScenario::builtin(n)?);
                }
            }
            if custom {
                let kernel = |k: &Option<Vec<(f64, f64)>>| ExpSumKernel::new(k.clone().unwrap_or_default());
                let params = DelayParams::scalar(
                    delay.z.unwrap_or(0.0),
                    delay.a1.unwrap_or(0.0),
                    delay.b1.unwrap_or(0.0),
                    delay.a2.unwrap_or(0.0),
                    delay.b2.unwrap_or(0.0),
                    kernel(&delay.k1),
                    kernel(&delay.k2),
                );
                scenarios.push(DelayScenario { name: "custom".into(), params });
            }
            if !scenarios.is_empty() {
                self.params.delay = scenarios;
            }
        }
        if let Some(v) = volterra {
            let dirac = vec![(1.0, 0.0)];
            self.params.volterra = VolterraParams::scalar(
                v.y,
                v.a1,
                v.b1,
                v.a2,
                v.b2,
                mixture(v.mu1.as_deref().unwrap_or(&dirac))?,
                mixture(v.mu2.as_deref().unwrap_or(&dirac))?,
            );
        }
        if let Some(ou) = ou {
            self.params.ou_kappa = ou.kappa;
        }
        if let Some(g) = gbm {
            self.params.gbm = (g.y, g.b1, g.b2);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 || self.paths_high == 0 {
            return Err(Error::Argument("path counts must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::Argument("steps must be at least 1".into()));
        }
        if self.truncations.is_empty() || self.truncations.contains(&0) {
            return Err(Error::Argument("truncations must be a nonempty list of levels >= 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Argument(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Argument(format!("shift must be nonnegative, got {}", self.eps)));
        }
        if self.threads == Some(0) {
            return Err(Error::Argument("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Paths averaged in the row for truncation `m`.
    pub fn paths_for(&self, m: usize) -> usize {
        if m > HIGH_LEVEL {
            self.paths_high.min(self.paths)
        } else {
            self.paths
        }
    }

    pub fn max_truncation(&self) -> usize {
        self.truncations.iter().copied().max().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let text = r#"
            model = "delay"
            truncations = [2, 8]
            paths = 50
            tmax = 2.0
            [rl]
            H = 0.3
            eps = 0.05
            [delay]
            scenarios = ["b"]
        "#;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file(ConfigFile::parse(text).unwrap()).unwrap();
        assert_eq!(cfg.model, ModelId::Delay);
        assert_eq!(cfg.truncations, vec![2, 8]);
        assert_eq!((cfg.paths, cfg.horizon, cfg.eps), (50, 2.0, 0.05));
        assert_eq!(cfg.params.hurst, vec![0.3]);
        assert_eq!(cfg.params.delay.len(), 1);
        assert_eq!(cfg.params.delay[0].params, DelayParams::scenario_b());
        cfg.validate().unwrap();
    }

    #[test]
    fn custom_delay_and_volterra_sections() {
        let text = r#"
            [delay]
            a1 = 1.5
            a2 = 3.0
            k1 = [[-1.0, -2.0]]
            k2 = [[-2.0, -1.0]]
            [volterra]
            y = 1.0
            b2 = 0.3
            mu2 = [[1.0, 0.0]]
        "#;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file(ConfigFile::parse(text).unwrap()).unwrap();
        assert_eq!(cfg.params.delay[0].params, DelayParams::scenario_a());
        assert_eq!(cfg.params.volterra, VolterraParams::geometric_brownian(1.0, 0.0, 0.3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("model = \"heston\"").is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.truncations = vec![0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.horizon = 0.0;
        assert!(cfg.validate().is_err());
        assert!("nope".parse::<ModelId>().is_err());
    }

    #[test]
    fn row_path_counts() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.paths_for(8), 10_000);
        assert_eq!(cfg.paths_for(16), 2_000);
    }
}

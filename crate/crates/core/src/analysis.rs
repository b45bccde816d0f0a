//! Weights, norms and moment bounds for signature coordinates.
//!
//! Factorials and binomials are accumulated in log space; `(n+x)!` alone
//! overflows `f64` long before the levels used here stop being interesting.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{Error, Result};
use crate::signature_engine::SignatureStream;
use crate::tensor_algebra::{pair_by_level, TruncatedTensor, Word};

/// The constant `C ≥ 2` in `h_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HWeightConfig {
    c: f64,
}

impl HWeightConfig {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 2.0 && c.is_finite()) {
            return Err(Error::Argument(format!("h-weight constant must be at least 2, got {c}")));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for HWeightConfig {
    fn default() -> Self {
        Self { c: 2.0 }
    }
}

/// `ln k!` with `k! = 1` for `k ≤ 0`.
fn ln_fact(k: i64) -> f64 {
    if k <= 0 {
        0.0
    } else {
        ln_factorial(k as u64)
    }
}

/// `h_t` at a word of length `n` with `x` time letters, divided by `C`.
fn unit_h(n: usize, x: usize, t: f64) -> f64 {
    let e = (n + x) as f64;
    if e == 0.0 {
        return 1.0;
    }
    if t == 0.0 {
        return 0.0;
    }
    (-0.25 * ((n + 1) as f64).ln() + 0.5 * e * (2.0 * t).ln() - 0.5 * ln_fact((n + x) as i64 - 1)).exp()
}

/// `h_t(v) = C (n+1)^{−¼} (2t)^{(n+x)/2} / √((n+x−1)!)`.
pub fn h_weight(v: &Word, t: f64, cfg: &HWeightConfig) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("h_t needs t >= 0, got {t}")));
    }
    Ok(cfg.c * unit_h(v.len(), v.ones(), t))
}

/// Smallest `C` with `h_t(v)² ≥ target`.
pub fn smallest_sufficient_c(v: &Word, t: f64, target: f64) -> f64 {
    target.max(0.0).sqrt() / unit_h(v.len(), v.ones(), t)
}

fn weighted_sum(l: &TruncatedTensor, levels: std::ops::RangeInclusive<usize>, t: f64, cfg: &HWeightConfig) -> f64 {
    let d = l.dim();
    let mut total = 0.0;
    for n in levels {
        for (i, c) in l.level(n).iter().enumerate() {
            if *c != 0.0 {
                let x = Word::from_index(n, i, d).ones();
                total += c.abs() * unit_h(n, x, t);
            }
        }
    }
    cfg.c * total
}

/// `‖ℓ‖_t^{A_h} = Σ |ℓ^v| h_t(v)`.
pub fn ah_norm(l: &TruncatedTensor, t: f64, cfg: &HWeightConfig) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("A_h norm needs t >= 0, got {t}")));
    }
    Ok(weighted_sum(l, 0..=l.level_cap(), t, cfg))
}

/// `Σ_{n(v) > M₀} |ℓ^v| h_T(v)`: a bound on the expected sup-error of
/// truncating `ℓ` at level `M₀`.
pub fn truncation_tail(l: &TruncatedTensor, m0: usize, horizon: f64, cfg: &HWeightConfig) -> Result<f64> {
    if m0 > l.level_cap() {
        return Err(Error::Argument(format!("M0 = {m0} exceeds the level cap {}", l.level_cap())));
    }
    if !(horizon >= 0.0) {
        return Err(Error::Argument(format!("horizon must be nonnegative, got {horizon}")));
    }
    Ok(weighted_sum(l, m0 + 1..=l.level_cap(), horizon, cfg))
}

/// `binom(2n,n) t^{n+x}/(n+x)! · 2^{x−n}`, the second-moment bound.
pub fn l2_bound(v: &Word, t: f64) -> Result<f64> {
    lp_bound(v, t, 2)
}

fn ln_even_bound(n: u64, x: u64, t: f64, p: u64) -> f64 {
    let half = p / 2;
    let binoms: f64 = (2..=p).map(|j| ln_binomial(j * n, n)).sum();
    binoms + (half * (n + x)) as f64 * t.ln() - ln_factorial(half * (n + x))
        + (half as f64) * (x as f64 - n as f64) * std::f64::consts::LN_2
}

/// `g_t^p(v)`, a bound on `E|⟨v, sig_t⟩|^p`; odd `p` interpolates as
/// `(g_t^{p+1})^{p/(p+1)}`.
pub fn lp_bound(v: &Word, t: f64, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::Argument("moment order p must be at least 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("moment bound needs t >= 0, got {t}")));
    }
    let (n, x) = (v.len() as u64, v.ones() as u64);
    if n + x == 0 {
        return Ok(1.0);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let p = p as u64;
    Ok(if p % 2 == 0 {
        ln_even_bound(n, x, t, p).exp()
    } else {
        (ln_even_bound(n, x, t, p + 1) * p as f64 / (p + 1) as f64).exp()
    })
}

/// `Σₙ |Σ_{v∈Vₙ} ℓ^v sig_t^v|` at every grid point.
pub fn a_norm_pathwise(l: &TruncatedTensor, stream: &SignatureStream) -> Vec<f64> {
    stream.sigs().iter().map(|s| pair_by_level(l, s).iter().map(|x| x.abs()).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature_engine::{sample_brownian, signature_stream, TimeGrid};
    use crate::tensor_algebra::{pair, Alphabet};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn h_weight_examples() {
        let cfg = HWeightConfig::default();
        assert_eq!(h_weight(&Word::empty(), 0.7, &cfg).unwrap(), 2.0);
        let t: f64 = 0.7;
        let expect = 2.0 * (2.0 * t).sqrt() / 2f64.powf(0.25);
        assert!((h_weight(&w("2"), t, &cfg).unwrap() - expect).abs() < 1e-14);
        assert!(HWeightConfig::new(1.5).is_err());
    }

    #[test]
    fn second_moment_bounds() {
        assert!((l2_bound(&w("2"), 0.6).unwrap() - 0.6).abs() < 1e-15);
        assert!((l2_bound(&w("12"), 0.6).unwrap() - 0.6f64.powi(3) / 2.0).abs() < 1e-15);
        for p in 1..6 {
            assert_eq!(lp_bound(&Word::empty(), 0.3, p).unwrap(), 1.0);
        }
        assert!(lp_bound(&w("2"), 1.0, 0).is_err());
    }

    #[test]
    fn fourth_moment_of_brownian_coordinate() {
        // binom(2,1)·binom(3,1)·binom(4,1)·t²/2!·2^{−2} = 3t² = E W_t⁴.
        let g = lp_bound(&w("2"), 0.5, 4).unwrap();
        let expect = 3.0 * 0.25;
        assert!((g - expect).abs() < 1e-15);
        let odd = lp_bound(&w("2"), 0.5, 3).unwrap();
        assert!((odd - expect.powf(0.75)).abs() < 1e-15);
    }

    #[test]
    fn tails_and_norms() {
        let a = Alphabet::new(2).unwrap();
        let cfg = HWeightConfig::default();
        let l = TruncatedTensor::from_terms(a, 4, [(&Word::empty(), 1.0), (&w("12"), -2.0), (&w("2222"), 0.5)]);
        assert_eq!(truncation_tail(&l, 4, 1.0, &cfg).unwrap(), 0.0);
        let tails: Vec<f64> = (0..=4).map(|m| truncation_tail(&l, m, 1.0, &cfg).unwrap()).collect();
        assert!(tails.windows(2).all(|p| p[1] <= p[0]));
        assert!((tails[0] + 2.0 - ah_norm(&l, 1.0, &cfg).unwrap()).abs() < 1e-14);
        assert!(truncation_tail(&l, 5, 1.0, &cfg).is_err());
        assert_eq!(ah_norm(&TruncatedTensor::zeros(a, 3), 1.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn pathwise_norm_examples() {
        let grid = TimeGrid::new(1.0, 30).unwrap();
        let path = sample_brownian(grid, 1, 8, 0).unwrap();
        let w2 = path.values(0);
        let s = signature_stream(path, 3).unwrap();
        let a = Alphabet::new(2).unwrap();
        let l = TruncatedTensor::from_terms(a, 3, [(&Word::empty(), 1.0), (&w("2"), 1.0)]);
        for (k, v) in a_norm_pathwise(&l, &s).iter().enumerate() {
            assert!((v - 1.0 - w2[k].abs()).abs() < 1e-12);
            assert!(*v + 1e-15 >= pair(&l, s.at(k)).abs());
        }
    }
}

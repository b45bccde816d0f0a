//! Products, powers, series and projections in `T^M(R^d)`.
//!
//! Every product silently drops levels above the common cap `M`.

use super::truncated::{level_offset, TruncatedTensor};
use super::word::Word;
use crate::error::{Error, Result};

/// Coefficient-wise weighted sum `Σ cₖ tₖ`.
pub fn linear_combine(terms: &[(f64, &TruncatedTensor)]) -> Result<TruncatedTensor> {
    let (_, first) = terms.first().ok_or_else(|| Error::Argument("linear_combine needs at least one term".into()))?;
    let mut out = TruncatedTensor::zeros(first.alphabet(), first.level_cap());
    for (c, t) in terms {
        first.check_shape(t)?;
        out.add_scaled(*c, t);
    }
    Ok(out)
}

/// Concatenation product `a ⊗ b`.
pub fn concat_mul(a: &TruncatedTensor, b: &TruncatedTensor) -> Result<TruncatedTensor> {
    a.check_shape(b)?;
    Ok(a.concat(b))
}

/// Shuffle product `a ⊔⊔ b`.
pub fn shuffle_mul(a: &TruncatedTensor, b: &TruncatedTensor) -> Result<TruncatedTensor> {
    a.check_shape(b)?;
    Ok(a.shuffle(b))
}

/// `a^{⊗k}` with `a^{⊗0} = ø`.
pub fn concat_pow(a: &TruncatedTensor, k: i64) -> Result<TruncatedTensor> {
    power(a, k, TruncatedTensor::concat)
}

/// `a^{⊔⊔k}` with `a^{⊔⊔0} = ø`.
pub fn shuffle_pow(a: &TruncatedTensor, k: i64) -> Result<TruncatedTensor> {
    power(a, k, TruncatedTensor::shuffle)
}

fn power(
    a: &TruncatedTensor,
    k: i64,
    mul: fn(&TruncatedTensor, &TruncatedTensor) -> TruncatedTensor,
) -> Result<TruncatedTensor> {
    if k < 0 {
        return Err(Error::Argument(format!("negative power {k}")));
    }
    let mut out = TruncatedTensor::unit(a.alphabet(), a.level_cap());
    for _ in 0..k {
        out = mul(&out, a);
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// `(ø − q)^{-1}`, defined when `|q^ø| < 1`.
pub fn resolvent(q: &TruncatedTensor) -> Result<TruncatedTensor> {
    let s = q.scalar_part();
    if s.abs() >= 1.0 || !s.is_finite() {
        return Err(Error::ResolventDivergence(s.abs()));
    }
    let d = q.dim();
    let m = q.level_cap();
    let scale = 1.0 / (1.0 - s);
    // r = ø + r ⊗ q̃', with q̃' = (q − q^ø ø)/(1 − q^ø); level n only needs levels < n of r.
    let mut r = TruncatedTensor::zeros(q.alphabet(), m);
    r.coeffs_mut()[0] = 1.0;
    for n in 1..=m {
        let mut level = vec![0.0; d.pow(n as u32)];
        for j in 1..=n {
            let qj = q.level(j);
            let width = qj.len();
            for (i, &rc) in r.level(n - j).iter().enumerate() {
                if rc == 0.0 {
                    continue;
                }
                let c = rc * scale;
                let dst = &mut level[i * width..(i + 1) * width];
                dst.iter_mut().zip(qj).for_each(|(x, y)| *x += c * y);
            }
        }
        r.level_mut(n).copy_from_slice(&level);
    }
    r.scale_in_place(scale);
    Ok(r)
}

/// `e^⊔a = e^{a^ø} Σₙ (a − a^ø ø)^{⊔⊔n}/n!`.
pub fn shuffle_exp(a: &TruncatedTensor) -> TruncatedTensor {
    let s = a.scalar_part();
    let mut tilde = a.clone();
    tilde.coeffs_mut()[0] = 0.0;
    let mut sum = TruncatedTensor::unit(a.alphabet(), a.level_cap());
    let mut term = sum.clone();
    for n in 1..=a.level_cap() {
        term = term.shuffle(&tilde);
        term.scale_in_place(1.0 / n as f64);
        if term.is_zero() {
            break;
        }
        sum.add_scaled(1.0, &term);
    }
    sum.scale_in_place(s.exp());
    sum
}

/// `ℓ|ᵤ`: the coefficient of `v` in the result is the coefficient of `vu` in `l`.
pub fn project(l: &TruncatedTensor, u: &Word) -> TruncatedTensor {
    let d = l.dim();
    let m = l.level_cap();
    let mut out = TruncatedTensor::zeros(l.alphabet(), m);
    if u.len() > m {
        return out;
    }
    assert!(u.max_letter() <= d, "projection word {u} outside the alphabet");
    let stride = d.pow(u.len() as u32);
    let tail = u.index_in_level(d);
    for n in 0..=m - u.len() {
        let src = l.level(n + u.len());
        for (i, dst) in out.level_mut(n).iter_mut().enumerate() {
            *dst = src[i * stride + tail];
        }
    }
    out
}

/// Bracket `⟨ℓ, g⟩` over the levels both tensors retain. Panics if the alphabets differ.
pub fn pair(l: &TruncatedTensor, g: &TruncatedTensor) -> f64 {
    assert_eq!(l.dim(), g.dim(), "pairing across alphabets");
    let end = level_offset(l.dim(), l.level_cap().min(g.level_cap()) + 1);
    l.coeffs()[..end].iter().zip(&g.coeffs()[..end]).map(|(a, b)| a * b).sum()
}

/// Per-level contributions `Σ_{v ∈ Vₙ} ℓ^v g^v` for `n = 0..=min cap`.
pub fn pair_by_level(l: &TruncatedTensor, g: &TruncatedTensor) -> Vec<f64> {
    assert_eq!(l.dim(), g.dim(), "pairing across alphabets");
    (0..=l.level_cap().min(g.level_cap()))
        .map(|n| l.level(n).iter().zip(g.level(n)).map(|(a, b)| a * b).sum())
        .collect()
}

impl TruncatedTensor {
    /// `self ⊗ other`. Panics on shape mismatch; see [`concat_mul`].
    pub fn concat(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "shape mismatch in concat");
        let m = self.level_cap();
        let mut out = TruncatedTensor::zeros(self.alphabet(), m);
        for k in 0..=m {
            let ak = self.level(k);
            if ak.iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..=m - k {
                let bj = other.level(j);
                if bj.iter().all(|&c| c == 0.0) {
                    continue;
                }
                let width = bj.len();
                let dst = out.level_mut(k + j);
                for (i, &ac) in ak.iter().enumerate() {
                    if ac == 0.0 {
                        continue;
                    }
                    dst[i * width..(i + 1) * width].iter_mut().zip(bj).for_each(|(x, y)| *x += ac * y);
                }
            }
        }
        out
    }

    /// `self ⊔⊔ other`. Panics on shape mismatch; see [`shuffle_mul`].
    pub fn shuffle(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "shape mismatch in shuffle");
        let d = self.dim();
        let m = self.level_cap();
        let mut out = TruncatedTensor::zeros(self.alphabet(), m);
        for k in 0..=m {
            let ak = self.level(k);
            if ak.iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..=m - k {
                let bj = other.level(j);
                if bj.iter().all(|&c| c == 0.0) {
                    continue;
                }
                shuffle_levels(d, k, ak, j, bj, out.level_mut(k + j));
            }
        }
        out
    }
}

/// Accumulates the shuffle of a level-`k` block with a level-`j` block.
///
/// Each interleaving is a bitmask marking the output positions taken by the
/// left word; the output index then splits into a left and a right part.
fn shuffle_levels(d: usize, k: usize, a: &[f64], j: usize, b: &[f64], dst: &mut [f64]) {
    let n = k + j;
    let weights: Vec<usize> = (0..n).map(|p| d.pow((n - 1 - p) as u32)).collect();
    let mut fa = vec![0usize; a.len()];
    let mut fb = vec![0usize; b.len()];
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let (pa, pb): (Vec<usize>, Vec<usize>) = (0..n).partition(|&p| mask >> (n - 1 - p) & 1 == 1);
        offsets_for(d, &pa, &weights, &mut fa);
        offsets_for(d, &pb, &weights, &mut fb);
        for (ia, &ac) in a.iter().enumerate() {
            if ac == 0.0 {
                continue;
            }
            let base = fa[ia];
            for (ib, &bc) in b.iter().enumerate() {
                dst[base + fb[ib]] += ac * bc;
            }
        }
    }
}

fn offsets_for(d: usize, positions: &[usize], weights: &[usize], out: &mut [usize]) {
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut rest = idx;
        let mut acc = 0;
        for &p in positions.iter().rev() {
            acc += (rest % d) * weights[p];
            rest /= d;
        }
        *slot = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_algebra::Alphabet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn t(d: usize, m: usize, terms: &[(&str, f64)]) -> TruncatedTensor {
        let a = Alphabet::new(d).unwrap();
        let words: Vec<(Word, f64)> = terms.iter().map(|(s, c)| (w(s), *c)).collect();
        TruncatedTensor::from_terms(a, m, words.iter().map(|(w, c)| (w, *c)))
    }

    #[test]
    fn linear_combination_by_hand() {
        let x = t(2, 2, &[("", 4.0), ("1", 3.0)]);
        let y = t(2, 2, &[("", 6.0)]);
        let z = linear_combine(&[(3.0, &x), (-2.0, &y)]).unwrap();
        assert_eq!(z, t(2, 2, &[("1", 9.0)]));
        assert!(linear_combine(&[(1.0, &x), (1.0, &t(2, 3, &[]))]).is_err());
        assert!(linear_combine(&[(0.0, &x)]).unwrap().is_zero());
    }

    #[test]
    fn concatenation_by_hand() {
        let x = t(2, 3, &[("", 3.0), ("1", 2.0)]);
        let y = t(2, 3, &[("", 1.0), ("2", -1.0)]);
        let expect = t(2, 3, &[("", 3.0), ("1", 2.0), ("2", -3.0), ("12", -2.0)]);
        assert_eq!(concat_mul(&x, &y).unwrap(), expect);
        let one = t(2, 3, &[("1", 1.0)]);
        assert_eq!(concat_pow(&one, 2).unwrap().concat(&one), t(2, 3, &[("111", 1.0)]));
        assert!(concat_mul(&x, &t(3, 3, &[])).is_err());
    }

    #[test]
    fn shuffle_examples() {
        let x = t(3, 3, &[("1", 1.0)]);
        let y = t(3, 3, &[("23", 1.0)]);
        assert_eq!(shuffle_mul(&x, &y).unwrap(), t(3, 3, &[("123", 1.0), ("213", 1.0), ("231", 1.0)]));
        let two = t(2, 3, &[("2", 1.0)]);
        assert_eq!(two.shuffle(&two), t(2, 3, &[("22", 2.0)]));
        let word = t(2, 3, &[("212", 1.0)]);
        assert_eq!(word.shuffle(&TruncatedTensor::unit(word.alphabet(), 3)), word);
    }

    #[test]
    fn powers() {
        let one = t(2, 4, &[("1", 1.0)]);
        assert_eq!(shuffle_pow(&one, 3).unwrap(), t(2, 4, &[("111", 6.0)]));
        assert_eq!(concat_pow(&one, 3).unwrap(), t(2, 4, &[("111", 1.0)]));
        assert_eq!(concat_pow(&t(2, 4, &[("21", 5.0)]), 0).unwrap(), t(2, 4, &[("", 1.0)]));
        assert!(matches!(shuffle_pow(&one, -1), Err(Error::Argument(_))));
    }

    #[test]
    fn resolvent_examples() {
        let zero = t(2, 4, &[]);
        assert_eq!(resolvent(&zero).unwrap(), t(2, 4, &[("", 1.0)]));
        assert_eq!(resolvent(&t(2, 4, &[("", 0.5)])).unwrap(), t(2, 4, &[("", 2.0)]));
        let b1 = 0.7;
        let r = resolvent(&t(2, 4, &[("1", b1)])).unwrap();
        for n in 0..=4 {
            assert!((r.get(&Word::repeat(1, n)) - b1.powi(n as i32)).abs() < 1e-15);
        }
        assert!(matches!(resolvent(&t(2, 4, &[("", 1.0)])), Err(Error::ResolventDivergence(_))));
    }

    #[test]
    fn shuffle_exponential_of_time_drift() {
        let (kappa, time) = (1.3, 0.4);
        let e = shuffle_exp(&t(2, 5, &[("", -kappa * time), ("1", kappa)]));
        for n in 0..=5 {
            let expect = (-kappa * time).exp() * kappa.powi(n as i32);
            assert!((e.get(&Word::repeat(1, n)) - expect).abs() < 1e-14);
        }
        assert_eq!(shuffle_exp(&t(2, 5, &[])), t(2, 5, &[("", 1.0)]));
    }

    #[test]
    fn projection_examples() {
        let l = t(3, 4, &[("", 4.0), ("1", 3.0), ("12", -1.0), ("2212", 2.0)]);
        assert_eq!(project(&l, &w("2")), t(3, 4, &[("1", -1.0), ("221", 2.0)]));
        assert!(project(&l, &w("3")).is_zero());
        assert!(project(&l, &w("11111")).is_zero());
    }

    #[test]
    fn pairing_examples() {
        let g = t(2, 3, &[("", 0.3), ("12", 0.5)]);
        assert_eq!(pair(&t(2, 3, &[("", 1.0)]), &g), 0.3);
        assert_eq!(pair(&t(2, 3, &[("12", 2.0)]), &g), 1.0);
        assert_eq!(pair_by_level(&t(2, 3, &[("12", 2.0)]), &g), vec![0.0, 0.0, 1.0, 0.0]);
    }
}

use super::stream::SignatureStream;
use crate::error::{Error, Result};
use crate::tensor_algebra::{pair, project, Alphabet, TruncatedTensor, Word};

/// `E[sig_t] = Σ_m t^m/m! (𝟷 + ½Σ_{j≥2} 𝚓𝚓)^{⊗m}`, truncated at `level_cap`.
pub fn expected_signature(t: f64, level_cap: usize, d: usize) -> Result<TruncatedTensor> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("expected signature needs t >= 0, got {t}")));
    }
    let alphabet = Alphabet::new(d)?;
    let mut generator = TruncatedTensor::from_word(alphabet, level_cap, &Word::letter(1), t);
    for j in 2..=d {
        generator.add_to(&Word::repeat(j, 2), 0.5 * t);
    }
    let mut out = TruncatedTensor::unit(alphabet, level_cap);
    let mut term = out.clone();
    for m in 1..=level_cap {
        term = term.concat(&generator).scaled(1.0 / m as f64);
        out.add_scaled(1.0, &term);
    }
    Ok(out)
}

/// Pathwise defect of Itô's formula for `⟨ℓ, sig_t⟩` with left-point sums:
///
/// `⟨ℓ,sig_{t_k}⟩ − ℓ^ø − Σ_{i<k} ⟨ℓ|₁ + ½Σⱼℓ|ⱼⱼ, sig_{t_i}⟩Δt − Σ_{i<k} Σⱼ⟨ℓ|ⱼ, sig_{t_i}⟩ΔW^j_i`.
///
/// Needs `deg ℓ ≤ M − 2` so that every projection is paired exactly.
pub fn ito_residual(l: &TruncatedTensor, stream: &SignatureStream) -> Result<Vec<f64>> {
    let d = stream.alphabet().size();
    if l.dim() != d {
        return Err(Error::Dimension(format!("ℓ over d={} against signatures over d={d}", l.dim())));
    }
    let m = stream.level_cap();
    if l.degree().unwrap_or(0) + 2 > m {
        return Err(Error::Argument(format!(
            "ito_residual needs deg ℓ <= M - 2 (deg {}, M {m})",
            l.degree().unwrap_or(0)
        )));
    }
    let l = l.with_level_cap(m);
    let mut drift = project(&l, &Word::letter(1));
    for j in 2..=d {
        drift.add_scaled(0.5, &project(&l, &Word::repeat(j, 2)));
    }
    let vols: Vec<TruncatedTensor> = (2..=d).map(|j| project(&l, &Word::letter(j))).collect();
    let dt = stream.grid().dt();
    let path = stream.path();
    let mut integral = l.scalar_part();
    let mut out = Vec::with_capacity(stream.sigs().len());
    for (k, sig) in stream.sigs().iter().enumerate() {
        out.push(pair(&l, sig) - integral);
        if k < stream.grid().steps() {
            integral += pair(&drift, sig) * dt;
            for (v, dw) in vols.iter().zip(path.increments_at(k)) {
                integral += pair(v, sig) * dw;
            }
        }
    }
    Ok(out)
}

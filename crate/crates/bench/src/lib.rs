//! Deterministic inputs shared by the benchmarks.

use sigrep_core::{Alphabet, TruncatedTensor};

/// A dense tensor with every coefficient nonzero, filled from a fixed LCG.
pub fn dense_tensor(d: usize, level_cap: usize, seed: u64) -> TruncatedTensor {
    let alphabet = Alphabet::new(d).expect("d >= 2");
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut t = TruncatedTensor::zeros(alphabet, level_cap);
    for c in t.coeffs_mut() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *c = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_deterministic_and_dense() {
        let a = dense_tensor(2, 4, 1);
        assert_eq!(a, dense_tensor(2, 4, 1));
        assert_ne!(a, dense_tensor(2, 4, 2));
        assert!(a.coeffs().iter().all(|c| *c != 0.0 && c.abs() <= 0.5));
    }
}

//! Binary debug dump of a signature stream.
//!
//! Layout, all little-endian: `d: u64, M: u64, K: u64, T: f64, seed: u64,
//! path_index: u64`, then for each level `n = 0..=M` and each grid point
//! `k = 0..=K` the `d^n` coefficients of level `n` of `sig_{t_k}` as `f64`.

use std::io::{Read, Write};

use super::stream::SignatureStream;
use crate::error::{Error, Result};
use crate::tensor_algebra::{Alphabet, TruncatedTensor};

#[derive(Clone, Debug, PartialEq)]
pub struct DumpHeader {
    pub d: u64,
    pub level_cap: u64,
    pub steps: u64,
    pub horizon: f64,
    pub seed: u64,
    pub path_index: u64,
}

pub fn write_stream(stream: &SignatureStream, mut out: impl Write) -> Result<()> {
    let (seed, index) = stream.path().provenance();
    let m = stream.level_cap();
    for v in [stream.alphabet().size() as u64, m as u64, stream.grid().steps() as u64] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&stream.grid().horizon().to_le_bytes())?;
    out.write_all(&seed.to_le_bytes())?;
    out.write_all(&index.to_le_bytes())?;
    for n in 0..=m {
        for sig in stream.sigs() {
            for c in sig.level(n) {
                out.write_all(&c.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Reads a dump back into its header and the per-time signatures.
pub fn read_stream(mut input: impl Read) -> Result<(DumpHeader, Vec<TruncatedTensor>)> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut dyn Read| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let d = u64::from_le_bytes(next(&mut input)?);
    let level_cap = u64::from_le_bytes(next(&mut input)?);
    let steps = u64::from_le_bytes(next(&mut input)?);
    let horizon = f64::from_le_bytes(next(&mut input)?);
    let seed = u64::from_le_bytes(next(&mut input)?);
    let path_index = u64::from_le_bytes(next(&mut input)?);
    let alphabet = Alphabet::new(d as usize)?;
    if level_cap > 32 {
        return Err(Error::Parse(format!("implausible level cap {level_cap}")));
    }
    let mut sigs = vec![TruncatedTensor::zeros(alphabet, level_cap as usize); steps as usize + 1];
    for n in 0..=level_cap as usize {
        for sig in sigs.iter_mut() {
            for c in sig.level_mut(n) {
                *c = f64::from_le_bytes(next(&mut input)?);
            }
        }
    }
    Ok((DumpHeader { d, level_cap, steps, horizon, seed, path_index }, sigs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature_engine::{sample_brownian, signature_stream, TimeGrid};

    #[test]
    fn round_trip() {
        let grid = TimeGrid::new(0.5, 7).unwrap();
        let s = signature_stream(sample_brownian(grid, 1, 42, 3).unwrap(), 3).unwrap();
        let mut buf = Vec::new();
        write_stream(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 48 + 8 * 8 * 15);
        let (h, sigs) = read_stream(buf.as_slice()).unwrap();
        assert_eq!(h, DumpHeader { d: 2, level_cap: 3, steps: 7, horizon: 0.5, seed: 42, path_index: 3 });
        assert_eq!(sigs, s.sigs());
        assert!(read_stream(&buf[..60]).is_err());
    }
}

//! Binary serialization of trained networks.
//!
//! Layout (all integers little-endian): magic `HOPW`, format version `u32`,
//! neuron count `u32`, stored-pattern count `u32`, then `n*n` signed 64-bit
//! couplings in row-major order, then `n` 64-bit float thresholds.
//! Round-trips are bit-exact.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{HopfieldError, HopfieldNetwork, WeightMatrix};

pub const WEIGHT_MAGIC: &[u8; 4] = b"HOPW";
pub const WEIGHT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum WeightIoError {
    #[error("bad magic bytes, not a weight container")]
    BadMagic,
    #[error("unsupported weight format version {0}")]
    UnsupportedVersion(u32),
    #[error("container truncated while reading {context}")]
    Truncated { context: &'static str },
    #[error("container holds an invalid network: {0}")]
    Invalid(#[from] HopfieldError),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

/// Writes the network into `out`.
pub fn write_network<W: Write>(net: &HopfieldNetwork, out: &mut W) -> Result<(), WeightIoError> {
    out.write_all(WEIGHT_MAGIC)?;
    out.write_all(&WEIGHT_FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(net.n() as u32).to_le_bytes())?;
    out.write_all(&(net.stored_count() as u32).to_le_bytes())?;
    for &w in net.weights().entries() {
        out.write_all(&w.to_le_bytes())?;
    }
    for &t in net.thresholds() {
        out.write_all(&t.to_le_bytes())?;
    }
    Ok(())
}

/// Encodes the network into a byte vector.
pub fn network_to_bytes(net: &HopfieldNetwork) -> Vec<u8> {
    let n = net.n();
    let mut buf = Vec::with_capacity(16 + 8 * n * n + 8 * n);
    write_network(net, &mut buf).expect("vector writes cannot fail");
    buf
}

fn read_exact<R: Read>(
    input: &mut R,
    buf: &mut [u8],
    context: &'static str,
) -> Result<(), WeightIoError> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => WeightIoError::Truncated { context },
        _ => WeightIoError::Io(e),
    })
}

fn read_u32<R: Read>(input: &mut R, context: &'static str) -> Result<u32, WeightIoError> {
    let mut buf = [0u8; 4];
    read_exact(input, &mut buf, context)?;
    Ok(u32::from_le_bytes(buf))
}

/// Reads a network, validating the header and the weight-matrix invariants.
pub fn read_network<R: Read>(input: &mut R) -> Result<HopfieldNetwork, WeightIoError> {
    let mut magic = [0u8; 4];
    read_exact(input, &mut magic, "magic")?;
    if &magic != WEIGHT_MAGIC {
        return Err(WeightIoError::BadMagic);
    }
    let version = read_u32(input, "version")?;
    if version != WEIGHT_FORMAT_VERSION {
        return Err(WeightIoError::UnsupportedVersion(version));
    }
    let n = read_u32(input, "neuron count")? as usize;
    let stored = read_u32(input, "stored count")? as usize;

    let mut entries = Vec::with_capacity(n * n);
    let mut buf = [0u8; 8];
    for _ in 0..n * n {
        read_exact(input, &mut buf, "couplings")?;
        entries.push(i64::from_le_bytes(buf));
    }
    let mut thresholds = Vec::with_capacity(n);
    for _ in 0..n {
        read_exact(input, &mut buf, "thresholds")?;
        thresholds.push(f64::from_le_bytes(buf));
    }
    let weights = WeightMatrix::from_entries(n, entries)?;
    Ok(HopfieldNetwork::from_parts(weights, thresholds, stored)?)
}

/// Decodes a network from a byte slice.
pub fn network_from_bytes(bytes: &[u8]) -> Result<HopfieldNetwork, WeightIoError> {
    read_network(&mut io::Cursor::new(bytes))
}

pub fn save_network(net: &HopfieldNetwork, path: &Path) -> Result<(), WeightIoError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_network(net, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_network(path: &Path) -> Result<HopfieldNetwork, WeightIoError> {
    read_network(&mut BufReader::new(File::open(path)?))
}

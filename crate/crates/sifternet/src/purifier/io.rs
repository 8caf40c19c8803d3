//! Purifier container serialization.
//!
//! Layout (integers little-endian): magic `SIFP`, format version `u32`, the
//! canonical config text (length-prefixed), image width/height and channel
//! count, one length-prefixed weight container per channel, then the
//! scramble permutation as a length-n `u32` index array when scrambling is
//! on. Round-trips are bit-exact.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::hopfield::io::{network_from_bytes, network_to_bytes, WeightIoError};
use crate::purifier::{Permutation, PurifierConfig, PurifierError, ScrambleMode, TrainedPurifier};

pub const PURIFIER_MAGIC: &[u8; 4] = b"SIFP";
pub const PURIFIER_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PurifierIoError {
    #[error("bad magic bytes, not a purifier container")]
    BadMagic,
    #[error("unsupported purifier format version {0}")]
    UnsupportedVersion(u32),
    #[error("container truncated while reading {context}")]
    Truncated { context: &'static str },
    #[error("embedded config is not valid UTF-8")]
    ConfigEncoding,
    #[error("container is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Weights(#[from] WeightIoError),
    #[error(transparent)]
    Purifier(#[from] PurifierError),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

fn write_u32<W: Write>(out: &mut W, v: u32) -> io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn read_exact<R: Read>(
    input: &mut R,
    buf: &mut [u8],
    context: &'static str,
) -> Result<(), PurifierIoError> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => PurifierIoError::Truncated { context },
        _ => PurifierIoError::Io(e),
    })
}

fn read_u32<R: Read>(input: &mut R, context: &'static str) -> Result<u32, PurifierIoError> {
    let mut buf = [0u8; 4];
    read_exact(input, &mut buf, context)?;
    Ok(u32::from_le_bytes(buf))
}

pub fn write_purifier<W: Write>(
    purifier: &TrainedPurifier,
    out: &mut W,
) -> Result<(), PurifierIoError> {
    out.write_all(PURIFIER_MAGIC)?;
    write_u32(out, PURIFIER_FORMAT_VERSION)?;
    let config_text = purifier.config().canonical_text();
    write_u32(out, config_text.len() as u32)?;
    out.write_all(config_text.as_bytes())?;
    write_u32(out, purifier.width() as u32)?;
    write_u32(out, purifier.height() as u32)?;
    write_u32(out, purifier.channels() as u32)?;
    for c in 0..purifier.channels() {
        let blob = network_to_bytes(purifier.network(c));
        write_u32(out, blob.len() as u32)?;
        out.write_all(&blob)?;
    }
    match purifier.scramble() {
        None => out.write_all(&[0u8])?,
        Some(perm) => {
            out.write_all(&[1u8])?;
            write_u32(out, perm.len() as u32)?;
            for &idx in perm.forward() {
                write_u32(out, idx)?;
            }
        }
    }
    Ok(())
}

pub fn purifier_to_bytes(purifier: &TrainedPurifier) -> Vec<u8> {
    let mut buf = Vec::new();
    write_purifier(purifier, &mut buf).expect("vector writes cannot fail");
    buf
}

pub fn read_purifier<R: Read>(input: &mut R) -> Result<TrainedPurifier, PurifierIoError> {
    let mut magic = [0u8; 4];
    read_exact(input, &mut magic, "magic")?;
    if &magic != PURIFIER_MAGIC {
        return Err(PurifierIoError::BadMagic);
    }
    let version = read_u32(input, "version")?;
    if version != PURIFIER_FORMAT_VERSION {
        return Err(PurifierIoError::UnsupportedVersion(version));
    }
    let config_len = read_u32(input, "config length")? as usize;
    let mut config_bytes = vec![0u8; config_len];
    read_exact(input, &mut config_bytes, "config text")?;
    let config_text =
        String::from_utf8(config_bytes).map_err(|_| PurifierIoError::ConfigEncoding)?;
    let config = PurifierConfig::from_canonical_text(&config_text)?;

    let width = read_u32(input, "width")? as usize;
    let height = read_u32(input, "height")? as usize;
    let channels = read_u32(input, "channel count")? as usize;
    if channels != 1 && channels != 3 {
        return Err(PurifierIoError::Inconsistent(format!(
            "channel count {channels} (must be 1 or 3)"
        )));
    }
    let n = width * height;
    let mut networks = Vec::with_capacity(channels);
    for _ in 0..channels {
        let blob_len = read_u32(input, "weight blob length")? as usize;
        let mut blob = vec![0u8; blob_len];
        read_exact(input, &mut blob, "weight blob")?;
        let net = network_from_bytes(&blob)?;
        if net.n() != n {
            return Err(PurifierIoError::Inconsistent(format!(
                "network size {} does not match {width}x{height}",
                net.n()
            )));
        }
        networks.push(net);
    }
    let mut flag = [0u8; 1];
    read_exact(input, &mut flag, "scramble flag")?;
    let scramble = match flag[0] {
        0 => None,
        1 => {
            let len = read_u32(input, "permutation length")? as usize;
            if len != n {
                return Err(PurifierIoError::Inconsistent(format!(
                    "permutation length {len} does not match {width}x{height}"
                )));
            }
            let mut forward = Vec::with_capacity(len);
            for _ in 0..len {
                forward.push(read_u32(input, "permutation entries")?);
            }
            Some(Permutation::from_forward(forward)?)
        }
        other => {
            return Err(PurifierIoError::Inconsistent(format!(
                "scramble flag {other}"
            )))
        }
    };
    match (&scramble, config.scramble) {
        (None, ScrambleMode::Off) | (Some(_), ScrambleMode::Permutation { .. }) => {}
        _ => {
            return Err(PurifierIoError::Inconsistent(
                "scramble flag disagrees with config".into(),
            ))
        }
    }
    Ok(TrainedPurifier {
        networks,
        config,
        width,
        height,
        scramble,
    })
}

pub fn purifier_from_bytes(bytes: &[u8]) -> Result<TrainedPurifier, PurifierIoError> {
    read_purifier(&mut io::Cursor::new(bytes))
}

pub fn save_purifier(purifier: &TrainedPurifier, path: &Path) -> Result<(), PurifierIoError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_purifier(purifier, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_purifier(path: &Path) -> Result<TrainedPurifier, PurifierIoError> {
    read_purifier(&mut BufReader::new(File::open(path)?))
}

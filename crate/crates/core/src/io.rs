//! Binary containers for states and sample masks.
//!
//! `WFC1` state files: magic `WFC1`, u32 N, u32 d, u8 boundary flag
//! (0 = open, 1 = periodic), then `d^N` little-endian f64 (re, im) pairs in
//! flat index order.
//!
//! `WFM1` mask files: magic `WFM1`, u64 total, u64 count, u64 seed, f64 rate,
//! then `count` records of (u64 index, f64 re, f64 im), little-endian.
//!
//! Readers reject truncated or oversized payloads.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::sampling::SampleMask;
use crate::{pow_usize, Boundary, C64, StateVector};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes (expected {expected})")]
    BadMagic { expected: &'static str },
    #[error("payload length mismatch: expected {expected} bytes after header, found {found}")]
    LengthMismatch { expected: u64, found: u64 },
    #[error("invalid boundary flag {0}")]
    BadBoundaryFlag(u8),
    #[error("unreasonable header: n={n}, d={d}")]
    BadHeader { n: u32, d: u32 },
    #[error("mask indices out of order or out of range")]
    BadMask,
}

const STATE_MAGIC: &[u8; 4] = b"WFC1";
const MASK_MAGIC: &[u8; 4] = b"WFM1";

/// Largest state dimension a reader will allocate for (2^26 amplitudes = 1 GiB).
const MAX_READ_DIM: u64 = 1 << 26;

fn boundary_flag(b: Boundary) -> u8 {
    match b {
        Boundary::Open => 0,
        Boundary::Periodic => 1,
    }
}

pub fn write_state(path: &Path, state: &StateVector, boundary: Boundary) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(STATE_MAGIC)?;
    w.write_all(&(state.num_sites() as u32).to_le_bytes())?;
    w.write_all(&(state.local_dim() as u32).to_le_bytes())?;
    w.write_all(&[boundary_flag(boundary)])?;
    for a in state.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<(StateVector, Boundary), IoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != STATE_MAGIC {
        return Err(IoError::BadMagic { expected: "WFC1" });
    }
    let n = read_u32(&mut r)?;
    let d = read_u32(&mut r)?;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let boundary = match flag[0] {
        0 => Boundary::Open,
        1 => Boundary::Periodic,
        other => return Err(IoError::BadBoundaryFlag(other)),
    };
    if n == 0 || d < 2 {
        return Err(IoError::BadHeader { n, d });
    }
    let dim = (d as u64).checked_pow(n).filter(|&v| v <= MAX_READ_DIM);
    let dim = dim.ok_or(IoError::BadHeader { n, d })? as usize;
    let mut amps = Vec::with_capacity(dim);
    let mut buf = [0u8; 16];
    for _ in 0..dim {
        if let Err(e) = r.read_exact(&mut buf) {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                return Err(IoError::LengthMismatch {
                    expected: dim as u64 * 16,
                    found: amps.len() as u64 * 16,
                });
            }
            return Err(e.into());
        }
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        amps.push(C64::new(re, im));
    }
    // trailing bytes are as much a corruption sign as missing ones
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(IoError::LengthMismatch {
            expected: dim as u64 * 16,
            found: dim as u64 * 16 + 1,
        });
    }
    let state = StateVector::new(n as usize, d as usize, amps)
        .map_err(|_| IoError::BadHeader { n, d })?;
    Ok((state, boundary))
}

pub fn write_mask(path: &Path, mask: &SampleMask) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MASK_MAGIC)?;
    w.write_all(&(mask.total() as u64).to_le_bytes())?;
    w.write_all(&(mask.len() as u64).to_le_bytes())?;
    w.write_all(&mask.seed().to_le_bytes())?;
    w.write_all(&mask.rate().to_le_bytes())?;
    for (&idx, &val) in mask.indices().iter().zip(mask.values()) {
        w.write_all(&(idx as u64).to_le_bytes())?;
        w.write_all(&val.re.to_le_bytes())?;
        w.write_all(&val.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<SampleMask, IoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MASK_MAGIC {
        return Err(IoError::BadMagic { expected: "WFM1" });
    }
    let total = read_u64(&mut r)?;
    let count = read_u64(&mut r)?;
    let seed = read_u64(&mut r)?;
    let rate = f64::from_bits(read_u64(&mut r)?);
    if total > MAX_READ_DIM || count > total {
        return Err(IoError::BadMask);
    }
    let mut indices = Vec::with_capacity(count as usize);
    let mut values = Vec::with_capacity(count as usize);
    let mut buf = [0u8; 24];
    for i in 0..count {
        if let Err(e) = r.read_exact(&mut buf) {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                return Err(IoError::LengthMismatch { expected: count * 24, found: i * 24 });
            }
            return Err(e.into());
        }
        indices.push(u64::from_le_bytes(buf[0..8].try_into().unwrap()) as usize);
        let re = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        let im = f64::from_le_bytes(buf[16..24].try_into().unwrap());
        values.push(C64::new(re, im));
    }
    SampleMask::from_parts(total as usize, indices, values, seed, rate).map_err(|_| IoError::BadMask)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, IoError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, IoError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// `d^n` as u64 without usize assumptions; used by format validators.
pub fn dim_u64(d: u32, n: u32) -> Option<u64> {
    (d as u64).checked_pow(n)
}

#[allow(unused)]
fn _assert_pow_consistency() {
    // pow_usize and dim_u64 must agree on anything a reader accepts
    let _ = pow_usize as fn(usize, usize) -> usize;
}

//! EPF1 binary field snapshots.
//!
//! Layout, all little-endian after the magic:
//!
//! | offset | size | field                    |
//! |--------|------|--------------------------|
//! | 0      | 4    | magic `b"EPF1"`          |
//! | 4      | 4    | version `u32` = 1        |
//! | 8      | 4    | `d` `u32`                |
//! | 12     | 4    | `n` `u32`                |
//! | 16     | 8    | box length `f64`         |
//! | 24     | 8    | time `f64`               |
//! | 32     | 8    | alpha `f64`              |
//! | 40     | …    | `d` blocks of `n^d` `f64`|
//!
//! Samples are row-major with the last axis fastest, component by component.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{TorusGrid, VelocityField};

pub const MAGIC: [u8; 4] = *b"EPF1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;

/// First violated snapshot invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SnapshotError {
    #[error("file shorter than the {HEADER_LEN}-byte header ({0} bytes)")]
    TruncatedHeader(usize),
    #[error("bad magic {0:?}, expected \"EPF1\"")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("size mismatch: header implies {expected} bytes, file has {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-finite sample in component {component} at index {index}")]
    NonFiniteSample { component: usize, index: usize },
}

/// Header fields of a snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub version: u32,
    pub dim: u32,
    pub n: u32,
    pub length: f64,
    pub time: f64,
    pub alpha: f64,
}

/// A decoded snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub field: VelocityField,
}

pub fn encode(u: &VelocityField, t: f64, alpha: f64) -> Vec<u8> {
    let g = u.grid();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * g.dim() * g.len());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.n() as u32).to_le_bytes());
    buf.extend_from_slice(&g.length().to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    buf.extend_from_slice(&alpha.to_le_bytes());
    for c in u.components() {
        for x in c {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    buf
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], off: usize) -> f64 {
    f64::from_le_bytes(b[off..off + 8].try_into().unwrap())
}

pub fn decode_header(bytes: &[u8]) -> Result<SnapshotHeader, SnapshotError> {
    if bytes.len() < 4 {
        return Err(SnapshotError::TruncatedHeader(bytes.len()));
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::TruncatedHeader(bytes.len()));
    }
    let header = SnapshotHeader {
        version: u32_at(bytes, 4),
        dim: u32_at(bytes, 8),
        n: u32_at(bytes, 12),
        length: f64_at(bytes, 16),
        time: f64_at(bytes, 24),
        alpha: f64_at(bytes, 32),
    };
    if header.version != VERSION {
        return Err(SnapshotError::UnsupportedVersion(header.version));
    }
    Ok(header)
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    let header = decode_header(bytes)?;
    let grid = TorusGrid::new(header.dim as usize, header.n as usize, header.length)
        .map_err(|e| SnapshotError::InvalidHeader(e.to_string()))?;
    if !header.time.is_finite() || !header.alpha.is_finite() {
        return Err(SnapshotError::InvalidHeader("non-finite time or alpha".into()));
    }
    let expected = HEADER_LEN + 8 * grid.dim() * grid.len();
    if bytes.len() != expected {
        return Err(SnapshotError::SizeMismatch { expected, got: bytes.len() });
    }
    let mut components = Vec::with_capacity(grid.dim());
    let mut off = HEADER_LEN;
    for component in 0..grid.dim() {
        let mut c = Vec::with_capacity(grid.len());
        for index in 0..grid.len() {
            let x = f64_at(bytes, off);
            if !x.is_finite() {
                return Err(SnapshotError::NonFiniteSample { component, index });
            }
            c.push(x);
            off += 8;
        }
        components.push(c);
    }
    Ok(Snapshot { header, field: VelocityField::from_raw(grid, components) })
}

pub fn write_snapshot(u: &VelocityField, t: f64, alpha: f64, path: &Path) -> Result<()> {
    fs::write(path, encode(u, t, alpha)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot_full(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|kind| Error::Snapshot { path: path.to_path_buf(), kind })
}

/// Returns `(field, t, alpha)`.
pub fn read_snapshot(path: &Path) -> Result<(VelocityField, f64, f64)> {
    let s = read_snapshot_full(path)?;
    Ok((s.field, s.header.time, s.header.alpha))
}

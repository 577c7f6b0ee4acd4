//! Binary on-disk formats.
//!
//! All multi-byte values are little-endian. Three container formats, each
//! opening with a 4-byte magic and a u32 format version:
//!
//! - matrix (`VFMX`): u64 rows, u64 cols, then rows*cols f64 entries in
//!   row-major order;
//! - mask shard (`VFSH`): u64 owner index, then a matrix payload;
//! - replay log cache (`VFRL`): u64 user_dim, u64 item_dim, u64 entry
//!   count, then per entry u64 label, f64 reward, user_dim f64 user
//!   features, item_dim f64 item features.
//!
//! The replay cache exists so ingestion runs once: evaluation loads the
//! cache instead of re-hashing the raw log.

use std::io::{Read, Write};

use crate::envs::{ReplayLog, ReplayLogEntry};
use crate::numerics::{Matrix, NumericsError, Vector};
use crate::o3m::MaskShard;
use thiserror::Error;

const MATRIX_MAGIC: [u8; 4] = *b"VFMX";
const SHARD_MAGIC: [u8; 4] = *b"VFSH";
const REPLAY_MAGIC: [u8; 4] = *b"VFRL";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported format version {got} (expected {FORMAT_VERSION})")]
    BadVersion { got: u32 },
    #[error("corrupt payload: {what}")]
    Corrupt { what: &'static str },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<(), IoError> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<(), IoError> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<(), IoError> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, IoError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, IoError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, IoError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

fn read_dim<R: Read>(r: &mut R, what: &'static str) -> Result<usize, IoError> {
    let v = read_u64(r)?;
    // Dimensions beyond 2^32 only arise from corrupt headers.
    if v == 0 || v > u64::from(u32::MAX) {
        return Err(IoError::Corrupt { what });
    }
    Ok(v as usize)
}

fn check_header<R: Read>(r: &mut R, magic: [u8; 4], name: &'static str) -> Result<(), IoError> {
    let mut got = [0u8; 4];
    r.read_exact(&mut got)?;
    if got != magic {
        return Err(IoError::BadMagic { expected: name });
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(IoError::BadVersion { got: version });
    }
    Ok(())
}

pub fn write_matrix<W: Write>(w: &mut W, m: &Matrix) -> Result<(), IoError> {
    w.write_all(&MATRIX_MAGIC)?;
    write_u32(w, FORMAT_VERSION)?;
    write_u64(w, m.rows() as u64)?;
    write_u64(w, m.cols() as u64)?;
    for &e in m.as_slice() {
        write_f64(w, e)?;
    }
    Ok(())
}

pub fn read_matrix<R: Read>(r: &mut R) -> Result<Matrix, IoError> {
    check_header(r, MATRIX_MAGIC, "VFMX")?;
    let rows = read_dim(r, "matrix rows")?;
    let cols = read_dim(r, "matrix cols")?;
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        entries.push(read_f64(r)?);
    }
    Ok(Matrix::from_row_major(rows, cols, entries)?)
}

pub fn write_mask_shard<W: Write>(w: &mut W, shard: &MaskShard) -> Result<(), IoError> {
    w.write_all(&SHARD_MAGIC)?;
    write_u32(w, FORMAT_VERSION)?;
    write_u64(w, shard.owner() as u64)?;
    write_matrix(w, shard.block())
}

pub fn read_mask_shard<R: Read>(r: &mut R) -> Result<MaskShard, IoError> {
    check_header(r, SHARD_MAGIC, "VFSH")?;
    let owner = read_u64(r)? as usize;
    let block = read_matrix(r)?;
    Ok(MaskShard::new(owner, block))
}

pub fn write_replay_log<W: Write>(w: &mut W, log: &ReplayLog) -> Result<(), IoError> {
    w.write_all(&REPLAY_MAGIC)?;
    write_u32(w, FORMAT_VERSION)?;
    write_u64(w, log.user_dim as u64)?;
    write_u64(w, log.item_dim as u64)?;
    write_u64(w, log.entries.len() as u64)?;
    for e in &log.entries {
        write_u64(w, e.label)?;
        write_f64(w, e.reward)?;
        for &v in e.user.as_slice() {
            write_f64(w, v)?;
        }
        for &v in e.item.as_slice() {
            write_f64(w, v)?;
        }
    }
    Ok(())
}

pub fn read_replay_log<R: Read>(r: &mut R) -> Result<ReplayLog, IoError> {
    check_header(r, REPLAY_MAGIC, "VFRL")?;
    let user_dim = read_dim(r, "user dimension")?;
    let item_dim = read_dim(r, "item dimension")?;
    let count = read_u64(r)?;
    if count > u64::from(u32::MAX) {
        return Err(IoError::Corrupt {
            what: "entry count",
        });
    }
    let mut entries = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let label = read_u64(r)?;
        let reward = read_f64(r)?;
        if reward != 0.0 && reward != 1.0 {
            return Err(IoError::Corrupt {
                what: "reward must be binary",
            });
        }
        let mut user = Vector::zeros(user_dim);
        for i in 0..user_dim {
            user.set(i, read_f64(r)?);
        }
        let mut item = Vector::zeros(item_dim);
        for i in 0..item_dim {
            item.set(i, read_f64(r)?);
        }
        entries.push(ReplayLogEntry {
            user,
            item,
            label,
            reward,
        });
    }
    Ok(ReplayLog {
        user_dim,
        item_dim,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{planted_log, PlantedLogConfig};
    use crate::numerics::{random_orthogonal, Rng};
    use crate::o3m::{partition_mask, DimPartition};

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let mut rng = Rng::seed_from_u64(4);
        let m = Matrix::from_fn(5, 3, |_, _| rng.standard_normal());
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let back = read_matrix(&mut buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn shard_round_trip_keeps_owner() {
        let mut rng = Rng::seed_from_u64(9);
        let q = random_orthogonal(6, &mut rng).unwrap();
        let shards = partition_mask(&q, &DimPartition::new(vec![2, 4]).unwrap()).unwrap();
        for shard in &shards {
            let mut buf = Vec::new();
            write_mask_shard(&mut buf, shard).unwrap();
            let back = read_mask_shard(&mut buf.as_slice()).unwrap();
            assert_eq!(&back, shard);
        }
    }

    #[test]
    fn replay_log_round_trip() {
        let (log, _) = planted_log(&PlantedLogConfig {
            entries: 200,
            labels: 7,
            ..PlantedLogConfig::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_replay_log(&mut buf, &log).unwrap();
        let back = read_replay_log(&mut buf.as_slice()).unwrap();
        assert_eq!(log, back);
    }

    #[test]
    fn bad_magic_version_and_truncation_are_detected() {
        let m = Matrix::identity(3);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();

        let mut wrong_magic = buf.clone();
        wrong_magic[0] = b'X';
        assert!(matches!(
            read_matrix(&mut wrong_magic.as_slice()),
            Err(IoError::BadMagic { .. })
        ));

        let mut wrong_version = buf.clone();
        wrong_version[4] = 99;
        assert!(matches!(
            read_matrix(&mut wrong_version.as_slice()),
            Err(IoError::BadVersion { got: 99 })
        ));

        let truncated = &buf[..buf.len() - 3];
        assert!(matches!(
            read_matrix(&mut &truncated[..]),
            Err(IoError::Io(_))
        ));
    }
}

//! Binary snapshot archives.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 8    | magic `SHDWSNAP`              |
//! | 8      | 2    | format version (1)            |
//! | 10     | 2    | qubit count `n` (at most 16)  |
//! | 12     | 8    | snapshot count `T`            |
//! | 20     | 8    | sampling seed                 |
//! | 28     | 6T   | per snapshot: `u32` bases, `u16` outcomes |
//!
//! The packed words are those of [`Snapshot::packed_bases`] and
//! [`Snapshot::packed_outcomes`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use shadowphase_core::shadows::{ShadowEnsemble, Snapshot};

use crate::error::{io_err, Error, Result};

pub const MAGIC: [u8; 8] = *b"SHDWSNAP";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 28;
const RECORD_LEN: usize = 6;

pub fn write_archive<W: Write>(mut w: W, ens: &ShadowEnsemble) -> std::io::Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(&MAGIC);
    header[8..10].copy_from_slice(&VERSION.to_le_bytes());
    header[10..12].copy_from_slice(&(ens.n as u16).to_le_bytes());
    header[12..20].copy_from_slice(&(ens.len() as u64).to_le_bytes());
    header[20..28].copy_from_slice(&ens.seed.to_le_bytes());
    w.write_all(&header)?;
    for s in &ens.snapshots {
        w.write_all(&s.packed_bases().to_le_bytes())?;
        w.write_all(&s.packed_outcomes().to_le_bytes())?;
    }
    w.flush()
}

/// Reads an archive; `path` only labels errors.
pub fn read_archive<R: Read>(mut r: R, path: &Path) -> Result<ShadowEnsemble> {
    let malformed = |reason: &str| Error::Format { path: path.to_path_buf(), reason: reason.into() };
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|_| malformed("truncated header"))?;
    if header[..8] != MAGIC {
        return Err(malformed("bad magic"));
    }
    let version = u16::from_le_bytes([header[8], header[9]]);
    if version != VERSION {
        return Err(malformed(&format!("unsupported version {version}")));
    }
    let n = u16::from_le_bytes([header[10], header[11]]) as usize;
    let t = u64::from_le_bytes(header[12..20].try_into().unwrap());
    let seed = u64::from_le_bytes(header[20..28].try_into().unwrap());
    let t = usize::try_from(t).map_err(|_| malformed("snapshot count overflows"))?;

    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(io_err(path))?;
    if body.len() != t.checked_mul(RECORD_LEN).ok_or_else(|| malformed("snapshot count overflows"))? {
        return Err(malformed("body length does not match the snapshot count"));
    }
    let snapshots = body
        .chunks_exact(RECORD_LEN)
        .map(|c| {
            let bases = u32::from_le_bytes(c[..4].try_into().unwrap());
            let outcomes = u16::from_le_bytes(c[4..].try_into().unwrap());
            Snapshot::from_packed(n, bases, outcomes)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ShadowEnsemble::new(n, seed, snapshots)?)
}

pub fn save_archive(path: &Path, ens: &ShadowEnsemble) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_archive(BufWriter::new(file), ens).map_err(io_err(path))
}

pub fn load_archive(path: &Path) -> Result<ShadowEnsemble> {
    let file = File::open(path).map_err(io_err(path))?;
    read_archive(BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use shadowphase_core::shadows::sample_snapshots;
    use shadowphase_core::spin_ops::StateVector;

    fn sample() -> ShadowEnsemble {
        sample_snapshots(&StateVector::basis(5, 9), 64, 77).unwrap()
    }

    #[test]
    fn round_trip() {
        let ens = sample();
        let mut buf = Vec::new();
        write_archive(&mut buf, &ens).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 6 * 64);
        assert_eq!(&buf[..8], b"SHDWSNAP");
        let back = read_archive(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, ens);
    }

    #[test]
    fn rejects_corruption() {
        let ens = sample();
        let mut buf = Vec::new();
        write_archive(&mut buf, &ens).unwrap();
        let p = Path::new("mem");
        assert!(read_archive(&buf[..buf.len() - 1], p).is_err());
        assert!(read_archive(&buf[..10], p).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_archive(&bad[..], p).is_err());
        let mut bad = buf.clone();
        bad[8] = 2;
        assert!(read_archive(&bad[..], p).is_err());
        // basis code 0 on site 0 of the first record
        let mut bad = buf;
        bad[HEADER_LEN] &= !3;
        assert!(read_archive(&bad[..], p).is_err());
    }
}

//! Binary table format (all little-endian):
//!
//! | field | type |
//! |---|---|
//! | magic `SVMK` | 4 bytes |
//! | format version | u32 |
//! | Δ | f64 |
//! | M | u32 |
//! | family count | u32 |
//! | entries per family | u32 × family count |
//! | ε | f64 |
//! | j_max | u32 |
//! | payload | f64 × 40·M², per entry, P-major then S |
//! | FNV-1a 64 of the payload bytes | u64 |

use std::fs::File;
use std::hash::Hasher;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use fnv::FnvHasher;

use super::{KernelTable, TableError, TableGrid};
use crate::spectral_kernels::{Family, N_KERNELS};

pub const MAGIC: &[u8; 4] = b"SVMK";
pub const FORMAT_VERSION: u32 = 1;

type Res<T> = std::result::Result<T, TableError>;

pub fn save_table(table: &KernelTable, path: impl AsRef<Path>) -> Res<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&table.grid.delta.to_le_bytes())?;
    w.write_all(&(table.grid.m as u32).to_le_bytes())?;
    w.write_all(&(Family::ALL.len() as u32).to_le_bytes())?;
    for fam in Family::ALL {
        w.write_all(&(fam.n_entries() as u32).to_le_bytes())?;
    }
    w.write_all(&table.epsilon.to_le_bytes())?;
    let j_max = u32::try_from(table.j_max).map_err(|_| TableError::InvalidGrid("j_max exceeds u32".into()))?;
    w.write_all(&j_max.to_le_bytes())?;
    let mut hash = FnvHasher::default();
    for v in table.data() {
        let b = v.to_le_bytes();
        hash.write(&b);
        w.write_all(&b)?;
    }
    w.write_all(&hash.finish().to_le_bytes())?;
    w.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self, what: &str) -> Res<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => TableError::Corrupt(format!("truncated while reading {what}")),
            _ => TableError::Io(e),
        })?;
        Ok(b)
    }

    fn u32(&mut self, what: &str) -> Res<u32> {
        Ok(u32::from_le_bytes(self.bytes(what)?))
    }

    fn f64(&mut self, what: &str) -> Res<f64> {
        Ok(f64::from_le_bytes(self.bytes(what)?))
    }
}

pub fn load_table(path: impl AsRef<Path>) -> Res<KernelTable> {
    let mut r = Reader {
        inner: BufReader::new(File::open(path)?),
    };
    if &r.bytes::<4>("magic")? != MAGIC {
        return Err(TableError::Corrupt("bad magic bytes".into()));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(TableError::UnsupportedVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let delta = r.f64("grid step")?;
    let m = r.u32("grid size")? as usize;
    let grid = TableGrid::new(delta, m).map_err(|e| TableError::Corrupt(e.to_string()))?;
    let n_fam = r.u32("family count")? as usize;
    if n_fam != Family::ALL.len() {
        return Err(TableError::Corrupt(format!("expected {} families, found {n_fam}", Family::ALL.len())));
    }
    for fam in Family::ALL {
        let n = r.u32("entry count")? as usize;
        if n != fam.n_entries() {
            return Err(TableError::Corrupt(format!("family {fam}: expected {} entries, found {n}", fam.n_entries())));
        }
    }
    let epsilon = r.f64("epsilon")?;
    let j_max = r.u32("j_max")? as usize;
    let len = N_KERNELS * grid.n_cells();
    let mut data = Vec::with_capacity(len);
    let mut hash = FnvHasher::default();
    for _ in 0..len {
        let b = r.bytes::<8>("payload")?;
        hash.write(&b);
        data.push(f64::from_le_bytes(b));
    }
    let stored = u64::from_le_bytes(r.bytes("checksum")?);
    if stored != hash.finish() {
        return Err(TableError::Corrupt("checksum mismatch".into()));
    }
    let mut rest = [0u8; 1];
    if r.inner.read(&mut rest)? != 0 {
        return Err(TableError::Corrupt("trailing bytes after checksum".into()));
    }
    KernelTable::from_parts(grid, epsilon, j_max, data)
}

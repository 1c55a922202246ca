//! Binary field snapshots.
//!
//! Layout (little-endian): magic `ACNS`, `u16` version, `u16` dim, `u32` n,
//! `u32` component count, then `count · n^dim` `f64` physical values, each
//! component in row-major order (axis 0 slowest).

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Grid, ScalarField};
use crate::error::{AcnsError, Result};

pub const MAGIC: &[u8; 4] = b"ACNS";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 2 + 4 + 4;

pub fn encode(components: &[&ScalarField]) -> Result<Vec<u8>> {
    let grid = components
        .first()
        .map(|c| c.grid())
        .ok_or_else(|| AcnsError::param("snapshot needs at least one component"))?;
    for c in components {
        grid.check_same(&c.grid())?;
    }
    let mut buf = Vec::with_capacity(HEADER_LEN + components.len() * grid.len() * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u16).to_le_bytes());
    buf.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    buf.extend_from_slice(&(components.len() as u32).to_le_bytes());
    for c in components {
        for v in c.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(buf)
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Vec<ScalarField>> {
    let bad = |reason: String| AcnsError::Format {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dim = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let grid = Grid::new(dim, n).map_err(|e| bad(e.to_string()))?;
    let expected = HEADER_LEN + count * grid.len() * 8;
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for {count} components on {dim}-d n={n}, found {}",
            bytes.len()
        )));
    }
    let mut out = Vec::with_capacity(count);
    let mut offset = HEADER_LEN;
    for _ in 0..count {
        let values = bytes[offset..offset + grid.len() * 8]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        offset += grid.len() * 8;
        out.push(ScalarField::from_values(grid, values)?);
    }
    Ok(out)
}

pub fn write(path: &Path, components: &[&ScalarField]) -> Result<()> {
    let bytes = encode(components)?;
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| AcnsError::io(&tmp, e))?;
    f.write_all(&bytes).map_err(|e| AcnsError::io(&tmp, e))?;
    f.sync_all().map_err(|e| AcnsError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| AcnsError::io(path, e))
}

pub fn read(path: &Path) -> Result<Vec<ScalarField>> {
    let bytes = fs::read(path).map_err(|e| AcnsError::io(path, e))?;
    decode(&bytes, path)
}

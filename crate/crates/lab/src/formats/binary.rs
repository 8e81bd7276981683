//! Little-endian binary dumps.
//!
//! Field file (`KMSF`):
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `KMSF` |
//! | 4 | format version, `u32` (= 1) |
//! | 4 | `n`, `u32` |
//! | 4 | `M`, `u32` |
//! | 4 | `d`, `u32` |
//! | `8·d·Mⁿ` | values, `f64`, point-major: all `d` components of grid point 0, then point 1, … |
//!
//! Grid points are ordered with axis 0 slowest, so point `(j₀, …, j_{n−1})`
//! sits at `Σ j_a M^{n−1−a}` and has coordinates `2π j_a / M`.
//!
//! Multiplier file (`KMSM`): magic, version, `n`, `M`, `rows`, `cols` (all
//! `u32`), then per grid frequency (same order as the points, index `j`
//! meaning frequency `j` for `j < M/2` and `j − M` otherwise) the phase as
//! two `f64` (re, im) followed by the real `rows × cols` matrix row-major.
//! The multiplier at that frequency is phase × matrix.

use std::io::{Read, Write};

use crate::error::{LabError, Result};
use crate::torus::{AssembledMultiplier, TensorField, TorusGrid};

pub const FIELD_MAGIC: &[u8; 4] = b"KMSF";
pub const MULTIPLIER_MAGIC: &[u8; 4] = b"KMSM";
pub const FORMAT_VERSION: u32 = 1;

fn put_u32(out: &mut Vec<u8>, x: usize) -> Result<()> {
    let x = u32::try_from(x).map_err(|_| LabError::InvalidArgument(format!("{x} does not fit in u32")))?;
    out.extend_from_slice(&x.to_le_bytes());
    Ok(())
}

pub fn encode_field(field: &TensorField) -> Result<Vec<u8>> {
    let grid = field.grid();
    let d = field.fiber_dim();
    let mut out = Vec::with_capacity(20 + 8 * d * grid.len());
    out.extend_from_slice(FIELD_MAGIC);
    put_u32(&mut out, FORMAT_VERSION as usize)?;
    put_u32(&mut out, grid.n())?;
    put_u32(&mut out, grid.points_per_axis())?;
    put_u32(&mut out, d)?;
    for i in 0..grid.len() {
        for c in 0..d {
            out.extend_from_slice(&field.component(c)[i].to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    name: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, len: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(LabError::parse(
                format!("{}: byte {}", self.name, self.pos),
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(f64::from_le_bytes(a))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4, "magic")? != magic {
            return Err(LabError::parse(
                self.name.to_string(),
                format!("not a {} file", String::from_utf8_lossy(magic)),
            ));
        }
        let version = self.u32("version")?;
        if version != FORMAT_VERSION as usize {
            return Err(LabError::parse(
                self.name.to_string(),
                format!("unsupported format version {version}"),
            ));
        }
        Ok(())
    }
}

pub fn decode_field(name: &str, bytes: &[u8]) -> Result<TensorField> {
    let mut cur = Cursor { name, bytes, pos: 0 };
    cur.header(FIELD_MAGIC)?;
    let n = cur.u32("n")?;
    let m = cur.u32("M")?;
    let d = cur.u32("d")?;
    let grid = TorusGrid::new(n, m).map_err(|e| LabError::parse(name, e.to_string()))?;
    if d == 0 {
        return Err(LabError::parse(name, "fiber dimension d = 0"));
    }
    let mut comps = vec![vec![0.0; grid.len()]; d];
    for i in 0..grid.len() {
        for comp in comps.iter_mut() {
            comp[i] = cur.f64("values")?;
        }
    }
    if cur.pos != bytes.len() {
        return Err(LabError::parse(name, format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    TensorField::from_components(grid, comps)
}

pub fn encode_multiplier(m: &AssembledMultiplier) -> Result<Vec<u8>> {
    let grid = m.grid();
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(28 + (16 + 8 * rows * cols) * grid.len());
    out.extend_from_slice(MULTIPLIER_MAGIC);
    put_u32(&mut out, FORMAT_VERSION as usize)?;
    put_u32(&mut out, grid.n())?;
    put_u32(&mut out, grid.points_per_axis())?;
    put_u32(&mut out, rows)?;
    put_u32(&mut out, cols)?;
    for i in 0..grid.len() {
        let ph = m.phase(i);
        out.extend_from_slice(&ph.re.to_le_bytes());
        out.extend_from_slice(&ph.im.to_le_bytes());
        let mat = m.real_part_matrix(i);
        for r in 0..rows {
            for c in 0..cols {
                out.extend_from_slice(&mat[(r, c)].to_le_bytes());
            }
        }
    }
    Ok(out)
}

/// Header and the per-frequency `(phase, matrix)` entries of a `KMSM` file.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierDump {
    pub grid: TorusGrid,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<((f64, f64), Vec<f64>)>,
}

pub fn decode_multiplier(name: &str, bytes: &[u8]) -> Result<MultiplierDump> {
    let mut cur = Cursor { name, bytes, pos: 0 };
    cur.header(MULTIPLIER_MAGIC)?;
    let n = cur.u32("n")?;
    let m = cur.u32("M")?;
    let rows = cur.u32("rows")?;
    let cols = cur.u32("cols")?;
    let grid = TorusGrid::new(n, m).map_err(|e| LabError::parse(name, e.to_string()))?;
    let mut entries = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = cur.f64("phase")?;
        let im = cur.f64("phase")?;
        let mut mat = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            mat.push(cur.f64("matrix")?);
        }
        entries.push(((re, im), mat));
    }
    if cur.pos != bytes.len() {
        return Err(LabError::parse(name, format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    Ok(MultiplierDump {
        grid,
        rows,
        cols,
        entries,
    })
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| LabError::io(path.display().to_string(), e))?;
    f.write_all(bytes).map_err(|e| LabError::io(path.display().to_string(), e))
}

pub fn read_file(path: &std::path::Path) -> Result<Vec<u8>> {
    let mut f = std::fs::File::open(path).map_err(|e| LabError::io(path.display().to_string(), e))?;
    let mut buf = Vec::new();
    f.read_to_end(&mut buf).map_err(|e| LabError::io(path.display().to_string(), e))?;
    Ok(buf)
}

/// 64-bit FNV-1a, used to fingerprint dumps in reports.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

//! Binary cache of assembled weights.
//!
//! Layout (all little-endian): magic `b"FLKA"`, `u32` format version, `u64` cell
//! count `n`, 32-byte content key, `n * n` `f64` pair weights in row-major order,
//! then `n` `f64` exterior weights.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::{assemble_with, AssemblyOptions, KernelAssembly, KernelFamily, KernelSpec, Modulation};

const MAGIC: &[u8; 4] = b"FLKA";
const VERSION: u32 = 1;

/// Content hash of everything the assembly depends on; `None` for custom
/// modulations, which cannot be hashed.
pub fn cache_key(grid: &Grid, spec: &KernelSpec, opts: &AssemblyOptions) -> Option<[u8; 32]> {
    let mut h = Sha256::new();
    let mut put = |x: f64| h.update(x.to_bits().to_le_bytes());
    put(grid.dim() as f64);
    for b in grid.bounds() {
        put(b.lo);
        put(b.hi);
    }
    for &n in grid.cells_per_axis() {
        put(n as f64);
    }
    put(spec.p);
    put(spec.s);
    match &spec.family {
        KernelFamily::PureFractional { c } => {
            put(0.0);
            put(*c);
        }
        KernelFamily::Modulated { c1, c2, modulation } => {
            put(1.0);
            put(*c1);
            put(*c2);
            match modulation {
                Modulation::Constant(v) => {
                    put(0.0);
                    put(*v);
                }
                Modulation::Checkerboard { frequency, domain } => {
                    put(1.0);
                    put(*frequency as f64);
                    for a in &domain.axes[..domain.dim] {
                        put(a.lo);
                        put(a.hi);
                    }
                }
                Modulation::Custom(_) => return None,
            }
        }
    }
    put(opts.gauss_order as f64);
    put(opts.duffy_order as f64);
    put(opts.inner_order as f64);
    put(opts.radial_levels as f64);
    put(opts.max_depth as f64);
    put(opts.truncation_factor);
    Some(h.finalize().into())
}

pub fn write_cache(path: &Path, assembly: &KernelAssembly, key: &[u8; 32]) -> Result<()> {
    let n = assembly.len();
    let mut buf = Vec::with_capacity(48 + 8 * (n * n + n));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(key);
    for v in assembly.w_matrix().iter().chain(assembly.kappa()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

/// Reads a cache file, rejecting it unless its key and size match.
pub fn read_cache(path: &Path, grid: &Grid, spec: &KernelSpec, key: &[u8; 32]) -> Result<KernelAssembly> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let n = grid.len();
    let expected = 48 + 8 * (n * n + n);
    if bytes.len() != expected {
        return Err(Error::Cache(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let stored_n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if stored_n != n as u64 {
        return Err(Error::Cache(format!("cell count {stored_n} does not match grid ({n})")));
    }
    if &bytes[16..48] != key {
        return Err(Error::Cache("content key mismatch".into()));
    }
    let floats: Vec<f64> = bytes[48..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let (w, kappa) = floats.split_at(n * n);
    KernelAssembly::from_parts(grid.clone(), spec.p, spec.s, w.to_vec(), kappa.to_vec())
}

/// Loads the assembly from `dir` when a matching cache file exists, otherwise
/// assembles and writes one. Custom modulations bypass the cache.
pub fn assemble_cached(grid: &Grid, spec: &KernelSpec, opts: &AssemblyOptions, dir: &Path) -> Result<KernelAssembly> {
    let Some(key) = cache_key(grid, spec, opts) else {
        return assemble_with(grid, spec, opts);
    };
    let path: PathBuf = dir.join(format!("{}.kasm", hex::encode(key)));
    if path.exists() {
        if let Ok(a) = read_cache(&path, grid, spec, &key) {
            return Ok(a);
        }
    }
    let a = assemble_with(grid, spec, opts)?;
    fs::create_dir_all(dir)?;
    write_cache(&path, &a, &key)?;
    Ok(a)
}

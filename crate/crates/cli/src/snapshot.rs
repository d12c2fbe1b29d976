//! Binary field snapshots.
//!
//! Layout, all little-endian: magic `TNS2`, `u32` format version, `u32 n`, `u32 m`,
//! `f64` time, then for each of the `n` components the full box `{-m..m}^n` in
//! lexicographic order (first axis slowest), each coefficient as `(re, im)` `f64` pairs.

use std::fs;
use std::path::Path;

use tns_core::spectral::{FrequencyLattice, SpectralScalarField, SpectralVectorField};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"TNS2";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8;
/// Relative divergence tolerance used to restore the divergence-free flag on load.
const DIV_FREE_TOL: f64 = 1e-12;

pub fn encode_snapshot(u: &SpectralVectorField, t: f64) -> Vec<u8> {
    let lat = u.lattice();
    let mut out = Vec::with_capacity(HEADER_LEN + u.dim() * lat.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(u.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(lat.radius() as u32).to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    for c in u.components() {
        for z in c.coeffs() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

/// Decodes a snapshot, revalidating the coefficient tables. `path` is only used in messages.
pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<(SpectralVectorField, f64)> {
    let fail = |message: String| CliError::Snapshot {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(fail(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fail(format!("bad magic {:?}", &bytes[0..4])));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != VERSION {
        return Err(fail(format!("unsupported format version {version}")));
    }
    let (n, m) = (word(8) as usize, word(12) as usize);
    if n == 0 || n > 8 {
        return Err(fail(format!("implausible dimension n = {n}")));
    }
    let t = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let side = (2 * m + 1) as u128;
    let expected = HEADER_LEN as u128 + n as u128 * side.pow(n as u32) * 16;
    if bytes.len() as u128 != expected {
        return Err(fail(format!("expected {expected} bytes for n = {n}, m = {m}, found {}", bytes.len())));
    }
    let lat = FrequencyLattice::new(n, m);
    let mut pos = HEADER_LEN;
    let mut comps = Vec::with_capacity(n);
    for _ in 0..n {
        let mut coeffs = Vec::with_capacity(lat.len());
        for _ in 0..lat.len() {
            let re = f64::from_le_bytes(bytes[pos..pos + 8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(bytes[pos + 8..pos + 16].try_into().expect("8 bytes"));
            coeffs.push(tns_core::spectral::Complex64::new(re, im));
            pos += 16;
        }
        comps.push(SpectralScalarField::from_coeffs(&lat, coeffs).map_err(|e| fail(e.to_string()))?);
    }
    let mut u = SpectralVectorField::new(comps).map_err(|e| fail(e.to_string()))?;
    u.recheck_divergence_free(DIV_FREE_TOL);
    Ok((u, t))
}

pub fn save_snapshot(u: &SpectralVectorField, t: f64, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, encode_snapshot(u, t)).map_err(|e| CliError::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<(SpectralVectorField, f64)> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_snapshot(&bytes, path)
}

/// [`load_snapshot`] that also insists on the configured dimension.
pub fn load_snapshot_for(path: &Path, n: usize) -> Result<(SpectralVectorField, f64)> {
    let (u, t) = load_snapshot(path)?;
    if u.dim() != n {
        return Err(CliError::Snapshot {
            path: path.to_path_buf(),
            message: format!("snapshot has n = {}, configuration has n = {n}", u.dim()),
        });
    }
    Ok((u, t))
}

//! Binary dipole-trace files.
//!
//! Layout: 8-byte magic, u32 format version, u64 header length, JSON header,
//! u64 sample count, then eight little-endian f64 columns
//! (t, Re/Im mu_bb, Re/Im mu_aa, Re/Im mu_ab, E_cl).

use num_complex::Complex64 as C64;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::dipole::{DipoleTrace, TraceMeta, TRACE_FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::field::{Molecule, Pulse};
use crate::grid::SpatialGrid;

const MAGIC: &[u8; 8] = b"HHGQOTRC";

pub fn encode_trace(trace: &DipoleTrace) -> Result<Vec<u8>> {
    let header = serde_json::to_vec(&trace.meta).map_err(|e| Error::Format(e.to_string()))?;
    let n = trace.len();
    let mut out = Vec::with_capacity(32 + header.len() + n * 64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&TRACE_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(&header);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    let mut put = |it: &mut dyn Iterator<Item = f64>| {
        for v in it {
            out.extend_from_slice(&v.to_le_bytes());
        }
    };
    put(&mut trace.times.iter().copied());
    for col in [&trace.mu_bb, &trace.mu_aa, &trace.mu_ab] {
        put(&mut col.iter().map(|z| z.re));
        put(&mut col.iter().map(|z| z.im));
    }
    put(&mut trace.e_cl.iter().copied());
    Ok(out)
}

pub fn decode_trace(bytes: &[u8]) -> Result<DipoleTrace> {
    let mut cur = bytes;
    let mut take = |n: usize| -> Result<&[u8]> {
        if cur.len() < n {
            return Err(Error::Format("unexpected end of file".into()));
        }
        let (head, tail) = cur.split_at(n);
        cur = tail;
        Ok(head)
    };
    if take(8)? != MAGIC {
        return Err(Error::Format("not a dipole trace file".into()));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
    if version != TRACE_FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported trace version {version}")));
    }
    let header_len = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
    let meta: TraceMeta = serde_json::from_slice(take(header_len)?).map_err(|e| Error::Format(e.to_string()))?;
    let n = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
    let mut column = || -> Result<Vec<f64>> {
        Ok(take(n * 8)?.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    };
    let times = column()?;
    let mut complex = || -> Result<Vec<C64>> {
        let re = column()?;
        let im = column()?;
        Ok(re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)).collect())
    };
    let mu_bb = complex()?;
    let mu_aa = complex()?;
    let mu_ab = complex()?;
    let e_cl = column()?;
    if !cur.is_empty() {
        return Err(Error::Format("trailing bytes after trace data".into()));
    }
    let trace = DipoleTrace { times, mu_bb, mu_aa, mu_ab, e_cl, meta };
    trace.validate()?;
    Ok(trace)
}

pub fn write_trace(path: &Path, trace: &DipoleTrace) -> Result<()> {
    let bytes = encode_trace(trace)?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    // Write then rename so a crashed run never leaves a truncated cache entry.
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<DipoleTrace> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_trace(&bytes)
}

/// Everything that determines a trace, used to name cache entries.
pub fn trace_key(molecule: &Molecule, pulse: &Pulse, grid: &SpatialGrid, dt: f64) -> String {
    let mut h = Sha256::new();
    h.update(TRACE_FORMAT_VERSION.to_le_bytes());
    for v in [
        molecule.interatomic_distance_au,
        molecule.softcore_param_au,
        pulse.wavelength_nm,
        pulse.peak_intensity_w_cm2,
        pulse.carrier_phase,
        dt,
    ] {
        h.update(v.to_le_bytes());
    }
    h.update(pulse.n_cycles.to_le_bytes());
    h.update(grid.fingerprint().as_bytes());
    hex::encode(&h.finalize()[..12])
}

pub fn trace_path(cache_dir: &Path, molecule: &Molecule, pulse: &Pulse, grid: &SpatialGrid, dt: f64) -> PathBuf {
    cache_dir.join(format!(
        "trace_R{:.3}_{}.bin",
        molecule.interatomic_distance_au,
        trace_key(molecule, pulse, grid, dt)
    ))
}

/// SHA-256 of a byte slice as lowercase hex.
pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

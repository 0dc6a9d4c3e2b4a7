//! Binary field persistence: fixed little-endian header + complex64
//! coefficient block, with JSON sidecars for enhanced noise and spectra.

use crate::error::CoreError;
use crate::field::{Field, TorusGrid};
use crate::noise::{EnhancedNoise, MollifierSpec};
use crate::operator::SpectrumResult;
use crate::Result;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"ANDRFLD1";

/// Writes a field snapshot: magic, dim, N, L, label, then the coefficients
/// in storage order as little-endian (re, im) f64 pairs.
pub fn write_field(path: &Path, field: &Field<f64>) -> Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.len().to_le_bytes())?;
    let label = field.label().as_bytes();
    w.write_all(&(label.len() as u32).to_le_bytes())?;
    w.write_all(label)?;
    for c in field.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_exact_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a field snapshot back; the coefficient block is re-validated by the
/// field constructor (length, Hermitian symmetry, clean Nyquist row).
pub fn read_field(path: &Path) -> Result<Field<f64>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::SnapshotFormat(format!(
            "{}: bad magic {magic:?}",
            path.display()
        )));
    }
    let dim = read_exact_u32(&mut r)? as usize;
    let n = read_exact_u32(&mut r)? as usize;
    let l = read_exact_f64(&mut r)?;
    if dim != 2 {
        return Err(CoreError::SnapshotFormat(format!("unsupported dim {dim}")));
    }
    let grid = TorusGrid::new_2d(n, l)?;
    let label_len = read_exact_u32(&mut r)? as usize;
    if label_len > 1 << 16 {
        return Err(CoreError::SnapshotFormat(format!("label length {label_len}")));
    }
    let mut label = vec![0u8; label_len];
    r.read_exact(&mut label)?;
    let label = String::from_utf8(label)
        .map_err(|e| CoreError::SnapshotFormat(format!("label not UTF-8: {e}")))?;
    let mut coeffs = Vec::with_capacity(grid.modes());
    for _ in 0..grid.modes() {
        let re = read_exact_f64(&mut r)?;
        let im = read_exact_f64(&mut r)?;
        coeffs.push(Complex::new(re, im));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(CoreError::SnapshotFormat("trailing bytes after block".into()));
    }
    Field::from_coeffs(grid, coeffs, label)
}

#[derive(Serialize, Deserialize)]
struct EnhancedSidecar {
    seed: u64,
    mollifier: MollifierSpec,
    c_eps: f64,
    warnings: Vec<String>,
}

/// Writes `<base>.xi.fld`, `<base>.xi2.fld`, and `<base>.json`.
pub fn write_enhanced(base: &Path, e: &EnhancedNoise) -> Result<()> {
    write_field(&base.with_extension("xi.fld"), &e.xi_eps)?;
    write_field(&base.with_extension("xi2.fld"), &e.xi2_eps)?;
    let sidecar = EnhancedSidecar {
        seed: e.seed,
        mollifier: e.mollifier,
        c_eps: e.c_eps,
        warnings: e.warnings.clone(),
    };
    let f = BufWriter::new(File::create(base.with_extension("json"))?);
    serde_json::to_writer_pretty(f, &sidecar)?;
    Ok(())
}

/// Reads the triple written by [`write_enhanced`].
pub fn read_enhanced(base: &Path) -> Result<EnhancedNoise> {
    let xi_eps = read_field(&base.with_extension("xi.fld"))?;
    let xi2_eps = read_field(&base.with_extension("xi2.fld"))?;
    xi_eps.check_same_grid(&xi2_eps)?;
    let f = BufReader::new(File::open(base.with_extension("json"))?);
    let sidecar: EnhancedSidecar = serde_json::from_reader(f)?;
    Ok(EnhancedNoise {
        xi_eps,
        xi2_eps,
        c_eps: sidecar.c_eps,
        mollifier: sidecar.mollifier,
        seed: sidecar.seed,
        warnings: sidecar.warnings,
    })
}

#[derive(Serialize, Deserialize)]
pub struct SpectrumSidecar {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub eigenvector_files: Vec<String>,
}

/// Writes `<base>.json` and, when `with_vectors`, `<base>.v<k>.fld` per
/// eigenvector.
pub fn write_spectrum(base: &Path, s: &SpectrumResult, with_vectors: bool) -> Result<()> {
    let mut files = Vec::new();
    if with_vectors {
        for (k, v) in s.eigenvectors.iter().enumerate() {
            let p = base.with_extension(format!("v{k}.fld"));
            write_field(&p, v)?;
            files.push(p.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    let sidecar = SpectrumSidecar {
        eigenvalues: s.eigenvalues.clone(),
        residuals: s.residuals.clone(),
        iterations: s.iterations,
        restarts: s.restarts,
        eigenvector_files: files,
    };
    let f = BufWriter::new(File::create(base.with_extension("json"))?);
    serde_json::to_writer_pretty(f, &sidecar)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Transformer;
    use crate::noise::{enhance, sample_white_noise};
    use crate::paracalc::synth_field;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("anderson-snapshot-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn field_round_trip_is_bitwise() {
        let grid = TorusGrid::new_2d(32, 2.0).unwrap();
        let f = synth_field::<f64>(grid, 0.8, 42).unwrap();
        let p = tmp("roundtrip.fld");
        write_field(&p, &f).unwrap();
        let g = read_field(&p).unwrap();
        assert_eq!(f.grid(), g.grid());
        assert_eq!(f.label(), g.label());
        assert_eq!(f.coeffs(), g.coeffs(), "coefficients must round-trip exactly");
    }

    #[test]
    fn corrupted_magic_rejected() {
        let p = tmp("corrupt.fld");
        std::fs::write(&p, b"NOTAFLD0rest").unwrap();
        match read_field(&p) {
            Err(CoreError::SnapshotFormat(msg)) => {
                assert!(msg.contains("bad magic"), "message: {msg}")
            }
            other => panic!("want SnapshotFormat, got {other:?}"),
        }
    }

    #[test]
    fn truncated_block_rejected() {
        let grid = TorusGrid::new_2d(16, 1.0).unwrap();
        let f = synth_field::<f64>(grid, 0.5, 7).unwrap();
        let p = tmp("trunc.fld");
        write_field(&p, &f).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() - 9]).unwrap();
        assert!(read_field(&p).is_err(), "truncated snapshot must fail");
    }

    #[test]
    fn enhanced_round_trip_preserves_everything() {
        let grid = TorusGrid::new_2d(32, 1.0).unwrap();
        let noise = sample_white_noise(grid, 99);
        let m = MollifierSpec::sharp(0.02).unwrap();
        let mut tf = Transformer::new();
        let e = enhance(&mut tf, &noise, &m).unwrap();
        let base = tmp("enhanced");
        write_enhanced(&base, &e).unwrap();
        let back = read_enhanced(&base).unwrap();
        assert_eq!(e.seed, back.seed);
        assert_eq!(e.c_eps, back.c_eps, "c_eps must survive exactly");
        assert_eq!(e.mollifier, back.mollifier);
        assert_eq!(e.xi_eps.coeffs(), back.xi_eps.coeffs());
        assert_eq!(e.xi2_eps.coeffs(), back.xi2_eps.coeffs());
        assert_eq!(e.warnings, back.warnings);
    }

    #[test]
    fn spectrum_sidecar_lists_exactly_the_written_vectors() {
        use crate::operator::{lowest_eigenpairs, HamiltonianOp};
        let grid = TorusGrid::new_2d(16, 1.0).unwrap();
        let mut op = HamiltonianOp::zero_noise(grid).unwrap();
        let s = lowest_eigenpairs(&mut op, 2, 1e-10, 1).unwrap();
        let base = tmp("spec");
        write_spectrum(&base, &s, true).unwrap();
        let sidecar: SpectrumSidecar = serde_json::from_reader(
            File::open(base.with_extension("json")).unwrap(),
        )
        .unwrap();
        assert_eq!(sidecar.eigenvalues, s.eigenvalues);
        assert_eq!(sidecar.eigenvector_files.len(), 2);
        for f in &sidecar.eigenvector_files {
            let p = base.parent().unwrap().join(f);
            assert!(p.exists(), "listed vector file {f} missing");
            read_field(&p).unwrap();
        }
    }
}

//! Parameter checkpoints: a JSON manifest followed by flat binary sections
//! of little-endian f64 values. Round-trips are bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tensor::Parameter;
use super::{NnError, Result};

const MAGIC: &[u8; 8] = b"STRECKP1";

#[derive(Debug, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub shape: Vec<usize>,
    /// f64 count offset into the data block.
    pub offset: usize,
    pub count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    sections: Vec<Section>,
}

pub fn save_params(path: &Path, params: &[&Parameter]) -> Result<()> {
    let mut sections = Vec::with_capacity(params.len());
    let mut offset = 0;
    for p in params {
        sections.push(Section {
            name: p.name().to_string(),
            shape: p.shape().to_vec(),
            offset,
            count: p.len(),
        });
        offset += p.len();
    }
    let manifest = serde_json::to_vec(&Manifest { version: 1, sections })
        .map_err(|e| NnError::Checkpoint(e.to_string()))?;
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(manifest.len() as u64).to_le_bytes())?;
    out.write_all(&manifest)?;
    for p in params {
        for v in p.values_storage().borrow().iter() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Load every section: (name, shape, values).
pub fn load_params(path: &Path) -> Result<Vec<(String, Vec<usize>, Vec<f64>)>> {
    let mut input = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NnError::Checkpoint(format!("bad magic in {}", path.display())));
    }
    let mut len_bytes = [0u8; 8];
    input.read_exact(&mut len_bytes)?;
    let manifest_len = u64::from_le_bytes(len_bytes) as usize;
    let mut manifest_bytes = vec![0u8; manifest_len];
    input.read_exact(&mut manifest_bytes)?;
    let manifest: Manifest = serde_json::from_slice(&manifest_bytes)
        .map_err(|e| NnError::Checkpoint(format!("bad manifest: {e}")))?;
    let mut out = Vec::with_capacity(manifest.sections.len());
    for section in manifest.sections {
        let expect: usize = section.shape.iter().product();
        if expect != section.count {
            return Err(NnError::Checkpoint(format!(
                "section {} shape {:?} does not fit count {}",
                section.name, section.shape, section.count
            )));
        }
        let mut values = Vec::with_capacity(section.count);
        let mut buf = [0u8; 8];
        for _ in 0..section.count {
            input.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        out.push((section.name, section.shape, values));
    }
    Ok(out)
}

/// FNV-1a hash of the file bytes; used for determinism checks.
pub fn checkpoint_file_hash(path: &Path) -> Result<u64> {
    let bytes = std::fs::read(path)?;
    Ok(crate::corpus::fnv1a64(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("test.ckpt");
        let a = Parameter::new("a", vec![2, 3], vec![1.0, -2.5, 3.25, 0.0, f64::MIN_POSITIVE, 1e300])
            .unwrap();
        let b = Parameter::new("b", vec![2], vec![0.1, 0.2]).unwrap();
        save_params(&path, &[&a, &b]).unwrap();
        let loaded = load_params(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].0, "a");
        assert_eq!(loaded[0].1, vec![2, 3]);
        for (x, y) in loaded[0].2.iter().zip(a.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(loaded[1].2, b.values());
    }

    #[test]
    fn identical_saves_hash_identically() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("one.ckpt");
        let p2 = dir.path().join("two.ckpt");
        let a = Parameter::new("a", vec![3], vec![0.5, -0.5, 42.0]).unwrap();
        save_params(&p1, &[&a]).unwrap();
        save_params(&p2, &[&a]).unwrap();
        assert_eq!(checkpoint_file_hash(&p1).unwrap(), checkpoint_file_hash(&p2).unwrap());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.ckpt");
        std::fs::write(&path, b"not a checkpoint").unwrap();
        assert!(load_params(&path).is_err());
    }
}

//! Output directory, run manifests and number formatting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{config, io, Result};

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    /// SHA-256 of the configuration bytes.
    pub config_digest: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(io(path))
}

/// Collects files written under one directory.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(io(root))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Writes `name` under the root. Names must be plain file names.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let plain = Path::new(name).file_name().map(|f| f == name).unwrap_or(false);
        if !plain {
            return Err(config(format!("output name {name:?} must be a plain file name")));
        }
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(io(&path))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn finish(
        mut self,
        command: &str,
        seed: Option<u64>,
        config_bytes: &[u8],
        inputs: Vec<InputDigest>,
    ) -> Result<()> {
        let manifest = RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config_digest: sha256_hex(config_bytes),
            inputs,
            outputs: self.written.clone(),
        };
        self.write(&format!("{command}.manifest.json"), &to_json(&manifest)?)?;
        Ok(())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(config)?;
    v.push(b'\n');
    Ok(v)
}

/// Rounds to 12 significant digits and prints the shortest form that reads
/// back to the rounded value.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{r}")
}

pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds_and_trims() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(sig12(-1234.56789012345), "-1234.56789012");
        assert_eq!(sig12(3.0e-5), "0.00003");
    }

    #[test]
    fn fixed6_has_no_negative_zero() {
        assert_eq!(fixed6(-1e-9), "0.000000");
        assert_eq!(fixed6(12.041199826559), "12.041200");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn out_dir_rejects_paths() {
        let dir = std::env::temp_dir().join("asibeam-outdir-test");
        let mut out = OutDir::create(&dir).unwrap();
        assert!(out.write("../x.csv", b"").is_err());
        assert!(out.write("sub/x.csv", b"").is_err());
    }
}

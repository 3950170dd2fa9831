//! Content-addressed disk cache for per-realization dipole spectra.
//!
//! Keys are SHA-256 hashes of the canonical JSON serialization of
//! `(FieldRealization, AtomSpec, NumericsSpec, max_order)`, so a hit can only
//! ever return exactly what a cold run would have computed. Writes go to a
//! temporary name followed by an atomic rename; concurrent writers of the
//! same key are harmless (last writer wins with identical bytes).

use crate::driver::FieldRealization;
use crate::sfa::{AtomSpec, NumericsSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io;
use std::path::{Path, PathBuf};

/// Squared dipole magnitudes per polarization on the harmonic-order grid,
/// trimmed to orders below the requested ceiling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CachedSpectrum {
    pub omega0: f64,
    /// Frequency spacing of the bins (a.u.); bin `k` sits at `k * domega`.
    pub domega: f64,
    pub abs2_par: Vec<f64>,
    pub abs2_perp: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    /// Opens (and creates if needed) a cache directory.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(SpectrumCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Content hash of one realization job.
    pub fn key(
        realization: &FieldRealization,
        atom: &AtomSpec,
        num: &NumericsSpec,
        max_order: f64,
    ) -> String {
        #[derive(Serialize)]
        struct KeyPayload<'a> {
            realization: &'a FieldRealization,
            atom: &'a AtomSpec,
            num: &'a NumericsSpec,
            max_order: f64,
        }
        let bytes = serde_json::to_vec(&KeyPayload { realization, atom, num, max_order })
            .expect("serializable key");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        hex_string(&hasher.finalize())
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Returns the cached value, or `None` on miss or unreadable entry.
    /// Corrupt entries are treated as misses so callers recompute.
    pub fn get(&self, key: &str) -> Option<CachedSpectrum> {
        let bytes = std::fs::read(self.path_for(key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    pub fn put(&self, key: &str, value: &CachedSpectrum) -> io::Result<()> {
        let bytes = serde_json::to_vec(value).expect("serializable value");
        let final_path = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".{key}.tmp.{}",
            std::process::id()
        ));
        std::fs::write(&tmp, &bytes)?;
        std::fs::rename(&tmp, &final_path)
    }
}

pub fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// SHA-256 hex digest of a byte slice, for output metadata.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_string(&hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn job() -> (FieldRealization, AtomSpec, NumericsSpec) {
        let r = FieldRealization {
            eps_par: C64::new(0.053, 0.0),
            eps_perp: C64::new(0.0, 0.053),
            omega: 0.057,
        };
        (r, AtomSpec::hydrogen(), NumericsSpec::for_omega(0.057))
    }

    #[test]
    fn key_is_stable_and_sensitive() {
        let (r, atom, num) = job();
        let k1 = SpectrumCache::key(&r, &atom, &num, 160.0);
        let k2 = SpectrumCache::key(&r, &atom, &num, 160.0);
        assert_eq!(k1, k2);
        let mut r2 = r;
        r2.eps_perp += C64::new(1e-12, 0.0);
        assert_ne!(k1, SpectrumCache::key(&r2, &atom, &num, 160.0));
        assert_ne!(k1, SpectrumCache::key(&r, &atom, &num, 150.0));
    }

    #[test]
    fn round_trip_and_corrupt_entry() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectrumCache::open(dir.path()).unwrap();
        let value = CachedSpectrum {
            omega0: 0.057,
            domega: 0.0114,
            abs2_par: vec![1.0, 2.0, 3.0],
            abs2_perp: vec![0.5, 0.25, 0.125],
        };
        let key = "abc123";
        assert!(cache.get(key).is_none());
        cache.put(key, &value).unwrap();
        let back = cache.get(key).unwrap();
        assert_eq!(back.abs2_par, value.abs2_par);
        assert_eq!(back.abs2_perp, value.abs2_perp);

        std::fs::write(cache.path_for(key), b"{ not json").unwrap();
        assert!(cache.get(key).is_none());
    }
}

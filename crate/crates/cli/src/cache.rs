//! JSON artifact cache keyed by a SHA-256 of the request.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "FRACTAL_SPECTRA_CACHE";

#[derive(Serialize, Deserialize)]
struct Entry {
    key: Value,
    payload: Value,
}

#[derive(Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
    pub warnings: Vec<String>,
}

impl Cache {
    /// Uses `dir` if given, else `$FRACTAL_SPECTRA_CACHE`, else `~/.cache/fractal-spectra`.
    pub fn open(dir: Option<PathBuf>, disabled: bool) -> Self {
        let mut cache = Cache { dir: None, warnings: Vec::new() };
        if disabled {
            return cache;
        }
        let dir = dir
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache").join("fractal-spectra")));
        let Some(dir) = dir else { return cache };
        match fs::create_dir_all(&dir) {
            Ok(()) => cache.dir = Some(dir),
            Err(e) => cache.warnings.push(format!("cache disabled: cannot create {}: {e}", dir.display())),
        }
        cache
    }

    fn path_for(&self, key: &Value) -> Option<PathBuf> {
        let digest = Sha256::digest(key.to_string().as_bytes());
        self.dir.as_ref().map(|d| d.join(format!("{}.json", hex::encode(digest))))
    }

    pub fn get<T: DeserializeOwned>(&mut self, key: &Value) -> Option<T> {
        let path = self.path_for(key)?;
        let text = fs::read_to_string(&path).ok()?;
        let parsed = serde_json::from_str::<Entry>(&text)
            .ok()
            .filter(|e| &e.key == key)
            .and_then(|e| serde_json::from_value(e.payload).ok());
        if parsed.is_none() {
            self.warnings.push(format!("ignoring unreadable cache entry {}; recomputing", path.display()));
        }
        parsed
    }

    pub fn put<T: Serialize>(&mut self, key: &Value, payload: &T) {
        let Some(path) = self.path_for(key) else { return };
        let entry = match serde_json::to_value(payload) {
            Ok(payload) => Entry { key: key.clone(), payload },
            Err(e) => {
                self.warnings.push(format!("cannot serialize cache entry: {e}"));
                return;
            }
        };
        // Write then rename so a concurrent reader never sees half a file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let text = serde_json::to_string(&entry).expect("entry holds plain JSON values");
        if let Err(e) = fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, &path)) {
            let _ = fs::remove_file(&tmp);
            self.warnings.push(format!("cache disabled: cannot write {}: {e}", path.display()));
            self.dir = None;
        }
    }

    /// Returns the cached value for `key` or computes and stores it.
    pub fn get_or_compute<T, E>(&mut self, key: Value, compute: impl FnOnce() -> Result<T, E>) -> Result<(T, bool), E>
    where
        T: Serialize + DeserializeOwned,
    {
        if let Some(v) = self.get(&key) {
            return Ok((v, true));
        }
        let v = compute()?;
        self.put(&key, &v);
        Ok((v, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = Cache::open(Some(dir.path().to_path_buf()), false);
        let key = json!({"module": "t", "depth": 3});
        let (v, hit) = c.get_or_compute(key.clone(), || Ok::<_, ()>(vec![1.5, 2.5])).unwrap();
        assert!(!hit && v == vec![1.5, 2.5]);
        let (v, hit) = c.get_or_compute(key.clone(), || Ok::<_, ()>(vec![0.0])).unwrap();
        assert!(hit && v == vec![1.5, 2.5]);
        let other = json!({"module": "t", "depth": 4});
        assert!(c.get::<Vec<f64>>(&other).is_none());
        fs::write(c.path_for(&key).unwrap(), "{not json").unwrap();
        let (v, hit) = c.get_or_compute(key, || Ok::<_, ()>(vec![7.0])).unwrap();
        assert!(!hit && v == vec![7.0]);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn disabled_cache_computes() {
        let mut c = Cache::open(None, true);
        assert!(c.dir.is_none());
        let (v, hit) = c.get_or_compute(json!(1), || Ok::<_, ()>(3u32)).unwrap();
        assert!(!hit && v == 3);
    }
}

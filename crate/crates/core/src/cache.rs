//! Content-addressed result cache.
//!
//! An entry lives at `<dir>/<sha256 of the key>.json` and records the full
//! key, so a hash collision reads as a miss. Entries that fail to parse or
//! whose value digest does not match are removed and treated as misses.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever a cached output format or algorithm changes.
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub version: u32,
    pub prime: u64,
    pub vmax: usize,
    pub degree_bound: i64,
    pub operation: String,
    /// Hex sha256 of the canonical input description.
    pub input: String,
}

impl CacheKey {
    pub fn new(prime: u64, vmax: usize, degree_bound: i64, operation: &str, input: &str) -> Self {
        CacheKey {
            version: ARTIFACT_VERSION,
            prime,
            vmax,
            degree_bound,
            operation: operation.to_string(),
            input: sha256_hex(input.as_bytes()),
        }
    }

    fn canonical(&self) -> String {
        format!(
            "v{}|p{}|N{}|D{}|{}|{}",
            self.version, self.prime, self.vmax, self.degree_bound, self.operation, self.input
        )
    }

    pub fn address(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub value: String,
    pub digest: String,
    pub created: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.address()))
    }

    pub fn get(&self, key: &CacheKey) -> Option<String> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(e) if e.digest == sha256_hex(e.value.as_bytes()) => (e.key == *key).then_some(e.value),
            _ => {
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    /// Writes through a temporary file and a rename, so readers never see
    /// half an entry.
    pub fn put(&self, key: &CacheKey, value: &str) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let entry =
            CacheEntry { key: key.clone(), value: value.to_string(), digest: sha256_hex(value.as_bytes()), created };
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string(&entry).map_err(std::io::Error::other)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(tmp, path)
    }

    /// Looks `key` up, computing and storing the value on a miss.
    pub fn get_or_compute<E>(&self, key: &CacheKey, f: impl FnOnce() -> Result<String, E>) -> Result<String, E> {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = f()?;
        let _ = self.put(key, &v);
        Ok(v)
    }
}

/// A single thread that owns all cache writes; workers send entries to it.
pub struct CacheWriter {
    tx: Option<mpsc::Sender<(CacheKey, String)>>,
    handle: Option<thread::JoinHandle<usize>>,
}

impl CacheWriter {
    pub fn spawn(cache: Cache) -> Self {
        let (tx, rx) = mpsc::channel::<(CacheKey, String)>();
        let handle = thread::spawn(move || {
            let mut written = 0;
            for (k, v) in rx {
                if cache.put(&k, &v).is_ok() {
                    written += 1;
                }
            }
            written
        });
        CacheWriter { tx: Some(tx), handle: Some(handle) }
    }

    pub fn sender(&self) -> mpsc::Sender<(CacheKey, String)> {
        self.tx.clone().expect("writer is open")
    }

    /// Waits for pending writes; returns how many succeeded.
    pub fn finish(mut self) -> usize {
        self.tx.take();
        self.handle.take().map_or(0, |h| h.join().unwrap_or(0))
    }
}

impl Drop for CacheWriter {
    fn drop(&mut self) {
        self.tx.take();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(op: &str) -> CacheKey {
        CacheKey::new(3, 2, 24, op, "builtin:A")
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        assert_eq!(c.get(&key("ext")), None);
        c.put(&key("ext"), "0\t0\t1\n").unwrap();
        assert_eq!(c.get(&key("ext")).as_deref(), Some("0\t0\t1\n"));
        assert_eq!(c.get(&key("chart")), None);
    }

    #[test]
    fn version_bump_misses() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        c.put(&key("ext"), "x").unwrap();
        let mut k = key("ext");
        k.version += 1;
        assert_eq!(c.get(&k), None);
    }

    #[test]
    fn collision_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let a = key("ext");
        let mut b = key("other");
        c.put(&b, "wrong").unwrap();
        // Pretend b hashes to a's address.
        fs::rename(c.path(&b), c.path(&a)).unwrap();
        assert_eq!(c.get(&a), None);
        b.operation = "ext".into();
        assert_eq!(c.get(&b), None);
    }

    #[test]
    fn corrupt_entries_are_evicted() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let k = key("ext");
        c.put(&k, "value").unwrap();
        let path = c.path(&k);
        let text = fs::read_to_string(&path).unwrap().replace("value", "valve");
        fs::write(&path, text).unwrap();
        assert_eq!(c.get(&k), None);
        assert!(!path.exists());
        fs::write(&path, "{not json").unwrap();
        assert_eq!(c.get(&k), None);
        assert!(!path.exists());
        let v = c.get_or_compute(&k, || Ok::<_, ()>("fresh".to_string())).unwrap();
        assert_eq!(v, "fresh");
        assert_eq!(c.get(&k).as_deref(), Some("fresh"));
    }

    #[test]
    fn writer_thread_serializes_puts() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let w = CacheWriter::spawn(c.clone());
        thread::scope(|s| {
            for i in 0..8 {
                let tx = w.sender();
                s.spawn(move || tx.send((key(&format!("op{i}")), format!("v{i}"))).unwrap());
            }
        });
        assert_eq!(w.finish(), 8);
        for i in 0..8 {
            assert_eq!(c.get(&key(&format!("op{i}"))), Some(format!("v{i}")));
        }
    }
}

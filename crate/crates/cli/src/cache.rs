//! On-disk cache for theta certificates and per-prime closure results.
//!
//! Each entry is a JSON envelope holding the payload as a string together
//! with its SHA-256. Entries that fail to parse, carry another version
//! salt or whose checksum does not match are treated as misses and
//! rewritten. Writes go to a unique temporary file that is renamed over the
//! target, so concurrent writers of the same key never expose a torn file.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever an algorithm change could alter cached results.
pub const CACHE_SALT: &str = concat!("trigen-cache/", env!("CARGO_PKG_VERSION"), "/1");

pub const CACHE_ENV: &str = "TRIGEN_CACHE_DIR";

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Serialize, Deserialize)]
struct Envelope {
    salt: String,
    sha256: String,
    payload: String,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Hash of a salted, kind-prefixed key description.
pub fn key(kind: &str, parts: &[&str]) -> String {
    let mut text = format!("{CACHE_SALT}\n{kind}");
    for p in parts {
        text.push('\n');
        text.push_str(p);
    }
    format!("{kind}-{}", &digest(&text)[..32])
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Cache> {
        std::fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        let env: Envelope = serde_json::from_str(&text).ok()?;
        if env.salt != CACHE_SALT || env.sha256 != digest(&env.payload) {
            return None;
        }
        serde_json::from_str(&env.payload).ok()
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) {
        let Ok(payload) = serde_json::to_string(value) else {
            return;
        };
        let env = Envelope {
            salt: CACHE_SALT.to_string(),
            sha256: digest(&payload),
            payload,
        };
        let Ok(text) = serde_json::to_string(&env) else {
            return;
        };
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        if std::fs::write(&tmp, text).is_ok() && std::fs::rename(&tmp, self.path(key)).is_err() {
            let _ = std::fs::remove_file(&tmp);
        }
    }

    /// Cached value for `key`, or the result of `compute`, stored on success.
    pub fn get_or_insert<T, E>(&self, key: &str, compute: impl FnOnce() -> Result<T, E>) -> Result<(T, bool), E>
    where
        T: Serialize + DeserializeOwned,
    {
        if let Some(v) = self.get(key) {
            return Ok((v, true));
        }
        let v = compute()?;
        self.put(key, &v);
        Ok((v, false))
    }
}

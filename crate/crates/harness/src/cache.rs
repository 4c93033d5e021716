//! Append-only JSONL response cache keyed by a SHA-256 of the endpoint
//! descriptor, prompt and decoding parameters.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::endpoint::ModelEndpoint;
use crate::error::{file_err, Result};

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    response: String,
}

struct Inner {
    map: HashMap<String, String>,
    file: Option<File>,
}

pub struct ResponseCache {
    inner: Mutex<Inner>,
    path: Option<PathBuf>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        Self {
            inner: Mutex::new(Inner {
                map: HashMap::new(),
                file: None,
            }),
            path: None,
        }
    }

    /// Opens (creating if needed) a cache file and loads its entries. A
    /// truncated last line from an interrupted run is ignored.
    pub fn open(path: &Path) -> Result<Self> {
        let mut map = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(file_err(path))?);
            for line in reader.lines() {
                let line = line?;
                if let Ok(e) = serde_json::from_str::<Entry>(&line) {
                    map.insert(e.key, e.response);
                }
            }
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(file_err(dir))?;
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(file_err(path))?;
        let bytes = std::fs::read(path).map_err(file_err(path))?;
        if bytes.last().is_some_and(|&b| b != b'\n') {
            file.write_all(b"\n")?;
        }
        Ok(Self {
            inner: Mutex::new(Inner {
                map,
                file: Some(file),
            }),
            path: Some(path.to_path_buf()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.inner.lock().unwrap().map.get(key).cloned()
    }

    pub fn insert(&self, key: &str, response: &str) -> Result<()> {
        let mut inner = self.inner.lock().unwrap();
        if inner.map.contains_key(key) {
            return Ok(());
        }
        if let Some(f) = inner.file.as_mut() {
            let line = serde_json::to_string(&Entry {
                key: key.to_string(),
                response: response.to_string(),
            })?;
            writeln!(f, "{line}")?;
            f.flush()?;
        }
        inner.map.insert(key.to_string(), response.to_string());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Cache key for one request.
pub fn cache_key(endpoint: &ModelEndpoint, prompt: &str) -> String {
    let material = serde_json::json!({
        "endpoint": endpoint.descriptor(),
        "prompt": prompt,
        "temperature": endpoint.temperature,
        "max_tokens": endpoint.max_tokens,
        "stop": endpoint.stop,
    });
    Sha256::digest(material.to_string().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::backend::sha256_hex;
use crate::types::Instruction;

use super::{Translation, TranslatorError};

/// Cache key: hash of the rendered prompt, instruction text, backend id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub prompt_hash: String,
    pub instruction: String,
    pub backend_id: String,
}

impl CacheKey {
    pub fn new(rendered_prompt: &str, instruction: &str, backend_id: &str) -> Self {
        CacheKey {
            prompt_hash: sha256_hex(rendered_prompt.as_bytes()),
            instruction: instruction.to_string(),
            backend_id: backend_id.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    #[serde(flatten)]
    key: CacheKey,
    reasoning: String,
    translation: String,
}

type Slot = Arc<Mutex<Option<Translation>>>;

/// Translation cache shared across concurrently running episodes. Writers are
/// serialized per key: concurrent lookups of the same key wait for the first
/// computation instead of repeating it. With a backing file every new entry
/// is appended as one JSON line.
#[derive(Debug, Default)]
pub struct TranslationCache {
    slots: Mutex<HashMap<CacheKey, Slot>>,
    file: Option<Mutex<File>>,
    path: Option<PathBuf>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl TranslationCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or creates) a persistent cache file and loads its entries.
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let mut slots = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: CacheLine = serde_json::from_str(&line)
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
                let translated = Instruction::translated(entry.translation, entry.reasoning.clone())
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
                slots.insert(
                    entry.key,
                    Arc::new(Mutex::new(Some(Translation {
                        reasoning: entry.reasoning,
                        translated,
                    }))),
                );
            }
        }
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(TranslationCache {
            slots: Mutex::new(slots),
            file: Some(Mutex::new(file)),
            path: Some(path.to_path_buf()),
            ..Default::default()
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.slots
            .lock()
            .unwrap()
            .values()
            .filter(|s| s.lock().unwrap().is_some())
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn get(&self, key: &CacheKey) -> Option<Translation> {
        let slot = self.slots.lock().unwrap().get(key).cloned()?;
        let guard = slot.lock().unwrap();
        guard.clone()
    }

    /// Returns the cached translation for `key`, computing and storing it
    /// with `compute` on a miss. Errors are not cached.
    pub fn get_or_translate(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<Translation, TranslatorError>,
    ) -> Result<Translation, TranslatorError> {
        let slot = self
            .slots
            .lock()
            .unwrap()
            .entry(key.clone())
            .or_default()
            .clone();
        let mut guard = slot.lock().unwrap();
        if let Some(t) = guard.as_ref() {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(t.clone());
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let t = compute()?;
        if let Some(file) = &self.file {
            let line = CacheLine {
                key: key.clone(),
                reasoning: t.reasoning.clone(),
                translation: t.translated.text().to_string(),
            };
            let mut f = file.lock().unwrap();
            let mut bytes = serde_json::to_vec(&line).expect("cache line serializes");
            bytes.push(b'\n');
            if let Err(e) = f.write_all(&bytes) {
                log::warn!("could not persist translation cache entry: {e}");
            }
        }
        *guard = Some(t.clone());
        Ok(t)
    }
}

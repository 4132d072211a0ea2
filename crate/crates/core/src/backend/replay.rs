use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{BackendError, CompletionBackend, CompletionRequest, KEY_SCHEME};

pub const RECORD_FORMAT_VERSION: u32 = 1;

/// One recorded call. The timestamp is not part of the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub key: String,
    pub request: CompletionRequest,
    pub response: String,
    pub timestamp: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordHeader {
    format: String,
    version: u32,
    key_scheme: String,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: RecordHeader,
}

fn header_line() -> Vec<u8> {
    let mut bytes = serde_json::to_vec(&HeaderLine {
        header: RecordHeader {
            format: "ara-replay".into(),
            version: RECORD_FORMAT_VERSION,
            key_scheme: KEY_SCHEME.into(),
        },
    })
    .expect("header serializes");
    bytes.push(b'\n');
    bytes
}

fn invalid(msg: String) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, msg)
}

/// Answers requests from a record file. `complete` is a pure function of the
/// request key.
#[derive(Debug)]
pub struct ReplayBackend {
    id: String,
    entries: HashMap<String, RecordEntry>,
}

impl ReplayBackend {
    pub fn from_entries(id: &str, entries: impl IntoIterator<Item = RecordEntry>) -> Self {
        let mut map = HashMap::new();
        for e in entries {
            map.entry(e.key.clone()).or_insert(e);
        }
        ReplayBackend {
            id: id.to_string(),
            entries: map,
        }
    }

    /// Loads a JSONL record file. Rejects files written with another key
    /// scheme and entries whose stored key does not match their request.
    pub fn load(id: &str, path: &Path) -> std::io::Result<Self> {
        let reader = BufReader::new(File::open(path)?);
        let mut entries = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with("{\"header\"") {
                let h: HeaderLine = serde_json::from_str(&line)
                    .map_err(|e| invalid(format!("{}: bad header: {e}", path.display())))?;
                if h.header.key_scheme != KEY_SCHEME {
                    return Err(invalid(format!(
                        "{}: key scheme {} does not match {KEY_SCHEME}",
                        path.display(),
                        h.header.key_scheme
                    )));
                }
                continue;
            }
            let e: RecordEntry = serde_json::from_str(&line)
                .map_err(|e| invalid(format!("{}:{}: {e}", path.display(), n + 1)))?;
            if e.request.key() != e.key {
                return Err(invalid(format!(
                    "{}:{}: stored key does not match request",
                    path.display(),
                    n + 1
                )));
            }
            entries.push(e);
        }
        Ok(Self::from_entries(id, entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn nearest(&self, request: &CompletionRequest) -> Option<&RecordEntry> {
        let score = |e: &RecordEntry| {
            let r = &e.request;
            common_prefix(&r.system_text, &request.system_text)
                + common_prefix(&r.user_text, &request.user_text)
                + usize::from(r.model_id == request.model_id)
                + usize::from(r.decoding == request.decoding)
        };
        // Ties broken by key so the report is deterministic.
        self.entries
            .values()
            .max_by(|a, b| score(a).cmp(&score(b)).then_with(|| b.key.cmp(&a.key)))
    }

    fn miss_diff(&self, request: &CompletionRequest) -> String {
        let Some(near) = self.nearest(request) else {
            return "record file is empty".into();
        };
        let r = &near.request;
        let mut lines = vec![format!("nearest recorded key {}:", near.key)];
        lines.push(field_diff("system_text", &r.system_text, &request.system_text));
        lines.push(field_diff("user_text", &r.user_text, &request.user_text));
        lines.push(field_diff("model_id", &r.model_id, &request.model_id));
        if r.decoding != request.decoding {
            lines.push(format!(
                "  decoding: recorded {:?} vs requested {:?}",
                r.decoding, request.decoding
            ));
        } else {
            lines.push("  decoding: identical".into());
        }
        lines.join("\n")
    }
}

fn common_prefix(a: &str, b: &str) -> usize {
    a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count()
}

fn snippet(s: &str, at: usize) -> String {
    let start = s.floor_char_boundary(at.saturating_sub(20));
    let end = s.ceil_char_boundary((at + 40).min(s.len()));
    format!("{:?}", &s[start..end])
}

fn field_diff(name: &str, recorded: &str, requested: &str) -> String {
    if recorded == requested {
        return format!("  {name}: identical");
    }
    let at = common_prefix(recorded, requested);
    format!(
        "  {name}: differs at byte {at}: recorded {} vs requested {}",
        snippet(recorded, at),
        snippet(requested, at)
    )
}

impl CompletionBackend for ReplayBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let key = request.key();
        match self.entries.get(&key) {
            Some(e) => Ok(e.response.clone()),
            None => Err(BackendError::ReplayMiss {
                diff: self.miss_diff(request),
                key,
            }),
        }
    }
}

/// Wraps a live backend and appends every successful call to a record file.
pub struct RecordingBackend<B> {
    inner: B,
    file: Mutex<File>,
}

impl<B: CompletionBackend> RecordingBackend<B> {
    pub fn new(inner: B, path: &Path) -> std::io::Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            file.write_all(&header_line())?;
        }
        Ok(RecordingBackend {
            inner,
            file: Mutex::new(file),
        })
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }
}

impl<B: CompletionBackend> CompletionBackend for RecordingBackend<B> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let response = self.inner.complete(request)?;
        let entry = RecordEntry {
            key: request.key(),
            request: request.clone(),
            response: response.clone(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let mut bytes = serde_json::to_vec(&entry).expect("record entry serializes");
        bytes.push(b'\n');
        self.file
            .lock()
            .unwrap()
            .write_all(&bytes)
            .map_err(|e| BackendError::Transport(format!("record file write failed: {e}")))?;
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Decoding, ScriptedBackend};
    use super::*;

    fn req(user: &str) -> CompletionRequest {
        CompletionRequest {
            system_text: "### DESCRIPTION\nTranslate.\n".into(),
            user_text: user.into(),
            model_id: "m".into(),
            decoding: Decoding::default(),
        }
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rec.jsonl");
        let live = ScriptedBackend::new("live", ["v1", "v2"]);
        let rec = RecordingBackend::new(live, &path).unwrap();
        assert_eq!(rec.complete(&req("a")).unwrap(), "v1");
        assert_eq!(rec.complete(&req("b")).unwrap(), "v2");
        drop(rec);

        let replay = ReplayBackend::load("replay", &path).unwrap();
        assert_eq!(replay.len(), 2);
        assert_eq!(replay.complete(&req("a")).unwrap(), "v1");
        assert_eq!(replay.complete(&req("a")).unwrap(), "v1");
        assert_eq!(replay.complete(&req("b")).unwrap(), "v2");
    }

    #[test]
    fn miss_reports_nearest_diff() {
        let replay = ReplayBackend::from_entries(
            "replay",
            [RecordEntry {
                key: req("turn left at the tree").key(),
                request: req("turn left at the tree"),
                response: "x".into(),
                timestamp: 0,
            }],
        );
        match replay.complete(&req("turn right at the tree")) {
            Err(BackendError::ReplayMiss { key, diff }) => {
                assert_eq!(key, req("turn right at the tree").key());
                assert!(diff.contains("user_text: differs at byte 5"), "{diff}");
                assert!(diff.contains("system_text: identical"), "{diff}");
            }
            other => panic!("expected miss, got {other:?}"),
        }
        let empty = ReplayBackend::from_entries("replay", []);
        assert!(matches!(
            empty.complete(&req("a")),
            Err(BackendError::ReplayMiss { .. })
        ));
    }

    #[test]
    fn load_rejects_tampered_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rec.jsonl");
        let mut e = RecordEntry {
            key: "v1-bogus".into(),
            request: req("a"),
            response: "x".into(),
            timestamp: 0,
        };
        std::fs::write(&path, serde_json::to_string(&e).unwrap()).unwrap();
        assert!(ReplayBackend::load("r", &path).is_err());
        e.key = e.request.key();
        let mut text = String::from_utf8(header_line()).unwrap();
        text.push_str(&serde_json::to_string(&e).unwrap());
        std::fs::write(&path, text.replace(KEY_SCHEME, "md5-v0")).unwrap();
        assert!(ReplayBackend::load("r", &path).is_err());
    }
}

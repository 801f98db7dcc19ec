use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{cache_key, BackendError, ChatBackend, Completion, FinishReason};
use crate::model::{GenerationParams, PromptBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayMode {
    /// Serve stored responses, forward misses to the inner backend and append them.
    Record,
    /// Serve stored responses only.
    Replay,
    /// Forward everything to the inner backend; the store is neither read nor written.
    Passthrough,
}

impl std::str::FromStr for ReplayMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "record" => Ok(ReplayMode::Record),
            "replay" => Ok(ReplayMode::Replay),
            "passthrough" => Ok(ReplayMode::Passthrough),
            other => Err(format!("unknown replay mode {other:?} (expected record, replay or passthrough)")),
        }
    }
}

/// One line of the replay store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheEntry {
    pub key: String,
    pub response_text: String,
    pub finish_reason: FinishReason,
    pub created_at: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub hits: u64,
    pub misses: u64,
    pub inner_calls: u64,
}

/// Wraps a backend with an append-only JSONL store keyed by [`cache_key`].
pub struct RecordReplayBackend {
    mode: ReplayMode,
    path: PathBuf,
    inner: Option<Box<dyn ChatBackend>>,
    entries: Mutex<HashMap<String, CacheEntry>>,
    writer: Mutex<Option<File>>,
    hits: AtomicU64,
    misses: AtomicU64,
    inner_calls: AtomicU64,
}

/// Opens the store at `path` in `mode`.
///
/// Record creates the file if needed and requires `inner`. Replay requires the file to exist.
/// Passthrough requires `inner` and ignores the file.
pub fn record_replay_store(
    mode: ReplayMode,
    path: &Path,
    inner: Option<Box<dyn ChatBackend>>,
) -> Result<RecordReplayBackend, BackendError> {
    if mode != ReplayMode::Replay && inner.is_none() {
        return Err(BackendError::Store(format!("{mode:?} mode needs an inner backend")));
    }
    let entries = match mode {
        ReplayMode::Passthrough => HashMap::new(),
        ReplayMode::Replay => load_store(path)?,
        ReplayMode::Record if path.exists() => load_store(path)?,
        ReplayMode::Record => HashMap::new(),
    };
    let writer = if mode == ReplayMode::Record {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| BackendError::Store(format!("{}: {e}", parent.display())))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| BackendError::Store(format!("{}: {e}", path.display())))?;
        Some(file)
    } else {
        None
    };
    Ok(RecordReplayBackend {
        mode,
        path: path.to_path_buf(),
        inner,
        entries: Mutex::new(entries),
        writer: Mutex::new(writer),
        hits: AtomicU64::new(0),
        misses: AtomicU64::new(0),
        inner_calls: AtomicU64::new(0),
    })
}

/// Reads every entry. A malformed line or two conflicting entries for one key is an error
/// naming the line and, when readable, the key.
pub fn load_store(path: &Path) -> Result<HashMap<String, CacheEntry>, BackendError> {
    let file = File::open(path).map_err(|e| BackendError::Store(format!("{}: {e}", path.display())))?;
    let mut entries: HashMap<String, CacheEntry> = HashMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| BackendError::Store(format!("{}:{line_no}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CacheEntry = serde_json::from_str(&line).map_err(|e| {
            let key = serde_json::from_str::<serde_json::Value>(&line)
                .ok()
                .and_then(|v| v.get("key").and_then(|k| k.as_str()).map(str::to_string));
            match key {
                Some(key) => BackendError::Store(format!("{}:{line_no}: corrupt entry {key}: {e}", path.display())),
                None => BackendError::Store(format!("{}:{line_no}: corrupt entry: {e}", path.display())),
            }
        })?;
        if entry.key.len() != 64 || !entry.key.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(BackendError::Store(format!(
                "{}:{line_no}: corrupt entry {}: key is not a sha256 hex digest",
                path.display(),
                entry.key
            )));
        }
        if let Some(prev) = entries.get(&entry.key) {
            if prev.response_text != entry.response_text || prev.finish_reason != entry.finish_reason {
                return Err(BackendError::Store(format!(
                    "{}:{line_no}: conflicting entries for key {}",
                    path.display(),
                    entry.key
                )));
            }
            continue;
        }
        entries.insert(entry.key.clone(), entry);
    }
    Ok(entries)
}

impl RecordReplayBackend {
    pub fn mode(&self) -> ReplayMode {
        self.mode
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            hits: self.hits.load(Ordering::SeqCst),
            misses: self.misses.load(Ordering::SeqCst),
            inner_calls: self.inner_calls.load(Ordering::SeqCst),
        }
    }

    fn call_inner(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        let inner = self.inner.as_ref().expect("checked at construction");
        self.inner_calls.fetch_add(1, Ordering::SeqCst);
        inner.complete(bundle, params)
    }

    fn append(&self, entry: &CacheEntry) -> Result<(), BackendError> {
        let mut line = serde_json::to_string(entry).expect("entry serializes");
        line.push('\n');
        let mut writer = self.writer.lock().unwrap();
        let file = writer.as_mut().expect("record mode has a writer");
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| BackendError::Store(format!("{}: {e}", self.path.display())))
    }
}

impl ChatBackend for RecordReplayBackend {
    fn complete(&self, bundle: &PromptBundle, params: &GenerationParams) -> Result<Completion, BackendError> {
        if self.mode == ReplayMode::Passthrough {
            return self.call_inner(bundle, params);
        }
        let key = cache_key(bundle, params);
        if let Some(entry) = self.entries.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::SeqCst);
            return Ok(Completion { text: entry.response_text.clone(), finish_reason: entry.finish_reason });
        }
        self.misses.fetch_add(1, Ordering::SeqCst);
        if self.mode == ReplayMode::Replay {
            return Err(BackendError::MissingRecording(key));
        }
        let completion = self.call_inner(bundle, params)?;
        let entry = CacheEntry {
            key: key.clone(),
            response_text: completion.text.clone(),
            finish_reason: completion.finish_reason,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        // A concurrent worker may have recorded the same key meanwhile; keep the first.
        let mut entries = self.entries.lock().unwrap();
        if let Some(existing) = entries.get(&key) {
            return Ok(Completion { text: existing.response_text.clone(), finish_reason: existing.finish_reason });
        }
        self.append(&entry)?;
        entries.insert(key, entry);
        Ok(completion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::MockBackend;
    use crate::model::{Strategy, StrategyKind};

    fn bundle(user: &str) -> PromptBundle {
        PromptBundle::single_turn(None, user.into(), Strategy::new(StrategyKind::Standard), "i")
    }

    fn echo() -> Box<dyn ChatBackend> {
        Box::new(MockBackend::new(|b, _| Completion::stop(format!("echo: {}", b.user_message()))))
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        let p = GenerationParams::default();
        let rec = record_replay_store(ReplayMode::Record, &path, Some(echo())).unwrap();
        assert_eq!(rec.complete(&bundle("a"), &p).unwrap().text, "echo: a");
        assert_eq!(rec.complete(&bundle("a"), &p).unwrap().text, "echo: a");
        assert_eq!(rec.stats(), StoreStats { hits: 1, misses: 1, inner_calls: 1 });
        drop(rec);

        let replay = record_replay_store(ReplayMode::Replay, &path, None).unwrap();
        assert_eq!(replay.complete(&bundle("a"), &p).unwrap().text, "echo: a");
        let err = replay.complete(&bundle("b"), &p).unwrap_err();
        assert_eq!(err, BackendError::MissingRecording(cache_key(&bundle("b"), &p)));
    }

    #[test]
    fn empty_store_misses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        std::fs::write(&path, "").unwrap();
        let replay = record_replay_store(ReplayMode::Replay, &path, None).unwrap();
        assert!(matches!(
            replay.complete(&bundle("q"), &GenerationParams::default()),
            Err(BackendError::MissingRecording(_))
        ));
    }

    #[test]
    fn corrupt_line_names_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        let key = "a".repeat(64);
        std::fs::write(&path, format!("{{\"key\":\"{key}\",\"response_text\":\"x\",\"finish_reason\":\"sideways\",\"created_at\":\"t\"}}\n")).unwrap();
        let err = load_store(&path).unwrap_err().to_string();
        assert!(err.contains(":1:") && err.contains(&key), "{err}");

        std::fs::write(&path, "{not json\n").unwrap();
        assert!(load_store(&path).unwrap_err().to_string().contains(":1:"));
    }

    #[test]
    fn conflicting_duplicates_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        let key = "b".repeat(64);
        let line = |t: &str| format!("{{\"key\":\"{key}\",\"response_text\":\"{t}\",\"finish_reason\":\"stop\",\"created_at\":\"t\"}}\n");
        std::fs::write(&path, line("x") + &line("x")).unwrap();
        assert_eq!(load_store(&path).unwrap().len(), 1);
        std::fs::write(&path, line("x") + &line("y")).unwrap();
        assert!(load_store(&path).unwrap_err().to_string().contains(":2:"));
    }

    #[test]
    fn passthrough_never_touches_store() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("absent.jsonl");
        let pass = record_replay_store(ReplayMode::Passthrough, &path, Some(echo())).unwrap();
        pass.complete(&bundle("a"), &GenerationParams::default()).unwrap();
        pass.complete(&bundle("a"), &GenerationParams::default()).unwrap();
        assert_eq!(pass.stats().inner_calls, 2);
        assert!(!path.exists());
    }

    #[test]
    fn record_without_inner_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(record_replay_store(ReplayMode::Record, &dir.path().join("s.jsonl"), None).is_err());
    }
}

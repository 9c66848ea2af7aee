use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{canonical_json, Judge, JudgeError, JudgeRequest, JudgeTask};

/// One line of a transcript file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub hash: String,
    pub task: JudgeTask,
    pub payload: Value,
    pub response: Value,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Append-only JSONL transcript in front of another judge. Without an inner judge it
/// replays: every request must already be recorded.
pub struct CachedJudge {
    inner: Option<Box<dyn Judge>>,
    path: PathBuf,
    records: Mutex<HashMap<String, Value>>,
    writer: Mutex<Option<File>>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> JudgeError {
    JudgeError::Io(format!("{}: {e}", path.display()))
}

fn read_records(path: &Path) -> Result<HashMap<String, Value>, JudgeError> {
    let mut out = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(io_err(path, e)),
    };
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TranscriptRecord =
            serde_json::from_str(&line).map_err(|e| io_err(path, format!("line {}: {e}", n + 1)))?;
        // first record wins so that replays stay stable
        out.entry(rec.hash).or_insert(rec.response);
    }
    Ok(out)
}

impl CachedJudge {
    pub fn recording(inner: Box<dyn Judge>, path: impl Into<PathBuf>) -> Result<Self, JudgeError> {
        let path = path.into();
        let records = read_records(&path)?;
        Ok(Self {
            inner: Some(inner),
            path,
            records: Mutex::new(records),
            writer: Mutex::new(None),
        })
    }

    pub fn replay(path: impl Into<PathBuf>) -> Result<Self, JudgeError> {
        let path = path.into();
        if !path.is_file() {
            return Err(io_err(&path, "transcript not found"));
        }
        let records = read_records(&path)?;
        Ok(Self {
            inner: None,
            path,
            records: Mutex::new(records),
            writer: Mutex::new(None),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// SHA-256 over sorted `hash\tresponse` lines of every record held.
    pub fn transcript_hash(&self) -> String {
        let records = self.records.lock().expect("cache lock");
        let mut lines: Vec<String> = records
            .iter()
            .map(|(k, v)| format!("{k}\t{}\n", canonical_json(v)))
            .collect();
        lines.sort();
        let mut h = Sha256::new();
        for l in lines {
            h.update(l.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn append(&self, rec: &TranscriptRecord) -> Result<(), JudgeError> {
        let mut w = self.writer.lock().expect("writer lock");
        if w.is_none() {
            if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            }
            let f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.path)
                .map_err(|e| io_err(&self.path, e))?;
            *w = Some(f);
        }
        let line = serde_json::to_string(rec).map_err(|e| io_err(&self.path, e))?;
        let f = w.as_mut().expect("writer open");
        writeln!(f, "{line}").and_then(|_| f.flush()).map_err(|e| io_err(&self.path, e))
    }
}

impl Judge for CachedJudge {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        let hash = request.hash();
        if let Some(v) = self.records.lock().expect("cache lock").get(&hash) {
            return Ok(v.clone());
        }
        let Some(inner) = &self.inner else {
            return Err(JudgeError::ReplayMiss { hash });
        };
        let response = inner.respond(request)?;
        // only schema-valid answers are kept
        super::validate_response(request, &response)?;
        let mut records = self.records.lock().expect("cache lock");
        if let Some(v) = records.get(&hash) {
            return Ok(v.clone());
        }
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        self.append(&TranscriptRecord {
            hash: hash.clone(),
            task: request.task,
            payload: request.payload.clone(),
            response: response.clone(),
            timestamp,
        })?;
        records.insert(hash, response.clone());
        Ok(response)
    }
}

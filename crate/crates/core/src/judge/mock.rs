use std::collections::HashMap;
use std::path::Path;

use serde_json::Value;

use super::{canonical_json, Judge, JudgeError, JudgeRequest, JudgeTask};

/// Table-driven judge. Fixture files are tab-separated: `task`, canonical payload JSON,
/// response JSON. Blank lines and lines starting with `#` are ignored.
#[derive(Clone, Debug, Default)]
pub struct MockJudge {
    table: HashMap<(JudgeTask, String), Value>,
}

impl MockJudge {
    pub fn from_rows(rows: impl IntoIterator<Item = (JudgeTask, Value, Value)>) -> Self {
        let table = rows
            .into_iter()
            .map(|(task, payload, response)| ((task, canonical_json(&payload)), response))
            .collect();
        Self { table }
    }

    pub fn parse(text: &str) -> Result<Self, JudgeError> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(JudgeError::Config(format!(
                    "fixture line {}: expected 3 tab-separated columns, got {}",
                    n + 1,
                    cols.len()
                )));
            }
            let task: JudgeTask = cols[0].trim().parse()?;
            let parse = |s: &str, what: &str| {
                serde_json::from_str::<Value>(s)
                    .map_err(|e| JudgeError::Config(format!("fixture line {}: bad {what}: {e}", n + 1)))
            };
            rows.push((task, parse(cols[1], "payload")?, parse(cols[2], "response")?));
        }
        Ok(Self::from_rows(rows))
    }

    pub fn load(path: &Path) -> Result<Self, JudgeError> {
        let text = std::fs::read_to_string(path).map_err(|e| JudgeError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Merges rows from another table; later rows win.
    pub fn extend(&mut self, other: MockJudge) {
        self.table.extend(other.table);
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// One fixture line for a request and response.
    pub fn row(request: &JudgeRequest, response: &Value) -> String {
        format!(
            "{}\t{}\t{}",
            request.task,
            request.canonical_payload(),
            canonical_json(response)
        )
    }
}

impl Judge for MockJudge {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        let key = (request.task, request.canonical_payload());
        self.table.get(&key).cloned().ok_or(JudgeError::MissingFixture {
            task: key.0.to_string(),
            payload: key.1,
        })
    }
}

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use base64::Engine;
use serde_json::{json, Value};

use super::{Judge, JudgeError, JudgeRequest, PromptSet};

/// Environment variable holding the API key.
pub const API_KEY_ENV: &str = "SCENEEVAL_JUDGE_API_KEY";

#[derive(Clone, Debug)]
pub struct RemoteConfig {
    /// Chat-completions endpoint URL.
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub max_in_flight: usize,
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            api_key: None,
            max_in_flight: 4,
            max_retries: 4,
            initial_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(120),
        }
    }
}

impl RemoteConfig {
    /// Fills `api_key` from the environment when unset.
    pub fn with_env_key(mut self) -> Self {
        if self.api_key.is_none() {
            self.api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        }
        self
    }
}

struct Semaphore {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("semaphore lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("semaphore lock");
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Semaphore);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("semaphore lock") += 1;
        self.0.cv.notify_one();
    }
}

/// Judge backed by an OpenAI-compatible chat-completions service.
pub struct RemoteJudge {
    config: RemoteConfig,
    prompts: PromptSet,
    agent: ureq::Agent,
    gate: Semaphore,
}

enum Attempt {
    Retry(String),
    Fatal(String),
}

impl RemoteJudge {
    pub fn new(config: RemoteConfig, prompts: PromptSet) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let gate = Semaphore::new(config.max_in_flight);
        Self {
            config,
            prompts,
            agent,
            gate,
        }
    }

    fn body(&self, request: &JudgeRequest) -> Result<Value, String> {
        let mut content = vec![json!({"type": "text", "text": self.prompts.render(request)})];
        for path in &request.image_refs {
            let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mime = match path.extension().and_then(|e| e.to_str()).map(str::to_lowercase).as_deref() {
                Some("jpg") | Some("jpeg") => "image/jpeg",
                _ => "image/png",
            };
            let data = base64::engine::general_purpose::STANDARD.encode(bytes);
            content.push(json!({"type": "image_url", "image_url": {"url": format!("data:{mime};base64,{data}")}}));
        }
        Ok(json!({
            "model": self.config.model,
            "temperature": 0,
            "response_format": {"type": "json_object"},
            "messages": [{"role": "user", "content": content}],
        }))
    }

    fn attempt(&self, body: &Value) -> Result<Value, Attempt> {
        let mut req = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| Attempt::Retry(e.to_string()))?;
        if status == 429 || status >= 500 {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err(Attempt::Fatal(format!("HTTP {status}: {text}")));
        }
        let envelope: Value = serde_json::from_str(&text).map_err(|e| Attempt::Fatal(format!("bad envelope: {e}")))?;
        let content = envelope
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| Attempt::Fatal("no message content".into()))?;
        serde_json::from_str(strip_fence(content)).map_err(|e| Attempt::Fatal(format!("content is not JSON: {e}")))
    }
}

fn strip_fence(s: &str) -> &str {
    let t = s.trim();
    let t = t.strip_prefix("```json").or_else(|| t.strip_prefix("```")).unwrap_or(t);
    t.strip_suffix("```").unwrap_or(t).trim()
}

impl Judge for RemoteJudge {
    fn respond(&self, request: &JudgeRequest) -> Result<Value, JudgeError> {
        let hash = request.hash();
        let body = self.body(request).map_err(|message| JudgeError::Remote {
            hash: hash.clone(),
            message,
        })?;
        let _permit = self.gate.acquire();
        let mut delay = self.config.initial_backoff;
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                log::warn!("judge request {hash}: retry {attempt} after {last}");
                std::thread::sleep(delay);
                delay *= 2;
            }
            match self.attempt(&body) {
                Ok(v) => return Ok(v),
                Err(Attempt::Retry(m)) => last = m,
                Err(Attempt::Fatal(m)) => {
                    return Err(JudgeError::Remote { hash, message: m });
                }
            }
        }
        Err(JudgeError::Remote {
            hash,
            message: format!("gave up after {} attempts: {last}", self.config.max_retries + 1),
        })
    }
}

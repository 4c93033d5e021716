//! Blocking client for OpenAI-compatible completion endpoints.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use crate::cache::{cache_key, ResponseCache};
use crate::endpoint::{Api, ModelEndpoint};
use crate::error::{Error, Result};

/// Anything that turns a prompt into a continuation.
pub trait Completer: Sync {
    fn complete(&self, prompt: &str) -> Result<String>;
    /// Model label used in reports.
    fn model_name(&self) -> String;
}

const MAX_BACKOFF: Duration = Duration::from_secs(30);

pub struct HttpCompleter {
    endpoint: ModelEndpoint,
    api_key: Option<String>,
    http: Client,
    /// HTTP requests actually sent, retries included.
    requests: AtomicU64,
}

impl HttpCompleter {
    pub fn new(endpoint: ModelEndpoint) -> Result<Self> {
        endpoint.validate()?;
        let api_key = endpoint.api_key()?;
        let http = Client::builder()
            .timeout(endpoint.timeout())
            .build()
            .map_err(|e| Error::Config(format!("cannot build HTTP client: {e}")))?;
        Ok(Self {
            endpoint,
            api_key,
            http,
            requests: AtomicU64::new(0),
        })
    }

    pub fn endpoint(&self) -> &ModelEndpoint {
        &self.endpoint
    }

    pub fn requests_sent(&self) -> u64 {
        self.requests.load(Ordering::SeqCst)
    }

    fn body(&self, prompt: &str) -> Value {
        let ep = &self.endpoint;
        let mut body = match ep.api {
            Api::Completions => json!({ "model": ep.model, "prompt": prompt }),
            Api::Chat => {
                json!({ "model": ep.model, "messages": [{ "role": "user", "content": prompt }] })
            }
        };
        body["temperature"] = json!(ep.temperature);
        body["max_tokens"] = json!(ep.max_tokens);
        if !ep.stop.is_empty() {
            body["stop"] = json!(ep.stop);
        }
        body
    }

    fn extract(&self, v: &Value) -> Option<String> {
        let choice = v.get("choices")?.get(0)?;
        let text = match self.endpoint.api {
            Api::Completions => choice.get("text"),
            Api::Chat => choice.get("message").and_then(|m| m.get("content")),
        }?;
        text.as_str().map(str::to_string)
    }

    fn backoff(&self, attempt: u32, retry_after: Option<Duration>) -> Duration {
        let base = Duration::from_millis(self.endpoint.initial_backoff_ms)
            .saturating_mul(1 << attempt.min(16));
        retry_after.unwrap_or(base).min(MAX_BACKOFF)
    }
}

fn retryable(status: StatusCode) -> bool {
    status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error()
}

impl Completer for HttpCompleter {
    fn complete(&self, prompt: &str) -> Result<String> {
        let url = self.endpoint.url();
        let body = self.body(prompt);
        let mut attempt = 0;
        loop {
            let local_id = format!("local-{}", self.requests.fetch_add(1, Ordering::SeqCst));
            let mut req = self.http.post(&url).json(&body);
            if let Some(key) = &self.api_key {
                req = req.bearer_auth(key);
            }
            let (failure, retry_after, request_id) = match req.send() {
                Ok(resp) => {
                    let request_id = resp
                        .headers()
                        .get("x-request-id")
                        .and_then(|h| h.to_str().ok())
                        .map(str::to_string)
                        .unwrap_or(local_id);
                    let status = resp.status();
                    if status.is_success() {
                        let v: Value = resp.json().map_err(|e| Error::Protocol {
                            request_id: request_id.clone(),
                            message: format!("body is not JSON: {e}"),
                        })?;
                        return self.extract(&v).ok_or_else(|| Error::Protocol {
                            request_id,
                            message: format!("no completion text in {v}"),
                        });
                    }
                    let retry_after = resp
                        .headers()
                        .get("retry-after")
                        .and_then(|h| h.to_str().ok())
                        .and_then(|s| s.trim().parse::<f64>().ok())
                        .filter(|s| s.is_finite() && *s >= 0.0)
                        .map(Duration::from_secs_f64);
                    let text = resp.text().unwrap_or_default();
                    let message = format!(
                        "HTTP {status}: {}",
                        text.chars().take(200).collect::<String>()
                    );
                    if !retryable(status) {
                        return Err(Error::Transport {
                            request_id,
                            attempts: attempt + 1,
                            message,
                        });
                    }
                    (message, retry_after, request_id)
                }
                Err(e) => (e.to_string(), None, local_id),
            };
            attempt += 1;
            if attempt > self.endpoint.max_retries {
                return Err(Error::Transport {
                    request_id,
                    attempts: attempt,
                    message: failure,
                });
            }
            std::thread::sleep(self.backoff(attempt - 1, retry_after));
        }
    }

    fn model_name(&self) -> String {
        self.endpoint.model.clone()
    }
}

/// Wraps a client so that cached prompts never reach the network.
pub struct CachedCompleter<C> {
    inner: C,
    endpoint: ModelEndpoint,
    cache: Arc<ResponseCache>,
}

impl<C: Completer> CachedCompleter<C> {
    pub fn new(inner: C, endpoint: ModelEndpoint, cache: Arc<ResponseCache>) -> Self {
        Self {
            inner,
            endpoint,
            cache,
        }
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl CachedCompleter<HttpCompleter> {
    pub fn http(endpoint: ModelEndpoint, cache: Arc<ResponseCache>) -> Result<Self> {
        Ok(Self::new(
            HttpCompleter::new(endpoint.clone())?,
            endpoint,
            cache,
        ))
    }
}

impl<C: Completer> Completer for CachedCompleter<C> {
    fn complete(&self, prompt: &str) -> Result<String> {
        let key = cache_key(&self.endpoint, prompt);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit);
        }
        let text = self.inner.complete(prompt)?;
        self.cache.insert(&key, &text)?;
        Ok(text)
    }

    fn model_name(&self) -> String {
        self.inner.model_name()
    }
}

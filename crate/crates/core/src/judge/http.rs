//! Chat/completions-style HTTP backend.
//!
//! Completion goes through `/v1/chat/completions` with sampling disabled.
//! Forced-continuation scoring uses the echo+logprobs facility of
//! `/v1/completions`: the prompt and continuation are submitted together
//! with `max_tokens: 0`, and the log-probabilities of the tokens whose text
//! offset falls inside the continuation are summed.

use serde::Deserialize;
use serde_json::json;

use super::{BackendError, ContinuationScore, JudgeBackend};

/// Environment variable holding the bearer token, if the service needs one.
pub const TOKEN_ENV: &str = "REVMINER_JUDGE_TOKEN";

pub struct HttpBackend {
    base_url: String,
    model: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(base_url: &str, model: &str) -> Self {
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            token: std::env::var(TOKEN_ENV).ok(),
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(120))
                .build()
                .expect("default TLS backend available"),
        }
    }

    /// Override the bearer token (normally taken from [`TOKEN_ENV`]).
    pub fn with_token(mut self, token: Option<String>) -> Self {
        self.token = token;
        self
    }

    fn post(&self, path: &str, body: &serde_json::Value) -> Result<String, BackendError> {
        let url = format!("{}{path}", self.base_url);
        let payload = body.to_string();
        log::debug!("POST {url} payload: {payload}");
        let mut request = self
            .client
            .post(&url)
            .header("Content-Type", "application/json")
            .body(payload);
        if let Some(token) = &self.token {
            request = request.bearer_auth(token);
        }
        let response = request
            .send()
            .map_err(|e| BackendError::Transient(e.to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| BackendError::Transient(e.to_string()))?;
        log::debug!("{url} -> {status} body: {text}");
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(BackendError::Transient(format!("{status}: {text}")));
        }
        if !status.is_success() {
            return Err(BackendError::Protocol(format!("{status}: {text}")));
        }
        Ok(text)
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    logprobs: Option<CompletionLogprobs>,
}

#[derive(Deserialize)]
struct CompletionLogprobs {
    token_logprobs: Vec<Option<f64>>,
    text_offset: Vec<usize>,
}

impl JudgeBackend for HttpBackend {
    fn model_id(&self) -> &str {
        &self.model
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0.0,
            "max_tokens": 16,
        });
        let text = self.post("/v1/chat/completions", &body)?;
        let parsed: ChatResponse = serde_json::from_str(&text)
            .map_err(|e| BackendError::Protocol(format!("bad chat response: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| BackendError::Protocol("no choices in chat response".into()))
    }

    fn score_continuation(
        &self,
        prompt: &str,
        continuation: &str,
    ) -> Result<ContinuationScore, BackendError> {
        let body = json!({
            "model": self.model,
            "prompt": format!("{prompt}{continuation}"),
            "max_tokens": 0,
            "echo": true,
            "logprobs": 0,
            "temperature": 0.0,
        });
        let text = self.post("/v1/completions", &body)?;
        let parsed: CompletionResponse = serde_json::from_str(&text)
            .map_err(|e| BackendError::Protocol(format!("bad completion response: {e}")))?;
        let logprobs = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.logprobs)
            .ok_or_else(|| BackendError::Protocol("response carries no logprobs".into()))?;
        if logprobs.token_logprobs.len() != logprobs.text_offset.len() {
            return Err(BackendError::Protocol(
                "token_logprobs and text_offset lengths differ".into(),
            ));
        }
        let boundary = prompt.len();
        let mut total = 0.0;
        let mut count = 0usize;
        for (offset, logprob) in logprobs.text_offset.iter().zip(&logprobs.token_logprobs) {
            if *offset >= boundary {
                let lp = logprob.ok_or_else(|| {
                    BackendError::Protocol("continuation token has null logprob".into())
                })?;
                total += lp;
                count += 1;
            }
        }
        if count == 0 {
            return Err(BackendError::Protocol(
                "no tokens fell inside the continuation".into(),
            ));
        }
        Ok(ContinuationScore {
            total_logprob: total,
            token_count: count,
        })
    }

    fn healthcheck(&self) -> Result<(), BackendError> {
        let url = format!("{}/v1/models", self.base_url);
        let mut request = self.client.get(&url);
        if let Some(token) = &self.token {
            request = request.bearer_auth(token);
        }
        let response = request
            .send()
            .map_err(|e| BackendError::Unreachable(e.to_string()))?;
        if response.status().is_success() {
            Ok(())
        } else {
            Err(BackendError::Unreachable(format!(
                "{url} answered {}",
                response.status()
            )))
        }
    }
}

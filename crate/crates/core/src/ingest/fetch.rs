//! Paginated client for a YouTube Data API v3 style `commentThreads` endpoint.
//!
//! Only top-level comment ids and text are kept; everything comes back
//! unlabeled and unprocessed.

use std::fmt;
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::Deserialize;
use thiserror::Error;

use super::LabeledComment;

pub const DEFAULT_BASE_URL: &str = "https://www.googleapis.com/youtube/v3/commentThreads";
/// Environment variable the CLI reads the API key from.
pub const API_KEY_ENV: &str = "YOUTUBE_API_KEY";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("authentication failed (HTTP {status}): {message}")]
    Auth { status: u16, message: String },
    #[error("quota exhausted (HTTP {status}): {message}")]
    Quota { status: u16, message: String },
    #[error("unknown video `{0}`")]
    UnknownVideo(String),
    #[error("transient failure: {0}")]
    Transient(String),
    #[error("HTTP {status}: {message}")]
    Http { status: u16, message: String },
    #[error("malformed response: {0}")]
    Malformed(String),
}

impl FetchError {
    /// Whether repeating the same request may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, FetchError::Transient(_))
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ThreadPage {
    #[serde(default)]
    items: Vec<Thread>,
    next_page_token: Option<String>,
}

#[derive(Deserialize)]
struct Thread {
    id: Option<String>,
    snippet: ThreadSnippet,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ThreadSnippet {
    top_level_comment: Comment,
}

#[derive(Deserialize)]
struct Comment {
    id: Option<String>,
    snippet: CommentSnippet,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CommentSnippet {
    text_original: Option<String>,
    text_display: Option<String>,
}

#[derive(Deserialize)]
struct ErrorEnvelope {
    error: ApiError,
}

#[derive(Deserialize)]
struct ApiError {
    #[serde(default)]
    message: String,
    #[serde(default)]
    errors: Vec<ApiErrorItem>,
}

#[derive(Deserialize)]
struct ApiErrorItem {
    #[serde(default)]
    reason: String,
}

pub struct CommentsClient {
    http: Client,
    base_url: String,
    api_key: String,
    page_size: u32,
    max_retries: u32,
    backoff: Duration,
    // one pagination at a time per key
    gate: Mutex<()>,
}

impl fmt::Debug for CommentsClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CommentsClient")
            .field("base_url", &self.base_url)
            .field("api_key", &"<redacted>")
            .field("page_size", &self.page_size)
            .finish()
    }
}

impl CommentsClient {
    pub fn new(api_key: impl Into<String>) -> Self {
        Self::with_base_url(DEFAULT_BASE_URL, api_key)
    }

    pub fn with_base_url(base_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        Self {
            http: Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("static client configuration"),
            base_url: base_url.into(),
            api_key: api_key.into(),
            page_size: 100,
            max_retries: 3,
            backoff: Duration::from_millis(500),
            gate: Mutex::new(()),
        }
    }

    /// Comments per page, clamped to the API's 1..=100 range.
    pub fn page_size(mut self, n: u32) -> Self {
        self.page_size = n.clamp(1, 100);
        self
    }

    pub fn retries(mut self, max_retries: u32, backoff: Duration) -> Self {
        self.max_retries = max_retries;
        self.backoff = backoff;
        self
    }

    /// Fetches up to `max_pages` pages of top-level comments, in page order.
    /// Any failure discards the pages already read.
    pub fn fetch_comments(
        &self,
        video_id: &str,
        max_pages: usize,
    ) -> Result<Vec<LabeledComment>, FetchError> {
        if self.api_key.trim().is_empty() {
            return Err(FetchError::Invalid("API key is empty".into()));
        }
        if video_id.trim().is_empty() {
            return Err(FetchError::Invalid("video id is empty".into()));
        }
        let mut out = Vec::new();
        if max_pages == 0 {
            return Ok(out);
        }
        let _guard = self.gate.lock().unwrap_or_else(|e| e.into_inner());
        let mut token: Option<String> = None;
        for _ in 0..max_pages {
            let page = self.page_with_retry(video_id, token.as_deref())?;
            for t in page.items {
                let c = t.snippet.top_level_comment;
                let id = c
                    .id
                    .or(t.id)
                    .ok_or_else(|| FetchError::Malformed("comment without id".into()))?;
                let text = c
                    .snippet
                    .text_original
                    .or(c.snippet.text_display)
                    .unwrap_or_default();
                out.push(LabeledComment {
                    id,
                    source: video_id.to_string(),
                    text,
                    label: None,
                });
            }
            match page.next_page_token {
                Some(t) if !t.is_empty() => token = Some(t),
                _ => break,
            }
        }
        Ok(out)
    }

    fn page_with_retry(&self, video_id: &str, token: Option<&str>) -> Result<ThreadPage, FetchError> {
        let mut attempt = 0;
        loop {
            match self.page(video_id, token) {
                Err(e) if e.is_retryable() && attempt < self.max_retries => {
                    attempt += 1;
                    thread::sleep(self.backoff * attempt);
                }
                other => return other,
            }
        }
    }

    fn page(&self, video_id: &str, token: Option<&str>) -> Result<ThreadPage, FetchError> {
        let page_size = self.page_size.to_string();
        let mut query: Vec<(&str, &str)> = vec![
            ("part", "snippet"),
            ("videoId", video_id),
            ("key", &self.api_key),
            ("maxResults", &page_size),
            ("textFormat", "plainText"),
        ];
        if let Some(t) = token {
            query.push(("pageToken", t));
        }
        // reqwest errors embed the URL, which carries the key
        let resp = self
            .http
            .get(&self.base_url)
            .query(&query)
            .send()
            .map_err(|e| FetchError::Transient(e.without_url().to_string()))?;
        let status = resp.status();
        let body = resp
            .text()
            .map_err(|e| FetchError::Transient(e.without_url().to_string()))?;
        if status.is_success() {
            return serde_json::from_str(&body).map_err(|e| FetchError::Malformed(e.to_string()));
        }
        Err(classify(status, &body, video_id))
    }
}

fn classify(status: StatusCode, body: &str, video_id: &str) -> FetchError {
    let (message, reasons) = match serde_json::from_str::<ErrorEnvelope>(body) {
        Ok(env) => (
            env.error.message,
            env.error.errors.into_iter().map(|e| e.reason).collect(),
        ),
        Err(_) => (status.canonical_reason().unwrap_or("").to_string(), Vec::new()),
    };
    let has = |r: &str| reasons.iter().any(|x| x == r);
    let code = status.as_u16();
    if status == StatusCode::UNAUTHORIZED
        || has("keyInvalid")
        || has("forbidden")
        || message.contains("API key not valid")
    {
        FetchError::Auth { status: code, message }
    } else if has("quotaExceeded") || has("dailyLimitExceeded") || has("rateLimitExceeded") {
        FetchError::Quota { status: code, message }
    } else if status == StatusCode::NOT_FOUND || has("videoNotFound") {
        FetchError::UnknownVideo(video_id.to_string())
    } else if status.is_server_error() || status == StatusCode::TOO_MANY_REQUESTS {
        FetchError::Transient(format!("HTTP {code}: {message}"))
    } else {
        FetchError::Http { status: code, message }
    }
}

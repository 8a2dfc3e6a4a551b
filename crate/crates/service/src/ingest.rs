//! Feed polling over HTTP with per-source back-off.

use std::collections::HashMap;
use std::time::Duration;

use chrono::{DateTime, Utc};
use ghm_core::feed::{fetch_and_parse, FeedError, ItemDiagnostic, SourceRegistry, Transport, TransportError};
use ghm_core::NewsStory;

/// Blocking HTTP fetcher. Non-2xx responses become transport errors that
/// carry the server's `Retry-After` (in seconds) when present.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent("ghm-feed-reader/0.1")
            .build()
            .into();
        HttpTransport { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport::new(Duration::from_secs(30))
    }
}

impl Transport for HttpTransport {
    fn fetch(&self, url: &str) -> Result<Vec<u8>, TransportError> {
        let fail = |message: String, retry_after| TransportError { message, retry_after };
        let mut resp = self.agent.get(url).call().map_err(|e| fail(e.to_string(), None))?;
        let status = resp.status();
        if !status.is_success() {
            let retry = resp
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<u64>().ok())
                .map(Duration::from_secs);
            return Err(fail(format!("HTTP {status}"), retry));
        }
        resp.body_mut()
            .with_config()
            .limit(16 * 1024 * 1024)
            .read_to_vec()
            .map_err(|e| fail(e.to_string(), None))
    }
}

#[derive(Debug, Default)]
pub struct PollReport {
    pub stories: Vec<NewsStory>,
    pub skipped: Vec<ItemDiagnostic>,
    pub failures: Vec<FeedError>,
    /// Sources not polled because they are still backing off.
    pub deferred: Vec<String>,
}

/// Remembers when each failing source may be tried again.
#[derive(Debug, Default)]
pub struct Poller {
    next_allowed: HashMap<String, DateTime<Utc>>,
}

impl Poller {
    pub fn poll(&mut self, sources: &SourceRegistry, transport: &dyn Transport, now: DateTime<Utc>) -> PollReport {
        let mut report = PollReport::default();
        for source in sources.iter().filter(|s| s.poll_enabled) {
            if self.next_allowed.get(&source.id).is_some_and(|t| *t > now) {
                report.deferred.push(source.id.clone());
                continue;
            }
            match fetch_and_parse(source, transport, now) {
                Ok(outcome) => {
                    self.next_allowed.remove(&source.id);
                    report.stories.extend(outcome.stories);
                    report.skipped.extend(outcome.skipped);
                }
                Err(e) => {
                    if let FeedError::Transport { retry_after_secs, .. } = &e {
                        let wait = chrono::Duration::seconds(*retry_after_secs as i64);
                        self.next_allowed.insert(source.id.clone(), now + wait);
                    }
                    tracing::warn!("feed {}: {e}", source.id);
                    report.failures.push(e);
                }
            }
        }
        report
    }
}

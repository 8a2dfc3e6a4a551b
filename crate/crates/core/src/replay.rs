//! Hour-by-hour replay of a recorded story stream through the detection cycle.

use chrono::{DateTime, Duration, Utc};
use serde::Deserialize;
use thiserror::Error;

use crate::api::EventSet;
use crate::detector::{format_timestamp, write_event_dump, DetectError, DetectionPipeline};
use crate::feed::{FeedError, NewsStory, SourceRegistry, StoryStore};
use crate::geo::FallbackRecord;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
    #[error(transparent)]
    Feed(#[from] FeedError),
    #[error("cycle at {at}: {source}")]
    Cycle { at: String, source: DetectError },
    #[error("replay end precedes start")]
    InvertedRange,
}

#[derive(Deserialize)]
struct FixtureRecord {
    source: String,
    url: String,
    headline: String,
    #[serde(default)]
    body: String,
    published: DateTime<Utc>,
    #[serde(default)]
    fetched: Option<DateTime<Utc>>,
}

/// Reads `{"source","url","headline","body","published"[,"fetched"]}` lines.
/// Ids and genres are derived, so fixtures cannot drift from the id scheme.
pub fn load_fixture_stories(jsonl: &str, sources: &SourceRegistry) -> Result<Vec<NewsStory>, ReplayError> {
    let mut out = Vec::new();
    for (i, line) in jsonl.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| ReplayError::Fixture { line: i + 1, message };
        let r: FixtureRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let source = sources
            .get(&r.source)
            .ok_or_else(|| err(format!("unknown source `{}`", r.source)))?;
        let fetched = r.fetched.unwrap_or(r.published);
        out.push(NewsStory::new(source, r.url, r.headline, r.body, r.published, fetched));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ReplayOutput {
    /// Concatenated event dumps of every cycle, oldest cycle first.
    pub dump: String,
    pub cycles: usize,
    pub events_emitted: usize,
    pub fallbacks: Vec<(DateTime<Utc>, FallbackRecord)>,
    pub final_set: EventSet,
}

/// Runs one cycle per `step` from `start` to `end` inclusive. Before each
/// cycle the stories fetched by then are ingested and the store is compacted.
pub fn replay(
    pipeline: &DetectionPipeline<'_>,
    stories: &[NewsStory],
    start: DateTime<Utc>,
    end: DateTime<Utc>,
    step: Duration,
) -> Result<ReplayOutput, ReplayError> {
    if end < start || step <= Duration::zero() {
        return Err(ReplayError::InvertedRange);
    }
    let mut pending: Vec<&NewsStory> = stories.iter().collect();
    pending.sort_by(|a, b| (a.fetched_at, &a.id).cmp(&(b.fetched_at, &b.id)));
    let mut pending = pending.into_iter().peekable();

    let mut store = StoryStore::new();
    let mut set = EventSet::default();
    let mut out = ReplayOutput {
        dump: String::new(),
        cycles: 0,
        events_emitted: 0,
        fallbacks: Vec::new(),
        final_set: EventSet::default(),
    };
    let mut now = start;
    while now <= end {
        let mut batch = Vec::new();
        while let Some(s) = pending.next_if(|s| s.fetched_at <= now) {
            batch.push(s.clone());
        }
        store.insert_batch(batch);
        store.compact(now);
        let cycle = pipeline.run_cycle(&store, now).map_err(|source| ReplayError::Cycle {
            at: format_timestamp(now),
            source,
        })?;
        out.dump.push_str(&write_event_dump(&cycle.events, pipeline.ontology));
        out.events_emitted += cycle.events.len();
        out.fallbacks
            .extend(cycle.diagnostics.fallbacks.iter().cloned().map(|f| (now, f)));
        set = set.merge_cycle(&cycle, &store);
        out.cycles += 1;
        now += step;
    }
    out.final_set = set;
    Ok(out)
}

//! Shared state read by the HTTP layer and written by the detection loop.

use std::sync::{Arc, Mutex, RwLock};

use anyhow::{anyhow, Result};
use chrono::{DateTime, Utc};
use ghm_core::api::{EventSet, SharedEventSet};
use ghm_core::detector::Threshold;
use ghm_core::feed::{SourceRegistry, StoryLog, Transport};
use ghm_core::{ClassifierModel, DetectionPipeline, EntityTagger, Ontology, StoryStore};

use crate::ingest::Poller;

/// Time source for date-range presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    Wall,
    Fixed(DateTime<Utc>),
    /// The snapshot's detection time; used when serving recorded data.
    Snapshot,
}

#[derive(Clone)]
pub struct AppState {
    pub ontology: &'static Ontology,
    pub events: Arc<SharedEventSet>,
    pub stories: Arc<RwLock<StoryStore>>,
    pub clock: Clock,
}

impl AppState {
    pub fn new(ontology: &'static Ontology, clock: Clock) -> Self {
        AppState {
            ontology,
            events: Arc::new(SharedEventSet::default()),
            stories: Arc::new(RwLock::new(StoryStore::new())),
            clock,
        }
    }

    pub fn now(&self, snapshot: &EventSet) -> DateTime<Utc> {
        match self.clock {
            Clock::Wall => Utc::now(),
            Clock::Fixed(t) => t,
            Clock::Snapshot => snapshot.detected_at.unwrap_or_else(Utc::now),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickSummary {
    pub fetched: usize,
    pub new_stories: usize,
    pub failures: usize,
    pub events: usize,
    pub fallbacks: usize,
}

/// Owns everything one hourly tick needs: poll, persist, detect, publish.
pub struct Engine {
    pub model: ClassifierModel,
    pub tagger: Box<dyn EntityTagger>,
    pub sources: SourceRegistry,
    pub threshold: Threshold,
    pub log: Option<StoryLog>,
    pub transport: Box<dyn Transport>,
    poller: Mutex<Poller>,
}

impl Engine {
    pub fn new(
        model: ClassifierModel,
        tagger: Box<dyn EntityTagger>,
        sources: SourceRegistry,
        threshold: Threshold,
        log: Option<StoryLog>,
        transport: Box<dyn Transport>,
    ) -> Self {
        Engine {
            model,
            tagger,
            sources,
            threshold,
            log,
            transport,
            poller: Mutex::new(Poller::default()),
        }
    }

    /// One cycle at `now`. The new snapshot replaces the old one only after
    /// detection succeeded, so a failed cycle leaves readers on the last good set.
    pub fn tick(&self, state: &AppState, now: DateTime<Utc>) -> Result<TickSummary> {
        let report = self
            .poller
            .lock()
            .map_err(|_| anyhow!("poller lock poisoned"))?
            .poll(&self.sources, self.transport.as_ref(), now);
        let mut summary = TickSummary {
            fetched: report.stories.len(),
            failures: report.failures.len(),
            ..Default::default()
        };
        {
            let mut store = state.stories.write().map_err(|_| anyhow!("story store lock poisoned"))?;
            let fresh: Vec<_> = report
                .stories
                .into_iter()
                .filter(|s| !store.contains(&s.id))
                .collect();
            if let Some(log) = &self.log {
                log.append(&fresh)?;
            }
            summary.new_stories = store.insert_batch(fresh);
            store.compact(now);
        }
        let store = state.stories.read().map_err(|_| anyhow!("story store lock poisoned"))?;
        let pipeline = DetectionPipeline::new(state.ontology, &self.model, self.tagger.as_ref(), &self.sources)
            .with_threshold(self.threshold);
        let cycle = pipeline.run_cycle(&store, now)?;
        summary.events = cycle.events.len();
        summary.fallbacks = cycle.diagnostics.fallbacks.len();
        for f in &cycle.diagnostics.fallbacks {
            tracing::info!("location fallback: {}", f.to_line());
        }
        let next = state.events.load().merge_cycle(&cycle, &store);
        state.events.store(next);
        Ok(summary)
    }
}

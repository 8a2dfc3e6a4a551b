//! Disease/location pair detection over the last 24 hours of stories.
//!
//! One cycle runs five steps over the relevant stories of the window:
//!
//! 1. per story, pair every distinct LOCATION surface with every distinct
//!    DISEASE surface; the pair's story frequency is the smaller of the two
//!    mention counts;
//! 2. sum story frequencies into corpus frequencies;
//! 3. rank by corpus frequency (ties by location, then disease surface) and
//!    keep the top `k` (or every pair above a frequency floor);
//! 4. ground the disease through the ontology synonyms and resolve the
//!    location to one ontology record, dropping pairs with no location;
//! 5. keep a story as support only if both terms are tagged in the first
//!    half of its text; pairs with no support are dropped.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{extract_features, ClassifierError, ClassifierModel, Label};
use crate::feed::{FeedError, NewsStory, SourceRegistry, StoryStore};
use crate::geo::{resolve, FallbackRecord, ResolutionContext, ResolutionTier, ResolvedLocation};
use crate::normalize::normalize;
use crate::ontology::{GeoLocation, Ontology};
use crate::par::Execution;
use crate::tagger::{validate_annotations, AnnotatedEntity, EntityClass, EntityTagger, TagError};

pub const DEFAULT_TOP_K: usize = 40;
pub const DETECTION_WINDOW: Duration = Duration::hours(24);

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("story window: {0}")]
    Window(#[from] FeedError),
    #[error("tagging story `{story_id}`: {source}")]
    Tagging { story_id: String, source: TagError },
    #[error("classifying story `{story_id}`: {source}")]
    Classifier {
        story_id: String,
        source: ClassifierError,
    },
    #[error("threshold must be at least 1")]
    InvalidThreshold,
}

/// How Step 3 cuts the ranked list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Threshold {
    /// Keep the `k` most frequent pairs.
    TopK(usize),
    /// Keep every pair whose corpus frequency is at least the floor.
    MinFrequency(u64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::TopK(DEFAULT_TOP_K)
    }
}

/// Normalized (location, disease) surfaces. Field order gives the tie-break order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey {
    pub location: String,
    pub disease: String,
}

impl PairKey {
    pub fn new(location: impl Into<String>, disease: impl Into<String>) -> Self {
        PairKey {
            location: location.into(),
            disease: disease.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCandidate {
    pub location_surface: String,
    pub disease_surface: String,
    pub story_freq: u64,
}

/// Step 1 for one story.
pub fn detect_story_pairs(entities: &[AnnotatedEntity]) -> Vec<PairCandidate> {
    let mut locations: BTreeMap<String, u64> = BTreeMap::new();
    let mut diseases: BTreeMap<String, u64> = BTreeMap::new();
    for e in entities {
        let bucket = match e.class {
            EntityClass::Location => &mut locations,
            EntityClass::Disease => &mut diseases,
            _ => continue,
        };
        let key = normalize(&e.surface);
        if !key.is_empty() {
            *bucket.entry(key).or_insert(0) += 1;
        }
    }
    let mut out = Vec::with_capacity(locations.len() * diseases.len());
    for (loc, &lc) in &locations {
        for (dis, &dc) in &diseases {
            out.push(PairCandidate {
                location_surface: loc.clone(),
                disease_surface: dis.clone(),
                story_freq: lc.min(dc),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairStats {
    pub corpus_freq: u64,
    /// Contributing stories in input order.
    pub story_ids: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusFrequencyTable {
    entries: BTreeMap<PairKey, PairStats>,
}

impl CorpusFrequencyTable {
    pub fn get(&self, key: &PairKey) -> Option<&PairStats> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PairKey, &PairStats)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, key: PairKey, story_id: &str, freq: u64) {
        let stats = self.entries.entry(key).or_default();
        stats.corpus_freq += freq;
        if !stats.story_ids.iter().any(|s| s == story_id) {
            stats.story_ids.push(story_id.to_string());
        }
    }
}

/// Step 2.
pub fn aggregate_frequencies(per_story: &[(String, Vec<PairCandidate>)]) -> CorpusFrequencyTable {
    let mut table = CorpusFrequencyTable::default();
    for (story_id, candidates) in per_story {
        for c in candidates {
            table.insert(
                PairKey::new(c.location_surface.clone(), c.disease_surface.clone()),
                story_id,
                c.story_freq,
            );
        }
    }
    table
}

/// Step 3.
pub fn rank_top_pairs(
    table: &CorpusFrequencyTable,
    threshold: Threshold,
) -> Result<Vec<(PairKey, u64)>, DetectError> {
    let mut ranked: Vec<(PairKey, u64)> = table
        .iter()
        .map(|(k, s)| (k.clone(), s.corpus_freq))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    match threshold {
        Threshold::TopK(0) | Threshold::MinFrequency(0) => Err(DetectError::InvalidThreshold),
        Threshold::TopK(k) => {
            ranked.truncate(k);
            Ok(ranked)
        }
        Threshold::MinFrequency(floor) => {
            ranked.retain(|(_, f)| *f >= floor);
            Ok(ranked)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundedPair {
    /// Ontology disease id when grounded, otherwise the normalized surface.
    pub disease: String,
    pub disease_grounded: bool,
    pub disease_surface: String,
    pub location_id: String,
    pub location_surface: String,
    pub corpus_freq: u64,
    pub tier: ResolutionTier,
}

/// Step 4 for one ranked pair. `None` when the location is not in the ontology.
pub fn ground_pair<R>(
    key: &PairKey,
    freq: u64,
    ontology: &Ontology,
    resolver: R,
    context: &ResolutionContext,
) -> Option<GroundedPair>
where
    R: Fn(&[&GeoLocation], &ResolutionContext) -> Option<ResolvedLocation>,
{
    let candidates = ontology.lookup_location_candidates(&key.location);
    let resolved = resolver(&candidates, context)?;
    let (disease, disease_grounded) = match ontology.lookup_disease(&key.disease) {
        Some(concept) => (concept.id.clone(), true),
        None => (key.disease.clone(), false),
    };
    Some(GroundedPair {
        disease,
        disease_grounded,
        disease_surface: key.disease.clone(),
        location_id: resolved.location.id,
        location_surface: key.location.clone(),
        corpus_freq: freq,
        tier: resolved.tier,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutbreakEvent {
    pub disease: String,
    pub disease_grounded: bool,
    pub location_id: String,
    pub location_surface: String,
    pub corpus_freq: u64,
    /// Supporting stories, oldest first.
    pub story_ids: Vec<String>,
    pub first_seen: DateTime<Utc>,
    pub detected_at: DateTime<Utc>,
    pub tier: ResolutionTier,
}

impl OutbreakEvent {
    /// Identity of the plotted marker.
    pub fn key(&self) -> String {
        format!(
            "{}{}@{}",
            if self.disease_grounded { "" } else { "~" },
            self.disease,
            self.location_id
        )
    }
}

/// Whether `entity` starts before the character midpoint of `text_chars`.
pub fn in_first_half(entity: &AnnotatedEntity, text_chars: usize) -> bool {
    2 * entity.start < text_chars
}

/// Step 5 plus merging of pairs that ground to the same marker.
pub fn remap_events(
    grounded: &[GroundedPair],
    window_stories: &[(&NewsStory, &[AnnotatedEntity])],
    ontology: &Ontology,
    detected_at: DateTime<Utc>,
) -> Vec<OutbreakEvent> {
    struct FirstHalf<'a> {
        story: &'a NewsStory,
        diseases: BTreeSet<String>,
        locations: BTreeSet<String>,
    }
    let prepared: Vec<FirstHalf> = window_stories
        .iter()
        .map(|(story, entities)| {
            let n = story.text().chars().count();
            let mut fh = FirstHalf {
                story,
                diseases: BTreeSet::new(),
                locations: BTreeSet::new(),
            };
            for e in entities.iter().filter(|e| in_first_half(e, n)) {
                match e.class {
                    EntityClass::Disease => {
                        fh.diseases.insert(normalize(&e.surface));
                    }
                    EntityClass::Location => {
                        fh.locations.insert(normalize(&e.surface));
                    }
                    _ => {}
                }
            }
            fh
        })
        .collect();

    let mut merged: Vec<(OutbreakEvent, BTreeSet<(DateTime<Utc>, String)>)> = Vec::new();
    let mut index: HashMap<(String, bool, String), usize> = HashMap::new();
    for pair in grounded {
        let disease_matches = |surface: &String| {
            if pair.disease_grounded {
                ontology
                    .disease(&pair.disease)
                    .is_some_and(|d| d.synonyms.contains(surface))
            } else {
                *surface == pair.disease
            }
        };
        let support: BTreeSet<(DateTime<Utc>, String)> = prepared
            .iter()
            .filter(|fh| fh.locations.contains(&pair.location_surface))
            .filter(|fh| fh.diseases.iter().any(disease_matches))
            .map(|fh| (fh.story.published_at, fh.story.id.clone()))
            .collect();
        if support.is_empty() {
            continue;
        }
        let key = (pair.disease.clone(), pair.disease_grounded, pair.location_id.clone());
        match index.get(&key) {
            Some(&i) => {
                let (event, stories) = &mut merged[i];
                event.corpus_freq += pair.corpus_freq;
                stories.extend(support);
            }
            None => {
                index.insert(key, merged.len());
                merged.push((
                    OutbreakEvent {
                        disease: pair.disease.clone(),
                        disease_grounded: pair.disease_grounded,
                        location_id: pair.location_id.clone(),
                        location_surface: pair.location_surface.clone(),
                        corpus_freq: pair.corpus_freq,
                        story_ids: Vec::new(),
                        first_seen: detected_at,
                        detected_at,
                        tier: pair.tier,
                    },
                    support,
                ));
            }
        }
    }

    let mut events: Vec<OutbreakEvent> = merged
        .into_iter()
        .map(|(mut event, stories)| {
            event.first_seen = stories.first().map(|s| s.0).unwrap_or(detected_at);
            event.story_ids = stories.into_iter().map(|s| s.1).collect();
            event
        })
        .collect();
    sort_events(&mut events);
    events
}

/// Frequency descending, then disease, grounding flag and location id.
pub fn sort_events(events: &mut [OutbreakEvent]) {
    events.sort_by(|a, b| {
        b.corpus_freq
            .cmp(&a.corpus_freq)
            .then_with(|| a.disease.cmp(&b.disease))
            .then_with(|| b.disease_grounded.cmp(&a.disease_grounded))
            .then_with(|| a.location_id.cmp(&b.location_id))
    });
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedPair {
    pub location_surface: String,
    pub disease_surface: String,
    pub corpus_freq: u64,
    pub reason: String,
}

impl DroppedPair {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            self.location_surface, self.disease_surface, self.corpus_freq, self.reason
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CycleDiagnostics {
    pub stories_in_window: usize,
    pub relevant_stories: usize,
    pub candidate_pairs: usize,
    pub ranked_pairs: usize,
    pub dropped: Vec<DroppedPair>,
    pub fallbacks: Vec<FallbackRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleOutput {
    pub detected_at: DateTime<Utc>,
    pub events: Vec<OutbreakEvent>,
    pub diagnostics: CycleDiagnostics,
}

impl CycleOutput {
    pub fn dump(&self, ontology: &Ontology) -> String {
        write_event_dump(&self.events, ontology)
    }
}

/// One tagged, classified story of the window.
#[derive(Debug, Clone)]
pub struct AnalyzedStory<'a> {
    pub story: &'a NewsStory,
    pub entities: Vec<AnnotatedEntity>,
    pub label: Label,
}

/// Everything a detection cycle reads besides the story store.
#[derive(Clone, Copy)]
pub struct DetectionPipeline<'a> {
    pub ontology: &'a Ontology,
    pub classifier: &'a ClassifierModel,
    pub tagger: &'a dyn EntityTagger,
    pub sources: &'a SourceRegistry,
    pub threshold: Threshold,
    pub execution: Execution,
}

impl<'a> DetectionPipeline<'a> {
    pub fn new(
        ontology: &'a Ontology,
        classifier: &'a ClassifierModel,
        tagger: &'a dyn EntityTagger,
        sources: &'a SourceRegistry,
    ) -> Self {
        DetectionPipeline {
            ontology,
            classifier,
            tagger,
            sources,
            threshold: Threshold::default(),
            execution: Execution::default(),
        }
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Tags and classifies a batch of stories.
    pub fn analyze<'s>(&self, stories: &[&'s NewsStory]) -> Result<Vec<AnalyzedStory<'s>>, DetectError> {
        self.execution.try_map(stories, |&story| {
            let tagging = |source| DetectError::Tagging {
                story_id: story.id.clone(),
                source,
            };
            let entities = self.tagger.tag(story).map_err(tagging)?;
            validate_annotations(&story.text(), &entities).map_err(tagging)?;
            let features = extract_features(story, &entities).map_err(|source| DetectError::Classifier {
                story_id: story.id.clone(),
                source,
            })?;
            let label = self.classifier.predict(&features).label;
            Ok(AnalyzedStory {
                story,
                entities,
                label,
            })
        })
    }

    /// Runs one cycle over stories published in `[now - 24h, now)`.
    /// Any component failure aborts the whole cycle.
    pub fn run_cycle(&self, store: &StoryStore, now: DateTime<Utc>) -> Result<CycleOutput, DetectError> {
        if matches!(self.threshold, Threshold::TopK(0) | Threshold::MinFrequency(0)) {
            return Err(DetectError::InvalidThreshold);
        }
        let window = store.select_window(now - DETECTION_WINDOW, now, now)?;
        let analyzed = self.analyze(&window)?;
        let relevant: Vec<&AnalyzedStory> = analyzed
            .iter()
            .filter(|a| a.label == Label::Relevant)
            .collect();

        let per_story: Vec<(String, Vec<PairCandidate>)> = relevant
            .iter()
            .map(|a| (a.story.id.clone(), detect_story_pairs(&a.entities)))
            .collect();
        let table = aggregate_frequencies(&per_story);
        let ranked = rank_top_pairs(&table, self.threshold)?;

        let by_id: HashMap<&str, &AnalyzedStory> =
            relevant.iter().map(|a| (a.story.id.as_str(), *a)).collect();
        let mut diagnostics = CycleDiagnostics {
            stories_in_window: window.len(),
            relevant_stories: relevant.len(),
            candidate_pairs: table.len(),
            ranked_pairs: ranked.len(),
            ..Default::default()
        };
        let mut grounded = Vec::new();
        for (key, freq) in &ranked {
            let contributing: Vec<&AnalyzedStory> = table
                .get(key)
                .map(|s| s.story_ids.iter().filter_map(|id| by_id.get(id.as_str()).copied()).collect())
                .unwrap_or_default();
            let context = self.context_for(&contributing);
            match ground_pair(key, *freq, self.ontology, resolve, &context) {
                Some(pair) => {
                    if pair.tier == ResolutionTier::Fallback {
                        diagnostics.fallbacks.push(FallbackRecord {
                            surface: key.location.clone(),
                            chosen_id: pair.location_id.clone(),
                            candidate_ids: self
                                .ontology
                                .lookup_location_candidates(&key.location)
                                .iter()
                                .map(|l| l.id.clone())
                                .collect(),
                        });
                    }
                    grounded.push(pair);
                }
                None => diagnostics.dropped.push(DroppedPair {
                    location_surface: key.location.clone(),
                    disease_surface: key.disease.clone(),
                    corpus_freq: *freq,
                    reason: "location not in geographical ontology".into(),
                }),
            }
        }

        let window_pairs: Vec<(&NewsStory, &[AnnotatedEntity])> = relevant
            .iter()
            .map(|a| (a.story, a.entities.as_slice()))
            .collect();
        let events = remap_events(&grounded, &window_pairs, self.ontology, now);
        Ok(CycleOutput {
            detected_at: now,
            events,
            diagnostics,
        })
    }

    /// Country evidence from the stories behind a pair. The source hint is
    /// used only when all hinted sources agree.
    fn context_for(&self, stories: &[&AnalyzedStory]) -> ResolutionContext {
        let hints: BTreeSet<&str> = stories
            .iter()
            .filter_map(|a| self.sources.country_hint(&a.story.source_id))
            .collect();
        let hint = match hints.len() {
            1 => hints.into_iter().next().map(str::to_string),
            _ => None,
        };
        let texts: Vec<(String, &[AnnotatedEntity])> = stories
            .iter()
            .map(|a| (a.story.text(), a.entities.as_slice()))
            .collect();
        ResolutionContext::from_stories(
            self.ontology,
            texts.iter().map(|(t, e)| (t.as_str(), *e)),
            hint,
        )
    }
}

/// `%Y-%m-%dT%H:%M:%SZ`, the timestamp form used in dumps.
pub fn format_timestamp(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// `detected_at<TAB>disease<TAB>grounded<TAB>location_id<TAB>lat<TAB>lon<TAB>corpus_freq<TAB>story_ids`
pub fn event_dump_line(event: &OutbreakEvent, ontology: &Ontology) -> String {
    let (lat, lon) = ontology
        .location(&event.location_id)
        .map(|l| (l.latitude, l.longitude))
        .unwrap_or((f64::NAN, f64::NAN));
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        format_timestamp(event.detected_at),
        event.disease,
        event.disease_grounded,
        event.location_id,
        lat,
        lon,
        event.corpus_freq,
        event.story_ids.join(",")
    )
}

pub fn write_event_dump(events: &[OutbreakEvent], ontology: &Ontology) -> String {
    events
        .iter()
        .map(|e| event_dump_line(e, ontology) + "\n")
        .collect()
}

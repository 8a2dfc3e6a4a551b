//! Event queries with the console's filter vocabulary, and the snapshot
//! that the detection cycle publishes for readers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Datelike, Duration, NaiveTime, Utc};
use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::{sort_events, CycleOutput, OutbreakEvent};
use crate::feed::{dedup_initial_headline, Genre, NewsStory, StoryStore, RETENTION};
use crate::geo::ResolutionTier;
use crate::ontology::{Ontology, Syndrome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatePreset {
    Last30Days,
    ThreeWeeks,
    TwoWeeks,
    OneWeek,
    ThisWeek,
    Today,
}

impl DatePreset {
    pub const ALL: [DatePreset; 6] = [
        DatePreset::Last30Days,
        DatePreset::ThreeWeeks,
        DatePreset::TwoWeeks,
        DatePreset::OneWeek,
        DatePreset::ThisWeek,
        DatePreset::Today,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatePreset::Last30Days => "last_30_days",
            DatePreset::ThreeWeeks => "three_weeks",
            DatePreset::TwoWeeks => "two_weeks",
            DatePreset::OneWeek => "one_week",
            DatePreset::ThisWeek => "this_week",
            DatePreset::Today => "today",
        }
    }
}

impl fmt::Display for DatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatePreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        DatePreset::ALL
            .into_iter()
            .find(|p| p.as_str() == key)
            .ok_or_else(|| format!("unknown range `{s}`"))
    }
}

/// `[from, now)` for a preset. Weeks start on Monday, days at midnight UTC.
pub fn resolve_date_preset(preset: DatePreset, now: DateTime<Utc>) -> (DateTime<Utc>, DateTime<Utc>) {
    let midnight = now.date_naive().and_time(NaiveTime::MIN).and_utc();
    let from = match preset {
        DatePreset::Today => midnight,
        DatePreset::ThisWeek => {
            midnight - Duration::days(now.weekday().num_days_from_monday() as i64)
        }
        DatePreset::OneWeek => now - Duration::days(7),
        DatePreset::TwoWeeks => now - Duration::days(14),
        DatePreset::ThreeWeeks => now - Duration::days(21),
        DatePreset::Last30Days => now - Duration::days(30),
    };
    (from, now)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventRange {
    Preset(DatePreset),
    /// Half-open `[from, to)`.
    Explicit { from: DateTime<Utc>, to: DateTime<Utc> },
}

impl EventRange {
    pub fn bounds(self, now: DateTime<Utc>) -> (DateTime<Utc>, DateTime<Utc>) {
        match self {
            EventRange::Preset(p) => resolve_date_preset(p, now),
            EventRange::Explicit { from, to } => (from, to),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[error("{field}: {message}")]
pub struct QueryError {
    pub field: String,
    pub message: String,
}

impl QueryError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        QueryError {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Filters over the event snapshot. Empty genre and syndrome sets mean "all".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventQuery {
    pub range: EventRange,
    pub genres: BTreeSet<Genre>,
    pub syndromes: BTreeSet<Syndrome>,
    /// Explicit disease selection (the agent checkboxes).
    pub disease_ids: Option<BTreeSet<String>>,
    pub include_ungrounded: bool,
    pub initial_headline_only: bool,
}

impl Default for EventQuery {
    fn default() -> Self {
        EventQuery {
            range: EventRange::Preset(DatePreset::Last30Days),
            genres: BTreeSet::new(),
            syndromes: BTreeSet::new(),
            disease_ids: None,
            include_ungrounded: false,
            initial_headline_only: false,
        }
    }
}

fn parse_list<T: FromStr<Err = String> + Ord>(field: &str, value: &str) -> Result<BTreeSet<T>, QueryError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| QueryError::new(field, e)))
        .collect()
}

fn parse_flag(field: &str, value: &str) -> Result<bool, QueryError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(QueryError::new(field, format!("expected a boolean, got `{value}`"))),
    }
}

fn parse_time(field: &str, value: &str) -> Result<DateTime<Utc>, QueryError> {
    DateTime::parse_from_rfc3339(value.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| QueryError::new(field, format!("expected an RFC 3339 timestamp: {e}")))
}

impl EventQuery {
    /// Builds a query from URL parameters: `range` or `from`+`to`, comma
    /// lists `genres`, `syndromes`, `diseases`, and the flags
    /// `include_ungrounded` and `initial_headline_only`.
    pub fn from_params<'a>(
        params: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, QueryError> {
        let mut q = EventQuery::default();
        let (mut preset, mut from, mut to) = (None, None, None);
        for (key, value) in params {
            match key {
                "range" => preset = Some(value.parse().map_err(|e| QueryError::new("range", e))?),
                "from" => from = Some(parse_time("from", value)?),
                "to" => to = Some(parse_time("to", value)?),
                "genres" => q.genres = parse_list("genres", value)?,
                "syndromes" => q.syndromes = parse_list("syndromes", value)?,
                "diseases" => {
                    q.disease_ids = Some(
                        value
                            .split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(str::to_string)
                            .collect(),
                    )
                }
                "include_ungrounded" => q.include_ungrounded = parse_flag(key, value)?,
                "initial_headline_only" => q.initial_headline_only = parse_flag(key, value)?,
                other => return Err(QueryError::new(other, "unknown parameter")),
            }
        }
        q.range = match (preset, from, to) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(QueryError::new("range", "a preset cannot be combined with from/to"))
            }
            (Some(p), None, None) => EventRange::Preset(p),
            (None, Some(from), Some(to)) => EventRange::Explicit { from, to },
            (None, Some(_), None) => return Err(QueryError::new("to", "required with `from`")),
            (None, None, Some(_)) => return Err(QueryError::new("from", "required with `to`")),
            (None, None, None) => EventRange::Preset(DatePreset::Last30Days),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        if let EventRange::Explicit { from, to } = self.range {
            if from > to {
                return Err(QueryError::new("from", "must not be later than `to`"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceLink {
    pub provider: String,
    pub url: String,
}

pub const REFERENCE_PROVIDERS: [(&str, &str); 3] = [
    ("PubMed", "https://pubmed.ncbi.nlm.nih.gov/?term="),
    ("HighWire", "https://highwire.stanford.edu/cgi/searchresults?fulltext="),
    ("Google Scholar", "https://scholar.google.com/scholar?q="),
];

const QUERY_ENCODE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

/// Literature search links for `disease country "case"`; an empty country is omitted.
pub fn build_reference_links(disease_display: &str, country_name: &str) -> Vec<ReferenceLink> {
    let terms: Vec<&str> = [disease_display.trim(), country_name.trim(), "\"case\""]
        .into_iter()
        .filter(|t| !t.is_empty())
        .collect();
    let query = utf8_percent_encode(&terms.join(" "), QUERY_ENCODE).to_string();
    REFERENCE_PROVIDERS
        .iter()
        .map(|(provider, base)| ReferenceLink {
            provider: provider.to_string(),
            url: format!("{base}{query}"),
        })
        .collect()
}

/// Events and the stories they cite, as published by one detection cycle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventSet {
    pub detected_at: Option<DateTime<Utc>>,
    pub events: Vec<OutbreakEvent>,
    pub stories: BTreeMap<String, NewsStory>,
}

impl EventSet {
    pub fn new(
        detected_at: Option<DateTime<Utc>>,
        mut events: Vec<OutbreakEvent>,
        stories: impl IntoIterator<Item = NewsStory>,
    ) -> Self {
        sort_events(&mut events);
        EventSet {
            detected_at,
            events,
            stories: stories.into_iter().map(|s| (s.id.clone(), s)).collect(),
        }
    }

    /// Snapshot of a single cycle.
    pub fn from_cycle(output: &CycleOutput, store: &StoryStore) -> Self {
        EventSet::default().merge_cycle(output, store)
    }

    /// Folds a new cycle into the accumulated set. Events with the same
    /// marker identity are merged (story union, earliest first_seen, latest
    /// detection and frequency); events not re-detected within the retention
    /// horizon are dropped.
    pub fn merge_cycle(&self, output: &CycleOutput, store: &StoryStore) -> Self {
        let mut by_key: BTreeMap<String, OutbreakEvent> =
            self.events.iter().map(|e| (e.key(), e.clone())).collect();
        let mut stories = self.stories.clone();
        for e in &output.events {
            for id in &e.story_ids {
                if let Some(s) = store.get(id) {
                    stories.entry(id.clone()).or_insert_with(|| s.clone());
                }
            }
            match by_key.get_mut(&e.key()) {
                Some(old) => {
                    let mut ids: BTreeSet<(DateTime<Utc>, String)> = BTreeSet::new();
                    for id in old.story_ids.iter().chain(&e.story_ids) {
                        let t = stories.get(id).map(|s| s.published_at).unwrap_or(e.first_seen);
                        ids.insert((t, id.clone()));
                    }
                    old.story_ids = ids.into_iter().map(|p| p.1).collect();
                    old.first_seen = old.first_seen.min(e.first_seen);
                    old.detected_at = e.detected_at;
                    old.corpus_freq = e.corpus_freq;
                    old.tier = e.tier;
                }
                None => {
                    by_key.insert(e.key(), e.clone());
                }
            }
        }
        let horizon = output.detected_at - RETENTION;
        let events: Vec<OutbreakEvent> = by_key
            .into_values()
            .filter(|e| e.detected_at >= horizon)
            .collect();
        let cited: BTreeSet<&String> = events.iter().flat_map(|e| &e.story_ids).collect();
        stories.retain(|id, _| cited.contains(id));
        EventSet::new(Some(output.detected_at), events, stories.into_values())
    }
}

/// The current snapshot, replaced wholesale so readers never see a mix of cycles.
#[derive(Debug, Default)]
pub struct SharedEventSet {
    inner: RwLock<Arc<EventSet>>,
}

impl SharedEventSet {
    pub fn new(set: EventSet) -> Self {
        SharedEventSet {
            inner: RwLock::new(Arc::new(set)),
        }
    }

    pub fn load(&self) -> Arc<EventSet> {
        self.inner.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn store(&self, set: EventSet) {
        *self.inner.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(set);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryRef {
    pub id: String,
    pub headline: String,
    pub url: String,
    pub source_id: String,
    pub genre: Genre,
    pub published_at: DateTime<Utc>,
}

impl From<&NewsStory> for StoryRef {
    fn from(s: &NewsStory) -> Self {
        StoryRef {
            id: s.id.clone(),
            headline: s.headline.clone(),
            url: s.url.clone(),
            source_id: s.source_id.clone(),
            genre: s.genre,
            published_at: s.published_at,
        }
    }
}

/// An event as the map console shows it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventView {
    pub id: String,
    pub disease: String,
    pub disease_name: String,
    pub disease_grounded: bool,
    /// Selects the marker symbol; equal to `disease_grounded`.
    pub bco_linked: bool,
    pub syndromes: Vec<Syndrome>,
    pub location_id: String,
    pub location_name: String,
    pub country_id: String,
    pub country_name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub corpus_freq: u64,
    pub first_seen: DateTime<Utc>,
    pub detected_at: DateTime<Utc>,
    pub resolution: ResolutionTier,
    pub stories: Vec<StoryRef>,
    pub reference_links: Vec<ReferenceLink>,
}

/// Applies every filter axis; results are newest first (ties by id).
pub fn query_events(
    set: &EventSet,
    query: &EventQuery,
    ontology: &Ontology,
    now: DateTime<Utc>,
) -> Result<Vec<EventView>, QueryError> {
    query.validate()?;
    let (from, to) = query.range.bounds(now);
    let restricts_disease = !query.syndromes.is_empty() || query.disease_ids.is_some();
    let mut out = Vec::new();
    for e in &set.events {
        if e.first_seen < from || e.first_seen >= to {
            continue;
        }
        let concept = if e.disease_grounded {
            ontology.disease(&e.disease)
        } else {
            None
        };
        match concept {
            Some(c) => {
                if !query.syndromes.is_empty() && c.syndromes.is_disjoint(&query.syndromes) {
                    continue;
                }
                if query.disease_ids.as_ref().is_some_and(|ids| !ids.contains(&c.id)) {
                    continue;
                }
            }
            None => {
                if restricts_disease && !query.include_ungrounded {
                    continue;
                }
            }
        }
        let mut stories: Vec<NewsStory> = e
            .story_ids
            .iter()
            .filter_map(|id| set.stories.get(id))
            .filter(|s| query.genres.is_empty() || query.genres.contains(&s.genre))
            .cloned()
            .collect();
        if stories.is_empty() {
            continue;
        }
        if query.initial_headline_only {
            stories = dedup_initial_headline(&stories);
        }
        out.push(event_view(e, concept.map(|c| c.root_name.as_str()), &stories, ontology));
    }
    out.sort_by(|a, b| b.first_seen.cmp(&a.first_seen).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}

fn event_view(
    e: &OutbreakEvent,
    disease_name: Option<&str>,
    stories: &[NewsStory],
    ontology: &Ontology,
) -> EventView {
    let loc = ontology.location(&e.location_id);
    let country = ontology.country_of(&e.location_id);
    let disease_name = disease_name.unwrap_or(&e.disease).to_string();
    let country_name = country.map(|c| c.name.clone()).unwrap_or_default();
    let syndromes = ontology
        .disease(&e.disease)
        .filter(|_| e.disease_grounded)
        .map(|c| c.syndromes.iter().copied().collect())
        .unwrap_or_default();
    EventView {
        id: e.key(),
        reference_links: build_reference_links(&disease_name, &country_name),
        disease: e.disease.clone(),
        disease_name,
        disease_grounded: e.disease_grounded,
        bco_linked: e.disease_grounded,
        syndromes,
        location_id: e.location_id.clone(),
        location_name: loc.map(|l| l.name.clone()).unwrap_or_else(|| e.location_surface.clone()),
        country_id: country.map(|c| c.id.clone()).unwrap_or_default(),
        country_name,
        latitude: loc.map_or(f64::NAN, |l| l.latitude),
        longitude: loc.map_or(f64::NAN, |l| l.longitude),
        corpus_freq: e.corpus_freq,
        first_seen: e.first_seen,
        detected_at: e.detected_at,
        resolution: e.tier,
        stories: stories.iter().map(StoryRef::from).collect(),
    }
}

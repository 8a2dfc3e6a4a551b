//! Feed sources, stories, and the rolling story store.

mod parse;
mod store;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geo::TldTable;
use crate::normalize::normalize;

pub use parse::{fetch_and_parse, FetchOutcome, ItemDiagnostic, Transport, TransportError};
pub use store::{parse_story_lines, StoryLog, StoryStore, RETENTION};

#[derive(Debug, Error, PartialEq)]
pub enum FeedError {
    #[error("source `{source_id}`: fetch failed ({message}); retry after {retry_after_secs}s")]
    Transport {
        source_id: String,
        message: String,
        retry_after_secs: u64,
    },
    #[error("source `{source_id}`: undecodable feed document: {message}")]
    Parse { source_id: String, message: String },
    #[error("source list line {line}: {message}")]
    SourceList { line: usize, message: String },
    #[error("duplicate source id `{0}`")]
    DuplicateSource(String),
    #[error("invalid window: from {from} is after to {to}")]
    InvertedWindow {
        from: DateTime<Utc>,
        to: DateTime<Utc>,
    },
    #[error("story log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("story log io: {0}")]
    Io(String),
}

/// Publication type of a feed, a static property of the outlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genre {
    Press,
    Official,
    Business,
    Mixed,
}

impl Genre {
    pub const ALL: [Genre; 4] = [Genre::Press, Genre::Official, Genre::Business, Genre::Mixed];

    pub fn as_str(self) -> &'static str {
        match self {
            Genre::Press => "press",
            Genre::Official => "official",
            Genre::Business => "business",
            Genre::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        Genre::ALL
            .into_iter()
            .find(|g| g.as_str() == key)
            .ok_or_else(|| format!("unknown genre `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedSource {
    pub id: String,
    pub url: String,
    pub genre: Genre,
    pub country_hint: Option<String>,
    pub poll_enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsStory {
    pub id: String,
    pub source_id: String,
    pub url: String,
    pub headline: String,
    pub body: String,
    pub published_at: DateTime<Utc>,
    pub fetched_at: DateTime<Utc>,
    pub genre: Genre,
}

impl NewsStory {
    /// Builds a story with its content-derived id.
    pub fn new(
        source: &FeedSource,
        url: impl Into<String>,
        headline: impl Into<String>,
        body: impl Into<String>,
        published_at: DateTime<Utc>,
        fetched_at: DateTime<Utc>,
    ) -> Self {
        let url = url.into();
        let headline = headline.into();
        NewsStory {
            id: story_id(&url, &headline),
            source_id: source.id.clone(),
            url,
            headline,
            body: body.into(),
            published_at,
            fetched_at,
            genre: source.genre,
        }
    }

    /// Headline and body joined by a newline; the body is omitted when empty.
    /// All character offsets in annotations refer to this string.
    pub fn text(&self) -> String {
        if self.body.is_empty() {
            self.headline.clone()
        } else {
            format!("{}\n{}", self.headline, self.body)
        }
    }
}

/// First 16 hex digits of SHA-256 over `url`, a unit separator, and `headline`.
pub fn story_id(url: &str, headline: &str) -> String {
    let mut h = Sha256::new();
    h.update(url.as_bytes());
    h.update([0x1f]);
    h.update(headline.as_bytes());
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Source registry keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceRegistry {
    sources: BTreeMap<String, FeedSource>,
}

impl SourceRegistry {
    pub fn new(sources: impl IntoIterator<Item = FeedSource>) -> Result<Self, FeedError> {
        let mut map = BTreeMap::new();
        for s in sources {
            if map.contains_key(&s.id) {
                return Err(FeedError::DuplicateSource(s.id));
            }
            map.insert(s.id.clone(), s);
        }
        Ok(SourceRegistry { sources: map })
    }

    pub fn get(&self, id: &str) -> Option<&FeedSource> {
        self.sources.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeedSource> {
        self.sources.values()
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn country_hint(&self, source_id: &str) -> Option<&str> {
        self.sources.get(source_id)?.country_hint.as_deref()
    }
}

/// Parses a source list: `id<TAB>url<TAB>genre<TAB>country_hint` per line,
/// hint optional. Without an explicit hint the URL's country-code TLD is
/// consulted when a table is supplied.
pub fn parse_source_list(text: &str, tlds: Option<&TldTable>) -> Result<SourceRegistry, FeedError> {
    let mut sources = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| FeedError::SourceList { line: i + 1, message };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(err(format!("expected at least 3 fields, found {}", fields.len())));
        }
        let (id, url) = (fields[0], fields[1]);
        if id.is_empty() || url.is_empty() {
            return Err(err("empty id or url".into()));
        }
        let genre = fields[2].parse::<Genre>().map_err(err)?;
        let country_hint = match fields.get(3).copied().filter(|h| !h.is_empty()) {
            Some(h) => Some(h.to_string()),
            None => tlds.and_then(|t| t.country_for_url(url)).map(str::to_string),
        };
        sources.push(FeedSource {
            id: id.to_string(),
            url: url.to_string(),
            genre,
            country_hint,
            poll_enabled: true,
        });
    }
    SourceRegistry::new(sources)
}

/// Keeps the earliest story (ties: smallest id) per normalized headline,
/// preserving the input order of survivors.
pub fn dedup_initial_headline(stories: &[NewsStory]) -> Vec<NewsStory> {
    let mut winner: HashMap<String, usize> = HashMap::new();
    for (i, s) in stories.iter().enumerate() {
        let key = normalize(&s.headline);
        match winner.get(&key) {
            Some(&j) => {
                let cur = &stories[j];
                if (s.published_at, &s.id) < (cur.published_at, &cur.id) {
                    winner.insert(key, i);
                }
            }
            None => {
                winner.insert(key, i);
            }
        }
    }
    let mut keep = vec![false; stories.len()];
    for &i in winner.values() {
        keep[i] = true;
    }
    stories
        .iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then(|| s.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, TimeZone};
    use proptest::prelude::*;

    fn source(genre: Genre) -> FeedSource {
        FeedSource {
            id: "s1".into(),
            url: "http://example.org/rss".into(),
            genre,
            country_hint: None,
            poll_enabled: true,
        }
    }

    fn story(headline: &str, url: &str, hours: i64) -> NewsStory {
        let t = Utc.with_ymd_and_hms(2007, 11, 1, 0, 0, 0).unwrap() + Duration::hours(hours);
        NewsStory::new(&source(Genre::Press), url, headline, "", t, t)
    }

    #[test]
    fn story_id_is_content_derived() {
        let a = story("Flu in Camden", "http://a/1", 0);
        let b = story("Flu in Camden", "http://a/1", 5);
        let c = story("Flu in Camden", "http://a/2", 0);
        assert_eq!(a.id, b.id);
        assert_ne!(a.id, c.id);
        assert_eq!(a.id.len(), 16);
    }

    #[test]
    fn text_joins_headline_and_body() {
        let mut s = story("x", "u", 0);
        assert_eq!(s.text(), "x");
        s.body = "y z".into();
        assert_eq!(s.text(), "x\ny z");
    }

    #[test]
    fn dedup_keeps_earliest() {
        let late = story("Bird flu in China", "http://a/1", 1);
        let early = story("bird  flu in china", "http://b/1", 0);
        let out = dedup_initial_headline(&[late, early.clone()]);
        assert_eq!(out, vec![early]);
    }

    #[test]
    fn dedup_distinct_is_identity() {
        let v = vec![story("a", "1", 0), story("b", "2", 0), story("c", "3", 0)];
        assert_eq!(dedup_initial_headline(&v), v);
    }

    #[test]
    fn dedup_tie_breaks_on_smallest_id() {
        let v = vec![story("same", "1", 0), story("same", "2", 0), story("same", "3", 0)];
        let min = v.iter().map(|s| s.id.clone()).min().unwrap();
        let out = dedup_initial_headline(&v);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].id, min);
    }

    #[test]
    fn source_list_parses_with_optional_hint() {
        let tlds = TldTable::parse("uk\tGB\nau\tAU\n");
        let text = "# sources\nbbc\thttp://news.bbc.co.uk/rss.xml\tpress\n\
                    promed\thttp://promedmail.org/feed\tofficial\tUS\n\
                    gnews\thttp://news.google.com/rss\tpress\t\n";
        let reg = parse_source_list(text, Some(&tlds)).unwrap();
        assert_eq!(reg.len(), 3);
        assert_eq!(reg.country_hint("bbc"), Some("GB"));
        assert_eq!(reg.country_hint("promed"), Some("US"));
        assert_eq!(reg.country_hint("gnews"), None);
        assert_eq!(reg.get("promed").unwrap().genre, Genre::Official);
    }

    #[test]
    fn source_list_errors() {
        assert!(matches!(
            parse_source_list("a\thttp://x\tblog\n", None),
            Err(FeedError::SourceList { line: 1, .. })
        ));
        assert!(matches!(
            parse_source_list("a\thttp://x\n", None),
            Err(FeedError::SourceList { .. })
        ));
        assert_eq!(
            parse_source_list("a\thttp://x\tpress\na\thttp://y\tmixed\n", None),
            Err(FeedError::DuplicateSource("a".into()))
        );
    }

    proptest! {
        #[test]
        fn dedup_is_idempotent(items in prop::collection::vec((0usize..4, 0i64..3), 0..12)) {
            let heads = ["Flu in Camden", "flu in camden", "Rabies", "Cholera outbreak"];
            let stories: Vec<_> = items
                .iter()
                .enumerate()
                .map(|(i, (h, t))| story(heads[*h], &format!("u{i}"), *t))
                .collect();
            let once = dedup_initial_headline(&stories);
            prop_assert_eq!(dedup_initial_headline(&once), once);
        }
    }
}

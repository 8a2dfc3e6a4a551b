use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};

use super::{FeedError, NewsStory};

/// Stories older than this (relative to the caller's `now`) are never returned.
pub const RETENTION: Duration = Duration::days(30);

/// Append-ordered story collection with id and time-range lookup.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StoryStore {
    stories: Vec<NewsStory>,
    by_id: HashMap<String, usize>,
}

impl StoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the stories whose ids are not yet stored; returns how many were new.
    pub fn insert_batch(&mut self, batch: impl IntoIterator<Item = NewsStory>) -> usize {
        let before = self.stories.len();
        for story in batch {
            if self.by_id.contains_key(&story.id) {
                continue;
            }
            self.by_id.insert(story.id.clone(), self.stories.len());
            self.stories.push(story);
        }
        self.stories.len() - before
    }

    pub fn get(&self, id: &str) -> Option<&NewsStory> {
        self.by_id.get(id).map(|&i| &self.stories[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.stories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stories.is_empty()
    }

    /// Stories in append order.
    pub fn iter(&self) -> impl Iterator<Item = &NewsStory> {
        self.stories.iter()
    }

    /// Stories with `published_at` in `[from, to)` and inside the retention
    /// horizon of `now`, newest first, ties by id.
    pub fn select_window(
        &self,
        from: DateTime<Utc>,
        to: DateTime<Utc>,
        now: DateTime<Utc>,
    ) -> Result<Vec<&NewsStory>, FeedError> {
        if from > to {
            return Err(FeedError::InvertedWindow { from, to });
        }
        let floor = from.max(now - RETENTION);
        let mut out: Vec<&NewsStory> = self
            .stories
            .iter()
            .filter(|s| s.published_at >= floor && s.published_at < to)
            .collect();
        out.sort_by(|a, b| {
            b.published_at
                .cmp(&a.published_at)
                .then_with(|| a.id.cmp(&b.id))
        });
        Ok(out)
    }

    /// Drops stories that fell out of the retention horizon; returns how many.
    pub fn compact(&mut self, now: DateTime<Utc>) -> usize {
        let floor = now - RETENTION;
        let before = self.stories.len();
        self.stories.retain(|s| s.published_at >= floor);
        self.by_id = self
            .stories
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), i))
            .collect();
        before - self.stories.len()
    }
}

/// Append-only JSON-lines persistence for the story store.
#[derive(Debug, Clone)]
pub struct StoryLog {
    path: PathBuf,
}

impl StoryLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        StoryLog { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, stories: &[NewsStory]) -> Result<(), FeedError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| FeedError::Io(e.to_string()))?;
        let mut w = BufWriter::new(file);
        for s in stories {
            let line = serde_json::to_string(s).map_err(|e| FeedError::Io(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| FeedError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| FeedError::Io(e.to_string()))
    }

    /// Rebuilds a store from the log; a missing file is an empty store.
    pub fn replay(&self) -> Result<StoryStore, FeedError> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(StoryStore::new()),
            Err(e) => return Err(FeedError::Io(e.to_string())),
        };
        let mut lines = Vec::new();
        for line in BufReader::new(file).lines() {
            lines.push(line.map_err(|e| FeedError::Io(e.to_string()))?);
        }
        let mut store = StoryStore::new();
        store.insert_batch(parse_story_lines(lines.iter().map(String::as_str))?);
        Ok(store)
    }
}

/// Parses story records, one JSON object per non-empty line.
pub fn parse_story_lines<'a>(
    lines: impl IntoIterator<Item = &'a str>,
) -> Result<Vec<NewsStory>, FeedError> {
    let mut out = Vec::new();
    for (i, line) in lines.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let story: NewsStory = serde_json::from_str(line).map_err(|e| FeedError::Log {
            line: i + 1,
            message: e.to_string(),
        })?;
        if story.headline.trim().is_empty() {
            return Err(FeedError::Log {
                line: i + 1,
                message: "empty headline".into(),
            });
        }
        out.push(story);
    }
    Ok(out)
}

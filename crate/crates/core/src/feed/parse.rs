use std::time::Duration;

use chrono::{DateTime, Utc};

use super::{FeedError, FeedSource, NewsStory};

/// Default retry hint when a transport gives none: one polling interval.
pub const DEFAULT_RETRY_AFTER: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone, PartialEq)]
pub struct TransportError {
    pub message: String,
    pub retry_after: Option<Duration>,
}

/// Byte fetcher behind the feed reader. Production uses HTTP, tests inject fixtures.
pub trait Transport: Send + Sync {
    fn fetch(&self, url: &str) -> Result<Vec<u8>, TransportError>;
}

impl<F> Transport for F
where
    F: Fn(&str) -> Result<Vec<u8>, TransportError> + Send + Sync,
{
    fn fetch(&self, url: &str) -> Result<Vec<u8>, TransportError> {
        self(url)
    }
}

/// A feed item that was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemDiagnostic {
    pub source_id: String,
    pub item_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FetchOutcome {
    pub stories: Vec<NewsStory>,
    pub skipped: Vec<ItemDiagnostic>,
}

/// Fetches one source and converts every well-formed RSS 2.0 / Atom 1.0
/// item into a story. Items without a headline are skipped individually.
pub fn fetch_and_parse(
    source: &FeedSource,
    transport: &dyn Transport,
    now: DateTime<Utc>,
) -> Result<FetchOutcome, FeedError> {
    let bytes = transport.fetch(&source.url).map_err(|e| FeedError::Transport {
        source_id: source.id.clone(),
        message: e.message,
        retry_after_secs: e.retry_after.unwrap_or(DEFAULT_RETRY_AFTER).as_secs(),
    })?;
    parse_feed_bytes(source, &bytes, now)
}

pub(crate) fn parse_feed_bytes(
    source: &FeedSource,
    bytes: &[u8],
    now: DateTime<Utc>,
) -> Result<FetchOutcome, FeedError> {
    let feed = feed_rs::parser::parse(bytes).map_err(|e| FeedError::Parse {
        source_id: source.id.clone(),
        message: e.to_string(),
    })?;

    let mut out = FetchOutcome::default();
    for (i, entry) in feed.entries.into_iter().enumerate() {
        let headline = entry
            .title
            .as_ref()
            .map(|t| clean_markup(&t.content))
            .unwrap_or_default();
        if headline.is_empty() {
            out.skipped.push(ItemDiagnostic {
                source_id: source.id.clone(),
                item_index: i,
                reason: "missing headline".into(),
            });
            continue;
        }
        let url = entry
            .links
            .first()
            .map(|l| l.href.trim().to_string())
            .filter(|h| !h.is_empty())
            .unwrap_or_else(|| entry.id.clone());
        let body = entry
            .summary
            .as_ref()
            .map(|t| clean_markup(&t.content))
            .filter(|b| !b.is_empty())
            .or_else(|| {
                entry
                    .content
                    .as_ref()
                    .and_then(|c| c.body.as_deref())
                    .map(clean_markup)
            })
            .unwrap_or_default();
        let published_at = entry.published.or(entry.updated).unwrap_or(now);
        out.stories
            .push(NewsStory::new(source, url, headline, body, published_at, now));
    }
    Ok(out)
}

/// Drops HTML tags, decodes the common entities, and collapses whitespace.
fn clean_markup(s: &str) -> String {
    let mut text = String::with_capacity(s.len());
    let mut in_tag = false;
    for c in s.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                text.push(' ');
            }
            _ if !in_tag => text.push(c),
            _ => {}
        }
    }
    let decoded = text
        .replace("&nbsp;", " ")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&apos;", "'")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&");
    decoded.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feed::Genre;
    use chrono::TimeZone;

    fn source() -> FeedSource {
        FeedSource {
            id: "promed".into(),
            url: "http://fixture/rss".into(),
            genre: Genre::Official,
            country_hint: None,
            poll_enabled: true,
        }
    }

    fn now() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2007, 11, 11, 15, 0, 0).unwrap()
    }

    const RSS_THREE: &str = r#"<?xml version="1.0"?>
<rss version="2.0"><channel><title>t</title><link>http://x</link><description>d</description>
<item><title>Equine influenza in Camden</title><link>http://x/1</link>
  <description>&lt;p&gt;Horses in &lt;b&gt;Camden&lt;/b&gt; test positive.&lt;/p&gt;</description>
  <pubDate>Sat, 10 Nov 2007 09:00:00 GMT</pubDate></item>
<item><title>Rabies in Isle of Wight</title><link>http://x/2</link><description>A bat.</description>
  <pubDate>Fri, 09 Nov 2007 10:30:00 GMT</pubDate></item>
<item><title>Cholera update</title><link>http://x/3</link></item>
</channel></rss>"#;

    #[test]
    fn rss_items_become_stories() {
        let t = |_: &str| Ok(RSS_THREE.as_bytes().to_vec());
        let out = fetch_and_parse(&source(), &t, now()).unwrap();
        assert_eq!(out.stories.len(), 3);
        assert!(out.skipped.is_empty());
        assert!(out.stories.iter().all(|s| s.genre == Genre::Official && s.fetched_at == now()));
        assert_eq!(out.stories[0].body, "Horses in Camden test positive.");
        assert_eq!(
            out.stories[1].published_at,
            Utc.with_ymd_and_hms(2007, 11, 9, 10, 30, 0).unwrap()
        );
        // no pubDate: falls back to fetch time
        assert_eq!(out.stories[2].published_at, now());
    }

    #[test]
    fn empty_feed_is_not_an_error() {
        let xml = r#"<rss version="2.0"><channel><title>t</title></channel></rss>"#;
        let t = |_: &str| Ok(xml.as_bytes().to_vec());
        let out = fetch_and_parse(&source(), &t, now()).unwrap();
        assert!(out.stories.is_empty() && out.skipped.is_empty());
    }

    #[test]
    fn missing_headline_is_skipped_per_item() {
        let xml = r#"<rss version="2.0"><channel><title>t</title>
<item><title>Measles in Osaka</title><link>http://x/1</link></item>
<item><link>http://x/2</link><description>no title here</description></item>
<item><title>Dengue in Recife</title><link>http://x/3</link></item>
</channel></rss>"#;
        let t = |_: &str| Ok(xml.as_bytes().to_vec());
        let out = fetch_and_parse(&source(), &t, now()).unwrap();
        assert_eq!(out.stories.len(), 2);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].item_index, 1);
    }

    #[test]
    fn atom_entries_are_supported() {
        let xml = r#"<?xml version="1.0" encoding="utf-8"?>
<feed xmlns="http://www.w3.org/2005/Atom"><title>WHO</title><id>urn:x</id><updated>2007-11-10T00:00:00Z</updated>
<entry><title>Ebola in Uganda</title><id>urn:1</id><link href="http://who/1"/>
<updated>2007-11-10T08:00:00Z</updated><summary>Cases reported.</summary></entry>
</feed>"#;
        let t = |_: &str| Ok(xml.as_bytes().to_vec());
        let out = fetch_and_parse(&source(), &t, now()).unwrap();
        assert_eq!(out.stories.len(), 1);
        assert_eq!(out.stories[0].url, "http://who/1");
        assert_eq!(out.stories[0].body, "Cases reported.");
    }

    #[test]
    fn transport_failure_carries_retry_hint() {
        let t = |_: &str| {
            Err(TransportError {
                message: "503".into(),
                retry_after: None,
            })
        };
        match fetch_and_parse(&source(), &t, now()) {
            Err(FeedError::Transport {
                retry_after_secs, ..
            }) => assert_eq!(retry_after_secs, 3600),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn garbage_is_a_source_level_parse_error() {
        let t = |_: &str| Ok(b"not a feed at all".to_vec());
        assert!(matches!(
            fetch_and_parse(&source(), &t, now()),
            Err(FeedError::Parse { .. })
        ));
    }
}

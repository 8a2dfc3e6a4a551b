//! Toponym disambiguation among same-named ontology locations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ontology::{GeoLocation, LocationKind, Ontology};
use crate::tagger::{AnnotatedEntity, EntityClass};

/// Evidence gathered from the stories that support a pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResolutionContext {
    pub story_texts: String,
    pub mentioned_country_ids: BTreeSet<String>,
    pub source_country_hint: Option<String>,
}

impl ResolutionContext {
    /// Collects country mentions from tagged LOCATION spans. A span counts
    /// as a mention of every country among its candidates.
    pub fn from_stories<'a>(
        ontology: &Ontology,
        stories: impl IntoIterator<Item = (&'a str, &'a [AnnotatedEntity])>,
        source_country_hint: Option<String>,
    ) -> Self {
        let mut texts = Vec::new();
        let mut mentioned = BTreeSet::new();
        for (text, entities) in stories {
            texts.push(text);
            for e in entities.iter().filter(|e| e.class == EntityClass::Location) {
                mentioned.extend(
                    ontology
                        .lookup_location_candidates(&e.surface)
                        .into_iter()
                        .filter(|l| l.kind == LocationKind::Country)
                        .map(|l| l.id.clone()),
                );
            }
        }
        ResolutionContext {
            story_texts: texts.join("\n\n"),
            mentioned_country_ids: mentioned,
            source_country_hint,
        }
    }
}

/// Which rule of the cascade picked the location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionTier {
    Unambiguous,
    ContextCountry,
    SourceHint,
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedLocation {
    pub location: GeoLocation,
    pub tier: ResolutionTier,
}

/// Picks one location:
/// 1. a single candidate;
/// 2. the only candidate whose country is mentioned in the stories;
/// 3. the only candidate whose country matches the source hint;
/// 4. otherwise the smallest id, flagged as a fallback.
pub fn resolve(candidates: &[&GeoLocation], context: &ResolutionContext) -> Option<ResolvedLocation> {
    let mut sorted: Vec<&GeoLocation> = candidates.to_vec();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.dedup_by(|a, b| a.id == b.id);
    let pick = |loc: &GeoLocation, tier| {
        Some(ResolvedLocation {
            location: loc.clone(),
            tier,
        })
    };
    match sorted.as_slice() {
        [] => return None,
        [only] => return pick(only, ResolutionTier::Unambiguous),
        _ => {}
    }
    let in_context: Vec<_> = sorted
        .iter()
        .filter(|l| context.mentioned_country_ids.contains(&l.parent_country_id))
        .collect();
    if let [only] = in_context.as_slice() {
        return pick(only, ResolutionTier::ContextCountry);
    }
    if let Some(hint) = &context.source_country_hint {
        let hinted: Vec<_> = sorted
            .iter()
            .filter(|l| &l.parent_country_id == hint)
            .collect();
        if let [only] = hinted.as_slice() {
            return pick(only, ResolutionTier::SourceHint);
        }
    }
    pick(sorted[0], ResolutionTier::Fallback)
}

/// Diagnostic emitted for every fallback resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackRecord {
    pub surface: String,
    pub chosen_id: String,
    pub candidate_ids: Vec<String>,
}

impl FallbackRecord {
    /// `surface<TAB>chosen_id<TAB>candidate_ids` with ids comma-separated.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}",
            self.surface,
            self.chosen_id,
            self.candidate_ids.join(",")
        )
    }
}

/// Country-code top-level domain to country id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TldTable {
    map: BTreeMap<String, String>,
}

impl TldTable {
    /// Reads `tld<TAB>country_id` lines; `#` lines are comments.
    pub fn parse(text: &str) -> Self {
        let map = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let (tld, country) = l.split_once('\t')?;
                Some((
                    tld.trim().trim_start_matches('.').to_ascii_lowercase(),
                    country.trim().to_string(),
                ))
            })
            .collect();
        TldTable { map }
    }

    /// Country for the URL's host suffix. Generic TLDs (.com, .org, ...) yield nothing.
    pub fn country_for_url(&self, url: &str) -> Option<&str> {
        let rest = url.split_once("://").map_or(url, |(_, r)| r);
        let authority = rest.split(['/', '?', '#']).next()?;
        let host = authority.rsplit('@').next()?.split(':').next()?;
        let tld = host.trim_end_matches('.').rsplit('.').next()?.to_ascii_lowercase();
        self.map.get(&tld).map(String::as_str)
    }
}

//! Named-entity tagging by longest-match gazetteer lookup.
//!
//! [`EntityTagger`] is the seam for swapping in a statistical tagger; the
//! detector and classifier only ever see its output spans.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feed::NewsStory;
use crate::normalize::normalize;
use crate::ontology::Ontology;
use crate::text::{char_range_to_bytes, tokens};

#[derive(Debug, Error, PartialEq)]
pub enum TagError {
    #[error("entity span {start}..{end} outside text of {len} chars")]
    OutOfBounds { start: usize, end: usize, len: usize },
    #[error("entity surface `{surface}` does not match text at {start}..{end}")]
    SurfaceMismatch {
        start: usize,
        end: usize,
        surface: String,
    },
    #[error("entity spans overlap at {0}")]
    Overlap(usize),
    #[error("annotation dump line {line}: {message}")]
    Dump { line: usize, message: String },
    #[error("tagger failed: {0}")]
    Backend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityClass {
    Person,
    Organization,
    Disease,
    Location,
}

impl EntityClass {
    pub const ALL: [EntityClass; 4] = [
        EntityClass::Person,
        EntityClass::Organization,
        EntityClass::Disease,
        EntityClass::Location,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityClass::Person => "PERSON",
            EntityClass::Organization => "ORGANIZATION",
            EntityClass::Disease => "DISEASE",
            EntityClass::Location => "LOCATION",
        }
    }

    /// Lower wins on equal-length matches.
    fn precedence(self) -> u8 {
        match self {
            EntityClass::Disease => 0,
            EntityClass::Location => 1,
            EntityClass::Organization => 2,
            EntityClass::Person => 3,
        }
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown entity class `{s}`"))
    }
}

/// A tagged span of [`NewsStory::text`], in character offsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotatedEntity {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub class: EntityClass,
}

pub trait EntityTagger: Send + Sync {
    fn tag(&self, story: &NewsStory) -> Result<Vec<AnnotatedEntity>, TagError>;
}

/// What a gazetteer entry points at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GazetteerHint {
    Disease(String),
    Locations(Vec<String>),
    Name(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GazetteerCounts {
    /// Distinct synonyms, each naming one disease.
    pub disease: usize,
    /// Name-to-location associations (one per location record).
    pub location: usize,
    pub organization: usize,
    pub person: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, BTreeMap<EntityClass, GazetteerHint>>,
    max_tokens: usize,
}

/// DISEASE entries mirror the ontology's synonym index and LOCATION entries
/// its location-name index; PERSON and ORGANIZATION come from plain lists.
pub fn build_gazetteer(ontology: &Ontology, person_list: &[String], org_list: &[String]) -> Gazetteer {
    let mut g = Gazetteer::default();
    for (syn, id) in ontology.disease_synonym_index() {
        g.insert(syn, EntityClass::Disease, GazetteerHint::Disease(id.clone()));
    }
    for (name, ids) in ontology.location_name_index() {
        g.insert(name, EntityClass::Location, GazetteerHint::Locations(ids.clone()));
    }
    for (list, class) in [
        (person_list, EntityClass::Person),
        (org_list, EntityClass::Organization),
    ] {
        for raw in list {
            let key = normalize(raw);
            if !key.is_empty() {
                g.insert(&key, class, GazetteerHint::Name(raw.trim().to_string()));
            }
        }
    }
    g
}

impl Gazetteer {
    fn insert(&mut self, key: &str, class: EntityClass, hint: GazetteerHint) {
        let n = tokens(key).len();
        if n == 0 {
            return;
        }
        self.max_tokens = self.max_tokens.max(n);
        let slot = self.entries.entry(key.to_string()).or_default();
        match (slot.get_mut(&class), hint) {
            (Some(GazetteerHint::Name(existing)), GazetteerHint::Name(new)) => {
                // keep the lexicographically smallest spelling regardless of list order
                if new < *existing {
                    *existing = new;
                }
            }
            (_, hint) => {
                slot.insert(class, hint);
            }
        }
    }

    pub fn lookup(&self, surface: &str) -> Option<&BTreeMap<EntityClass, GazetteerHint>> {
        self.entries.get(&normalize(surface))
    }

    /// Entries of one class, sorted by surface.
    pub fn class_entries(&self, class: EntityClass) -> Vec<(&str, &GazetteerHint)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .filter_map(|(k, m)| m.get(&class).map(|h| (k.as_str(), h)))
            .collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn counts(&self) -> GazetteerCounts {
        let mut c = GazetteerCounts::default();
        for m in self.entries.values() {
            for (class, hint) in m {
                match (class, hint) {
                    (EntityClass::Disease, _) => c.disease += 1,
                    (EntityClass::Location, GazetteerHint::Locations(ids)) => c.location += ids.len(),
                    (EntityClass::Location, _) => c.location += 1,
                    (EntityClass::Organization, _) => c.organization += 1,
                    (EntityClass::Person, _) => c.person += 1,
                }
            }
        }
        c
    }

    /// Longest token-aligned match at each position, scanning left to right.
    /// Matches never span a line break.
    pub fn tag_text(&self, text: &str) -> Vec<AnnotatedEntity> {
        let toks = tokens(text);
        let mut out = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let longest = self.max_tokens.min(toks.len() - i);
            let mut matched = None;
            for len in (1..=longest).rev() {
                let first = toks[i];
                let last = toks[i + len - 1];
                let span = &text[first.byte_start..last.byte_end];
                if span.contains('\n') {
                    continue;
                }
                if let Some(classes) = self.entries.get(&normalize(span)) {
                    let class = classes
                        .keys()
                        .copied()
                        .min_by_key(|c| c.precedence())
                        .expect("entries are never empty");
                    out.push(AnnotatedEntity {
                        start: first.char_start,
                        end: last.char_end,
                        surface: span.to_string(),
                        class,
                    });
                    matched = Some(len);
                    break;
                }
            }
            i += matched.unwrap_or(1);
        }
        out
    }
}

impl EntityTagger for Gazetteer {
    fn tag(&self, story: &NewsStory) -> Result<Vec<AnnotatedEntity>, TagError> {
        Ok(self.tag_text(&story.text()))
    }
}

pub fn tag_entities(story: &NewsStory, gazetteer: &Gazetteer) -> Vec<AnnotatedEntity> {
    gazetteer.tag_text(&story.text())
}

/// Checks that spans are in bounds, reproduce their surface, and do not overlap.
pub fn validate_annotations(text: &str, entities: &[AnnotatedEntity]) -> Result<(), TagError> {
    let len = text.chars().count();
    let mut sorted: Vec<&AnnotatedEntity> = entities.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    let mut prev_end = 0;
    for (k, e) in sorted.iter().enumerate() {
        if e.start >= e.end || e.end > len {
            return Err(TagError::OutOfBounds {
                start: e.start,
                end: e.end,
                len,
            });
        }
        let (bs, be) = char_range_to_bytes(text, e.start, e.end).ok_or(TagError::OutOfBounds {
            start: e.start,
            end: e.end,
            len,
        })?;
        if text[bs..be] != e.surface {
            return Err(TagError::SurfaceMismatch {
                start: e.start,
                end: e.end,
                surface: e.surface.clone(),
            });
        }
        if k > 0 && e.start < prev_end {
            return Err(TagError::Overlap(e.start));
        }
        prev_end = e.end;
    }
    Ok(())
}

/// One line of an annotation dump.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotationRecord {
    pub story_id: String,
    pub entity: AnnotatedEntity,
}

/// `story_id<TAB>start<TAB>end<TAB>class<TAB>surface` per entity. Tabs,
/// newlines and backslashes inside surfaces are backslash-escaped.
pub fn write_annotation_dump(records: &[AnnotationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.story_id,
            r.entity.start,
            r.entity.end,
            r.entity.class,
            escape_field(&r.entity.surface)
        ));
    }
    out
}

pub fn parse_annotation_dump(text: &str) -> Result<Vec<AnnotationRecord>, TagError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| TagError::Dump { line: i + 1, message };
        let f: Vec<&str> = line.splitn(5, '\t').collect();
        if f.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad offset `{s}`")));
        out.push(AnnotationRecord {
            story_id: f[0].to_string(),
            entity: AnnotatedEntity {
                start: num(f[1])?,
                end: num(f[2])?,
                class: f[3].parse().map_err(err)?,
                surface: unescape_field(f[4]),
            },
        });
    }
    Ok(out)
}

pub(crate) fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::load_ontology;
    use proptest::prelude::*;

    const DISEASES: &str = "D\tequine_influenza\tequine influenza\thorse flu\trespiratory\t\n\
                            D\tinfluenza\tinfluenza\tflu\trespiratory\t\n\
                            D\trift_valley_fever\trift valley fever\t\t\t\n";
    const GEO: &str = "G\tGB\tUnited Kingdom\tcountry\tGB\t51\t0\n\
                       G\tAU\tAustralia\tcountry\tAU\t-35\t149\n\
                       G\tKE\tKenya\tcountry\tKE\t-1\t36\n\
                       G\tGB-iow\tIsle of Wight\tsubcountry\tGB\t50.7\t-1.3\n\
                       G\tGB-w\tWight\tsubcountry\tGB\t50.7\t-1.3\n\
                       G\tAU-c\tCamden\tsubcountry\tAU\t-34\t150\n\
                       G\tGB-c\tCamden\tsubcountry\tGB\t51.5\t-0.1\n\
                       G\tKE-rv\tRift Valley\tsubcountry\tKE\t0\t36\n";

    fn gazetteer() -> Gazetteer {
        let o = load_ontology(DISEASES, GEO).unwrap();
        build_gazetteer(&o, &["Margaret Chan".into()], &["Camden Council".into()])
    }

    fn tag(text: &str) -> Vec<(String, EntityClass)> {
        gazetteer()
            .tag_text(text)
            .into_iter()
            .map(|e| (e.surface, e.class))
            .collect()
    }

    #[test]
    fn longest_match_wins() {
        assert_eq!(
            tag("equine influenza in Camden"),
            vec![
                ("equine influenza".into(), EntityClass::Disease),
                ("Camden".into(), EntityClass::Location)
            ]
        );
        assert_eq!(
            tag("Rabies in Isle of Wight"),
            vec![("Isle of Wight".into(), EntityClass::Location)]
        );
        assert_eq!(
            tag("Camden Council warns"),
            vec![("Camden Council".into(), EntityClass::Organization)]
        );
    }

    #[test]
    fn disease_beats_location_on_longer_match_and_ties() {
        assert_eq!(
            tag("Rift Valley fever spreads"),
            vec![("Rift Valley fever".into(), EntityClass::Disease)]
        );
    }

    #[test]
    fn token_boundaries_respected() {
        assert!(tag("a fluent speaker").is_empty());
        assert_eq!(tag("FLU, again"), vec![("FLU".into(), EntityClass::Disease)]);
    }

    #[test]
    fn no_terms_no_entities() {
        assert!(tag("nothing to see here").is_empty());
    }

    #[test]
    fn matches_do_not_cross_line_breaks() {
        assert_eq!(
            tag("Isle of\nWight"),
            vec![("Wight".into(), EntityClass::Location)]
        );
    }

    #[test]
    fn char_offsets_with_multibyte_text() {
        let text = "Grippe à Camden";
        let out = gazetteer().tag_text(text);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].start, out[0].end), (9, 15));
        validate_annotations(text, &out).unwrap();
    }

    #[test]
    fn equal_length_cross_class_precedence() {
        let o = load_ontology(DISEASES, GEO).unwrap();
        let g = build_gazetteer(&o, &["Camden".into(), "Flu".into()], &["Camden".into()]);
        let out = g.tag_text("Camden flu");
        assert_eq!(out[0].class, EntityClass::Location);
        assert_eq!(out[1].class, EntityClass::Disease);
        let g = build_gazetteer(&o, &["Acme".into()], &["acme".into()]);
        assert_eq!(g.tag_text("Acme")[0].class, EntityClass::Organization);
    }

    #[test]
    fn counts_and_coverage() {
        let o = load_ontology(DISEASES, GEO).unwrap();
        let g = build_gazetteer(&o, &[], &[]);
        let c = g.counts();
        assert_eq!(c.disease, o.disease_synonym_index().len());
        assert_eq!(c.location, o.locations().count());
        assert_eq!((c.person, c.organization), (0, 0));
        let extended = DISEASES.replace("horse flu", "horse flu|equine flu");
        let g2 = build_gazetteer(&load_ontology(&extended, GEO).unwrap(), &[], &[]);
        assert!(g2.lookup("equine flu").is_some());
        assert!(g.lookup("equine flu").is_none());
    }

    #[test]
    fn construction_order_does_not_matter() {
        let o = load_ontology(DISEASES, GEO).unwrap();
        let a = build_gazetteer(&o, &["Ann Lee".into(), "ann lee".into()], &[]);
        let b = build_gazetteer(&o, &["ann lee".into(), "Ann Lee".into()], &[]);
        assert_eq!(a.class_entries(EntityClass::Person), b.class_entries(EntityClass::Person));
    }

    #[test]
    fn validation_catches_bad_spans() {
        let text = "flu in Camden";
        let ok = AnnotatedEntity {
            start: 0,
            end: 3,
            surface: "flu".into(),
            class: EntityClass::Disease,
        };
        validate_annotations(text, std::slice::from_ref(&ok)).unwrap();
        let oob = AnnotatedEntity { end: 99, ..ok.clone() };
        assert!(matches!(
            validate_annotations(text, &[oob]),
            Err(TagError::OutOfBounds { .. })
        ));
        let wrong = AnnotatedEntity {
            surface: "flux".into(),
            ..ok.clone()
        };
        assert!(matches!(
            validate_annotations(text, &[wrong]),
            Err(TagError::SurfaceMismatch { .. })
        ));
        let overlap = AnnotatedEntity {
            start: 1,
            end: 3,
            surface: "lu".into(),
            class: EntityClass::Disease,
        };
        assert_eq!(validate_annotations(text, &[ok, overlap]), Err(TagError::Overlap(1)));
    }

    #[test]
    fn dump_round_trip() {
        let recs = vec![AnnotationRecord {
            story_id: "abc".into(),
            entity: AnnotatedEntity {
                start: 3,
                end: 16,
                surface: "Isle\tof \\ Wight".into(),
                class: EntityClass::Location,
            },
        }];
        let text = write_annotation_dump(&recs);
        assert_eq!(text.lines().count(), 1);
        assert_eq!(parse_annotation_dump(&text).unwrap(), recs);
        assert!(parse_annotation_dump("a\t1\t2\tPLACE\tx\n").is_err());
    }

    proptest! {
        #[test]
        fn spans_never_overlap_and_reproduce_surface(
            words in prop::collection::vec(
                prop::sample::select(vec![
                    "Isle", "of", "Wight", "Camden", "equine", "influenza", "flu", "Rift",
                    "Valley", "fever", "Kenya", "in", ",", "\n", "Margaret", "Chan", "Council", "é",
                ]),
                0..40,
            )
        ) {
            let text = words.join(" ");
            let out = gazetteer().tag_text(&text);
            prop_assert!(validate_annotations(&text, &out).is_ok());
            prop_assert!(out.windows(2).all(|w| w[0].start < w[1].start));
        }
    }
}

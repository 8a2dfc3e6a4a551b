//! Data files compiled into the crate.

use std::sync::OnceLock;

use chrono::{DateTime, TimeZone, Utc};

use crate::classifier::{parse_corpus, train, ClassifierModel, LabeledDoc};
use crate::feed::{parse_source_list, NewsStory, SourceRegistry};
use crate::geo::TldTable;
use crate::ontology::{load_ontology, Ontology};
use crate::replay::load_fixture_stories;
use crate::tagger::{build_gazetteer, Gazetteer};

pub const DISEASES_TSV: &str = include_str!("../data/diseases.tsv");
pub const GEO_TSV: &str = include_str!("../data/geo.tsv");
pub const TLD_TSV: &str = include_str!("../data/tld.tsv");
pub const PERSONS_TXT: &str = include_str!("../data/persons.txt");
pub const ORGANIZATIONS_TXT: &str = include_str!("../data/organizations.txt");
/// Labeled training corpus, `label<TAB>headline<TAB>body`.
pub const TRAINING_CORPUS_TSV: &str = include_str!("../data/training_corpus.tsv");
/// Thirty days of fixture stories, one JSON object per line.
pub const REPLAY_STORIES_JSONL: &str = include_str!("../data/replay_stories.jsonl");
pub const REPLAY_SOURCES_TSV: &str = include_str!("../data/replay_sources.tsv");

/// The bundled ontology, loaded once.
pub fn ontology() -> &'static Ontology {
    static ONTOLOGY: OnceLock<Ontology> = OnceLock::new();
    ONTOLOGY.get_or_init(|| load_ontology(DISEASES_TSV, GEO_TSV).expect("bundled ontology is valid"))
}

pub fn tld_table() -> TldTable {
    TldTable::parse(TLD_TSV)
}

/// Non-empty, non-comment lines of a plain list file.
pub fn list_entries(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Gazetteer over the bundled ontology and name lists, built once.
pub fn gazetteer() -> &'static Gazetteer {
    static GAZETTEER: OnceLock<Gazetteer> = OnceLock::new();
    GAZETTEER.get_or_init(|| {
        build_gazetteer(
            ontology(),
            &list_entries(PERSONS_TXT),
            &list_entries(ORGANIZATIONS_TXT),
        )
    })
}

pub fn training_corpus() -> Vec<LabeledDoc> {
    parse_corpus(TRAINING_CORPUS_TSV).expect("bundled corpus is valid")
}

/// Classifier trained on the bundled corpus with the bundled gazetteer.
pub fn classifier() -> &'static ClassifierModel {
    static MODEL: OnceLock<ClassifierModel> = OnceLock::new();
    MODEL.get_or_init(|| train(&training_corpus(), gazetteer()).expect("bundled corpus trains"))
}

pub fn replay_sources() -> SourceRegistry {
    parse_source_list(REPLAY_SOURCES_TSV, Some(&tld_table())).expect("bundled sources are valid")
}

pub fn replay_stories(sources: &SourceRegistry) -> Vec<NewsStory> {
    load_fixture_stories(REPLAY_STORIES_JSONL, sources).expect("bundled stories are valid")
}

/// First and last cycle times of the bundled replay.
pub fn replay_span() -> (DateTime<Utc>, DateTime<Utc>) {
    (
        Utc.with_ymd_and_hms(2007, 10, 12, 0, 0, 0).unwrap(),
        Utc.with_ymd_and_hms(2007, 11, 12, 0, 0, 0).unwrap(),
    )
}

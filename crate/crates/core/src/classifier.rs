//! Multinomial naive Bayes relevance classifier.
//!
//! Features are lowercased raw tokens of headline and body plus one
//! synthetic `CLASS:surface` feature per tagged entity mention. Likelihoods
//! use add-one smoothing over the training vocabulary.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feed::{FeedSource, Genre, NewsStory};
use crate::normalize::normalize;
use crate::par::Execution;
use crate::tagger::{escape_field, unescape_field, validate_annotations, AnnotatedEntity, EntityTagger, TagError};
use crate::text::tokens;

pub const MODEL_FORMAT: &str = "ghm-naive-bayes";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("entity span invalid: {0}")]
    Span(#[from] TagError),
    #[error("training corpus needs both classes (relevant: {relevant}, irrelevant: {irrelevant})")]
    SingleClass { relevant: usize, irrelevant: usize },
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("model document: {0}")]
    Model(String),
    #[error("cross-validation needs at least {folds} documents, got {docs}")]
    TooFewDocs { folds: usize, docs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Relevant,
    Irrelevant,
}

impl Label {
    fn index(self) -> usize {
        match self {
            Label::Relevant => 0,
            Label::Irrelevant => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Relevant => "relevant",
            Label::Irrelevant => "irrelevant",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relevant" => Ok(Label::Relevant),
            "irrelevant" => Ok(Label::Irrelevant),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// Multiset of feature strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector(BTreeMap<String, u32>);

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, feature: impl Into<String>) {
        *self.0.entry(feature.into()).or_insert(0) += 1;
    }

    pub fn count(&self, feature: &str) -> u32 {
        self.0.get(feature).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of occurrences.
    pub fn total(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

impl<S: Into<String>> FromIterator<S> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut v = FeatureVector::new();
        for f in iter {
            v.add(f);
        }
        v
    }
}

/// Synthetic feature for an entity mention.
pub fn entity_feature(entity: &AnnotatedEntity) -> String {
    format!("{}:{}", entity.class, normalize(&entity.surface))
}

pub fn extract_features(
    story: &NewsStory,
    entities: &[AnnotatedEntity],
) -> Result<FeatureVector, ClassifierError> {
    let text = story.text();
    let len = text.chars().count();
    if let Some(bad) = entities.iter().find(|e| e.start >= e.end || e.end > len) {
        return Err(TagError::OutOfBounds {
            start: bad.start,
            end: bad.end,
            len,
        }
        .into());
    }
    let mut v = FeatureVector::new();
    for t in tokens(&text) {
        v.add(text[t.byte_start..t.byte_end].to_lowercase());
    }
    for e in entities {
        v.add(entity_feature(e));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDoc {
    pub story: NewsStory,
    pub label: Label,
}

/// Class priors and per-feature log likelihoods, indexed `[relevant, irrelevant]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    format: String,
    version: u32,
    classes: [Label; 2],
    log_priors: [f64; 2],
    log_likelihoods: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Normalized log posteriors, `[relevant, irrelevant]`.
    pub log_posteriors: [f64; 2],
}

impl Prediction {
    pub fn log_posterior(&self, label: Label) -> f64 {
        self.log_posteriors[label.index()]
    }

    pub fn posterior(&self, label: Label) -> f64 {
        self.log_posterior(label).exp()
    }
}

impl ClassifierModel {
    /// Builds a model from raw class counts.
    pub fn from_counts(
        doc_counts: [u64; 2],
        feature_counts: &BTreeMap<String, [u64; 2]>,
    ) -> Result<Self, ClassifierError> {
        if doc_counts.contains(&0) {
            return Err(ClassifierError::SingleClass {
                relevant: doc_counts[0] as usize,
                irrelevant: doc_counts[1] as usize,
            });
        }
        let docs = (doc_counts[0] + doc_counts[1]) as f64;
        let log_priors = [
            (doc_counts[0] as f64 / docs).ln(),
            (doc_counts[1] as f64 / docs).ln(),
        ];
        let vocab = feature_counts.len() as f64;
        let mut totals = [0u64; 2];
        for c in feature_counts.values() {
            totals[0] += c[0];
            totals[1] += c[1];
        }
        let denom = [totals[0] as f64 + vocab, totals[1] as f64 + vocab];
        let log_likelihoods = feature_counts
            .iter()
            .map(|(f, c)| {
                (
                    f.clone(),
                    [
                        ((c[0] as f64 + 1.0) / denom[0]).ln(),
                        ((c[1] as f64 + 1.0) / denom[1]).ln(),
                    ],
                )
            })
            .collect();
        Ok(ClassifierModel {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            classes: [Label::Relevant, Label::Irrelevant],
            log_priors,
            log_likelihoods,
        })
    }

    pub fn log_prior(&self, label: Label) -> f64 {
        self.log_priors[label.index()]
    }

    pub fn log_likelihood(&self, feature: &str, label: Label) -> Option<f64> {
        self.log_likelihoods.get(feature).map(|l| l[label.index()])
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.log_likelihoods.keys().map(String::as_str)
    }

    pub fn vocabulary_len(&self) -> usize {
        self.log_likelihoods.len()
    }

    /// Argmax of log prior plus summed log likelihoods; out-of-vocabulary
    /// features are ignored and ties go to [`Label::Irrelevant`].
    pub fn predict(&self, features: &FeatureVector) -> Prediction {
        let mut joint = self.log_priors;
        for (f, n) in features.iter() {
            if let Some(l) = self.log_likelihoods.get(f) {
                joint[0] += f64::from(n) * l[0];
                joint[1] += f64::from(n) * l[1];
            }
        }
        let max = joint[0].max(joint[1]);
        let norm = max + ((joint[0] - max).exp() + (joint[1] - max).exp()).ln();
        Prediction {
            label: if joint[0] > joint[1] {
                Label::Relevant
            } else {
                Label::Irrelevant
            },
            log_posteriors: [joint[0] - norm, joint[1] - norm],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let model: ClassifierModel =
            serde_json::from_str(text).map_err(|e| ClassifierError::Model(e.to_string()))?;
        if model.format != MODEL_FORMAT || model.version != MODEL_VERSION {
            return Err(ClassifierError::Model(format!(
                "unsupported model {} v{}",
                model.format, model.version
            )));
        }
        if model.classes != [Label::Relevant, Label::Irrelevant] {
            return Err(ClassifierError::Model("unexpected class order".into()));
        }
        Ok(model)
    }
}

pub fn predict(model: &ClassifierModel, features: &FeatureVector) -> Prediction {
    model.predict(features)
}

/// Tags and featurizes one story, checking the tagger's spans first.
pub fn featurize(story: &NewsStory, tagger: &dyn EntityTagger) -> Result<FeatureVector, ClassifierError> {
    let entities = tagger.tag(story)?;
    validate_annotations(&story.text(), &entities)?;
    extract_features(story, &entities)
}

/// Counts are order-independent, so the model does not depend on corpus order.
pub fn train(corpus: &[LabeledDoc], tagger: &dyn EntityTagger) -> Result<ClassifierModel, ClassifierError> {
    train_with(corpus, tagger, Execution::Sequential)
}

pub fn train_with(
    corpus: &[LabeledDoc],
    tagger: &dyn EntityTagger,
    exec: Execution,
) -> Result<ClassifierModel, ClassifierError> {
    let vectors = exec.try_map(corpus, |d| featurize(&d.story, tagger))?;
    let mut doc_counts = [0u64; 2];
    let mut feature_counts: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    for (doc, v) in corpus.iter().zip(&vectors) {
        let k = doc.label.index();
        doc_counts[k] += 1;
        for (f, n) in v.iter() {
            feature_counts.entry(f.to_string()).or_default()[k] += u64::from(n);
        }
    }
    ClassifierModel::from_counts(doc_counts, &feature_counts)
}

/// Per-fold and pooled results of k-fold cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub folds: usize,
    pub predictions: Vec<Label>,
    pub gold: Vec<Label>,
    pub correct: usize,
}

impl CrossValidation {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.gold.len() as f64
    }
}

/// Document `i` is held out in fold `i % folds`. Folds run through `exec`.
pub fn cross_validate(
    corpus: &[LabeledDoc],
    tagger: &dyn EntityTagger,
    folds: usize,
    exec: Execution,
) -> Result<CrossValidation, ClassifierError> {
    if folds < 2 || corpus.len() < folds {
        return Err(ClassifierError::TooFewDocs {
            folds: folds.max(2),
            docs: corpus.len(),
        });
    }
    let fold_ids: Vec<usize> = (0..folds).collect();
    let per_fold = exec.try_map(&fold_ids, |&k| {
        let train_docs: Vec<LabeledDoc> = corpus
            .iter()
            .enumerate()
            .filter(|(i, _)| i % folds != k)
            .map(|(_, d)| d.clone())
            .collect();
        let model = train(&train_docs, tagger)?;
        corpus
            .iter()
            .enumerate()
            .filter(|(i, _)| i % folds == k)
            .map(|(i, d)| Ok((i, model.predict(&featurize(&d.story, tagger)?).label)))
            .collect::<Result<Vec<_>, ClassifierError>>()
    })?;
    let mut predictions = vec![Label::Irrelevant; corpus.len()];
    for (i, label) in per_fold.into_iter().flatten() {
        predictions[i] = label;
    }
    let gold: Vec<Label> = corpus.iter().map(|d| d.label).collect();
    let correct = predictions.iter().zip(&gold).filter(|(p, g)| p == g).count();
    Ok(CrossValidation {
        folds,
        predictions,
        gold,
        correct,
    })
}

/// Parses `label<TAB>headline<TAB>body` lines; `\t`, `\n` and `\\` are escapes.
pub fn parse_corpus(text: &str) -> Result<Vec<LabeledDoc>, ClassifierError> {
    let source = FeedSource {
        id: "corpus".into(),
        url: String::new(),
        genre: Genre::Mixed,
        country_hint: None,
        poll_enabled: false,
    };
    let epoch = chrono::DateTime::<chrono::Utc>::UNIX_EPOCH;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ClassifierError::Corpus { line: i + 1, message };
        let f: Vec<&str> = line.splitn(3, '\t').collect();
        if f.len() < 2 {
            return Err(err("expected label<TAB>headline<TAB>body".into()));
        }
        let label = f[0].parse::<Label>().map_err(err)?;
        let headline = unescape_field(f[1]);
        if headline.trim().is_empty() {
            return Err(err("empty headline".into()));
        }
        let body = f.get(2).map(|b| unescape_field(b)).unwrap_or_default();
        let story = NewsStory::new(&source, format!("corpus:{}", i + 1), headline, body, epoch, epoch);
        docs.push(LabeledDoc { story, label });
    }
    Ok(docs)
}

pub fn write_corpus(docs: &[LabeledDoc]) -> String {
    docs.iter()
        .map(|d| {
            format!(
                "{}\t{}\t{}\n",
                d.label,
                escape_field(&d.story.headline),
                escape_field(&d.story.body)
            )
        })
        .collect()
}

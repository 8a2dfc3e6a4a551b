//! Evaluation metrics over gold fixtures, in exact rational arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use serde_json::{json, Value};
use thiserror::Error;

use crate::classifier::Label;
use crate::detector::{format_timestamp, OutbreakEvent};
use crate::tagger::{AnnotationRecord, EntityClass};

pub type Rational = Ratio<u64>;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("label lists differ in length ({predicted} predicted, {gold} gold)")]
    LengthMismatch { predicted: usize, gold: usize },
    #[error("no labels to score")]
    Empty,
    #[error("predicted annotations reference unknown story `{0}`")]
    UnknownStory(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Precision and recall of a retrieved set against a relevant set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricReport {
    pub precision: Rational,
    pub recall: Rational,
    pub retrieved: u64,
    pub relevant: u64,
    pub intersection: u64,
}

/// `hits / total`, with `0/0` read as 1 and `k/0` impossible by construction.
fn coverage(hits: u64, total: u64, other_total: u64) -> Rational {
    match (total, other_total) {
        (0, 0) => Ratio::from_integer(1),
        (0, _) => Ratio::from_integer(0),
        _ => Ratio::new(hits, total),
    }
}

impl MetricReport {
    pub fn from_counts(retrieved: u64, relevant: u64, intersection: u64) -> Self {
        assert!(intersection <= retrieved.min(relevant));
        MetricReport {
            precision: coverage(intersection, retrieved, relevant),
            recall: coverage(intersection, relevant, retrieved),
            retrieved,
            relevant,
            intersection,
        }
    }

    /// Harmonic mean of precision and recall; 0 when both are 0.
    pub fn f1(&self) -> Rational {
        let sum = self.precision + self.recall;
        if sum == Ratio::from_integer(0) {
            sum
        } else {
            Ratio::from_integer(2) * self.precision * self.recall / sum
        }
    }
}

/// Set-based precision and recall. An empty retrieved set scores precision 1
/// when nothing was relevant and 0 otherwise; recall mirrors this.
pub fn pair_precision_recall<T: Ord>(retrieved: &BTreeSet<T>, relevant: &BTreeSet<T>) -> MetricReport {
    let hits = retrieved.intersection(relevant).count() as u64;
    MetricReport::from_counts(retrieved.len() as u64, relevant.len() as u64, hits)
}

pub fn classification_accuracy(predicted: &[Label], gold: &[Label]) -> Result<Rational, EvalError> {
    if predicted.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    let hits = predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(Ratio::new(hits as u64, gold.len() as u64))
}

/// Rounds half-up to `places` decimals.
pub fn render_decimal(r: Rational, places: u32) -> String {
    let scale = 10u128.pow(places);
    let (n, d) = (*r.numer() as u128, *r.denom() as u128);
    let scaled = (2 * n * scale + d) / (2 * d);
    let (whole, frac) = (scaled / scale, scaled % scale);
    if places == 0 {
        whole.to_string()
    } else {
        format!("{whole}.{frac:0width$}", width = places as usize)
    }
}

/// Percentage rounded half-up to `places` decimals, with a `%` suffix.
pub fn render_percent(r: Rational, places: u32) -> String {
    render_decimal(r * Ratio::from_integer(100), places) + "%"
}

/// One scored pair: detection window, disease key and location id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScoredPair {
    pub window_id: String,
    pub disease: String,
    pub location_id: String,
}

/// Reads `window_id<TAB>disease<TAB>location_id` lines; blank and `#` lines are skipped.
pub fn parse_gold_pairs(text: &str) -> Result<BTreeSet<ScoredPair>, EvalError> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').map(str::trim).collect();
        if f.len() != 3 || f.iter().any(|s| s.is_empty()) {
            return Err(EvalError::Malformed {
                line: i + 1,
                message: "expected window_id, disease and location_id".into(),
            });
        }
        out.insert(ScoredPair {
            window_id: f[0].into(),
            disease: f[1].into(),
            location_id: f[2].into(),
        });
    }
    Ok(out)
}

/// Grounded pairs retrieved by a set of events, keyed by detection time.
pub fn retrieved_pairs<'a>(events: impl IntoIterator<Item = &'a OutbreakEvent>) -> BTreeSet<ScoredPair> {
    events
        .into_iter()
        .map(|e| ScoredPair {
            window_id: format_timestamp(e.detected_at),
            disease: e.disease.clone(),
            location_id: e.location_id.clone(),
        })
        .collect()
}

/// Retrieved pairs read back from an event dump (first, second and fourth columns).
pub fn pairs_from_event_dump(text: &str) -> Result<BTreeSet<ScoredPair>, EvalError> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(EvalError::Malformed {
                line: i + 1,
                message: format!("expected 8 fields, found {}", f.len()),
            });
        }
        out.insert(ScoredPair {
            window_id: f[0].into(),
            disease: f[1].into(),
            location_id: f[3].into(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NerScores {
    pub per_class: BTreeMap<EntityClass, MetricReport>,
    pub micro: MetricReport,
}

/// Exact span and class matching per class, plus a micro average over the
/// classes that occur in either dump.
pub fn ner_f_score(predicted: &[AnnotationRecord], gold: &[AnnotationRecord]) -> Result<NerScores, EvalError> {
    let known: BTreeSet<&str> = gold.iter().map(|r| r.story_id.as_str()).collect();
    if let Some(r) = predicted.iter().find(|r| !known.contains(r.story_id.as_str())) {
        return Err(EvalError::UnknownStory(r.story_id.clone()));
    }
    let key = |r: &AnnotationRecord| (r.story_id.clone(), r.entity.start, r.entity.end, r.entity.class);
    let mut per_class = BTreeMap::new();
    let (mut ret, mut rel, mut hit) = (0, 0, 0);
    for class in EntityClass::ALL {
        let p: BTreeSet<_> = predicted.iter().filter(|r| r.entity.class == class).map(key).collect();
        let g: BTreeSet<_> = gold.iter().filter(|r| r.entity.class == class).map(key).collect();
        if p.is_empty() && g.is_empty() {
            continue;
        }
        let m = pair_precision_recall(&p, &g);
        ret += m.retrieved;
        rel += m.relevant;
        hit += m.intersection;
        per_class.insert(class, m);
    }
    Ok(NerScores {
        per_class,
        micro: MetricReport::from_counts(ret, rel, hit),
    })
}

/// A titled metric table with notes, rendered as JSON or aligned text.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub title: String,
    pub rows: Vec<(String, MetricReport)>,
    pub notes: Vec<String>,
}

pub const EMPTY_SET_NOTE: &str =
    "empty retrieved set: precision 1 if nothing is relevant, else 0; recall likewise";
pub const WINDOW_RELATIVE_NOTE: &str =
    "pair recall is window-relative: pairs lost at topic classification are not counted as relevant";

impl EvalReport {
    pub fn pairs(m: MetricReport) -> Self {
        EvalReport {
            title: "pair detection".into(),
            rows: vec![("pairs".into(), m)],
            notes: vec![EMPTY_SET_NOTE.into(), WINDOW_RELATIVE_NOTE.into()],
        }
    }

    pub fn ner(scores: &NerScores) -> Self {
        let mut rows: Vec<(String, MetricReport)> = scores
            .per_class
            .iter()
            .map(|(c, m)| (c.as_str().to_string(), *m))
            .collect();
        rows.push(("micro".into(), scores.micro));
        EvalReport {
            title: "named entities".into(),
            rows,
            notes: vec![EMPTY_SET_NOTE.into(), "exact span and class matching".into()],
        }
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(name, m)| {
                json!({
                    "name": name,
                    "precision": render_decimal(m.precision, 4),
                    "recall": render_decimal(m.recall, 4),
                    "f1": render_decimal(m.f1(), 4),
                    "precision_exact": format!("{}/{}", m.precision.numer(), m.precision.denom()),
                    "recall_exact": format!("{}/{}", m.recall.numer(), m.recall.denom()),
                    "retrieved": m.retrieved,
                    "relevant": m.relevant,
                    "intersection": m.intersection,
                })
            })
            .collect();
        json!({ "title": self.title, "rows": rows, "notes": self.notes })
    }

    pub fn to_text(&self) -> String {
        let header = ["name", "precision", "recall", "f1", "retrieved", "relevant", "intersection"];
        let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for (name, m) in &self.rows {
            table.push(vec![
                name.clone(),
                render_decimal(m.precision, 4),
                render_decimal(m.recall, 4),
                render_decimal(m.f1(), 4),
                m.retrieved.to_string(),
                m.relevant.to_string(),
                m.intersection.to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = format!("{}\n", self.title);
        for row in &table {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if c == 0 {
                        format!("{s:<w$}", w = widths[c])
                    } else {
                        format!("{s:>w$}", w = widths[c])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::AnnotatedEntity;

    fn set(xs: &[u32]) -> BTreeSet<u32> {
        xs.iter().copied().collect()
    }

    #[test]
    fn precision_887_of_950() {
        let retrieved: BTreeSet<u32> = (0..950).collect();
        let relevant: BTreeSet<u32> = (0..887).chain(5000..5100).collect();
        let m = pair_precision_recall(&retrieved, &relevant);
        assert_eq!(m.precision, Ratio::new(887, 950));
        assert_eq!(render_decimal(m.precision, 4), "0.9337");
        assert_eq!(render_percent(m.precision, 1), "93.4%");
    }

    #[test]
    fn trivial_cases() {
        let m = pair_precision_recall(&set(&[1, 2]), &set(&[1, 2]));
        assert_eq!((m.precision, m.recall), (Ratio::from_integer(1), Ratio::from_integer(1)));
        let m = pair_precision_recall(&set(&[1]), &set(&[2]));
        assert_eq!((m.precision, m.recall), (Ratio::from_integer(0), Ratio::from_integer(0)));
        assert_eq!(m.f1(), Ratio::from_integer(0));
        let m = pair_precision_recall(&set(&[]), &set(&[]));
        assert_eq!((m.precision, m.recall), (Ratio::from_integer(1), Ratio::from_integer(1)));
        let m = pair_precision_recall(&set(&[]), &set(&[3]));
        assert_eq!((m.precision, m.recall), (Ratio::from_integer(0), Ratio::from_integer(0)));
        let m = pair_precision_recall(&set(&[3]), &set(&[]));
        assert_eq!((m.precision, m.recall), (Ratio::from_integer(0), Ratio::from_integer(0)));
    }

    #[test]
    fn swapping_sets_swaps_metrics() {
        let a = set(&[1, 2, 3, 4]);
        let b = set(&[3, 4, 5]);
        let ab = pair_precision_recall(&a, &b);
        let ba = pair_precision_recall(&b, &a);
        assert_eq!((ab.precision, ab.recall), (ba.recall, ba.precision));
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(render_decimal(Ratio::new(1, 8), 2), "0.13");
        assert_eq!(render_decimal(Ratio::new(1, 3), 4), "0.3333");
        assert_eq!(render_decimal(Ratio::new(2, 3), 4), "0.6667");
        assert_eq!(render_decimal(Ratio::from_integer(1), 4), "1.0000");
        assert_eq!(render_decimal(Ratio::new(5, 10), 0), "1");
    }

    #[test]
    fn accuracy() {
        use Label::*;
        assert_eq!(classification_accuracy(&[Relevant; 3], &[Relevant; 3]), Ok(Ratio::from_integer(1)));
        let p = [Relevant; 10];
        let g: Vec<Label> = (0..10).map(|i| if i < 5 { Relevant } else { Irrelevant }).collect();
        assert_eq!(classification_accuracy(&p, &g), Ok(Ratio::new(1, 2)));
        assert_eq!(classification_accuracy(&[], &[]), Err(EvalError::Empty));
        assert!(matches!(
            classification_accuracy(&[Relevant], &[]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    fn rec(story: &str, start: usize, end: usize, class: EntityClass) -> AnnotationRecord {
        AnnotationRecord {
            story_id: story.into(),
            entity: AnnotatedEntity {
                start,
                end,
                surface: "x".repeat(end - start),
                class,
            },
        }
    }

    #[test]
    fn ner_hand_fixture() {
        use EntityClass::*;
        let gold = vec![rec("s", 0, 4, Disease), rec("s", 10, 15, Location), rec("s", 20, 22, Disease)];
        let pred = vec![rec("s", 0, 4, Disease), rec("s", 10, 14, Location)];
        let r = ner_f_score(&pred, &gold).unwrap();
        assert_eq!(r.micro.precision, Ratio::new(1, 2));
        assert_eq!(r.micro.recall, Ratio::new(1, 3));
        assert_eq!(r.micro.f1(), Ratio::new(2, 5));
        assert!(!r.per_class.contains_key(&Person));
    }

    #[test]
    fn ner_exact_and_off_by_one() {
        use EntityClass::*;
        let gold = vec![rec("s", 0, 4, Disease), rec("t", 3, 9, Location)];
        let r = ner_f_score(&gold, &gold).unwrap();
        assert!(r.per_class.values().all(|m| m.f1() == Ratio::from_integer(1)));
        let shifted: Vec<_> = gold
            .iter()
            .map(|g| rec(&g.story_id, g.entity.start + 1, g.entity.end + 1, g.entity.class))
            .collect();
        assert_eq!(ner_f_score(&shifted, &gold).unwrap().micro.f1(), Ratio::from_integer(0));
        assert_eq!(
            ner_f_score(&[rec("zz", 0, 1, Disease)], &gold),
            Err(EvalError::UnknownStory("zz".into()))
        );
    }

    #[test]
    fn gold_file_and_dump() {
        let gold = parse_gold_pairs("# w\tdisease\tloc\nw1\trabies\tGB-1\nw1\trabies\tGB-1\n").unwrap();
        assert_eq!(gold.len(), 1);
        assert!(parse_gold_pairs("w1\trabies\n").is_err());
        let dump = "2007-11-11T15:00:00Z\trabies\ttrue\tGB-1\t50\t-1\t3\ta,b\n";
        let got = pairs_from_event_dump(dump).unwrap();
        assert_eq!(got.iter().next().unwrap().location_id, "GB-1");
    }

    #[test]
    fn report_text_is_aligned() {
        let r = EvalReport::pairs(MetricReport::from_counts(950, 1000, 887));
        let text = r.to_text();
        assert!(text.contains("0.9337"));
        assert!(text.contains(WINDOW_RELATIVE_NOTE));
        let j = r.to_json();
        assert_eq!(j["rows"][0]["precision_exact"], "887/950");
    }
}

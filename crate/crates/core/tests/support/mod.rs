#![allow(dead_code)]

pub mod oracle;

use chrono::{DateTime, Duration, TimeZone, Utc};
use ghm_core::feed::SourceRegistry;
use ghm_core::tagger::TagError;
use ghm_core::{bundled, AnnotatedEntity, EntityClass, EntityTagger, FeedSource, Gazetteer, Genre, NewsStory};
use rand::seq::SliceRandom;
use rand::Rng;

/// Terms the gazetteer does not know, tagged on top of it: an ungrounded
/// disease and a place missing from the ontology.
pub const EXTRA_TERMS: [(&str, EntityClass); 2] = [
    ("mystery illness", EntityClass::Disease),
    ("Narnia", EntityClass::Location),
];

/// Gazetteer tagging plus [`EXTRA_TERMS`], standing in for a statistical
/// tagger that finds names outside the ontology.
pub struct ExtendedTagger(pub &'static Gazetteer);

impl EntityTagger for ExtendedTagger {
    fn tag(&self, story: &NewsStory) -> Result<Vec<AnnotatedEntity>, TagError> {
        let text = story.text();
        let mut out = self.0.tag_text(&text);
        for (term, class) in EXTRA_TERMS {
            for (byte, m) in text.match_indices(term) {
                let start = text[..byte].chars().count();
                let end = start + m.chars().count();
                if out.iter().all(|e| e.end <= start || e.start >= end) {
                    out.push(AnnotatedEntity {
                        start,
                        end,
                        surface: m.to_string(),
                        class,
                    });
                }
            }
        }
        out.sort_by_key(|e| e.start);
        Ok(out)
    }
}

pub fn extended_tagger() -> ExtendedTagger {
    ExtendedTagger(bundled::gazetteer())
}

pub fn utc(y: i32, m: u32, d: u32, h: u32, min: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, m, d, h, min, 0).unwrap()
}

pub fn source(id: &str, genre: Genre, hint: Option<&str>) -> FeedSource {
    FeedSource {
        id: id.into(),
        url: format!("http://{id}.example/rss"),
        genre,
        country_hint: hint.map(str::to_string),
        poll_enabled: true,
    }
}

/// Four outlets: British, Australian, Chinese and one without a country.
pub fn random_sources() -> SourceRegistry {
    SourceRegistry::new([
        source("uk_press", Genre::Press, Some("GB")),
        source("au_press", Genre::Press, Some("AU")),
        source("cn_official", Genre::Official, Some("CN")),
        source("wire", Genre::Mixed, None),
    ])
    .unwrap()
}

const DISEASES: [&str; 10] = [
    "bird flu", "H5N1", "avian influenza", "cholera", "rabies", "horse flu",
    "equine influenza", "dengue", "measles", "mystery illness",
];
const PLACES: [&str; 10] = [
    "Camden", "Isle of Wight", "London", "Beijing", "Jakarta", "Sydney",
    "Narnia", "Geneva", "Baghdad", "Kano",
];
const COUNTRIES: [&str; 6] = ["Australia", "United Kingdom", "China", "Indonesia", "United States", "Canada"];
const RELEVANT_FILLER: [&str; 6] = [
    "Officials confirmed new cases of the outbreak.",
    "The health ministry said samples tested positive.",
    "Hospitals reported patients with fever.",
    "Contacts are being traced and culling has begun.",
    "The World Health Organization is monitoring the outbreak.",
    "Vaccination teams were deployed to the area.",
];
const OTHER_FILLER: [&str; 5] = [
    "Shares rose as investors bet on lower interest rates.",
    "The council approved a new library.",
    "Traffic was heavy after the storm.",
    "The company reported record profits.",
    "Tourist numbers climbed during the holiday season.",
];

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().unwrap()
}

/// Up to `max` stories published within roughly a day and a half before
/// `now` (some fall outside the detection window).
pub fn random_corpus<R: Rng>(rng: &mut R, now: DateTime<Utc>, max: usize, sources: &SourceRegistry) -> Vec<NewsStory> {
    let ids: Vec<String> = sources.iter().map(|s| s.id.clone()).collect();
    let n = rng.gen_range(1..=max);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = pick(rng, &DISEASES);
        let l = pick(rng, &PLACES);
        let headline = match rng.gen_range(0..4) {
            0 => format!("{d} outbreak in {l}"),
            1 => format!("{l} reports {d} cases"),
            2 => format!("New {d} cases confirmed"),
            _ => pick(rng, &OTHER_FILLER).trim_end_matches('.').to_string(),
        };
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(0..6) {
            body.push(match rng.gen_range(0..7) {
                0 => format!("Cases of {} were reported in {}.", pick(rng, &DISEASES), pick(rng, &PLACES)),
                1 => format!("Officials in {} said the risk was low.", pick(rng, &COUNTRIES)),
                2 => format!("{} remains a concern in {}.", d, l),
                3 | 4 => pick(rng, &RELEVANT_FILLER).to_string(),
                _ => pick(rng, &OTHER_FILLER).to_string(),
            });
        }
        let src = sources.get(ids.choose(rng).unwrap()).unwrap();
        let published = now - Duration::minutes(rng.gen_range(-60..36 * 60));
        out.push(NewsStory::new(
            src,
            format!("http://{}.example/story/{i}", src.id),
            headline,
            body.join(" "),
            published,
            published,
        ));
    }
    out
}

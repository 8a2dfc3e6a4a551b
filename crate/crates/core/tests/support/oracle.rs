//! Brute-force reference for one detection cycle and for hourly replay.
//!
//! Deliberately naive: linear scans over the ontology instead of indexes,
//! explicit loops instead of shared helpers. Only tagging, classification
//! and string normalization are borrowed from the crate under test.

use chrono::{DateTime, Duration, Utc};
use ghm_core::classifier::featurize;
use ghm_core::{
    normalize, ClassifierModel, EntityClass, EntityTagger, GeoLocation, Label, LocationKind, NewsStory, Ontology,
};

pub struct Oracle<'a> {
    ontology: &'a Ontology,
    model: &'a ClassifierModel,
    tagger: &'a dyn EntityTagger,
    hint: &'a dyn Fn(&str) -> Option<String>,
    top_k: usize,
    /// Every location with its normalized name, scanned linearly.
    places: Vec<(String, &'a GeoLocation)>,
}

struct Analyzed<'s> {
    story: &'s NewsStory,
    chars: usize,
    ents: Vec<(usize, String, EntityClass)>,
}

struct Pair {
    loc: String,
    dis: String,
    freq: u64,
    stories: Vec<usize>,
}

struct Event {
    disease: String,
    grounded: bool,
    loc_id: String,
    freq: u64,
    stories: Vec<usize>,
}

impl<'a> Oracle<'a> {
    pub fn new(
        ontology: &'a Ontology,
        model: &'a ClassifierModel,
        tagger: &'a dyn EntityTagger,
        hint: &'a dyn Fn(&str) -> Option<String>,
        top_k: usize,
    ) -> Self {
        let places = ontology.locations().map(|l| (normalize(&l.name), l)).collect();
        Oracle {
            ontology,
            model,
            tagger,
            hint,
            top_k,
            places,
        }
    }

    /// Event dump for a cycle at `now` over `stories` (the whole store).
    pub fn cycle(&self, stories: &[NewsStory], now: DateTime<Utc>) -> String {
        let from = now - Duration::hours(24);
        let mut relevant: Vec<Analyzed> = Vec::new();
        for s in stories {
            if s.published_at < from || s.published_at >= now || s.published_at < now - Duration::days(30) {
                continue;
            }
            let features = featurize(s, self.tagger).unwrap();
            if self.model.predict(&features).label != Label::Relevant {
                continue;
            }
            let ents = self
                .tagger
                .tag(s)
                .unwrap()
                .into_iter()
                .map(|e| (e.start, normalize(&e.surface), e.class))
                .collect();
            relevant.push(Analyzed {
                story: s,
                chars: s.text().chars().count(),
                ents,
            });
        }

        // Step 1 and 2
        let mut pairs: Vec<Pair> = Vec::new();
        for (si, a) in relevant.iter().enumerate() {
            let count = |surface: &str, class: EntityClass| {
                a.ents.iter().filter(|e| e.2 == class && e.1 == surface).count() as u64
            };
            let mut locs: Vec<&String> = a.ents.iter().filter(|e| e.2 == EntityClass::Location).map(|e| &e.1).collect();
            let mut dis: Vec<&String> = a.ents.iter().filter(|e| e.2 == EntityClass::Disease).map(|e| &e.1).collect();
            locs.sort();
            locs.dedup();
            dis.sort();
            dis.dedup();
            for l in &locs {
                for d in &dis {
                    let f = count(l, EntityClass::Location).min(count(d, EntityClass::Disease));
                    match pairs.iter_mut().find(|p| &p.loc == *l && &p.dis == *d) {
                        Some(p) => {
                            p.freq += f;
                            p.stories.push(si);
                        }
                        None => pairs.push(Pair {
                            loc: (*l).clone(),
                            dis: (*d).clone(),
                            freq: f,
                            stories: vec![si],
                        }),
                    }
                }
            }
        }

        // Step 3
        pairs.sort_by(|a, b| b.freq.cmp(&a.freq).then(a.loc.cmp(&b.loc)).then(a.dis.cmp(&b.dis)));
        pairs.truncate(self.top_k);

        // Step 4 and 5
        let mut events: Vec<Event> = Vec::new();
        for p in &pairs {
            let Some(loc_id) = self.resolve(&p.loc, &p.stories, &relevant) else {
                continue;
            };
            let concept = self
                .ontology
                .diseases()
                .find(|c| c.synonyms.iter().any(|s| normalize(s) == p.dis));
            let (disease, grounded) = match concept {
                Some(c) => (c.id.clone(), true),
                None => (p.dis.clone(), false),
            };
            let names_disease = |surface: &str| match concept {
                Some(c) => c.synonyms.iter().any(|s| normalize(s) == surface),
                None => surface == p.dis,
            };
            let mut support = Vec::new();
            for (si, a) in relevant.iter().enumerate() {
                let early = |e: &&(usize, String, EntityClass)| e.0 * 2 < a.chars;
                let has_d = a.ents.iter().filter(early).any(|e| e.2 == EntityClass::Disease && names_disease(&e.1));
                let has_l = a.ents.iter().filter(early).any(|e| e.2 == EntityClass::Location && e.1 == p.loc);
                if has_d && has_l {
                    support.push(si);
                }
            }
            if support.is_empty() {
                continue;
            }
            match events
                .iter_mut()
                .find(|e| e.disease == disease && e.grounded == grounded && e.loc_id == loc_id)
            {
                Some(e) => {
                    e.freq += p.freq;
                    for s in support {
                        if !e.stories.contains(&s) {
                            e.stories.push(s);
                        }
                    }
                }
                None => events.push(Event {
                    disease,
                    grounded,
                    loc_id,
                    freq: p.freq,
                    stories: support,
                }),
            }
        }
        events.sort_by(|a, b| {
            b.freq
                .cmp(&a.freq)
                .then(a.disease.cmp(&b.disease))
                .then(b.grounded.cmp(&a.grounded))
                .then(a.loc_id.cmp(&b.loc_id))
        });

        let mut out = String::new();
        for e in events {
            let loc = self.ontology.locations().find(|l| l.id == e.loc_id).unwrap();
            let mut ids: Vec<(DateTime<Utc>, String)> = e
                .stories
                .iter()
                .map(|&i| (relevant[i].story.published_at, relevant[i].story.id.clone()))
                .collect();
            ids.sort();
            let ids: Vec<String> = ids.into_iter().map(|p| p.1).collect();
            out += &format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                now.format("%Y-%m-%dT%H:%M:%SZ"),
                e.disease,
                e.grounded,
                e.loc_id,
                loc.latitude,
                loc.longitude,
                e.freq,
                ids.join(",")
            );
        }
        out
    }

    fn resolve(&self, surface: &str, contributing: &[usize], relevant: &[Analyzed]) -> Option<String> {
        let mut cands: Vec<&GeoLocation> = self.places.iter().filter(|p| p.0 == surface).map(|p| p.1).collect();
        cands.sort_by(|a, b| a.id.cmp(&b.id));
        if cands.is_empty() {
            return None;
        }
        if cands.len() == 1 {
            return Some(cands[0].id.clone());
        }
        let mut countries: Vec<String> = Vec::new();
        let mut hints: Vec<String> = Vec::new();
        for &si in contributing {
            for e in relevant[si].ents.iter().filter(|e| e.2 == EntityClass::Location) {
                for (name, l) in &self.places {
                    if l.kind == LocationKind::Country && *name == e.1 && !countries.contains(&l.id) {
                        countries.push(l.id.clone());
                    }
                }
            }
            if let Some(h) = (self.hint)(&relevant[si].story.source_id) {
                if !hints.contains(&h) {
                    hints.push(h);
                }
            }
        }
        let in_ctx: Vec<_> = cands.iter().filter(|c| countries.contains(&c.parent_country_id)).collect();
        if in_ctx.len() == 1 {
            return Some(in_ctx[0].id.clone());
        }
        if hints.len() == 1 {
            let hinted: Vec<_> = cands.iter().filter(|c| c.parent_country_id == hints[0]).collect();
            if hinted.len() == 1 {
                return Some(hinted[0].id.clone());
            }
        }
        Some(cands[0].id.clone())
    }

    /// Hourly cycles from `start` to `end` inclusive; each cycle sees the
    /// stories fetched by then.
    pub fn replay(&self, stories: &[NewsStory], start: DateTime<Utc>, end: DateTime<Utc>) -> String {
        let mut out = String::new();
        let mut now = start;
        while now <= end {
            let visible: Vec<NewsStory> = stories.iter().filter(|s| s.fetched_at <= now).cloned().collect();
            out += &self.cycle(&visible, now);
            now += Duration::hours(1);
        }
        out
    }
}

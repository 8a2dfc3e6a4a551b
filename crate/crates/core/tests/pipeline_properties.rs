mod support;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use chrono::Duration;
use ghm_core::api::{query_events, DatePreset, EventQuery, EventRange};
use ghm_core::eval::{pair_precision_recall, pairs_from_event_dump, retrieved_pairs, Rational};
use ghm_core::replay::{replay, ReplayOutput};
use ghm_core::{bundled, normalize, DetectionPipeline, Execution, Genre, StoryStore};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::{extended_tagger, random_corpus, random_sources, utc};

fn replayed(exec: Execution) -> ReplayOutput {
    let sources = bundled::replay_sources();
    let stories = bundled::replay_stories(&sources);
    let (start, end) = bundled::replay_span();
    let pipeline = DetectionPipeline::new(bundled::ontology(), bundled::classifier(), bundled::gazetteer(), &sources)
        .with_execution(exec);
    replay(&pipeline, &stories, start, end, Duration::hours(1)).unwrap()
}

fn final_replay() -> &'static ReplayOutput {
    static OUT: OnceLock<ReplayOutput> = OnceLock::new();
    OUT.get_or_init(|| replayed(Execution::Parallel))
}

#[test]
fn replay_is_identical_in_both_execution_modes() {
    let seq = replayed(Execution::Sequential);
    let par = final_replay();
    assert_eq!(seq.dump, par.dump);
    assert_eq!(seq.final_set, par.final_set);
}

#[test]
fn cycle_output_ignores_story_arrival_order() {
    let sources = random_sources();
    let tagger = extended_tagger();
    let pipeline = DetectionPipeline::new(bundled::ontology(), bundled::classifier(), &tagger, &sources);
    let now = utc(2007, 11, 11, 15, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..15 {
        let mut stories = random_corpus(&mut rng, now, 40, &sources);
        let mut a = StoryStore::new();
        a.insert_batch(stories.clone());
        stories.shuffle(&mut rng);
        let mut b = StoryStore::new();
        b.insert_batch(stories);
        let (x, y) = (pipeline.run_cycle(&a, now).unwrap(), pipeline.run_cycle(&b, now).unwrap());
        assert_eq!(x.dump(bundled::ontology()), y.dump(bundled::ontology()));
    }
}

fn ids(q: &EventQuery) -> BTreeSet<String> {
    let set = &final_replay().final_set;
    query_events(set, q, bundled::ontology(), set.detected_at.unwrap())
        .unwrap()
        .into_iter()
        .map(|v| v.id)
        .collect()
}

#[test]
fn narrower_ranges_return_subsets() {
    let mut prev: Option<BTreeSet<String>> = None;
    for preset in [DatePreset::Last30Days, DatePreset::ThreeWeeks, DatePreset::TwoWeeks, DatePreset::OneWeek] {
        let got = ids(&EventQuery {
            range: EventRange::Preset(preset),
            ..Default::default()
        });
        if let Some(p) = &prev {
            assert!(got.is_subset(p), "{preset:?}");
        }
        prev = Some(got);
    }
    assert!(ids(&EventQuery::default()).len() > ids(&EventQuery {
        range: EventRange::Preset(DatePreset::OneWeek),
        ..Default::default()
    })
    .len());
}

#[test]
fn genre_filters_compose_as_a_union() {
    let all = ids(&EventQuery::default());
    let genres = [Genre::Press, Genre::Official, Genre::Business];
    let mut union = BTreeSet::new();
    for g in genres {
        let one = ids(&EventQuery {
            genres: [g].into(),
            ..Default::default()
        });
        assert!(one.is_subset(&all));
        union.extend(one);
    }
    let together = ids(&EventQuery {
        genres: genres.into(),
        ..Default::default()
    });
    assert_eq!(together, union);
}

#[test]
fn initial_headline_only_drops_repeated_headlines() {
    let set = &final_replay().final_set;
    let now = set.detected_at.unwrap();
    let plain = query_events(set, &EventQuery::default(), bundled::ontology(), now).unwrap();
    let dedup = query_events(
        set,
        &EventQuery {
            initial_headline_only: true,
            ..Default::default()
        },
        bundled::ontology(),
        now,
    )
    .unwrap();
    let count = |vs: &[ghm_core::api::EventView]| vs.iter().map(|v| v.stories.len()).sum::<usize>();
    assert!(count(&dedup) < count(&plain), "the fixture stream repeats one headline");
    for v in &dedup {
        let heads: BTreeSet<String> = v.stories.iter().map(|s| normalize(&s.headline)).collect();
        assert_eq!(heads.len(), v.stories.len());
    }
}

#[test]
fn dump_pairs_match_event_pairs() {
    let sources = bundled::replay_sources();
    let mut store = StoryStore::new();
    let now = utc(2007, 11, 11, 15, 0);
    store.insert_batch(bundled::replay_stories(&sources).into_iter().filter(|s| s.fetched_at <= now));
    let pipeline = DetectionPipeline::new(bundled::ontology(), bundled::classifier(), bundled::gazetteer(), &sources);
    let cycle = pipeline.run_cycle(&store, now).unwrap();
    let from_dump = pairs_from_event_dump(&cycle.dump(bundled::ontology())).unwrap();
    let direct = retrieved_pairs(&cycle.events);
    assert_eq!(from_dump, direct);
    let m = pair_precision_recall(&from_dump, &direct);
    assert_eq!((m.precision, m.recall), (Rational::from_integer(1), Rational::from_integer(1)));
}

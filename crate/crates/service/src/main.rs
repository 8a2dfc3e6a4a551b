use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Duration, Utc};
use clap::{Parser, Subcommand};
use ghm_core::classifier::{cross_validate, parse_corpus, train, LabeledDoc};
use ghm_core::detector::Threshold;
use ghm_core::eval::{
    classification_accuracy, ner_f_score, pair_precision_recall, pairs_from_event_dump, parse_gold_pairs, EvalReport,
};
use ghm_core::feed::{parse_source_list, SourceRegistry, StoryLog};
use ghm_core::replay::{load_fixture_stories, replay};
use ghm_core::tagger::{parse_annotation_dump, write_annotation_dump, AnnotationRecord};
use ghm_core::{bundled, ClassifierModel, DetectionPipeline, EntityTagger, Execution};
use ghm_service::config::Config;
use ghm_service::http::router;
use ghm_service::ingest::{HttpTransport, Poller};
use ghm_service::state::{AppState, Clock, Engine};

#[derive(Parser)]
#[command(name = "ghm", version, about = "Disease outbreak detection over news feeds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API and the hourly detection loop.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Poll every source once and append new stories to the log.
    Ingest {
        #[arg(long)]
        sources: PathBuf,
        #[arg(long)]
        log: PathBuf,
    },
    /// Run one detection cycle over a story log and print the event dump.
    Cycle {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        sources: PathBuf,
        /// Cycle time (RFC 3339); defaults to now.
        #[arg(long)]
        at: Option<DateTime<Utc>>,
        #[arg(long, default_value_t = ghm_core::detector::DEFAULT_TOP_K)]
        top_k: usize,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Print the full cycle output as JSON instead of the dump.
        #[arg(long)]
        json: bool,
    },
    /// Train the topic classifier and write the model as JSON.
    Train {
        /// `label<TAB>headline<TAB>body` corpus; defaults to the bundled one.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-fold cross-validation of the classifier.
    Crossval {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long)]
        sequential: bool,
    },
    /// Tag the stories of a log and print an annotation dump.
    Tag {
        #[arg(long)]
        log: PathBuf,
    },
    /// Pair precision and recall of an event dump against gold pairs.
    EvalPairs {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Entity precision, recall and F1 of an annotation dump against gold.
    EvalNer {
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Replay a recorded story stream hour by hour and print every cycle's dump.
    Replay {
        /// Fixture stories (JSON lines); defaults to the bundled 30-day stream.
        #[arg(long, requires = "sources")]
        stories: Option<PathBuf>,
        #[arg(long)]
        sources: Option<PathBuf>,
        #[arg(long, requires = "to")]
        from: Option<DateTime<Utc>>,
        #[arg(long, requires = "from")]
        to: Option<DateTime<Utc>>,
        #[arg(long, default_value_t = ghm_core::detector::DEFAULT_TOP_K)]
        top_k: usize,
        #[arg(long)]
        sequential: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_sources(path: &Path) -> Result<SourceRegistry> {
    Ok(parse_source_list(&read(path)?, Some(&bundled::tld_table()))?)
}

fn load_corpus(path: Option<&Path>) -> Result<Vec<LabeledDoc>> {
    match path {
        Some(p) => Ok(parse_corpus(&read(p)?)?),
        None => Ok(bundled::training_corpus()),
    }
}

fn load_model(path: Option<&Path>) -> Result<ClassifierModel> {
    match path {
        Some(p) => Ok(ClassifierModel::from_json(&read(p)?)?),
        None => Ok(bundled::classifier().clone()),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn print_report(report: &EvalReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
    } else {
        print!("{}", report.to_text());
    }
}

fn main() -> Result<()> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let cli = Cli::parse();
    let ontology = bundled::ontology();
    let gazetteer = bundled::gazetteer();
    match cli.command {
        Command::Serve { config } => serve(Config::load(config.as_deref(), |k| std::env::var(k).ok())?),
        Command::Ingest { sources, log } => {
            let sources = load_sources(&sources)?;
            let log = StoryLog::new(log);
            let known = log.replay()?;
            let report = Poller::default().poll(&sources, &HttpTransport::default(), Utc::now());
            let fresh: Vec<_> = report.stories.into_iter().filter(|s| !known.contains(&s.id)).collect();
            log.append(&fresh)?;
            eprintln!(
                "{} new stories, {} items skipped, {} sources failed",
                fresh.len(),
                report.skipped.len(),
                report.failures.len()
            );
            Ok(())
        }
        Command::Cycle {
            log,
            sources,
            at,
            top_k,
            model,
            json,
        } => {
            let sources = load_sources(&sources)?;
            let store = StoryLog::new(log).replay()?;
            let model = load_model(model.as_deref())?;
            let out = DetectionPipeline::new(ontology, &model, gazetteer, &sources)
                .with_threshold(Threshold::TopK(top_k))
                .run_cycle(&store, at.unwrap_or_else(Utc::now))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                print!("{}", out.dump(ontology));
                for d in &out.diagnostics.dropped {
                    eprintln!("dropped\t{}", d.to_line());
                }
                for f in &out.diagnostics.fallbacks {
                    eprintln!("fallback\t{}", f.to_line());
                }
            }
            Ok(())
        }
        Command::Train { corpus, out } => {
            let model = train(&load_corpus(corpus.as_deref())?, gazetteer)?;
            match out {
                Some(p) => std::fs::write(&p, model.to_json()).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{}", model.to_json()),
            }
            Ok(())
        }
        Command::Crossval {
            corpus,
            folds,
            sequential,
        } => {
            let cv = cross_validate(&load_corpus(corpus.as_deref())?, gazetteer, folds, execution(sequential))?;
            let acc = classification_accuracy(&cv.predictions, &cv.gold)?;
            println!(
                "{folds}-fold accuracy {}/{} = {} ({})",
                cv.correct,
                cv.gold.len(),
                ghm_core::eval::render_decimal(acc, 4),
                ghm_core::eval::render_percent(acc, 2)
            );
            Ok(())
        }
        Command::Tag { log } => {
            let store = StoryLog::new(log).replay()?;
            let mut records = Vec::new();
            for s in store.iter() {
                for entity in gazetteer.tag(s)? {
                    records.push(AnnotationRecord {
                        story_id: s.id.clone(),
                        entity,
                    });
                }
            }
            print!("{}", write_annotation_dump(&records));
            Ok(())
        }
        Command::EvalPairs { dump, gold, json } => {
            let retrieved = pairs_from_event_dump(&read(&dump)?)?;
            let relevant = parse_gold_pairs(&read(&gold)?)?;
            print_report(&EvalReport::pairs(pair_precision_recall(&retrieved, &relevant)), json);
            Ok(())
        }
        Command::EvalNer { predicted, gold, json } => {
            let p = parse_annotation_dump(&read(&predicted)?)?;
            let g = parse_annotation_dump(&read(&gold)?)?;
            print_report(&EvalReport::ner(&ner_f_score(&p, &g)?), json);
            Ok(())
        }
        Command::Replay {
            stories,
            sources,
            from,
            to,
            top_k,
            sequential,
        } => {
            let registry = match &sources {
                Some(p) => load_sources(p)?,
                None => bundled::replay_sources(),
            };
            let stories = match &stories {
                Some(p) => load_fixture_stories(&read(p)?, &registry)?,
                None => bundled::replay_stories(&registry),
            };
            let (start, end) = match (from, to) {
                (Some(a), Some(b)) => (a, b),
                _ => bundled::replay_span(),
            };
            let pipeline = DetectionPipeline::new(ontology, bundled::classifier(), gazetteer, &registry)
                .with_threshold(Threshold::TopK(top_k))
                .with_execution(execution(sequential));
            let out = replay(&pipeline, &stories, start, end, Duration::hours(1))?;
            print!("{}", out.dump);
            for (at, f) in &out.fallbacks {
                eprintln!("fallback\t{}\t{}", ghm_core::detector::format_timestamp(*at), f.to_line());
            }
            eprintln!("{} cycles, {} event lines", out.cycles, out.events_emitted);
            Ok(())
        }
    }
}

fn serve(cfg: Config) -> Result<()> {
    let ontology = bundled::ontology();
    let runtime = tokio::runtime::Runtime::new()?;
    if cfg.demo {
        let state = AppState::new(ontology, Clock::Snapshot);
        let sources = bundled::replay_sources();
        let stories = bundled::replay_stories(&sources);
        let (start, end) = bundled::replay_span();
        let pipeline = DetectionPipeline::new(ontology, bundled::classifier(), bundled::gazetteer(), &sources)
            .with_threshold(Threshold::TopK(cfg.top_k));
        let out = replay(&pipeline, &stories, start, end, Duration::hours(1))?;
        state.stories.write().unwrap().insert_batch(stories);
        state.events.store(out.final_set);
        return runtime.block_on(listen(cfg, state));
    }

    std::fs::create_dir_all(&cfg.data_dir).with_context(|| format!("creating {}", cfg.data_dir.display()))?;
    let sources = if cfg.sources_file().exists() {
        load_sources(&cfg.sources_file())?
    } else {
        tracing::warn!("{} not found; no feeds will be polled", cfg.sources_file().display());
        SourceRegistry::default()
    };
    let model = if cfg.model_file().exists() {
        load_model(Some(&cfg.model_file()))?
    } else {
        bundled::classifier().clone()
    };
    let log = StoryLog::new(cfg.story_log());
    let state = AppState::new(ontology, Clock::Wall);
    *state.stories.write().unwrap() = log.replay()?;
    let engine = Arc::new(Engine::new(
        model,
        Box::new(bundled::gazetteer().clone()),
        sources,
        Threshold::TopK(cfg.top_k),
        Some(log),
        Box::new(HttpTransport::default()),
    ));
    if cfg.poll_interval_secs == 0 {
        bail!("poll_interval_secs must be positive");
    }
    let interval = std::time::Duration::from_secs(cfg.poll_interval_secs);
    runtime.block_on(async move {
        let loop_state = state.clone();
        tokio::spawn(async move {
            let mut ticker = tokio::time::interval(interval);
            loop {
                ticker.tick().await;
                let (engine, st) = (engine.clone(), loop_state.clone());
                match tokio::task::spawn_blocking(move || engine.tick(&st, Utc::now())).await {
                    Ok(Ok(s)) => tracing::info!(
                        "cycle: {} fetched, {} new, {} failed sources, {} events",
                        s.fetched,
                        s.new_stories,
                        s.failures,
                        s.events
                    ),
                    Ok(Err(e)) => tracing::error!("cycle aborted: {e:#}"),
                    Err(e) => tracing::error!("cycle task failed: {e}"),
                }
            }
        });
        listen(cfg, state).await
    })
}

async fn listen(cfg: Config, state: AppState) -> Result<()> {
    let app = router(state, cfg.ui_dir.as_deref());
    let addr = format!("{}:{}", cfg.bind, cfg.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on http://{addr}");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

//! Outbreak event detection over news streams.
//!
//! The pipeline runs in four stages: stories pulled from news feeds are
//! classified for disease relevance, tagged with named entities, mined for
//! disease/location pairs that are grounded against a bundled ontology, and
//! finally exposed as geocoded events through a filterable query layer.

pub mod api;
pub mod bundled;
pub mod classifier;
pub mod detector;
pub mod eval;
pub mod feed;
pub mod geo;
pub mod normalize;
pub mod ontology;
pub mod par;
pub mod replay;
pub mod tagger;
mod text;

pub use api::{EventQuery, EventSet, EventView};
pub use classifier::{ClassifierModel, Label};
pub use detector::{DetectionPipeline, OutbreakEvent, Threshold};
pub use feed::{FeedSource, Genre, NewsStory, StoryStore};
pub use normalize::normalize;
pub use ontology::{DiseaseConcept, GeoLocation, LocationKind, Ontology, Syndrome};
pub use par::Execution;
pub use tagger::{AnnotatedEntity, EntityClass, EntityTagger, Gazetteer};

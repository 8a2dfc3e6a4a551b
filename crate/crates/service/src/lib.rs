//! HTTP service and operational tooling around `ghm-core`.

pub mod config;
pub mod http;
pub mod ingest;
pub mod state;

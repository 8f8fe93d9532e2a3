//! File formats, the post store, pipeline stages and the command line of
//! `topocontro`. The computation itself lives in `topocontro-core`.

pub mod config;
pub mod error;
pub mod jsonl;
pub mod logging;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod store;
pub mod table;

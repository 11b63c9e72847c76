//! Run reports: one deterministic JSON document per verification run.
//!
//! Reports never embed wall-clock time, since identical inputs must produce
//! byte-identical files; `timing_ms` stays `None` on disk and the
//! measured time goes to stderr instead.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub name: String,
    pub dim: Option<usize>,
    pub rays: usize,
    pub contexts: usize,
    pub auxiliary: usize,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub dataset: DatasetSummary,
    pub verdict: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

pub fn command_echo() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    args.join(" ")
}

//! File formats, reports, and pipeline drivers around [`motifsig_core`]:
//! alert-cluster JSONL/CSV, signature JSONL, the reference database,
//! assignment/metrics reports, and the `motifsig` CLI.

pub mod cli;
pub mod formats;
pub mod pipeline;
pub mod report;
pub mod sigfile;

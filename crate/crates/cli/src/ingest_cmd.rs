//! `ingest`: run the ingestion pipeline over a raw tab-separated log and
//! write the binary replay cache.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::spec::IngestSpec;

pub fn run(raw_path: &Path, out_path: &Path, config_path: Option<&Path>) -> CliResult<()> {
    let cfg = match config_path {
        Some(p) => IngestSpec::load(p)?.to_config(),
        None => vfcb::envs::IngestConfig::default(),
    };
    let reader = BufReader::new(
        File::open(raw_path)
            .map_err(|e| CliError::log(format!("cannot open {}: {e}", raw_path.display())))?,
    );
    let (log, stats) = vfcb::envs::ingest_log(reader, &cfg)?;

    if let Some(parent) = out_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut writer = BufWriter::new(
        File::create(out_path)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", out_path.display())))?,
    );
    vfcb::io::write_replay_log(&mut writer, &log)?;

    println!(
        "ingest: {} rows read, {} malformed, {} dropped by label; kept {} entries across {} labels -> {}",
        stats.rows_read,
        stats.rows_malformed,
        stats.rows_dropped_by_label,
        log.entries.len(),
        stats.labels_kept.len(),
        out_path.display()
    );
    Ok(())
}

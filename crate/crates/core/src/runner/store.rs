//! Run directory layout: `config.json`, `results.jsonl` (header line plus one
//! result per line), `report.csv`, `report.txt` and, when episodes aborted,
//! `aborted.jsonl`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{AblationOutput, RunError, RunOutput};
use crate::config::RunConfig;
use crate::metrics::{
    render_ablation_csv, render_ablation_text, render_table_csv, render_table_text, MetricsReport, TableRow,
};
use crate::types::{parse_results, write_results, EpisodeResult, FormatError};

pub const RESULTS_FORMAT: &str = "ara-results";
const RESULTS_VERSION: u32 = 1;
const SIMILARITY_NOTE: &str = "greedy max-cosine F1 over lowercase word tokens; no idf weighting, no baseline rescaling";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsHeader {
    pub format: String,
    pub version: u32,
    pub run_id: String,
    pub episodes_sha256: String,
    pub method: String,
    pub translator: String,
    pub embedder: String,
    pub similarity: String,
    pub config: RunConfig,
    pub created_unix: u64,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: ResultsHeader,
}

impl ResultsHeader {
    fn of(out: &RunOutput) -> Self {
        ResultsHeader {
            format: RESULTS_FORMAT.into(),
            version: RESULTS_VERSION,
            run_id: out.run_id.clone(),
            episodes_sha256: out.episodes_sha256.clone(),
            method: out.config.policy.label(),
            translator: out.config.translator.label(),
            embedder: out.embedder_id.clone(),
            similarity: SIMILARITY_NOTE.into(),
            config: out.config.clone(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

pub fn table_row(method: &str, translator: &str, results: &[EpisodeResult]) -> TableRow {
    TableRow {
        method: method.into(),
        translator: translator.into(),
        reports: MetricsReport::all_splits(results),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    fs::write(path, bytes).map_err(RunError::io(format!("writing {}", path.display())))
}

/// The lines after the header of a results file.
pub fn results_body(bytes: &[u8]) -> &[u8] {
    match bytes.iter().position(|b| *b == b'\n') {
        Some(i) if bytes.starts_with(b"{\"header\"") => &bytes[i + 1..],
        _ => bytes,
    }
}

/// Writes the run directory under `root` and returns its path.
pub fn write_run_dir(root: &Path, out: &RunOutput) -> Result<PathBuf, RunError> {
    let dir = super::run_dir(root, out);
    fs::create_dir_all(&dir).map_err(RunError::io(format!("creating {}", dir.display())))?;
    let header = ResultsHeader::of(out);

    let mut config = serde_json::to_vec_pretty(&out.config).expect("config serializes");
    config.push(b'\n');
    write(&dir.join("config.json"), &config)?;

    let mut results = serde_json::to_vec(&HeaderLine { header: header.clone() }).expect("header serializes");
    results.push(b'\n');
    results.extend(write_results(&out.results));
    write(&dir.join("results.jsonl"), &results)?;

    let row = table_row(&header.method, &header.translator, &out.results);
    write(&dir.join("report.csv"), render_table_csv(std::slice::from_ref(&row)).as_bytes())?;
    write(&dir.join("report.txt"), render_table_text(&[row]).as_bytes())?;

    let aborted_path = dir.join("aborted.jsonl");
    if out.aborted.is_empty() {
        if aborted_path.exists() {
            fs::remove_file(&aborted_path).map_err(RunError::io(format!("removing {}", aborted_path.display())))?;
        }
    } else {
        let mut bytes = Vec::new();
        for a in &out.aborted {
            serde_json::to_writer(&mut bytes, a).expect("abort record serializes");
            bytes.push(b'\n');
        }
        write(&aborted_path, &bytes)?;
    }
    Ok(dir)
}

pub fn read_results_file(path: &Path) -> Result<(ResultsHeader, Vec<EpisodeResult>), RunError> {
    let bytes = fs::read(path).map_err(RunError::io(format!("reading {}", path.display())))?;
    let first = bytes.split(|b| *b == b'\n').next().unwrap_or_default();
    let header: HeaderLine = serde_json::from_slice(first).map_err(|e| FormatError::Schema {
        path: "header".into(),
        message: e.to_string(),
    })?;
    Ok((header.header, parse_results(results_body(&bytes))?))
}

/// Re-renders `report.csv` and `report.txt` of a run directory from its
/// `results.jsonl`, returning the CSV.
pub fn rerender_report(dir: &Path) -> Result<String, RunError> {
    let (header, results) = read_results_file(&dir.join("results.jsonl"))?;
    let row = table_row(&header.method, &header.translator, &results);
    let csv = render_table_csv(std::slice::from_ref(&row));
    write(&dir.join("report.csv"), csv.as_bytes())?;
    write(&dir.join("report.txt"), render_table_text(&[row]).as_bytes())?;
    Ok(csv)
}

/// Writes every row's run directory plus `ablation-<id>/ablation.{csv,txt}`.
pub fn write_ablation_dir(root: &Path, out: &AblationOutput) -> Result<PathBuf, RunError> {
    let ids: Vec<&str> = out.runs.iter().map(|r| r.run_id.as_str()).collect();
    let id = &crate::backend::sha256_hex(ids.join(",").as_bytes())[..16];
    for run in &out.runs {
        write_run_dir(root, run)?;
    }
    let dir = root.join(format!("ablation-{id}"));
    fs::create_dir_all(&dir).map_err(RunError::io(format!("creating {}", dir.display())))?;
    write(&dir.join("ablation.csv"), render_ablation_csv(&out.rows).as_bytes())?;
    write(&dir.join("ablation.txt"), render_ablation_text(&out.rows).as_bytes())?;
    let mut runs = String::new();
    for (row, run) in out.rows.iter().zip(&out.runs) {
        runs.push_str(&format!("{}\t{}\t{}\n", row.index, run.run_id, row.label));
    }
    write(&dir.join("runs.tsv"), runs.as_bytes())?;
    Ok(dir)
}

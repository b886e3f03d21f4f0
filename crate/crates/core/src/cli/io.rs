//! File formats of the command-line tool.
//!
//! Samples are CSV with columns `index,p,h` (`h` is `1` for an alternative,
//! `0` for a null, empty when unknown). Bin counts are `bin_mid,count`.
//! Every run writes a JSON [`RunManifest`] beside its outputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixtures::LabeledPValues;

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn write_sample<W: Write>(sample: &LabeledPValues, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "p", "h"])?;
    for (i, &p) in sample.p.iter().enumerate() {
        let h = match &sample.h {
            Some(h) => if h[i] { "1" } else { "0" },
            None => "",
        };
        w.write_record([i.to_string(), p.to_string(), h.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_label(s: &str) -> Option<bool> {
    match s {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

/// Reads a CSV with a `p` column and an optional `h` column.
///
/// Labels are kept only when every row has one. Rows count from 1 after
/// the header.
pub fn read_sample(path: &Path) -> Result<LabeledPValues> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let p_col = headers
        .iter()
        .position(|h| h == "p")
        .ok_or_else(|| Error::Ingest { row: 0, reason: "header has no `p` column".into() })?;
    let h_col = headers.iter().position(|h| h == "h");

    let mut p = Vec::new();
    let mut labels = Vec::new();
    let mut missing_label = false;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = record.get(p_col).unwrap_or("");
        let v: f64 = field.parse().map_err(|_| Error::Ingest {
            row,
            reason: format!("p-value `{field}` is not a number"),
        })?;
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Ingest {
                row,
                reason: format!("p-value {v} is not inside (0, 1)"),
            });
        }
        p.push(v);
        match h_col.map(|c| record.get(c).unwrap_or("")) {
            None | Some("") => missing_label = true,
            Some(s) => labels.push(parse_label(s).ok_or_else(|| Error::Ingest {
                row,
                reason: format!("label `{s}` is not 0 or 1"),
            })?),
        }
    }
    if p.is_empty() {
        return Err(Error::Ingest { row: 0, reason: "no p-values".into() });
    }
    let h = (!missing_label).then_some(labels);
    LabeledPValues::new(p, h)
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name that reproduce the outputs.
    pub argv: Vec<String>,
    /// Fully resolved parameters.
    pub params: serde_json::Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new<P: Serialize>(command: &str, argv: Vec<String>, params: &P, master_seed: Option<u64>, outputs: &[&Path]) -> Result<Self> {
        Ok(RunManifest {
            command: command.into(),
            argv,
            params: serde_json::to_value(params)?,
            master_seed,
            version: env!("CARGO_PKG_VERSION").into(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
    }
}

/// `<dir>/<stem>.manifest.json` for an output `<dir>/<stem>.<ext>`.
pub fn manifest_path(output: &Path) -> std::path::PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.manifest.json"))
}

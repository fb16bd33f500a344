//! Corpus and findings I/O. A corpus on disk is either a directory of
//! transcript documents or a single document with a `dialogues` list.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detectors::BreakdownFinding;
use crate::dialogue::{parse_dialogue, serialize_dialogue, Dialogue, DialogueError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Dialogue {
        path: String,
        #[source]
        source: DialogueError,
    },
    #[error("{path}: {source}")]
    Format {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("corpus at {0} contains no dialogues")]
    EmptyCorpus(String),
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io { path: path.display().to_string(), source }
}

#[derive(Serialize, Deserialize)]
struct CorpusDocument {
    dialogues: Vec<Dialogue>,
}

#[derive(Serialize, Deserialize)]
struct FindingsDocument {
    findings: Vec<BreakdownFinding>,
}

/// Loads a corpus from a directory of transcripts or a single document.
/// Directory entries are read in lexicographic filename order.
pub fn load_corpus(path: &Path) -> Result<Vec<Dialogue>, CorpusError> {
    if path.is_dir() {
        let mut names: Vec<_> = fs::read_dir(path)
            .map_err(|e| io_err(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
            .filter(|p| p.file_name().map(|n| n != "manifest.json").unwrap_or(true))
            .collect();
        names.sort();
        let mut dialogues = Vec::new();
        for file in names {
            let text = fs::read_to_string(&file).map_err(|e| io_err(&file, e))?;
            let d = parse_dialogue(&text).map_err(|e| CorpusError::Dialogue {
                path: file.display().to_string(),
                source: e,
            })?;
            dialogues.push(d);
        }
        if dialogues.is_empty() {
            return Err(CorpusError::EmptyCorpus(path.display().to_string()));
        }
        Ok(dialogues)
    } else {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let doc: CorpusDocument = serde_json::from_str(&text).map_err(|e| CorpusError::Format {
            path: path.display().to_string(),
            source: e,
        })?;
        for d in &doc.dialogues {
            d.validate().map_err(|e| CorpusError::Dialogue {
                path: path.display().to_string(),
                source: e,
            })?;
        }
        if doc.dialogues.is_empty() {
            return Err(CorpusError::EmptyCorpus(path.display().to_string()));
        }
        Ok(doc.dialogues)
    }
}

/// Writes each dialogue as `<id>.json` inside `dir` (created if missing).
pub fn write_corpus_dir(dir: &Path, corpus: &[Dialogue]) -> Result<(), CorpusError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for d in corpus {
        let file = dir.join(format!("{}.json", d.id));
        fs::write(&file, serialize_dialogue(d)).map_err(|e| io_err(&file, e))?;
    }
    Ok(())
}

/// Serializes a corpus as one document with a `dialogues` list.
pub fn serialize_corpus(corpus: &[Dialogue]) -> String {
    let doc = CorpusDocument { dialogues: corpus.to_vec() };
    let mut out = serde_json::to_string_pretty(&doc).expect("corpus serialization");
    out.push('\n');
    out
}

/// Serializes findings as one document with a `findings` list.
pub fn serialize_findings(findings: &[BreakdownFinding]) -> String {
    let doc = FindingsDocument { findings: findings.to_vec() };
    let mut out = serde_json::to_string_pretty(&doc).expect("findings serialization");
    out.push('\n');
    out
}

pub fn parse_findings(text: &str) -> Result<Vec<BreakdownFinding>, serde_json::Error> {
    let doc: FindingsDocument = serde_json::from_str(text)?;
    Ok(doc.findings)
}

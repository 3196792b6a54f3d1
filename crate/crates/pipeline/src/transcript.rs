//! Line-delimited JSON transcripts, one file per (problem, repeat).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::answer::Answer;
use crate::exec::{ExecStatus, SolverRoute};

/// One attempt as logged. The optional trailing fields may be absent in
/// transcripts produced elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub problem_id: String,
    pub attempt: u32,
    pub temperature: f64,
    pub prompt_sha256: String,
    pub completion: String,
    pub exec_status: ExecStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<Answer>,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<SolverRoute>,
    /// Provider failure message when no completion was obtained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider_error: Option<String>,
}

pub fn transcript_path(dir: &Path, problem_id: &str, repeat: u32) -> PathBuf {
    dir.join(format!("{problem_id}__r{repeat}.jsonl"))
}

/// Appends records, flushing after each so a crash keeps every finished
/// attempt.
pub struct TranscriptWriter {
    out: BufWriter<File>,
}

impl TranscriptWriter {
    /// Creates (or truncates) the transcript for one run.
    pub fn create(dir: &Path, problem_id: &str, repeat: u32) -> std::io::Result<TranscriptWriter> {
        std::fs::create_dir_all(dir)?;
        let file = File::create(transcript_path(dir, problem_id, repeat))?;
        Ok(TranscriptWriter {
            out: BufWriter::new(file),
        })
    }

    pub fn append(&mut self, record: &TranscriptRecord) -> std::io::Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }
}

pub fn read_transcript(path: &Path) -> std::io::Result<Vec<TranscriptRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}:{}: {e}", path.display(), i + 1),
            )
        })?;
        out.push(rec);
    }
    Ok(out)
}

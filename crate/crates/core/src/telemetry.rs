//! Append-only record of rated assist invocations.
//!
//! One record per line, tab-separated: query, origin, cycle_count, helpful,
//! timestamp (Unix seconds). Tabs, newlines, and backslashes in the query
//! are backslash-escaped.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::session::Origin;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelemetryRecord {
    pub query: String,
    pub origin: Origin,
    pub cycle_count: u64,
    /// Snippet shown when the session was rated. Not persisted.
    pub final_index: Option<usize>,
    pub helpful: bool,
    pub timestamp: u64,
}

impl TelemetryRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            escape(&self.query),
            self.origin,
            self.cycle_count,
            self.helpful,
            self.timestamp
        )
    }

    pub fn parse_line(line: &str) -> std::result::Result<Self, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [query, origin, cycles, helpful, timestamp] = fields[..] else {
            return Err(format!(
                "expected 5 tab-separated fields, got {}",
                fields.len()
            ));
        };
        Ok(TelemetryRecord {
            query: unescape(query)?,
            origin: origin.parse()?,
            cycle_count: cycles
                .parse()
                .map_err(|_| format!("bad cycle_count {cycles:?}"))?,
            final_index: None,
            helpful: helpful
                .parse()
                .map_err(|_| format!("bad helpful flag {helpful:?}"))?,
            timestamp: timestamp
                .parse()
                .map_err(|_| format!("bad timestamp {timestamp:?}"))?,
        })
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(text: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => {
                return Err(format!(
                    "bad escape \\{}",
                    other.map(String::from).unwrap_or_default()
                ))
            }
        }
    }
    Ok(out)
}

/// Appends records to a file, one flushed line at a time. Shareable across
/// threads.
#[derive(Debug)]
pub struct TelemetryLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl TelemetryLog {
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(TelemetryLog {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &TelemetryRecord) -> Result<()> {
        let mut line = record.to_line();
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())
            .and_then(|()| file.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

pub fn read_telemetry(path: &Path) -> Result<Vec<TelemetryRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let record = TelemetryRecord::parse_line(&line).map_err(|message| Error::Parse {
            what: "telemetry",
            message: format!("line {}: {message}", i + 1),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Helpful and unhelpful counts, overall and per origin.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub helpful: usize,
    pub unhelpful: usize,
    pub by_origin: BTreeMap<Origin, (usize, usize)>,
}

impl Tally {
    pub fn total(&self) -> usize {
        self.helpful + self.unhelpful
    }
}

pub fn tally(records: &[TelemetryRecord]) -> Tally {
    let mut tally = Tally::default();
    for record in records {
        let entry = tally.by_origin.entry(record.origin).or_default();
        if record.helpful {
            tally.helpful += 1;
            entry.0 += 1;
        } else {
            tally.unhelpful += 1;
            entry.1 += 1;
        }
    }
    tally
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16}{:>8}{:>10}", "origin", "helpful", "unhelpful")?;
        for (origin, (helpful, unhelpful)) in &self.by_origin {
            writeln!(f, "{:<16}{helpful:>8}{unhelpful:>10}", origin.as_str())?;
        }
        write!(
            f,
            "{:<16}{:>8}{:>10}",
            "total", self.helpful, self.unhelpful
        )
    }
}

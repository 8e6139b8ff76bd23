//! One assist invocation: replace a query in a document with an attributed
//! snippet, cycle through alternatives, restore, and rate.
//!
//! Offsets and lengths count characters, not bytes. A session never holds
//! the document; each operation takes the current text and returns the
//! [`DocumentEdit`] to apply, after checking that the block it inserted is
//! still intact.

use std::fmt;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{Retriever, SnippetResult};
use crate::telemetry::{TelemetryLog, TelemetryRecord};

/// How the user invoked the assist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    ContentAssist,
    Selection,
    QuestionMarks,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::ContentAssist => "content-assist",
            Origin::Selection => "selection",
            Origin::QuestionMarks => "question-marks",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "content-assist" => Ok(Origin::ContentAssist),
            "selection" => Ok(Origin::Selection),
            "question-marks" => Ok(Origin::QuestionMarks),
            other => Err(format!(
                "unknown origin {other:?} (expected content-assist, selection, or question-marks)"
            )),
        }
    }
}

/// A span of a document, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub start: usize,
    pub length: usize,
}

impl Region {
    pub fn end(self) -> usize {
        self.start + self.length
    }
}

/// Replace `removed` at character offset `start` with `inserted`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentEdit {
    pub start: usize,
    pub removed: String,
    pub inserted: String,
}

impl DocumentEdit {
    /// Applies the edit, failing with a conflict when the document does not
    /// hold `removed` at `start`.
    pub fn apply(&self, document: &str) -> Result<String> {
        let len = self.removed.chars().count();
        let span = char_span(
            document,
            Region {
                start: self.start,
                length: len,
            },
        )
        .ok_or_else(|| Error::Conflict("edit lies outside the document".into()))?;
        if document[span.clone()] != self.removed {
            return Err(Error::Conflict(format!(
                "document changed at offset {}",
                self.start
            )));
        }
        let mut out = String::with_capacity(document.len() + self.inserted.len());
        out.push_str(&document[..span.start]);
        out.push_str(&self.inserted);
        out.push_str(&document[span.end..]);
        Ok(out)
    }

    pub fn invert(&self) -> DocumentEdit {
        DocumentEdit {
            start: self.start,
            removed: self.inserted.clone(),
            inserted: self.removed.clone(),
        }
    }
}

/// Byte range of a character region, if it lies within `text`.
fn char_span(text: &str, region: Region) -> Option<std::ops::Range<usize>> {
    let mut offsets = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(text.len()));
    let start = offsets.nth(region.start)?;
    let end = if region.length == 0 {
        start
    } else {
        offsets.nth(region.length - 1)?
    };
    Some(start..end)
}

/// Finds the first `?query?` marker: the first pair of consecutive `?` on
/// one line with non-blank text between them. The region covers both
/// markers; the query is the trimmed inner text.
pub fn find_marker_query(document: &str) -> Option<(String, Region)> {
    let mut line_start = 0;
    for line in document.split('\n') {
        let marks: Vec<(usize, usize)> = line
            .chars()
            .enumerate()
            .filter(|&(_, c)| c == '?')
            .map(|(ci, _)| ci)
            .zip(line.match_indices('?').map(|(bi, _)| bi))
            .collect();
        for pair in marks.windows(2) {
            let ((open, open_byte), (close, close_byte)) = (pair[0], pair[1]);
            let inner = line[open_byte + 1..close_byte].trim();
            if !inner.is_empty() {
                let region = Region {
                    start: line_start + open,
                    length: close - open + 1,
                };
                return Some((inner.to_string(), region));
            }
        }
        line_start += line.chars().count() + 1;
    }
    None
}

/// Where snippets for a query come from.
pub trait SnippetSource {
    fn snippets_for(&self, query: &str) -> Result<Vec<SnippetResult>>;
}

impl SnippetSource for Retriever {
    fn snippets_for(&self, query: &str) -> Result<Vec<SnippetResult>> {
        self.retrieve_snippets(query)
    }
}

impl<S: SnippetSource + ?Sized> SnippetSource for &S {
    fn snippets_for(&self, query: &str) -> Result<Vec<SnippetResult>> {
        (**self).snippets_for(query)
    }
}

/// The text inserted for one snippet: an attribution comment line, then the
/// code. Lines after the first carry `indent`.
pub fn render_block(snippet: &SnippetResult, comment_leader: &str, indent: &str) -> String {
    let mut block = format!("{comment_leader} source: {}", snippet.source_url);
    for line in snippet.code.trim_end_matches(['\n', '\r']).lines() {
        block.push('\n');
        block.push_str(indent);
        block.push_str(line);
    }
    block
}

/// Leading whitespace of the line holding character offset `start`, cut
/// off at `start`.
fn indentation_at(document: &str, start: usize) -> String {
    let before: Vec<char> = document.chars().take(start).collect();
    let line_start = before.iter().rposition(|&c| c == '\n').map_or(0, |i| i + 1);
    before[line_start..]
        .iter()
        .take_while(|c| **c == ' ' || **c == '\t')
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationSession {
    id: String,
    query: String,
    origin: Origin,
    snippets: Vec<SnippetResult>,
    index: usize,
    original_text: String,
    region: Region,
    rating: Option<bool>,
    cycle_count: u64,
    comment_leader: String,
    indent: String,
    /// Block currently in the document; `None` when snippetless or restored.
    inserted: Option<String>,
}

/// Starts a session: fetches snippets for `query` and, when there are any,
/// returns the edit that replaces `region` with the first one.
pub fn begin_session(
    source: &impl SnippetSource,
    document: &str,
    query: &str,
    origin: Origin,
    region: Region,
    comment_leader: &str,
) -> Result<(InvocationSession, Option<DocumentEdit>)> {
    let query = query.trim();
    if query.is_empty() {
        return Err(Error::InvalidArgument("query is empty".into()));
    }
    let span = char_span(document, region).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "region {}..{} is outside the document",
            region.start,
            region.end()
        ))
    })?;
    let original_text = &document[span];
    check_region(original_text, query, origin)?;

    let snippets = source.snippets_for(query)?;
    let mut session = InvocationSession {
        id: uuid::Uuid::new_v4().to_string(),
        query: query.to_string(),
        origin,
        snippets,
        index: 0,
        original_text: original_text.to_string(),
        region,
        rating: None,
        cycle_count: 0,
        comment_leader: comment_leader.to_string(),
        indent: indentation_at(document, region.start),
        inserted: None,
    };
    let Some(first) = session.snippets.first() else {
        return Ok((session, None));
    };
    let block = render_block(first, &session.comment_leader, &session.indent);
    let edit = DocumentEdit {
        start: region.start,
        removed: session.original_text.clone(),
        inserted: block.clone(),
    };
    session.inserted = Some(block);
    Ok((session, Some(edit)))
}

/// The region must hold the query as typed: verbatim for a selection, and
/// wrapped in `?` markers for the marker form. A content-assist region holds
/// the partial fragment the suggestion replaced, so it is not compared.
fn check_region(text: &str, query: &str, origin: Origin) -> Result<()> {
    let ok = match origin {
        Origin::ContentAssist => true,
        Origin::Selection => text.trim() == query,
        Origin::QuestionMarks => {
            text.len() >= 2
                && text.starts_with('?')
                && text.ends_with('?')
                && text[1..text.len() - 1].trim() == query
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "region text {text:?} does not hold the {origin} query {query:?}"
        )))
    }
}

impl InvocationSession {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn snippets(&self) -> &[SnippetResult] {
        &self.snippets
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn count(&self) -> usize {
        self.snippets.len()
    }

    pub fn current(&self) -> Option<&SnippetResult> {
        self.snippets.get(self.index)
    }

    pub fn original_text(&self) -> &str {
        &self.original_text
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn rating(&self) -> Option<bool> {
        self.rating
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    pub fn is_snippetless(&self) -> bool {
        self.snippets.is_empty()
    }

    /// The block currently in the document, if any.
    pub fn inserted_block(&self) -> Option<&str> {
        self.inserted.as_deref()
    }

    /// Swaps the inserted block for the next snippet, wrapping after the
    /// last one.
    pub fn next_snippet(&mut self, document: &str) -> Result<DocumentEdit> {
        let current = self.live_block(document)?;
        let index = (self.index + 1) % self.snippets.len();
        let block = render_block(&self.snippets[index], &self.comment_leader, &self.indent);
        let edit = DocumentEdit {
            start: self.region.start,
            removed: current,
            inserted: block.clone(),
        };
        self.index = index;
        self.cycle_count += 1;
        self.inserted = Some(block);
        Ok(edit)
    }

    /// Puts the original text back in place of the inserted block.
    pub fn restore(&mut self, document: &str) -> Result<DocumentEdit> {
        let current = self.live_block(document)?;
        self.inserted = None;
        Ok(DocumentEdit {
            start: self.region.start,
            removed: current,
            inserted: self.original_text.clone(),
        })
    }

    /// The inserted block, checked against the document.
    fn live_block(&self, document: &str) -> Result<String> {
        if self.snippets.is_empty() {
            return Err(Error::State("session has no snippets".into()));
        }
        let Some(block) = &self.inserted else {
            return Err(Error::State("session was already restored".into()));
        };
        let region = Region {
            start: self.region.start,
            length: block.chars().count(),
        };
        match char_span(document, region) {
            Some(span) if document[span.clone()] == *block => Ok(block.clone()),
            _ => Err(Error::Conflict(
                "the inserted snippet was modified in the document".into(),
            )),
        }
    }

    /// Records the user's verdict once and appends a telemetry record.
    pub fn rate(&mut self, helpful: bool, log: &TelemetryLog) -> Result<TelemetryRecord> {
        let record = self.rating_record(helpful)?;
        log.append(&record)?;
        self.rating = Some(helpful);
        Ok(record)
    }

    /// The record [`InvocationSession::rate`] would append, without
    /// persisting it or changing the session.
    pub fn rating_record(&self, helpful: bool) -> Result<TelemetryRecord> {
        if self.rating.is_some() {
            return Err(Error::State("session was already rated".into()));
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Ok(TelemetryRecord {
            query: self.query.clone(),
            origin: self.origin,
            cycle_count: self.cycle_count,
            final_index: (!self.snippets.is_empty()).then_some(self.index),
            helpful,
            timestamp,
        })
    }
}

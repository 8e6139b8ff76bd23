use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{Answer, CorpusStore, Question};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Keep only questions carrying this tag; `None` keeps everything.
    pub tag_filter: Option<String>,
    pub base_url: String,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            tag_filter: Some("java".to_string()),
            base_url: "https://stackoverflow.com".to_string(),
        }
    }
}

/// Counts produced by one ingest. `skipped` covers malformed rows and
/// answers whose parent question is absent from the dump; `filtered` covers
/// rows excluded by the tag filter or by post type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub questions: usize,
    pub answers: usize,
    pub snippets: usize,
    pub skipped: usize,
    pub filtered: usize,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "questions: {}", self.questions)?;
        writeln!(f, "answers: {}", self.answers)?;
        writeln!(f, "snippets: {}", self.snippets)?;
        writeln!(f, "skipped: {}", self.skipped)?;
        write!(f, "filtered: {}", self.filtered)
    }
}

enum Row {
    Question(Question),
    Answer(Answer),
    Other(u64),
}

/// Raw attribute values of one `<row/>`, before validation.
#[derive(Default)]
struct RawRow {
    id: Option<String>,
    post_type: Option<String>,
    parent: Option<String>,
    score: Option<String>,
    title: Option<String>,
    body: Option<String>,
    tags: Option<String>,
    accepted: Option<String>,
}

impl CorpusStore {
    pub fn ingest(path: &Path, options: &IngestOptions) -> Result<(CorpusStore, IngestReport)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::ingest_reader(BufReader::new(file), options)
    }

    pub fn ingest_reader<R: BufRead>(
        source: R,
        options: &IngestOptions,
    ) -> Result<(CorpusStore, IngestReport)> {
        let mut reader = Reader::from_reader(source);
        reader.config_mut().trim_text(true);

        let mut report = IngestReport::default();
        let mut seen_ids = HashSet::new();
        let mut questions = Vec::new();
        let mut pending_answers = Vec::new();
        // Ids of posts that exist in the dump but were filtered out.
        let mut excluded = HashSet::new();
        let tag_filter = options.tag_filter.as_deref().map(str::to_lowercase);

        let mut buf = Vec::new();
        let mut rows = 0usize;
        loop {
            let event = reader.read_event_into(&mut buf).map_err(|e| Error::Dump {
                row: rows + 1,
                message: e.to_string(),
            })?;
            match event {
                Event::Eof => break,
                Event::Empty(ref e) | Event::Start(ref e) if e.name().as_ref() == b"row" => {
                    rows += 1;
                    match parse_row(e) {
                        Some(row) => {
                            let id = match &row {
                                Row::Question(q) => q.id,
                                Row::Answer(a) => a.id,
                                Row::Other(id) => *id,
                            };
                            if !seen_ids.insert(id) {
                                report.skipped += 1;
                                buf.clear();
                                continue;
                            }
                            match row {
                                Row::Question(q) => {
                                    let keep = tag_filter
                                        .as_deref()
                                        .is_none_or(|tag| q.tags.iter().any(|t| t == tag));
                                    if keep {
                                        questions.push(q);
                                    } else {
                                        excluded.insert(q.id);
                                        report.filtered += 1;
                                    }
                                }
                                Row::Answer(a) => pending_answers.push(a),
                                Row::Other(id) => {
                                    excluded.insert(id);
                                    report.filtered += 1;
                                }
                            }
                        }
                        None => report.skipped += 1,
                    }
                }
                _ => {}
            }
            buf.clear();
        }

        let stored: HashSet<u64> = questions.iter().map(|q| q.id).collect();
        let mut answers = Vec::with_capacity(pending_answers.len());
        for answer in pending_answers {
            if stored.contains(&answer.question_id) {
                answers.push(answer);
            } else if excluded.contains(&answer.question_id) {
                report.filtered += 1;
            } else {
                report.skipped += 1;
            }
        }

        let store = CorpusStore::from_parts(
            tag_filter,
            options.base_url.trim_end_matches('/').to_string(),
            questions,
            answers,
        );
        report.questions = store.question_count();
        report.answers = store.answer_count();
        report.snippets = store.snippet_count();
        Ok((store, report))
    }
}

fn parse_row(element: &BytesStart<'_>) -> Option<Row> {
    let mut raw = RawRow::default();
    for attr in element.attributes() {
        let attr = attr.ok()?;
        let value = attr.unescape_value().ok()?.into_owned();
        let slot = match attr.key.as_ref() {
            b"Id" => &mut raw.id,
            b"PostTypeId" => &mut raw.post_type,
            b"ParentId" => &mut raw.parent,
            b"Score" => &mut raw.score,
            b"Title" => &mut raw.title,
            b"Body" => &mut raw.body,
            b"Tags" => &mut raw.tags,
            b"AcceptedAnswerId" => &mut raw.accepted,
            _ => continue,
        };
        *slot = Some(value);
    }

    let id = positive(raw.id.as_deref()?)?;
    let score = match raw.score.as_deref() {
        Some(s) => s.trim().parse::<i64>().ok()?,
        None => 0,
    };
    let body_html = raw.body.unwrap_or_default();
    match raw.post_type.as_deref()?.trim() {
        "1" => {
            let title = raw.title?.trim().to_string();
            if title.is_empty() {
                return None;
            }
            let accepted_answer_id = match raw.accepted.as_deref() {
                Some(s) => Some(positive(s)?),
                None => None,
            };
            Some(Row::Question(Question {
                id,
                title,
                tags: parse_tags(raw.tags.as_deref().unwrap_or("")),
                score,
                accepted_answer_id,
                body_html,
            }))
        }
        "2" => Some(Row::Answer(Answer {
            id,
            question_id: positive(raw.parent.as_deref()?)?,
            score,
            body_html,
        })),
        other => {
            other.parse::<u32>().ok()?;
            Some(Row::Other(id))
        }
    }
}

fn positive(text: &str) -> Option<u64> {
    text.trim().parse::<u64>().ok().filter(|&n| n > 0)
}

/// Parses a dump `Tags` value. Both the `<java><string>` encoding and the
/// newer `|java|string|` encoding are accepted; tags are lowercased and
/// deduplicated in first-seen order.
pub fn parse_tags(encoded: &str) -> Vec<String> {
    let mut tags: Vec<String> = Vec::new();
    let parts = encoded.split(['<', '>', '|']);
    for part in parts {
        let tag = part.trim().to_lowercase();
        if !tag.is_empty() && !tags.contains(&tag) {
            tags.push(tag);
        }
    }
    tags
}

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{extract_code_blocks, Answer, CodeSnippet, Question, Thread};
use crate::error::{Error, Result};

pub const STORE_FORMAT: &str = "snipassist-store/1";
pub const STORE_FILE: &str = "store.json";

/// Attribution URL of an answer.
pub fn source_url(base_url: &str, answer_id: u64) -> String {
    format!("{}/a/{answer_id}", base_url.trim_end_matches('/'))
}

/// On-disk layout: one JSON document holding the sorted rows. Lookup tables
/// are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct StoreFile {
    format: String,
    tag_filter: Option<String>,
    base_url: String,
    questions: Vec<Question>,
    answers: Vec<Answer>,
    snippets: Vec<CodeSnippet>,
}

/// Immutable, read-only corpus. Built once by ingest or loaded from disk.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    tag_filter: Option<String>,
    base_url: String,
    questions: Vec<Question>,
    answers: Vec<Answer>,
    snippets: Vec<CodeSnippet>,
    question_pos: HashMap<u64, usize>,
    answer_pos: HashMap<u64, usize>,
    /// Per question, positions into `answers` in thread order.
    thread_order: HashMap<u64, Vec<usize>>,
    /// Per answer, the range of its snippets in `snippets`.
    snippet_ranges: HashMap<u64, Range<usize>>,
}

impl CorpusStore {
    /// Builds a store from already-parsed rows, extracting code snippets from
    /// answer bodies. Ids must be unique; answers whose question is absent
    /// are kept but belong to no retrievable thread.
    pub fn from_parts(
        tag_filter: Option<String>,
        base_url: String,
        mut questions: Vec<Question>,
        mut answers: Vec<Answer>,
    ) -> Self {
        questions.sort_by_key(|q| q.id);
        answers.sort_by_key(|a| a.id);
        let snippets = answers
            .iter()
            .flat_map(|answer| {
                extract_code_blocks(&answer.body_html)
                    .into_iter()
                    .enumerate()
                    .map(|(ordinal, code)| CodeSnippet {
                        answer_id: answer.id,
                        ordinal: ordinal as u32,
                        code,
                        source_url: source_url(&base_url, answer.id),
                    })
            })
            .collect();
        Self::assemble(tag_filter, base_url, questions, answers, snippets)
    }

    fn assemble(
        tag_filter: Option<String>,
        base_url: String,
        questions: Vec<Question>,
        answers: Vec<Answer>,
        snippets: Vec<CodeSnippet>,
    ) -> Self {
        let question_pos: HashMap<u64, usize> = questions
            .iter()
            .enumerate()
            .map(|(i, q)| (q.id, i))
            .collect();
        let answer_pos = answers.iter().enumerate().map(|(i, a)| (a.id, i)).collect();

        let mut thread_order: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, answer) in answers.iter().enumerate() {
            thread_order.entry(answer.question_id).or_default().push(i);
        }
        for (question_id, order) in thread_order.iter_mut() {
            let accepted = question_pos
                .get(question_id)
                .and_then(|&p| questions[p].accepted_answer_id);
            order.sort_by(|&x, &y| {
                let (a, b) = (&answers[x], &answers[y]);
                b.score
                    .cmp(&a.score)
                    .then_with(|| (Some(b.id) == accepted).cmp(&(Some(a.id) == accepted)))
                    .then_with(|| a.id.cmp(&b.id))
            });
        }

        let mut snippet_ranges: HashMap<u64, Range<usize>> = HashMap::new();
        for (i, snippet) in snippets.iter().enumerate() {
            snippet_ranges
                .entry(snippet.answer_id)
                .and_modify(|r| r.end = i + 1)
                .or_insert(i..i + 1);
        }

        CorpusStore {
            tag_filter,
            base_url,
            questions,
            answers,
            snippets,
            question_pos,
            answer_pos,
            thread_order,
            snippet_ranges,
        }
    }

    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join(STORE_FILE);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let data: StoreFile =
            serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Parse {
                what: "store",
                message: e.to_string(),
            })?;
        if data.format != STORE_FORMAT {
            return Err(Error::Format {
                what: "store",
                found: data.format,
                expected: STORE_FORMAT,
            });
        }
        Ok(Self::assemble(
            data.tag_filter,
            data.base_url,
            data.questions,
            data.answers,
            data.snippets,
        ))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(STORE_FILE);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        self.write_to(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(&path, e))
    }

    /// Serializes the store in its on-disk form.
    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct View<'a> {
            format: &'a str,
            tag_filter: &'a Option<String>,
            base_url: &'a str,
            questions: &'a [Question],
            answers: &'a [Answer],
            snippets: &'a [CodeSnippet],
        }
        let view = View {
            format: STORE_FORMAT,
            tag_filter: &self.tag_filter,
            base_url: &self.base_url,
            questions: &self.questions,
            answers: &self.answers,
            snippets: &self.snippets,
        };
        serde_json::to_writer(&mut *out, &view)?;
        out.write_all(b"\n")
    }

    pub fn tag_filter(&self) -> Option<&str> {
        self.tag_filter.as_deref()
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn question_count(&self) -> usize {
        self.questions.len()
    }

    pub fn answer_count(&self) -> usize {
        self.answers.len()
    }

    pub fn snippet_count(&self) -> usize {
        self.snippets.len()
    }

    /// Questions in ascending id order.
    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    /// Answers in ascending id order.
    pub fn answers(&self) -> &[Answer] {
        &self.answers
    }

    /// Snippets ordered by answer id, then ordinal.
    pub fn snippets(&self) -> &[CodeSnippet] {
        &self.snippets
    }

    pub fn question(&self, id: u64) -> Option<&Question> {
        self.question_pos.get(&id).map(|&p| &self.questions[p])
    }

    pub fn answer(&self, id: u64) -> Option<&Answer> {
        self.answer_pos.get(&id).map(|&p| &self.answers[p])
    }

    /// Answers of a question in thread order.
    pub fn thread_answers(&self, question_id: u64) -> impl Iterator<Item = &Answer> + '_ {
        self.thread_order
            .get(&question_id)
            .into_iter()
            .flatten()
            .map(|&p| &self.answers[p])
    }

    /// Code snippets of an answer in ordinal order.
    pub fn answer_snippets(&self, answer_id: u64) -> &[CodeSnippet] {
        match self.snippet_ranges.get(&answer_id) {
            Some(range) => &self.snippets[range.clone()],
            None => &[],
        }
    }

    pub fn get_thread(&self, question_id: u64) -> Result<Thread> {
        let question = self
            .question(question_id)
            .ok_or_else(|| Error::NotFound(format!("question {question_id}")))?;
        Ok(Thread {
            question: question.clone(),
            answers: self.thread_answers(question_id).cloned().collect(),
        })
    }
}

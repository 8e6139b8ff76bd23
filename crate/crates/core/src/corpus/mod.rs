//! The local Q&A corpus: questions, answers, and the code snippets found in
//! answer bodies, ingested from a Stack Exchange posts dump.

mod dump;
mod html;
mod store;

pub use dump::{parse_tags, IngestOptions, IngestReport};
pub use html::{decode_entities, extract_code_blocks, strip_tags};
pub use store::{source_url, CorpusStore, STORE_FILE, STORE_FORMAT};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: u64,
    pub title: String,
    pub tags: Vec<String>,
    pub score: i64,
    pub accepted_answer_id: Option<u64>,
    pub body_html: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub id: u64,
    pub question_id: u64,
    pub score: i64,
    pub body_html: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSnippet {
    pub answer_id: u64,
    /// Zero-based position of the block among the answer's code blocks.
    pub ordinal: u32,
    pub code: String,
    pub source_url: String,
}

/// A question with its answers, best first: score descending, the accepted
/// answer first among equal scores, then lower id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    pub question: Question,
    pub answers: Vec<Answer>,
}

use serde::{Deserialize, Serialize};

use crate::completion::CompletionIndex;
use crate::corpus::CorpusStore;

/// Artifact sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub question_count: usize,
    pub answer_count: usize,
    pub snippet_count: usize,
    pub task_count: usize,
}

pub fn stats(store: &CorpusStore, index: &CompletionIndex) -> Stats {
    Stats {
        question_count: store.question_count(),
        answer_count: store.answer_count(),
        snippet_count: store.snippet_count(),
        task_count: index.task_count(),
    }
}

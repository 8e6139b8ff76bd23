//! Lexical thread search and snippet retrieval.
//!
//! Threads are ranked by an idf-weighted overlap between the query and the
//! question's title and tags. The best few threads then contribute up to a
//! fixed number of code snippets each, walking answers best first.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::corpus::CorpusStore;
use crate::error::{Error, Result};
use crate::extract::DETERMINERS;

/// Weight of a query token found among a question's tags, relative to a
/// title hit.
pub const TAG_WEIGHT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreadMatch {
    pub question_id: u64,
    pub lexical_score: f64,
    pub question_score: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetResult {
    pub code: String,
    pub source_url: String,
    /// 1-based rank of the thread the snippet came from.
    pub thread_rank: usize,
    pub answer_score: i64,
    pub answer_id: u64,
    /// 1-based position in the overall result list.
    pub position: usize,
}

/// How many threads to visit and how many snippets each may contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetrievalLimits {
    pub max_threads: usize,
    pub max_snippets_per_thread: usize,
}

impl RetrievalLimits {
    pub fn from_config(config: &Config) -> Self {
        RetrievalLimits {
            max_threads: config.max_threads,
            max_snippets_per_thread: config.max_snippets_per_thread,
        }
    }
}

impl Default for RetrievalLimits {
    fn default() -> Self {
        Self::from_config(&Config::default())
    }
}

/// Lowercased alphanumeric runs, without articles.
pub fn search_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !DETERMINERS.contains(&t.as_str()))
        .collect()
}

/// Where a token occurs in one question.
#[derive(Debug, Clone, Copy)]
struct Posting {
    question: u32,
    in_title: bool,
    in_tags: bool,
}

impl Posting {
    fn weight(self) -> f64 {
        f64::from(u8::from(self.in_title)) + TAG_WEIGHT * f64::from(u8::from(self.in_tags))
    }
}

/// Inverted index over question titles and tags.
#[derive(Debug, Clone, Default)]
struct ThreadIndex {
    postings: HashMap<String, Vec<Posting>>,
    question_count: usize,
}

impl ThreadIndex {
    fn build(store: &CorpusStore) -> Self {
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        for (i, question) in store.questions().iter().enumerate() {
            let title: BTreeSet<String> = search_tokens(&question.title).into_iter().collect();
            let tags: BTreeSet<String> = question
                .tags
                .iter()
                .flat_map(|tag| search_tokens(tag))
                .collect();
            for token in title.union(&tags) {
                postings.entry(token.clone()).or_default().push(Posting {
                    question: i as u32,
                    in_title: title.contains(token),
                    in_tags: tags.contains(token),
                });
            }
        }
        ThreadIndex {
            postings,
            question_count: store.question_count(),
        }
    }

    /// ln(1 + N / df), where df counts questions with the token in their
    /// title or tags.
    fn idf(&self, df: usize) -> f64 {
        (1.0 + self.question_count as f64 / df as f64).ln()
    }
}

/// Thread search and snippet retrieval over one immutable store.
#[derive(Debug, Clone)]
pub struct Retriever {
    store: CorpusStore,
    index: ThreadIndex,
    limits: RetrievalLimits,
}

impl Retriever {
    pub fn new(store: CorpusStore, limits: RetrievalLimits) -> Self {
        let index = ThreadIndex::build(&store);
        Retriever {
            store,
            index,
            limits,
        }
    }

    pub fn store(&self) -> &CorpusStore {
        &self.store
    }

    pub fn limits(&self) -> RetrievalLimits {
        self.limits
    }

    /// Top `k` threads by (score desc, question score desc, id asc). Only
    /// threads sharing at least one token with the query are returned.
    pub fn search_threads(&self, query: &str, k: usize) -> Result<Vec<ThreadMatch>> {
        if query.trim().is_empty() {
            return Err(Error::InvalidArgument("query is empty".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        let tokens: BTreeSet<String> = search_tokens(query).into_iter().collect();
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for token in &tokens {
            let Some(list) = self.index.postings.get(token) else {
                continue;
            };
            let idf = self.index.idf(list.len());
            for posting in list {
                *scores.entry(posting.question).or_default() += idf * posting.weight();
            }
        }
        let questions = self.store.questions();
        let mut matches: Vec<ThreadMatch> = scores
            .into_iter()
            .filter(|&(_, score)| score > 0.0)
            .map(|(i, score)| {
                let question = &questions[i as usize];
                ThreadMatch {
                    question_id: question.id,
                    lexical_score: score,
                    question_score: question.score,
                }
            })
            .collect();
        matches.sort_by(|a, b| {
            b.lexical_score
                .total_cmp(&a.lexical_score)
                .then_with(|| b.question_score.cmp(&a.question_score))
                .then_with(|| a.question_id.cmp(&b.question_id))
        });
        matches.truncate(k);
        Ok(matches)
    }

    /// Snippets for a task: the top threads in rank order, each walking its
    /// answers best first and taking code blocks in document order until the
    /// per-thread cap. An empty list means nothing was found.
    pub fn retrieve_snippets(&self, task: &str) -> Result<Vec<SnippetResult>> {
        let threads = self.search_threads(task, self.limits.max_threads)?;
        let mut results = Vec::new();
        for (rank, thread) in threads.iter().enumerate() {
            let snippets = self
                .store
                .thread_answers(thread.question_id)
                .flat_map(|answer| {
                    self.store
                        .answer_snippets(answer.id)
                        .iter()
                        .map(move |snippet| (answer, snippet))
                })
                .take(self.limits.max_snippets_per_thread);
            for (answer, snippet) in snippets {
                results.push(SnippetResult {
                    code: snippet.code.clone(),
                    source_url: snippet.source_url.clone(),
                    thread_rank: rank + 1,
                    answer_score: answer.score,
                    answer_id: answer.id,
                    position: results.len() + 1,
                });
            }
        }
        Ok(results)
    }
}

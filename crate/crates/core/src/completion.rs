//! Type-to-filter suggestions over the extracted task phrases.
//!
//! An entry matches a query when its text starts with the query
//! (full-prefix), or when every whitespace-separated query token is a prefix
//! of some entry token, with the matched entry tokens in query order
//! (token-prefix). Matching is case-insensitive. Results rank full-prefix
//! matches first, then by source count descending, then by text.
//!
//! Entries get a popularity rank at build time, and posting lists hold ranks
//! in ascending order, so a merge over the lists visits candidates best
//! first and can stop as soon as it has enough.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::TaskPhrase;

pub const INDEX_FORMAT: &str = "snipassist-index/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchKind {
    FullPrefix,
    TokenPrefix,
}

impl MatchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchKind::FullPrefix => "full-prefix",
            MatchKind::TokenPrefix => "token-prefix",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub text: String,
    pub source_count: usize,
    pub match_kind: MatchKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub task_count: usize,
    /// Distinct question titles the tasks came from.
    pub title_count: usize,
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    built_at: u64,
    corpus_stats: CorpusStats,
    entries: Vec<TaskPhrase>,
}

/// Immutable completion index. Safe to share across threads.
#[derive(Debug, Clone)]
pub struct CompletionIndex {
    /// Sorted by text.
    entries: Vec<TaskPhrase>,
    /// Seconds since the Unix epoch.
    built_at: u64,
    corpus_stats: CorpusStats,
    /// Entry position for each popularity rank.
    by_rank: Vec<u32>,
    /// Popularity rank of each entry position.
    rank_of: Vec<u32>,
    /// Sorted distinct tokens, parallel to `postings`.
    vocab: Vec<String>,
    /// Ranks of the entries containing each token, ascending.
    postings: Vec<Vec<u32>>,
    /// `posting_totals[i]` is the summed length of `postings[..i]`.
    posting_totals: Vec<usize>,
}

/// Builds an index from tasks that are already merged by text. Every task
/// must be valid and have at least one source.
pub fn build_index(tasks: Vec<TaskPhrase>) -> Result<CompletionIndex> {
    let built_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    build_index_at(tasks, built_at)
}

/// [`build_index`] with an explicit build timestamp.
pub fn build_index_at(mut tasks: Vec<TaskPhrase>, built_at: u64) -> Result<CompletionIndex> {
    if tasks.len() > u32::MAX as usize {
        return Err(Error::InvalidArgument(
            "too many tasks for one index".into(),
        ));
    }
    for task in &tasks {
        task.validate().map_err(Error::InvalidArgument)?;
        if task.sources.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{:?} has no source titles",
                task.text
            )));
        }
    }
    tasks.sort_unstable_by(|a, b| a.text.cmp(&b.text));
    if let Some(pair) = tasks.windows(2).find(|w| w[0].text == w[1].text) {
        return Err(Error::DuplicateTask(pair[0].text.clone()));
    }

    let mut by_rank: Vec<u32> = (0..tasks.len() as u32).collect();
    by_rank.sort_unstable_by_key(|&p| (Reverse(tasks[p as usize].sources.len()), p));

    let mut rank_of = vec![0u32; tasks.len()];
    for (rank, &pos) in by_rank.iter().enumerate() {
        rank_of[pos as usize] = rank as u32;
    }

    let mut token_ranks: Vec<(&str, u32)> = Vec::new();
    for (rank, &pos) in by_rank.iter().enumerate() {
        let mut seen = HashSet::new();
        for token in tasks[pos as usize].text.split(' ') {
            if seen.insert(token) {
                token_ranks.push((token, rank as u32));
            }
        }
    }
    token_ranks.sort_unstable();
    let mut vocab: Vec<String> = Vec::new();
    let mut postings: Vec<Vec<u32>> = Vec::new();
    for (token, rank) in token_ranks {
        if vocab.last().map(String::as_str) != Some(token) {
            vocab.push(token.to_string());
            postings.push(Vec::new());
        }
        postings.last_mut().expect("pushed above").push(rank);
    }
    let mut posting_totals = Vec::with_capacity(postings.len() + 1);
    posting_totals.push(0);
    for list in &postings {
        posting_totals.push(posting_totals.last().copied().unwrap_or(0) + list.len());
    }

    let titles: BTreeSet<u64> = tasks
        .iter()
        .flat_map(|t| t.sources.iter().copied())
        .collect();
    let corpus_stats = CorpusStats {
        task_count: tasks.len(),
        title_count: titles.len(),
    };
    Ok(CompletionIndex {
        entries: tasks,
        built_at,
        corpus_stats,
        by_rank,
        rank_of,
        vocab,
        postings,
        posting_totals,
    })
}

impl CompletionIndex {
    pub fn entries(&self) -> &[TaskPhrase] {
        &self.entries
    }

    pub fn built_at(&self) -> u64 {
        self.built_at
    }

    pub fn corpus_stats(&self) -> CorpusStats {
        self.corpus_stats
    }

    pub fn task_count(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, text: &str) -> bool {
        self.entries
            .binary_search_by(|e| e.text.as_str().cmp(text))
            .is_ok()
    }

    /// Distinct tokens in sorted order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.vocab.iter().map(String::as_str)
    }

    /// Positions in [`CompletionIndex::entries`] of the entries containing
    /// `token`, ascending.
    pub fn token_positions(&self, token: &str) -> Vec<usize> {
        let Ok(i) = self.vocab.binary_search_by(|t| t.as_str().cmp(token)) else {
            return Vec::new();
        };
        let mut positions: Vec<usize> = self.postings[i]
            .iter()
            .map(|&r| self.by_rank[r as usize] as usize)
            .collect();
        positions.sort_unstable();
        positions
    }

    /// Up to `limit` suggestions for a partial query.
    pub fn suggest(&self, query: &str, limit: usize) -> Vec<Suggestion> {
        let query = query.to_lowercase();
        if limit == 0 {
            return Vec::new();
        }
        if query.trim().is_empty() {
            return self.by_rank[..limit.min(self.by_rank.len())]
                .iter()
                .map(|&p| self.suggestion(p, MatchKind::FullPrefix))
                .collect();
        }

        let mut full = self.full_prefix_ranks(&query);
        let take = limit.min(full.len());
        if full.len() > take {
            full.select_nth_unstable(take);
            full.truncate(take);
        }
        full.sort_unstable();
        let mut out: Vec<Suggestion> = full
            .into_iter()
            .map(|r| self.suggestion(self.by_rank[r as usize], MatchKind::FullPrefix))
            .collect();
        if out.len() < limit {
            let tokens: Vec<&str> = query.split_whitespace().collect();
            self.token_prefix_matches(&query, &tokens, limit - out.len(), &mut out);
        }
        out
    }

    fn suggestion(&self, pos: u32, match_kind: MatchKind) -> Suggestion {
        let entry = &self.entries[pos as usize];
        Suggestion {
            text: entry.text.clone(),
            source_count: entry.sources.len(),
            match_kind,
        }
    }

    /// Ranks of all entries whose text starts with `query`.
    fn full_prefix_ranks(&self, query: &str) -> Vec<u32> {
        let start = self.entries.partition_point(|e| e.text.as_str() < query);
        let len = self.entries[start..].partition_point(|e| e.text.starts_with(query));
        self.rank_of[start..start + len].to_vec()
    }

    /// Appends up to `want` token-prefix matches that are not full-prefix
    /// matches, best rank first.
    fn token_prefix_matches(
        &self,
        query: &str,
        tokens: &[&str],
        want: usize,
        out: &mut Vec<Suggestion>,
    ) {
        let Some(range) = tokens
            .iter()
            .map(|t| self.vocab_range(t))
            .min_by_key(|r| self.posting_totals[r.end] - self.posting_totals[r.start])
        else {
            return;
        };
        let mut heap: BinaryHeap<Reverse<(u32, usize, usize)>> = range
            .filter(|&i| !self.postings[i].is_empty())
            .map(|i| Reverse((self.postings[i][0], i, 0)))
            .collect();
        let mut last = None;
        let mut found = 0;
        while let Some(Reverse((rank, list, at))) = heap.pop() {
            if let Some(&next) = self.postings[list].get(at + 1) {
                heap.push(Reverse((next, list, at + 1)));
            }
            if last == Some(rank) {
                continue;
            }
            last = Some(rank);
            let pos = self.by_rank[rank as usize];
            let text = &self.entries[pos as usize].text;
            if !text.starts_with(query) && tokens_match_in_order(text, tokens) {
                out.push(self.suggestion(pos, MatchKind::TokenPrefix));
                found += 1;
                if found == want {
                    return;
                }
            }
        }
    }

    /// Vocabulary positions of the tokens starting with `prefix`.
    fn vocab_range(&self, prefix: &str) -> std::ops::Range<usize> {
        let lo = self.vocab.partition_point(|t| t.as_str() < prefix);
        let len = self.vocab[lo..].partition_point(|t| t.starts_with(prefix));
        lo..lo + len
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_to(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct IndexFileRef<'a> {
            format: &'a str,
            built_at: u64,
            corpus_stats: CorpusStats,
            entries: &'a [TaskPhrase],
        }
        serde_json::to_writer(
            &mut *out,
            &IndexFileRef {
                format: INDEX_FORMAT,
                built_at: self.built_at,
                corpus_stats: self.corpus_stats,
                entries: &self.entries,
            },
        )?;
        out.write_all(b"\n")
    }

    /// Loads an index written by [`CompletionIndex::save`]; posting lists
    /// are rebuilt from the entries.
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let data: IndexFile =
            serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Parse {
                what: "index",
                message: e.to_string(),
            })?;
        if data.format != INDEX_FORMAT {
            return Err(Error::Format {
                what: "index",
                found: data.format,
                expected: INDEX_FORMAT,
            });
        }
        build_index_at(data.entries, data.built_at)
    }
}

/// Greedy left-to-right assignment of query tokens to entry tokens. Taking
/// the earliest entry token for each query token never rules out a match.
fn tokens_match_in_order(text: &str, tokens: &[&str]) -> bool {
    let mut pending = tokens.iter().peekable();
    for word in text.split(' ') {
        match pending.peek() {
            Some(t) if word.starts_with(**t) => {
                pending.next();
            }
            Some(_) => {}
            None => break,
        }
    }
    pending.peek().is_none()
}

//! Reference implementations and generators shared by the integration tests.
//! The references are deliberately naive: linear scans and full sorts.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use snipassist_core::completion::{MatchKind, Suggestion};
use snipassist_core::corpus::{extract_code_blocks, Answer, CorpusStore, IngestOptions, Question};
use snipassist_core::extract::TaskPhrase;
use snipassist_core::search::{RetrievalLimits, Retriever, SnippetResult};
use snipassist_core::session::{Origin, Region, SnippetSource};
use snipassist_core::Result;

pub const BASE_URL: &str = "https://stackoverflow.com";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> CorpusStore {
    CorpusStore::ingest(&fixture(name), &IngestOptions::default())
        .expect("fixture ingests")
        .0
}

pub fn fixture_retriever(name: &str) -> Retriever {
    Retriever::new(load_fixture(name), RetrievalLimits::default())
}

// ---- completion -----------------------------------------------------------

/// Every entry checked one by one, then sorted.
pub fn suggest_oracle(tasks: &[TaskPhrase], query: &str, limit: usize) -> Vec<Suggestion> {
    let q = query.to_lowercase();
    let blank = q.trim().is_empty();
    let q_tokens: Vec<&str> = q.split_whitespace().collect();
    let mut hits: Vec<Suggestion> = Vec::new();
    for task in tasks {
        let kind = if blank || task.text.starts_with(&q) {
            Some(MatchKind::FullPrefix)
        } else {
            let e_tokens: Vec<&str> = task.text.split(' ').collect();
            ordered_prefix_match(&e_tokens, &q_tokens).then_some(MatchKind::TokenPrefix)
        };
        if let Some(match_kind) = kind {
            hits.push(Suggestion {
                text: task.text.clone(),
                source_count: task.sources.len(),
                match_kind,
            });
        }
    }
    hits.sort_by(|a, b| {
        let rank = |k: MatchKind| u8::from(k == MatchKind::TokenPrefix);
        rank(a.match_kind)
            .cmp(&rank(b.match_kind))
            .then(b.source_count.cmp(&a.source_count))
            .then(a.text.cmp(&b.text))
    });
    hits.truncate(limit);
    hits
}

/// Subsequence DP: can query tokens 0..i be matched, in order, within
/// entry tokens 0..j?
fn ordered_prefix_match(entry: &[&str], query: &[&str]) -> bool {
    let (n, m) = (query.len(), entry.len());
    let mut dp = vec![vec![false; m + 1]; n + 1];
    for row in dp[0].iter_mut() {
        *row = true;
    }
    for i in 1..=n {
        for j in 1..=m {
            dp[i][j] = dp[i][j - 1] || (dp[i - 1][j - 1] && entry[j - 1].starts_with(query[i - 1]));
        }
    }
    dp[n][m]
}

const TASK_VERBS: &[&str] = &[
    "add", "append", "set", "setup", "sort", "split", "spin", "read",
];
const TASK_NOUNS: &[&str] = &[
    "list", "lines", "line", "link", "file", "files", "filter", "string", "str", "stream", "map",
    "max", "array", "arr",
];
const TASK_PREPS: &[&str] = &["to", "in", "by", "from"];

pub fn random_tasks(rng: &mut StdRng, max: usize) -> Vec<TaskPhrase> {
    let target = rng.gen_range(0..=max);
    let mut by_text: HashMap<String, TaskPhrase> = HashMap::new();
    for _ in 0..target * 2 {
        if by_text.len() >= target {
            break;
        }
        let verb = TASK_VERBS.choose(rng).unwrap();
        let noun = |rng: &mut StdRng| {
            let words: Vec<&str> = (0..rng.gen_range(1..=2))
                .map(|_| *TASK_NOUNS.choose(rng).unwrap())
                .collect();
            words.join(" ")
        };
        let object = rng.gen_bool(0.8).then(|| noun(rng));
        let pp = (object.is_none() || rng.gen_bool(0.5))
            .then(|| format!("{} {}", TASK_PREPS.choose(rng).unwrap(), noun(rng)));
        let sources: Vec<u64> = (0..rng.gen_range(1..=4))
            .map(|_| rng.gen_range(1..500))
            .collect();
        let task = TaskPhrase::new(verb, object.as_deref(), pp.as_deref()).with_sources(sources);
        by_text.entry(task.text.clone()).or_insert(task);
    }
    let mut tasks: Vec<TaskPhrase> = by_text.into_values().collect();
    tasks.sort_by(|a, b| a.text.cmp(&b.text));
    tasks.shuffle(rng);
    tasks
}

pub fn random_query(rng: &mut StdRng, tasks: &[TaskPhrase]) -> String {
    let pick = tasks
        .choose(rng)
        .map(|t| t.text.clone())
        .unwrap_or_default();
    match rng.gen_range(0..8) {
        0 | 1 => {
            let chars: Vec<char> = pick.chars().collect();
            let cut = rng.gen_range(0..=chars.len());
            chars[..cut].iter().collect()
        }
        2 | 3 => {
            let mut parts = Vec::new();
            for t in pick.split(' ') {
                if !t.is_empty() && rng.gen_bool(0.5) {
                    parts.push(&t[..rng.gen_range(1..=t.len())]);
                }
            }
            parts.join(" ")
        }
        4 => {
            let pool: Vec<&str> = TASK_VERBS
                .iter()
                .chain(TASK_NOUNS)
                .chain(TASK_PREPS)
                .copied()
                .collect();
            (0..rng.gen_range(1..=3))
                .map(|_| {
                    let w = pool.choose(rng).unwrap();
                    w[..rng.gen_range(1..=w.len())].to_string()
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
        5 => pick.to_uppercase(),
        6 => format!("  {}  ", pick.split(' ').next().unwrap_or("")),
        _ => ["", " ", "zz", "a  l"].choose(rng).unwrap().to_string(),
    }
}

// ---- retrieval ------------------------------------------------------------

fn oracle_tokens(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut word = String::new();
    for c in text.chars().chain([' ']) {
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
        } else if !word.is_empty() {
            if !matches!(word.as_str(), "a" | "an" | "the") {
                out.insert(word.clone());
            }
            word.clear();
        }
    }
    out
}

/// Ranks every question, sorts, and applies the caps.
pub fn retrieve_oracle(
    store: &CorpusStore,
    query: &str,
    limits: RetrievalLimits,
) -> Vec<SnippetResult> {
    let fields: Vec<(&Question, BTreeSet<String>, BTreeSet<String>)> = store
        .questions()
        .iter()
        .map(|q| {
            let tags = q.tags.iter().flat_map(|t| oracle_tokens(t)).collect();
            (q, oracle_tokens(&q.title), tags)
        })
        .collect();
    let n = fields.len() as f64;
    let query_tokens = oracle_tokens(query);
    let mut ranked: Vec<(f64, i64, u64)> = Vec::new();
    for (q, title, tags) in &fields {
        let mut score = 0.0;
        for t in &query_tokens {
            let df = fields
                .iter()
                .filter(|(_, ti, ta)| ti.contains(t) || ta.contains(t))
                .count();
            if df == 0 || !(title.contains(t) || tags.contains(t)) {
                continue;
            }
            let weight = f64::from(u8::from(title.contains(t)))
                + 2.0 * f64::from(u8::from(tags.contains(t)));
            score += (1.0 + n / df as f64).ln() * weight;
        }
        if score > 0.0 {
            ranked.push((score, q.score, q.id));
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));

    let mut results = Vec::new();
    for (rank, &(_, _, qid)) in ranked.iter().take(limits.max_threads).enumerate() {
        let accepted = store.question(qid).and_then(|q| q.accepted_answer_id);
        let mut answers: Vec<&Answer> = store
            .answers()
            .iter()
            .filter(|a| a.question_id == qid)
            .collect();
        answers.sort_by_key(|a| (std::cmp::Reverse(a.score), Some(a.id) != accepted, a.id));
        let mut taken = 0;
        'answers: for answer in answers {
            for code in extract_code_blocks(&answer.body_html) {
                if taken == limits.max_snippets_per_thread {
                    break 'answers;
                }
                taken += 1;
                results.push(SnippetResult {
                    code,
                    source_url: format!("{BASE_URL}/a/{}", answer.id),
                    thread_rank: rank + 1,
                    answer_score: answer.score,
                    answer_id: answer.id,
                    position: results.len() + 1,
                });
            }
        }
    }
    results
}

const TITLE_WORDS: &[&str] = &[
    "sort", "list", "file", "read", "write", "string", "convert", "the", "a", "map", "lines",
    "text",
];
const TAGS: &[&str] = &[
    "java",
    "file-io",
    "string",
    "sorting",
    "swing",
    "text-files",
];

/// A random store of at most `max_threads` questions with 0..=5 answers of
/// 0..=4 code blocks each. Scores tie often.
pub fn random_store(rng: &mut StdRng, max_threads: usize) -> CorpusStore {
    let mut questions = Vec::new();
    let mut answers = Vec::new();
    let mut next_answer = 1000u64;
    for qid in 1..=rng.gen_range(0..=max_threads) as u64 {
        let title: Vec<&str> = (0..rng.gen_range(1..=6))
            .map(|_| *TITLE_WORDS.choose(rng).unwrap())
            .collect();
        let tag_count = rng.gen_range(0..=2);
        let tags: Vec<String> = TAGS
            .choose_multiple(rng, tag_count)
            .map(|t| t.to_string())
            .collect();
        let mut ids = Vec::new();
        for _ in 0..rng.gen_range(0..=5) {
            next_answer += rng.gen_range(1..4);
            ids.push(next_answer);
            let body_html: String = (0..rng.gen_range(0..=4))
                .map(|k| format!("<p>step {k}</p><pre><code>code_{next_answer}_{k} &lt;T&gt;\nnext();</code></pre>"))
                .collect();
            answers.push(Answer {
                id: next_answer,
                question_id: qid,
                score: rng.gen_range(-2..=4),
                body_html,
            });
        }
        questions.push(Question {
            id: qid,
            title: title.join(" "),
            tags,
            score: rng.gen_range(-1..=3),
            accepted_answer_id: if rng.gen_bool(0.5) {
                ids.choose(rng).copied()
            } else {
                None
            },
            body_html: String::new(),
        });
    }
    CorpusStore::from_parts(Some("java".into()), BASE_URL.into(), questions, answers)
}

pub fn random_title_query(rng: &mut StdRng) -> String {
    let words: Vec<&str> = (0..rng.gen_range(1..=4))
        .map(|_| *TITLE_WORDS.choose(rng).unwrap())
        .collect();
    let mut q = words.join(" ");
    if rng.gen_bool(0.2) {
        q = q.to_uppercase();
    }
    if rng.gen_bool(0.1) {
        q.push_str(" zzz");
    }
    q
}

// ---- sessions -------------------------------------------------------------

/// Returns the same snippets for every query.
pub struct FixedSource(pub Vec<SnippetResult>);

impl SnippetSource for FixedSource {
    fn snippets_for(&self, _query: &str) -> Result<Vec<SnippetResult>> {
        Ok(self.0.clone())
    }
}

pub fn random_snippets(rng: &mut StdRng) -> Vec<SnippetResult> {
    (0..rng.gen_range(1..=5))
        .map(|i| {
            let answer_id = rng.gen_range(1..1_000_000);
            let lines: Vec<String> = (0..rng.gen_range(1..=4))
                .map(|k| {
                    let pad = " ".repeat(rng.gen_range(0..=4));
                    format!("{pad}stmt_{i}_{k}(\"é\");")
                })
                .collect();
            let mut code = lines.join("\n");
            if rng.gen_bool(0.3) {
                code.push('\n');
            }
            SnippetResult {
                code,
                source_url: format!("{BASE_URL}/a/{answer_id}"),
                thread_rank: 1,
                answer_score: 0,
                answer_id,
                position: i + 1,
            }
        })
        .collect()
}

const DOC_WORDS: &[&str] = &[
    "int", "x", "=", "0;", "return", "日本", "é", "{", "}", "//", "if",
];

/// A document with the query placed somewhere in it as the given origin
/// would find it.
pub fn random_document(rng: &mut StdRng, query: &str) -> (String, Region, Origin) {
    let random_line = |rng: &mut StdRng| {
        let indent = ["", "  ", "    ", "\t"].choose(rng).unwrap().to_string();
        let words: Vec<&str> = (0..rng.gen_range(0..=5))
            .map(|_| *DOC_WORDS.choose(rng).unwrap())
            .collect();
        indent + &words.join(" ")
    };
    let before: Vec<String> = (0..rng.gen_range(0..=4))
        .map(|_| random_line(rng))
        .collect();
    let after: Vec<String> = (0..rng.gen_range(0..=4))
        .map(|_| random_line(rng))
        .collect();
    let origin = *[
        Origin::ContentAssist,
        Origin::Selection,
        Origin::QuestionMarks,
    ]
    .choose(rng)
    .unwrap();
    let region_text = match origin {
        Origin::QuestionMarks => format!("?{query}?"),
        Origin::Selection => query.to_string(),
        Origin::ContentAssist => query
            .chars()
            .take(rng.gen_range(1..=query.chars().count()))
            .collect(),
    };
    let lead = format!(
        "{}{}",
        ["", "  ", "\t\t"].choose(rng).unwrap(),
        if rng.gen_bool(0.3) { "x = " } else { "" }
    );
    let mut doc = before.join("\n");
    if !before.is_empty() {
        doc.push('\n');
    }
    doc.push_str(&lead);
    let start = doc.chars().count();
    doc.push_str(&region_text);
    if rng.gen_bool(0.3) {
        doc.push_str(" // trailing");
    }
    for line in &after {
        doc.push('\n');
        doc.push_str(line);
    }
    if rng.gen_bool(0.5) {
        doc.push('\n');
    }
    let region = Region {
        start,
        length: region_text.chars().count(),
    };
    (doc, region, origin)
}

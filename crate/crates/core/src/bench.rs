//! Synthetic task corpora and a suggest latency benchmark.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::completion::{build_index, CompletionIndex};
use crate::error::Result;
use crate::extract::TaskPhrase;

const VERBS: &[&str] = &[
    "add",
    "append",
    "build",
    "call",
    "cast",
    "check",
    "clear",
    "close",
    "compare",
    "compile",
    "compute",
    "configure",
    "connect",
    "convert",
    "copy",
    "count",
    "create",
    "decode",
    "delete",
    "deploy",
    "detect",
    "display",
    "download",
    "encode",
    "extract",
    "fetch",
    "fill",
    "filter",
    "find",
    "format",
    "generate",
    "get",
    "handle",
    "hide",
    "import",
    "initialize",
    "insert",
    "iterate",
    "join",
    "load",
    "lock",
    "map",
    "merge",
    "move",
    "open",
    "parse",
    "print",
    "read",
    "remove",
    "rename",
    "render",
    "replace",
    "reset",
    "resize",
    "return",
    "reverse",
    "run",
    "save",
    "send",
    "set",
    "show",
    "sort",
    "split",
    "start",
    "stop",
    "store",
    "test",
    "update",
    "upload",
    "validate",
    "write",
];

const PREPOSITIONS: &[&str] = &["to", "from", "in", "into", "with", "by", "of", "on", "for"];

const SYLLABLES: &[&str] = &[
    "ar", "bel", "cor", "dan", "el", "fir", "gol", "hen", "ix", "jor", "kal", "lum", "mor", "nex",
    "op", "pra", "qui", "ros", "sal", "tor", "ul", "ven", "wex", "yar", "zu",
];

/// `count` distinct, valid task phrases with skewed source counts.
pub fn synthetic_tasks(count: usize, seed: u64) -> Vec<TaskPhrase> {
    let mut rng = StdRng::seed_from_u64(seed);
    let nouns = synthetic_nouns(&mut rng, 4000);
    let mut seen = HashSet::with_capacity(count);
    let mut tasks = Vec::with_capacity(count);
    let mut next_source = 1u64;
    while tasks.len() < count {
        let verb = *VERBS.choose(&mut rng).expect("non-empty");
        let object = (rng.gen_bool(0.85)).then(|| noun_phrase(&mut rng, &nouns));
        let prep = (object.is_none() || rng.gen_bool(0.6)).then(|| {
            let p = PREPOSITIONS.choose(&mut rng).expect("non-empty");
            format!("{p} {}", noun_phrase(&mut rng, &nouns))
        });
        let task = TaskPhrase::new(verb, object.as_deref(), prep.as_deref());
        if !seen.insert(task.text.clone()) {
            continue;
        }
        // Geometric source counts: most tasks come from a single title.
        let mut sources = 1;
        while sources < 50 && rng.gen_bool(0.35) {
            sources += 1;
        }
        let ids = next_source..next_source + sources;
        next_source += sources;
        tasks.push(task.with_sources(ids));
    }
    tasks
}

fn synthetic_nouns(rng: &mut StdRng, count: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    while seen.len() < count {
        let len = rng.gen_range(2..=3);
        let word: String = (0..len)
            .map(|_| *SYLLABLES.choose(rng).expect("non-empty"))
            .collect();
        seen.insert(word);
    }
    let mut nouns: Vec<String> = seen.into_iter().collect();
    nouns.sort();
    nouns
}

fn noun_phrase(rng: &mut StdRng, nouns: &[String]) -> String {
    let head = nouns.choose(rng).expect("non-empty");
    if rng.gen_bool(0.3) {
        format!("{} {head}", nouns.choose(rng).expect("non-empty"))
    } else {
        head.clone()
    }
}

/// Queries a user might type against `index`: partial task texts, ordered
/// token prefixes, and a few misses.
pub fn synthetic_queries(index: &CompletionIndex, count: usize, seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let entries = index.entries();
    (0..count)
        .map(|_| {
            let Some(entry) = entries.choose(&mut rng) else {
                return String::new();
            };
            match rng.gen_range(0..10) {
                0..=4 => {
                    let chars: Vec<char> = entry.text.chars().collect();
                    let cut = rng.gen_range(1..=chars.len());
                    chars[..cut].iter().collect()
                }
                5..=8 => {
                    let tokens: Vec<&str> = entry.text.split(' ').collect();
                    let mut picked: Vec<&str> = tokens
                        .iter()
                        .copied()
                        .filter(|_| rng.gen_bool(0.5))
                        .collect();
                    if picked.is_empty() {
                        picked.push(tokens[rng.gen_range(0..tokens.len())]);
                    }
                    picked
                        .iter()
                        .map(|t| {
                            let cut = rng.gen_range(1..=t.len());
                            &t[..cut]
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                }
                _ => format!("{} zq", &entry.text[..1]),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub task_count: usize,
    pub query_count: usize,
    pub build_time: Duration,
    pub p50: Duration,
    pub p95: Duration,
    pub p99: Duration,
    pub max: Duration,
    pub total_time: Duration,
}

/// Builds an index over `task_count` synthetic tasks and times
/// `query_count` suggest calls.
pub fn run_suggest_bench(
    task_count: usize,
    query_count: usize,
    limit: usize,
    seed: u64,
) -> Result<BenchReport> {
    let started = Instant::now();
    let tasks = synthetic_tasks(task_count, seed);
    let build_started = Instant::now();
    let index = build_index(tasks)?;
    let build_time = build_started.elapsed();
    let queries = synthetic_queries(&index, query_count, seed.wrapping_add(1));
    let latencies = time_queries(&index, &queries, limit);
    Ok(BenchReport {
        task_count: index.task_count(),
        query_count: queries.len(),
        build_time,
        p50: percentile(&latencies, 0.50),
        p95: percentile(&latencies, 0.95),
        p99: percentile(&latencies, 0.99),
        max: latencies.last().copied().unwrap_or_default(),
        total_time: started.elapsed(),
    })
}

/// Per-query latencies, sorted ascending.
pub fn time_queries(index: &CompletionIndex, queries: &[String], limit: usize) -> Vec<Duration> {
    let mut latencies: Vec<Duration> = queries
        .iter()
        .map(|q| {
            let t = Instant::now();
            std::hint::black_box(index.suggest(q, limit));
            t.elapsed()
        })
        .collect();
    latencies.sort();
    latencies
}

/// Nearest-rank percentile of sorted samples.
pub fn percentile(sorted: &[Duration], p: f64) -> Duration {
    if sorted.is_empty() {
        return Duration::ZERO;
    }
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tasks_are_valid_and_distinct() {
        let tasks = synthetic_tasks(2000, 7);
        assert_eq!(tasks.len(), 2000);
        assert!(tasks
            .iter()
            .all(|t| t.validate().is_ok() && t.source_count() >= 1));
        let texts: HashSet<&str> = tasks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts.len(), 2000);
        assert_eq!(synthetic_tasks(50, 7), synthetic_tasks(50, 7));
    }

    #[test]
    fn small_bench_runs() {
        let report = run_suggest_bench(3000, 200, 10, 1).unwrap();
        assert_eq!((report.task_count, report.query_count), (3000, 200));
        assert!(report.p50 <= report.p95 && report.p95 <= report.max);
    }

    #[test]
    fn nearest_rank() {
        let samples: Vec<Duration> = (1..=100).map(Duration::from_millis).collect();
        assert_eq!(percentile(&samples, 0.95), Duration::from_millis(95));
        assert_eq!(percentile(&samples[..1], 0.95), Duration::from_millis(1));
    }
}

//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

mod common;

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, RngAlgorithm, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use snipassist_core::bench::{percentile, synthetic_queries, synthetic_tasks, time_queries};
use snipassist_core::completion::build_index;
use snipassist_core::extract::{extract_tasks, Lexicon, MAX_TASKS_PER_TITLE};
use snipassist_core::search::{RetrievalLimits, Retriever};
use snipassist_core::session::{begin_session, find_marker_query, Origin, Region};
use snipassist_core::telemetry::{read_telemetry, tally, TelemetryLog};

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn title_extraction_example() -> Outcome {
    let started = Instant::now();
    let tasks = extract_tasks(
        "Best strategy to add lines of text to a text file",
        &Lexicon::builtin(),
    );
    let elapsed = started.elapsed();
    let texts: Vec<&str> = tasks.iter().map(|t| t.text.as_str()).collect();
    check(texts.contains(&"add lines to text file"), || {
        format!("got {texts:?}")
    })?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{texts:?} in {elapsed:?}"))
}

fn voice_and_gerund_normalization() -> Outcome {
    let started = Instant::now();
    let lexicon = Lexicon::builtin();
    let verbs = [
        ("return", "returning", "returned", "iterator"),
        ("sort", "sorting", "sorted", "list"),
        ("remove", "removing", "removed", "element"),
        ("create", "creating", "created", "thread"),
        ("split", "splitting", "split", "string"),
    ];
    let mut cases = 0;
    for (verb, gerund, participle, noun) in verbs {
        let forms = [
            format!("{gerund} an {noun}"),
            format!("{verb} {noun}"),
            format!("{noun} {participle}"),
            format!("{noun} is {participle}"),
        ];
        let expected = format!("{verb} {noun}");
        for form in &forms {
            cases += 1;
            let texts: Vec<String> = extract_tasks(form, &lexicon)
                .into_iter()
                .map(|t| t.text)
                .collect();
            check(texts == [expected.clone()], || {
                format!("{form:?} gave {texts:?}, want [{expected:?}]")
            })?;
        }
    }
    let elapsed = started.elapsed();
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{cases} forms, 5 verbs, {elapsed:?}"))
}

fn title_strategy() -> impl Strategy<Value = String> {
    let word = prop_oneof![
        3 => prop::sample::select(vec![
            "add", "sort", "read", "write", "convert", "split", "get", "remove", "create", "parse",
            "returning", "sorted", "is", "not", "don't", "and", "or", "to", "of", "in", "from",
            "with", "by", "the", "a", "an", "list", "file", "string", "map", "array", "item",
            "how", "best", "way", "java", "?", ",", "(", ")", "<b>", "</b>", "ArrayList<Integer>",
            "String.format()", "&amp;", "written", "set", "into", "each", "every", "my",
        ]).prop_map(str::to_string),
        1 => "[a-zA-Z]{1,10}",
        1 => "\\PC{1,6}",
    ];
    prop::collection::vec(word, 0..40).prop_map(|w| w.join(" "))
}

fn task_cap() -> Outcome {
    let lexicon = Lexicon::builtin();
    let mut runner = TestRunner::new_with_rng(
        RunnerConfig {
            cases: 1000,
            failure_persistence: None,
            ..RunnerConfig::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &[3; 32]),
    );
    let largest = std::cell::Cell::new(0);
    runner
        .run(&title_strategy(), |title| {
            let tasks = extract_tasks(&title, &lexicon);
            largest.set(largest.get().max(tasks.len()));
            prop_assert!(
                tasks.len() <= MAX_TASKS_PER_TITLE,
                "{} tasks for {:?}",
                tasks.len(),
                title
            );
            for task in &tasks {
                prop_assert!(
                    task.validate().is_ok(),
                    "{:?} from {:?}",
                    task.validate(),
                    title
                );
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "1000 fuzzed titles, largest output {}",
        largest.get()
    ))
}

fn suggestion_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut nonempty = 0;
    for trial in 0..100 {
        let tasks = random_tasks(&mut rng, 1000);
        let index = build_index(tasks.clone()).map_err(|e| e.to_string())?;
        let query = random_query(&mut rng, &tasks);
        let limit = if rng.gen_bool(0.2) {
            usize::MAX
        } else {
            rng.gen_range(1..=40)
        };
        let got = index.suggest(&query, limit);
        let want = suggest_oracle(&tasks, &query, limit);
        check(got == want, || {
            format!("trial {trial}: query {query:?} limit {limit}: got {got:?}, want {want:?}")
        })?;
        nonempty += usize::from(!got.is_empty());
    }
    Ok(format!(
        "100 random corpora, {nonempty} with non-empty results"
    ))
}

fn retrieval_contract() -> Outcome {
    let limits = RetrievalLimits::default();
    let check_caps = |results: &[snipassist_core::search::SnippetResult]| -> Result<(), String> {
        let mut per_thread: BTreeMap<usize, usize> = BTreeMap::new();
        for r in results {
            *per_thread.entry(r.thread_rank).or_default() += 1;
        }
        check(results.len() <= 12, || format!("{} results", results.len()))?;
        check(per_thread.len() <= 4, || {
            format!("{} threads", per_thread.len())
        })?;
        check(per_thread.values().all(|&n| n <= 3), || {
            format!("{per_thread:?}")
        })
    };
    // First-snippet rule: the best answer with code in the top thread that
    // has code.
    let first_rule = |store: &snipassist_core::corpus::CorpusStore,
                      retriever: &Retriever,
                      query: &str,
                      results: &[snipassist_core::search::SnippetResult]|
     -> Result<(), String> {
        let Some(first) = results.first() else {
            return Ok(());
        };
        let threads = retriever
            .search_threads(query, limits.max_threads)
            .map_err(|e| e.to_string())?;
        let best = threads
            .iter()
            .flat_map(|t| store.thread_answers(t.question_id))
            .find(|a| !store.answer_snippets(a.id).is_empty())
            .map(|a| a.id);
        check(best == Some(first.answer_id), || {
            format!("{query:?}: first from {}, want {best:?}", first.answer_id)
        })
    };

    let retriever = fixture_retriever("threads20.xml");
    let store = retriever.store();
    for query in [
        "add lines to text file",
        "convert inputstream to string",
        "split string by whitespace",
        "custom jpanel jframe",
        "read file",
        "string",
        "java",
    ] {
        let got = retriever
            .retrieve_snippets(query)
            .map_err(|e| e.to_string())?;
        let want = retrieve_oracle(store, query, limits);
        check(got == want, || {
            format!("fixture {query:?}: got {got:?}, want {want:?}")
        })?;
        check_caps(&got)?;
        first_rule(store, &retriever, query, &got)?;
    }
    let top = retriever
        .retrieve_snippets("add lines to text file")
        .map_err(|e| e.to_string())?;
    check(top[0].answer_score == 7 && top[0].thread_rank == 1, || {
        format!("{:?}", top[0])
    })?;

    let mut rng = StdRng::seed_from_u64(5);
    let mut total = 0;
    for trial in 0..100 {
        let store = random_store(&mut rng, 50);
        let retriever = Retriever::new(store.clone(), limits);
        let query = random_title_query(&mut rng);
        let got = retriever
            .retrieve_snippets(&query)
            .map_err(|e| e.to_string())?;
        let want = retrieve_oracle(&store, &query, limits);
        check(got == want, || {
            format!("trial {trial} {query:?}: got {got:?}, want {want:?}")
        })?;
        check_caps(&got)?;
        first_rule(&store, &retriever, &query, &got)?;
        total += got.len();
    }
    Ok(format!(
        "20-thread fixture and 100 random corpora ({total} snippets) match the oracle"
    ))
}

fn session_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let words = ["sort", "list", "add", "lines", "to", "file", "日本"];
    for trial in 0..200 {
        let query: Vec<&str> = (0..rng.gen_range(1..=4))
            .map(|_| words[rng.gen_range(0..words.len())])
            .collect();
        let query = query.join(" ");
        let (doc, region, origin) = random_document(&mut rng, &query);
        let source = FixedSource(random_snippets(&mut rng));
        let n = source.0.len();
        let k = rng.gen_range(0..=20);
        let err = |e: snipassist_core::Error| format!("trial {trial}: {e}");

        let (mut session, edit) =
            begin_session(&source, &doc, &query, origin, region, "//").map_err(err)?;
        let mut current = edit.ok_or("no edit")?.apply(&doc).map_err(err)?;
        let mut states = vec![current.clone()];
        for _ in 0..k {
            current = session
                .next_snippet(&current)
                .map_err(err)?
                .apply(&current)
                .map_err(err)?;
            states.push(current.clone());
        }
        check(
            session.cycle_count() == k as u64 && session.index() == k % n,
            || {
                format!(
                    "trial {trial}: cycle_count {} index {}",
                    session.cycle_count(),
                    session.index()
                )
            },
        )?;
        for (i, state) in states.iter().enumerate() {
            check(*state == states[i % n], || {
                format!("trial {trial}: state {i} differs from {}", i % n)
            })?;
        }
        let restored = session
            .restore(&current)
            .map_err(err)?
            .apply(&current)
            .map_err(err)?;
        check(restored == doc, || {
            format!("trial {trial}: {restored:?} != {doc:?}")
        })?;
    }
    Ok("200 random trials restore byte-identical documents; cycles have period |snippets|".into())
}

fn attribution() -> Outcome {
    let retriever = fixture_retriever("threads20.xml");
    let mut insertions = 0;
    for query in [
        "add lines to text file",
        "convert inputstream to string",
        "custom jpanel jframe",
        "complete bubble sort",
        "split string by whitespace",
    ] {
        let doc = format!("class A {{\n    ?{query}?\n}}\n");
        let (q, region) = find_marker_query(&doc).ok_or("marker not found")?;
        let (mut session, edit) =
            begin_session(&retriever, &doc, &q, Origin::QuestionMarks, region, "//")
                .map_err(|e| e.to_string())?;
        let mut current = edit
            .ok_or("no snippets")?
            .apply(&doc)
            .map_err(|e| e.to_string())?;
        for _ in 0..=session.count() {
            let snippet = session.current().ok_or("no current snippet")?;
            let url = format!("{BASE_URL}/a/{}", snippet.answer_id);
            let line = current.lines().nth(1).unwrap_or("");
            check(line == format!("    // source: {url}"), || {
                format!("{query:?}: first line {line:?}")
            })?;
            check(
                retriever.store().answer(snippet.answer_id).is_some(),
                || format!("{url} not in store"),
            )?;
            insertions += 1;
            current = session
                .next_snippet(&current)
                .map_err(|e| e.to_string())?
                .apply(&current)
                .map_err(|e| e.to_string())?;
        }
    }
    let jpanel = retriever
        .retrieve_snippets("custom jpanel jframe")
        .map_err(|e| e.to_string())?;
    check(
        jpanel[0].source_url == "https://stackoverflow.com/a/22621494",
        || jpanel[0].source_url.clone(),
    )?;
    Ok(format!(
        "{insertions} insertions carry `// source: {BASE_URL}/a/<answer_id>`"
    ))
}

fn scale_and_latency() -> Outcome {
    let started = Instant::now();
    let tasks = synthetic_tasks(600_000, 8);
    let build_started = Instant::now();
    let index = build_index(tasks).map_err(|e| e.to_string())?;
    let build = build_started.elapsed();
    check(index.task_count() == 600_000, || {
        format!("task_count {}", index.task_count())
    })?;
    let queries = synthetic_queries(&index, 1000, 9);
    let latencies = time_queries(&index, &queries, 10);
    let p95 = percentile(&latencies, 0.95);
    let total = started.elapsed();
    check(p95 < Duration::from_millis(10), || format!("p95 {p95:?}"))?;
    check(total < Duration::from_secs(300), || {
        format!("bench took {total:?}")
    })?;
    Ok(format!(
        "600000 tasks built in {build:.2?}; p50 {:?}, p95 {p95:?}, max {:?}; total {total:.2?}",
        percentile(&latencies, 0.5),
        latencies.last().copied().unwrap_or_default()
    ))
}

fn telemetry_tabulation() -> Outcome {
    let script = std::fs::read_to_string(fixture("sessions101.tsv")).map_err(|e| e.to_string())?;
    let expected = script
        .lines()
        .find_map(|l| l.strip_prefix("# expected: "))
        .ok_or("script has no expected line")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("telemetry.tsv");
    let log = TelemetryLog::open(&path).map_err(|e| e.to_string())?;
    let retriever = fixture_retriever("threads20.xml");
    let mut expected_cycles = Vec::new();
    for line in script
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
    {
        let f: Vec<&str> = line.split('\t').collect();
        let [origin, query, nexts, helpful] = f[..] else {
            return Err(format!("bad script line {line:?}"));
        };
        let origin: Origin = origin.parse()?;
        let nexts: u64 = nexts
            .parse()
            .map_err(|_| format!("bad count in {line:?}"))?;
        let (doc, region) = match origin {
            Origin::QuestionMarks => {
                let doc = format!("void f() {{\n  ?{query}?\n}}\n");
                let (_, region) = find_marker_query(&doc).ok_or("marker")?;
                (doc, region)
            }
            Origin::Selection => (
                format!("  {query}\n"),
                Region {
                    start: 2,
                    length: query.chars().count(),
                },
            ),
            Origin::ContentAssist => {
                let fragment: String = query.chars().take(5).collect();
                let len = fragment.chars().count();
                (
                    format!("{fragment}\n"),
                    Region {
                        start: 0,
                        length: len,
                    },
                )
            }
        };
        let (mut session, edit) = begin_session(&retriever, &doc, query, origin, region, "//")
            .map_err(|e| e.to_string())?;
        if let Some(edit) = edit {
            let mut current = edit.apply(&doc).map_err(|e| e.to_string())?;
            for _ in 0..nexts {
                current = session
                    .next_snippet(&current)
                    .map_err(|e| e.to_string())?
                    .apply(&current)
                    .map_err(|e| e.to_string())?;
            }
            expected_cycles.push(nexts);
        } else {
            expected_cycles.push(0);
        }
        session
            .rate(helpful == "true", &log)
            .map_err(|e| e.to_string())?;
    }
    drop(log);
    let records = read_telemetry(&path).map_err(|e| e.to_string())?;
    check(records.len() == 101, || {
        format!("{} records", records.len())
    })?;
    let cycles: Vec<u64> = records.iter().map(|r| r.cycle_count).collect();
    check(cycles == expected_cycles, || {
        "cycle counts differ from the script".into()
    })?;
    let t = tally(&records);
    let got = format!("helpful={} unhelpful={}", t.helpful, t.unhelpful);
    check(got == expected, || {
        format!("tally {got}, script says {expected}")
    })?;
    Ok(format!("101 records, {got}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("title extraction example", title_extraction_example),
        ("voice/gerund normalization", voice_and_gerund_normalization),
        ("task cap", task_cap),
        ("suggestion oracle", suggestion_oracle),
        ("retrieval contract", retrieval_contract),
        ("session round-trip", session_round_trip),
        ("attribution", attribution),
        ("scale/latency", scale_and_latency),
        ("telemetry tabulation", telemetry_tabulation),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {message}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

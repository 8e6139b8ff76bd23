use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use snipassist::AppState;
use snipassist_core::completion::{build_index, CompletionIndex};
use snipassist_core::corpus::{CorpusStore, IngestOptions};
use snipassist_core::extract::{extract_corpus, read_tasks_tsv, write_tasks_tsv, Lexicon};
use snipassist_core::search::{RetrievalLimits, Retriever};
use snipassist_core::session::{begin_session, find_marker_query, Origin};
use snipassist_core::telemetry::{read_telemetry, tally};
use snipassist_core::{bench, Config};

/// Natural-language code search over a Q&A posts dump.
///
/// Settings come from the file named by SNIPASSIST_CONFIG (key = value
/// lines); command-line flags override it.
#[derive(Parser)]
#[command(name = "snipassist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a Posts.xml dump into a store directory.
    Ingest {
        dump: PathBuf,
        /// Keep only questions with this tag; `*` keeps all.
        #[arg(long)]
        tag: Option<String>,
        #[arg(long)]
        base_url: Option<String>,
        #[command(flatten)]
        store: StoreArg,
    },
    /// Extract task phrases from question titles as TSV.
    Extract {
        #[command(flatten)]
        store: StoreArg,
        /// One action verb per line; requires --objects.
        #[arg(long, requires = "objects")]
        actions: Option<PathBuf>,
        /// One generic object noun per line; requires --actions.
        #[arg(long, requires = "actions")]
        objects: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the completion index from a task TSV or straight from a store.
    BuildIndex {
        #[arg(long, conflicts_with = "dir")]
        tasks: Option<PathBuf>,
        #[command(flatten)]
        store: StoreArg,
        #[command(flatten)]
        index: IndexArg,
    },
    /// Complete a partial task.
    Suggest {
        partial: String,
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        index: IndexArg,
    },
    /// Retrieve code snippets for a task.
    Snippets {
        task: String,
        /// Print every result instead of the first.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        store: StoreArg,
    },
    /// Replace the first ?query? marker in a file with a snippet.
    Assist {
        file: PathBuf,
        #[arg(long)]
        comment_leader: Option<String>,
        #[command(flatten)]
        store: StoreArg,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[command(flatten)]
        store: StoreArg,
        #[command(flatten)]
        index: IndexArg,
    },
    /// Print artifact counts.
    Stats {
        #[command(flatten)]
        store: StoreArg,
        #[command(flatten)]
        index: IndexArg,
    },
    /// Tabulate a telemetry file into helpful/unhelpful counts.
    Tally {
        /// Telemetry file; the configured path when absent.
        file: Option<PathBuf>,
    },
    /// Time suggest over a synthetic index.
    BenchSuggest {
        #[arg(long, default_value_t = 600_000)]
        tasks: usize,
        #[arg(long, default_value_t = 1_000)]
        queries: usize,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Exit non-zero when p95 latency exceeds this many milliseconds.
        #[arg(long)]
        max_p95_ms: Option<f64>,
    },
}

#[derive(Args)]
struct StoreArg {
    /// Store directory.
    #[arg(long = "store")]
    dir: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArg {
    /// Completion index file.
    #[arg(long = "index")]
    path: Option<PathBuf>,
}

impl StoreArg {
    fn apply(self, config: &mut Config) {
        if let Some(dir) = self.dir {
            config.store_dir = dir;
        }
    }
}

impl IndexArg {
    fn apply(self, config: &mut Config) {
        if let Some(path) = self.path {
            config.index_path = path;
        }
    }
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "snipassist=info".into()),
        )
        .with_writer(io::stderr)
        .init();
    let cli = Cli::parse();
    let config = Config::from_env().context("reading configuration")?;
    run(cli.command, config)
}

fn open_store(config: &Config) -> Result<CorpusStore> {
    CorpusStore::open(&config.store_dir)
        .with_context(|| format!("loading store from {}", config.store_dir.display()))
}

fn open_index(config: &Config) -> Result<CompletionIndex> {
    CompletionIndex::open(&config.index_path)
        .with_context(|| format!("loading index from {}", config.index_path.display()))
}

fn retriever(config: &Config) -> Result<Retriever> {
    Ok(Retriever::new(
        open_store(config)?,
        RetrievalLimits::from_config(config),
    ))
}

fn run(command: Command, mut config: Config) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Ingest {
            dump,
            tag,
            base_url,
            store,
        } => {
            store.apply(&mut config);
            if let Some(tag) = tag {
                config.set("tag_filter", &tag)?;
            }
            if let Some(url) = base_url {
                config.set("base_url", &url)?;
            }
            let options = IngestOptions {
                tag_filter: config.tag_filter.clone(),
                base_url: config.base_url.clone(),
            };
            let (corpus, report) = CorpusStore::ingest(&dump, &options)
                .with_context(|| format!("ingesting {}", dump.display()))?;
            corpus.save(&config.store_dir)?;
            writeln!(out, "{report}")?;
        }
        Command::Extract {
            store,
            actions,
            objects,
            out: path,
        } => {
            store.apply(&mut config);
            let lexicon = match (actions, objects) {
                (Some(a), Some(o)) => Lexicon::load(&a, &o)?,
                _ => Lexicon::builtin(),
            };
            let tasks = extract_corpus(&open_store(&config)?, &lexicon);
            match path {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    let mut w = BufWriter::new(file);
                    write_tasks_tsv(&tasks, &mut w)?;
                    w.flush()?;
                    writeln!(out, "tasks: {}", tasks.len())?;
                }
                None => write_tasks_tsv(&tasks, &mut out)?,
            }
        }
        Command::BuildIndex {
            tasks,
            store,
            index,
        } => {
            store.apply(&mut config);
            index.apply(&mut config);
            let tasks = match tasks {
                Some(path) => {
                    let file =
                        File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    read_tasks_tsv(BufReader::new(file))?
                }
                None => extract_corpus(&open_store(&config)?, &Lexicon::builtin()),
            };
            let built = build_index(tasks)?;
            built.save(&config.index_path)?;
            let stats = built.corpus_stats();
            writeln!(out, "tasks: {}", stats.task_count)?;
            writeln!(out, "titles: {}", stats.title_count)?;
        }
        Command::Suggest {
            partial,
            limit,
            index,
        } => {
            index.apply(&mut config);
            let limit = limit.unwrap_or(config.suggest_limit_default);
            for s in open_index(&config)?.suggest(&partial, limit) {
                writeln!(out, "{}\t{}", s.text, s.source_count)?;
            }
        }
        Command::Snippets { task, all, store } => {
            store.apply(&mut config);
            let results = retriever(&config)?.retrieve_snippets(&task)?;
            if results.is_empty() {
                eprintln!("no snippets found for {task:?}");
            } else if all {
                for r in &results {
                    writeln!(
                        out,
                        "#{} thread_rank={} answer_score={} {}",
                        r.position, r.thread_rank, r.answer_score, r.source_url
                    )?;
                    writeln!(out, "{}\n", r.code)?;
                }
            } else {
                writeln!(
                    out,
                    "{} source: {}",
                    config.comment_leader, results[0].source_url
                )?;
                writeln!(out, "{}", results[0].code)?;
            }
        }
        Command::Assist {
            file,
            comment_leader,
            store,
        } => {
            store.apply(&mut config);
            if let Some(leader) = comment_leader {
                config.comment_leader = leader;
            }
            let document = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let Some((query, region)) = find_marker_query(&document) else {
                bail!("{} has no ?query? marker", file.display());
            };
            let (session, edit) = begin_session(
                &retriever(&config)?,
                &document,
                &query,
                Origin::QuestionMarks,
                region,
                &config.comment_leader,
            )?;
            let Some(edit) = edit else {
                bail!(
                    "no snippets found for {query:?}; {} left unchanged",
                    file.display()
                );
            };
            std::fs::write(&file, edit.apply(&document)?)
                .with_context(|| format!("writing {}", file.display()))?;
            if let Some(current) = session.current() {
                writeln!(out, "{}", current.source_url)?;
            }
        }
        Command::Serve { port, store, index } => {
            store.apply(&mut config);
            index.apply(&mut config);
            if let Some(port) = port {
                config.port = port;
            }
            let state = AppState::load(config)?;
            tokio::runtime::Runtime::new()?.block_on(snipassist::serve(state))?;
        }
        Command::Stats { store, index } => {
            store.apply(&mut config);
            index.apply(&mut config);
            let s = snipassist_core::stats(&open_store(&config)?, &open_index(&config)?);
            writeln!(out, "question_count: {}", s.question_count)?;
            writeln!(out, "answer_count: {}", s.answer_count)?;
            writeln!(out, "snippet_count: {}", s.snippet_count)?;
            writeln!(out, "task_count: {}", s.task_count)?;
        }
        Command::Tally { file } => {
            let path = file.unwrap_or(config.telemetry_path);
            writeln!(out, "{}", tally(&read_telemetry(&path)?))?;
        }
        Command::BenchSuggest {
            tasks,
            queries,
            limit,
            seed,
            max_p95_ms,
        } => {
            let report = bench::run_suggest_bench(tasks, queries, limit, seed)?;
            let ms = |d: Duration| d.as_secs_f64() * 1e3;
            writeln!(out, "tasks: {}", report.task_count)?;
            writeln!(out, "queries: {}", report.query_count)?;
            writeln!(out, "build_ms: {:.1}", ms(report.build_time))?;
            writeln!(out, "p50_ms: {:.3}", ms(report.p50))?;
            writeln!(out, "p95_ms: {:.3}", ms(report.p95))?;
            writeln!(out, "p99_ms: {:.3}", ms(report.p99))?;
            writeln!(out, "max_ms: {:.3}", ms(report.max))?;
            writeln!(out, "total_ms: {:.1}", ms(report.total_time))?;
            if let Some(budget) = max_p95_ms {
                if ms(report.p95) > budget {
                    bail!("p95 {:.3} ms exceeds {budget} ms", ms(report.p95));
                }
            }
        }
    }
    Ok(())
}

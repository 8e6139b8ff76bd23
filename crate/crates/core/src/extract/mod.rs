//! Task phrases mined from question titles: a verb with a direct object
//! and/or a prepositional phrase, such as "add lines to text file".

mod lemma;
mod lexicon;
mod patterns;
mod tagger;

pub use lemma::{lemmatize_verb, Lemmatizer};
pub use lexicon::{Lexicon, DETERMINERS};
pub use tagger::{is_code_like, normalize_title, PosTag, TaggedToken, PREPOSITIONS};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusStore;
use crate::error::{Error, Result};

/// Most task phrases kept per title.
pub const MAX_TASKS_PER_TITLE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPhrase {
    pub verb: String,
    pub object: Option<String>,
    pub prep_phrase: Option<String>,
    /// Canonical rendering: "verb [object] [prep_phrase]".
    pub text: String,
    /// Ids of the questions whose titles yielded this phrase.
    pub sources: BTreeSet<u64>,
}

impl TaskPhrase {
    pub fn new(verb: &str, object: Option<&str>, prep_phrase: Option<&str>) -> Self {
        TaskPhrase {
            verb: verb.to_string(),
            object: object.map(str::to_string),
            prep_phrase: prep_phrase.map(str::to_string),
            text: render(verb, object, prep_phrase),
            sources: BTreeSet::new(),
        }
    }

    pub fn with_sources(mut self, sources: impl IntoIterator<Item = u64>) -> Self {
        self.sources.extend(sources);
        self
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    /// Checks the phrase invariants: lowercase, single-spaced, article-free
    /// text that re-renders from its parts, with an object or a
    /// prepositional phrase.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.object.is_none() && self.prep_phrase.is_none() {
            return Err(format!(
                "{:?} has neither object nor prepositional phrase",
                self.text
            ));
        }
        if self.text != self.text.to_lowercase() {
            return Err(format!("{:?} is not lowercase", self.text));
        }
        let odd_space = |c: char| c.is_whitespace() && c != ' ';
        if self.text.split(' ').any(str::is_empty) || self.text.contains(odd_space) {
            return Err(format!("{:?} is not single-spaced", self.text));
        }
        if self.text.split(' ').any(Lexicon::is_determiner) {
            return Err(format!("{:?} contains an article", self.text));
        }
        let rendered = render(
            &self.verb,
            self.object.as_deref(),
            self.prep_phrase.as_deref(),
        );
        if rendered != self.text {
            return Err(format!("{:?} renders as {rendered:?}", self.text));
        }
        Ok(())
    }
}

impl fmt::Display for TaskPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn render(verb: &str, object: Option<&str>, prep_phrase: Option<&str>) -> String {
    let mut text = verb.to_string();
    for part in [object, prep_phrase].into_iter().flatten() {
        text.push(' ');
        text.push_str(part);
    }
    text
}

/// Extracts up to twelve task phrases from one title, in generation order.
/// The returned phrases carry no sources.
pub fn extract_tasks(title: &str, lexicon: &Lexicon) -> Vec<TaskPhrase> {
    let tokens = normalize_title(title, lexicon);
    let mut seen = HashSet::new();
    let mut tasks = Vec::new();
    for candidate in patterns::candidates(&tokens) {
        if !patterns::passes_filter(&candidate, lexicon) {
            continue;
        }
        let task = TaskPhrase::new(
            &candidate.verb,
            candidate.object.as_ref().map(|o| o.text.as_str()),
            candidate.prep_phrase.as_deref(),
        );
        if seen.insert(task.text.clone()) {
            tasks.push(task);
            if tasks.len() == MAX_TASKS_PER_TITLE {
                break;
            }
        }
    }
    tasks
}

/// Extracts tasks from every question title in the store and merges phrases
/// with identical text. Output is sorted by text.
pub fn extract_corpus(store: &CorpusStore, lexicon: &Lexicon) -> Vec<TaskPhrase> {
    store
        .questions()
        .par_iter()
        .fold(
            BTreeMap::new,
            |mut acc: BTreeMap<String, TaskPhrase>, question| {
                for task in extract_tasks(&question.title, lexicon) {
                    acc.entry(task.text.clone())
                        .or_insert(task)
                        .sources
                        .insert(question.id);
                }
                acc
            },
        )
        .reduce(BTreeMap::new, merge_tasks)
        .into_values()
        .collect()
}

fn merge_tasks(
    mut left: BTreeMap<String, TaskPhrase>,
    right: BTreeMap<String, TaskPhrase>,
) -> BTreeMap<String, TaskPhrase> {
    for (text, task) in right {
        match left.get_mut(&text) {
            Some(existing) => existing.sources.extend(task.sources),
            None => {
                left.insert(text, task);
            }
        }
    }
    left
}

/// Writes tasks as TSV: text, verb, object, prep_phrase, source_count, and
/// comma-separated source ids. Absent parts are empty columns.
pub fn write_tasks_tsv(tasks: &[TaskPhrase], out: &mut impl Write) -> std::io::Result<()> {
    for task in tasks {
        let sources: Vec<String> = task.sources.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            task.text,
            task.verb,
            task.object.as_deref().unwrap_or(""),
            task.prep_phrase.as_deref().unwrap_or(""),
            task.sources.len(),
            sources.join(",")
        )?;
    }
    Ok(())
}

pub fn read_tasks_tsv(input: impl BufRead) -> Result<Vec<TaskPhrase>> {
    let bad = |lineno: usize, message: &str| Error::Parse {
        what: "tasks.tsv",
        message: format!("line {lineno}: {message}"),
    };
    let mut tasks = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| bad(lineno, &e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [text, verb, object, prep, count, sources] = fields[..] else {
            return Err(bad(lineno, "expected 6 tab-separated columns"));
        };
        let task = TaskPhrase::new(verb, non_empty(object), non_empty(prep));
        if task.text != text {
            return Err(bad(
                lineno,
                "text column does not match verb/object/prep_phrase",
            ));
        }
        let sources = sources
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|_| bad(lineno, "bad source id")))
            .collect::<Result<BTreeSet<u64>>>()?;
        if count.parse::<usize>().ok() != Some(sources.len()) {
            return Err(bad(lineno, "source_count does not match source ids"));
        }
        tasks.push(TaskPhrase { sources, ..task });
    }
    Ok(tasks)
}

fn non_empty(s: &str) -> Option<&str> {
    (!s.is_empty()).then_some(s)
}

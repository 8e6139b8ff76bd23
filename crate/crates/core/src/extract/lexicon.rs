use std::collections::HashSet;
use std::path::Path;

use super::lemma::Lemmatizer;
use crate::error::{Error, Result};

const BUILTIN_ACTIONS: &str = include_str!("../../data/actions.txt");
const BUILTIN_OBJECTS: &str = include_str!("../../data/objects.txt");

/// Articles dropped from every task phrase.
pub const DETERMINERS: [&str; 3] = ["a", "an", "the"];

const LEAD_IN_WORDS: &[&str] = &[
    "best",
    "how",
    "way",
    "ways",
    "strategy",
    "approach",
    "fastest",
    "easiest",
    "simplest",
    "quickest",
    "cleanest",
    "efficient",
    "efficiently",
    "proper",
    "properly",
    "correct",
    "correctly",
    "good",
    "better",
    "recommended",
    "preferred",
    "right",
    "elegant",
    "idiomatic",
    "possible",
    "able",
    "want",
    "wants",
    "need",
    "needs",
    "trying",
    "try",
    "tried",
    "going",
    "please",
    "help",
];

/// Languages and platforms. A prepositional phrase naming only one of these
/// ("in java") states context, not part of the task.
const CONTEXT_NOUNS: &[&str] = &[
    "java",
    "android",
    "kotlin",
    "scala",
    "groovy",
    "jdk",
    "jre",
    "jvm",
    "java8",
    "eclipse",
    "intellij",
    "netbeans",
    "maven",
    "gradle",
    "spring",
    "python",
    "javascript",
    "c",
    "c++",
    "c#",
    "windows",
    "linux",
    "mac",
    "macos",
    "ios",
];

/// Word lists that drive tagging and task filtering.
#[derive(Debug, Clone)]
pub struct Lexicon {
    actions: HashSet<String>,
    generic_objects: HashSet<String>,
    lead_in_words: HashSet<String>,
    lemmatizer: Lemmatizer,
}

impl Lexicon {
    /// The bundled starter lists.
    pub fn builtin() -> Self {
        Self::from_lists(BUILTIN_ACTIONS, BUILTIN_OBJECTS).expect("bundled lexicon parses")
    }

    pub fn load(actions: &Path, objects: &Path) -> Result<Self> {
        let read = |path: &Path| std::fs::read_to_string(path).map_err(|e| Error::io(path, e));
        Self::from_lists(&read(actions)?, &read(objects)?)
    }

    pub fn from_lists(actions: &str, objects: &str) -> Result<Self> {
        Ok(Lexicon {
            actions: parse_list(actions, "action list")?,
            generic_objects: parse_list(objects, "object list")?,
            lead_in_words: LEAD_IN_WORDS.iter().map(|w| w.to_string()).collect(),
            lemmatizer: Lemmatizer::builtin(),
        })
    }

    pub fn with_lemmatizer(mut self, lemmatizer: Lemmatizer) -> Self {
        self.lemmatizer = lemmatizer;
        self
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn object_count(&self) -> usize {
        self.generic_objects.len()
    }

    pub fn is_action(&self, lemma: &str) -> bool {
        self.actions.contains(lemma)
    }

    pub fn is_generic_object(&self, noun: &str) -> bool {
        self.generic_objects.contains(noun)
    }

    pub fn is_lead_in(&self, word: &str) -> bool {
        self.lead_in_words.contains(word)
    }

    pub fn is_context_noun(word: &str) -> bool {
        CONTEXT_NOUNS.contains(&word)
    }

    pub fn is_determiner(word: &str) -> bool {
        DETERMINERS.contains(&word)
    }

    pub fn lemmatizer(&self) -> &Lemmatizer {
        &self.lemmatizer
    }

    /// Lemma of a verb form, preferring stems that are known actions.
    pub fn verb_lemma(&self, word: &str) -> String {
        self.lemmatizer.lemma_among(word, &self.actions)
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::builtin()
    }
}

/// One lowercase entry per line; `#` comments and blank lines ignored.
/// Duplicate entries are rejected.
fn parse_list(text: &str, what: &'static str) -> Result<HashSet<String>> {
    let mut entries = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let entry = line.split('#').next().unwrap_or("").trim().to_lowercase();
        if entry.is_empty() {
            continue;
        }
        if entry.split_whitespace().count() != 1 {
            return Err(Error::Parse {
                what,
                message: format!("line {}: expected a single word, got {entry:?}", lineno + 1),
            });
        }
        if !entries.insert(entry.clone()) {
            return Err(Error::Parse {
                what,
                message: format!("line {}: duplicate entry {entry:?}", lineno + 1),
            });
        }
    }
    Ok(entries)
}

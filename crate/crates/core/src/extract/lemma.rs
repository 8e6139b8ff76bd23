//! Verb lemmatization by suffix rules plus an editable exception table.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUILTIN_EXCEPTIONS: &str = include_str!("../../data/lemma_exceptions.txt");

/// Maps inflected verb forms to lemmas. Exceptions are consulted first; the
/// suffix rules cover regular `-ing`, `-ed`, and `-s` forms.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
}

impl Lemmatizer {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_EXCEPTIONS).expect("bundled lemma exceptions parse")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses `form lemma` lines; `#` comments and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut exceptions = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            match (fields.next(), fields.next(), fields.next()) {
                (Some(form), Some(lemma), None) => {
                    exceptions.insert(form.to_lowercase(), lemma.to_lowercase());
                }
                _ => {
                    return Err(Error::Parse {
                        what: "lemma exceptions",
                        message: format!("line {}: expected `form lemma`", lineno + 1),
                    })
                }
            }
        }
        Ok(Lemmatizer { exceptions })
    }

    /// Adds or replaces one exception.
    pub fn insert(&mut self, form: &str, lemma: &str) {
        self.exceptions
            .insert(form.to_lowercase(), lemma.to_lowercase());
    }

    pub fn lemma(&self, word: &str) -> String {
        let word = word.to_lowercase();
        if let Some(lemma) = self.exceptions.get(&word) {
            return lemma.clone();
        }
        rule_lemma(&word)
    }

    /// Like [`Lemmatizer::lemma`], but when the rule result is not a known
    /// verb, any other plausible stem that is known wins.
    pub fn lemma_among(&self, word: &str, known: &HashSet<String>) -> String {
        let word = word.to_lowercase();
        if let Some(lemma) = self.exceptions.get(&word) {
            return lemma.clone();
        }
        let ruled = rule_lemma(&word);
        if known.contains(&ruled) {
            return ruled;
        }
        candidates(&word)
            .into_iter()
            .find(|c| known.contains(c))
            .unwrap_or(ruled)
    }

    /// True for irregular forms whose lemma is spelled the same, such as
    /// "split" or "set".
    pub fn is_same_form_participle(&self, word: &str) -> bool {
        self.exceptions.get(word).is_some_and(|lemma| lemma == word)
    }

    /// True when `word` can be read as a past participle.
    pub fn is_participle(&self, word: &str) -> bool {
        if let Some(lemma) = self.exceptions.get(word) {
            return lemma != word && !word.ends_with("ing") && !word.ends_with('s');
        }
        word.len() >= 4 && word.ends_with("ed") && !word.ends_with("eed")
    }
}

impl Default for Lemmatizer {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Lemmatizes a verb form with the bundled exception table.
pub fn lemmatize_verb(word: &str) -> String {
    static BUILTIN: OnceLock<Lemmatizer> = OnceLock::new();
    BUILTIN.get_or_init(Lemmatizer::builtin).lemma(word)
}

fn rule_lemma(word: &str) -> String {
    let n = word.len();
    if !word.is_ascii() {
        return word.to_string();
    }
    if n >= 5 && word.ends_with("ing") {
        return restore(&word[..n - 3]);
    }
    if n >= 5 && word.ends_with("ied") {
        return format!("{}y", &word[..n - 3]);
    }
    if n >= 4 && word.ends_with("ed") && !word.ends_with("eed") {
        return restore(&word[..n - 2]);
    }
    if n >= 5 && word.ends_with("ies") {
        return format!("{}y", &word[..n - 3]);
    }
    if n >= 5
        && ["sses", "shes", "ches", "xes", "zes"]
            .iter()
            .any(|s| word.ends_with(s))
    {
        return word[..n - 2].to_string();
    }
    if n >= 4 && word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        return word[..n - 1].to_string();
    }
    word.to_string()
}

/// All stems a suffixed form could come from, most literal first.
fn candidates(word: &str) -> Vec<String> {
    let n = word.len();
    let mut out = Vec::new();
    let mut push_stem = |stem: &str| {
        out.push(stem.to_string());
        out.push(format!("{stem}e"));
        let b = stem.as_bytes();
        if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
            out.push(stem[..stem.len() - 1].to_string());
        }
    };
    if !word.is_ascii() {
        return out;
    }
    if n >= 5 && word.ends_with("ing") {
        push_stem(&word[..n - 3]);
    } else if n >= 4 && word.ends_with("ed") {
        push_stem(&word[..n - 2]);
        out.push(word[..n - 1].to_string());
    } else if n >= 3 && word.ends_with('s') {
        out.push(word[..n - 1].to_string());
        if word.ends_with("es") {
            out.push(word[..n - 2].to_string());
        }
    }
    out
}

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn is_consonant(b: u8) -> bool {
    b.is_ascii_alphabetic() && !is_vowel(b) && b != b'y'
}

/// Undoes consonant doubling ("splitt" -> "split") or restores a dropped
/// final "e" ("remov" -> "remove").
fn restore(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && is_consonant(b[n - 1]) && !b"lsfz".contains(&b[n - 1]) {
        return stem[..n - 1].to_string();
    }
    // "cancell" -> "cancel", but "spell" and "shell" stay.
    if n >= 6 && stem.ends_with("ell") {
        return stem[..n - 1].to_string();
    }
    if needs_final_e(b) {
        return format!("{stem}e");
    }
    stem.to_string()
}

fn needs_final_e(b: &[u8]) -> bool {
    let n = b.len();
    if n < 2 {
        return false;
    }
    let last = b[n - 1];
    let prev = b[n - 2];
    let before = |k: usize| if n > k { Some(b[n - 1 - k]) } else { None };
    let consonant_at = |k: usize| before(k).is_some_and(is_consonant);
    let ends = |s: &str| b.ends_with(s.as_bytes());

    match last {
        b'v' | b'u' => true,
        b'z' => prev != b'z',
        b'c' => true,
        b's' => prev != b's',
        b'l' => {
            (is_consonant(prev) && prev != b'l') || (matches!(prev, b'i' | b'u') && consonant_at(2))
        }
        b't' => (matches!(prev, b'a' | b'u') && consonant_at(2)) || ends("let"),
        b'r' => match prev {
            b'i' => !ends("air"),
            b'a' | b'u' => consonant_at(2),
            b'o' => consonant_at(2) && before(2) != Some(b'r') && consonant_at(3),
            _ => false,
        },
        b'd' => matches!(prev, b'i' | b'o' | b'u') && consonant_at(2),
        b'm' => matches!(prev, b'a' | b'i' | b'o' | b'u') && consonant_at(2),
        b'k' => matches!(prev, b'a' | b'o' | b'i') && consonant_at(2),
        b'b' => matches!(prev, b'i' | b'u') && consonant_at(2),
        b'n' => prev == b'i' && consonant_at(2),
        b'p' => prev == b'y' || (prev == b'a' && consonant_at(2)),
        b'g' => {
            matches!(prev, b'r' | b'd')
                || (n > 4 && (ends("ang") || ends("eng")))
                || (n > 4 && is_vowel(prev) && prev != b'i' && consonant_at(2))
        }
        _ => false,
    }
}

//! Title normalization and rule-based part-of-speech tagging.

use std::fmt;

use super::lexicon::{Lexicon, DETERMINERS};
use crate::corpus::decode_entities;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Verb,
    /// `-ing` form read as a verb.
    Gerund,
    /// Past participle, either passive or a noun modifier.
    Participle,
    Preposition,
    /// Infinitive marker "to".
    Infinitive,
    Determiner,
    Auxiliary,
    Negation,
    Conjunction,
    Noun,
    Adverb,
    /// Function and lead-in words that take no part in a task.
    Other,
    Punctuation,
}

impl PosTag {
    pub fn label(self) -> &'static str {
        match self {
            PosTag::Verb => "VERB",
            PosTag::Gerund => "GERUND",
            PosTag::Participle => "PARTICIPLE",
            PosTag::Preposition => "PREP",
            PosTag::Infinitive => "PREP-INF",
            PosTag::Determiner => "DET",
            PosTag::Auxiliary => "AUX",
            PosTag::Negation => "NEG",
            PosTag::Conjunction => "CONJ",
            PosTag::Noun => "NOUN",
            PosTag::Adverb => "ADV",
            PosTag::Other => "OTHER",
            PosTag::Punctuation => "PUNCT",
        }
    }

    /// Tags a prepositional phrase or object may attach to.
    fn is_content(self) -> bool {
        matches!(
            self,
            PosTag::Noun | PosTag::Verb | PosTag::Gerund | PosTag::Participle
        )
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    /// Lowercased surface form.
    pub text: String,
    pub tag: PosTag,
    /// Identifier-like token such as `toString()` or `ArrayList<Integer>`.
    pub code_like: bool,
    /// Verb lemma, set for verbs, gerunds, and participles.
    pub lemma: Option<String>,
}

impl fmt::Display for TaggedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.text, self.tag)
    }
}

pub const PREPOSITIONS: [&str; 11] = [
    "to", "from", "into", "in", "on", "by", "with", "of", "for", "over", "between",
];

/// Demonstratives and possessives, which drop out of phrases like articles.
const DETERMINER_LIKE: &[&str] = &[
    "this", "that", "these", "those", "my", "your", "its", "our", "their", "his", "her",
];

const AUXILIARIES: &[&str] = &["is", "are", "was", "were", "be", "been", "being", "am"];

const NEGATIONS: &[&str] = &[
    "not", "never", "without", "cannot", "dont", "doesnt", "cant",
];

const CONJUNCTIONS: &[&str] = &["and", "or", "but", "then", "&", "vs", "versus", "nor"];

const FUNCTION_WORDS: &[&str] = &[
    // pronouns
    "i", "me", "we", "you", "it", "they", "he", "she", "them", "us", "one", "someone",
    // question words
    "what", "which", "who", "whom", "whose", "why", "when", "where", "whether", "if",
    // modals and do-support
    "can", "could", "should", "would", "will", "shall", "may", "might", "must", "do", "does", "did",
    "have", "has", "had",
    // other prepositions and particles that never start a task phrase
    "at", "as", "via", "through", "after", "before", "until", "while", "within", "inside",
    "outside", "under", "above", "below", "across", "around", "about", "against", "among", "per",
    "since", "upon", "toward", "towards", "than", "like", "instead", "there", "here", "so", "also",
    "just", "only", "even", "still", "really", "very", "too", "again", "such", "any", "some",
    "same",
];

const SUBJECT_PRONOUNS: &[&str] = &["i", "we", "you"];
const MODALS: &[&str] = &[
    "can", "could", "should", "would", "will", "shall", "may", "might", "must", "do", "does", "did",
];

/// `-ing` words that are never verb forms.
const NON_GERUNDS: &[&str] = &[
    "string",
    "strings",
    "thing",
    "something",
    "anything",
    "nothing",
    "everything",
    "spring",
    "during",
    "ring",
    "swing",
    "sibling",
    "ceiling",
    "morning",
    "evening",
    "bring",
    "sting",
    "wing",
    "king",
    "ping",
    "padding",
    "heading",
    "building",
    "setting",
    "settings",
    "warning",
    "binding",
    "mapping",
];

/// HTML tags stripped from titles as markup.
const MARKUP_TAGS: &[&str] = &[
    "b", "i", "em", "strong", "code", "pre", "p", "a", "span", "br", "kbd", "sup", "sub", "s",
    "strike", "del", "tt",
];

const CLAUSE_PUNCTUATION: &[char] = &[',', ';', ':', '?', '!', '(', ')', '[', ']', '{', '}'];
const QUOTES: &[char] = &[
    '"', '\'', '`', '\u{201c}', '\u{201d}', '\u{2018}', '\u{2019}',
];

/// Strips markup, splits a title into tokens, and tags each token.
///
/// Code-like tokens (containing `.`, `()`, `::`, `_`, or camelCase) stay
/// whole and are tagged as nouns. Everything is lowercased.
pub fn normalize_title(title: &str, lexicon: &Lexicon) -> Vec<TaggedToken> {
    let clean = decode_entities(&strip_markup(title));
    let raw = split_raw(&clean);
    tag_tokens(raw, lexicon)
}

/// A token before tagging.
struct RawToken {
    text: String,
    code_like: bool,
    punct: bool,
}

fn strip_markup(title: &str) -> String {
    let mut out = String::with_capacity(title.len());
    let mut rest = title;
    while let Some(lt) = rest.find('<') {
        out.push_str(&rest[..lt]);
        let tail = &rest[lt..];
        let is_markup = tail.find('>').filter(|_| {
            // `ArrayList<Integer>` is a generic, not markup.
            tail.starts_with("</") || !out.chars().last().is_some_and(|c| c.is_alphanumeric())
        });
        match is_markup {
            Some(gt)
                if {
                    let name = tail[1..gt].trim_start_matches('/').trim();
                    let name = name.split_whitespace().next().unwrap_or("");
                    MARKUP_TAGS.iter().any(|t| t.eq_ignore_ascii_case(name))
                } =>
            {
                out.push(' ');
                rest = &tail[gt + 1..];
            }
            _ => {
                out.push('<');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn split_raw(text: &str) -> Vec<RawToken> {
    let mut tokens = Vec::new();
    for piece in text.split_whitespace() {
        let mut core = piece;
        let mut leading = None;
        while let Some(c) = core.chars().next() {
            if CLAUSE_PUNCTUATION.contains(&c) {
                leading.get_or_insert(c);
            } else if !QUOTES.contains(&c) {
                break;
            }
            core = &core[c.len_utf8()..];
        }
        let mut trailing = None;
        while let Some(c) = core.chars().last() {
            if core.ends_with("()") {
                break;
            }
            if CLAUSE_PUNCTUATION.contains(&c) {
                trailing = Some(c);
            } else if !QUOTES.contains(&c) && c != '.' {
                break;
            }
            core = &core[..core.len() - c.len_utf8()];
        }
        if let Some(c) = leading {
            tokens.push(punct(c));
        }
        if ["-", "--", "/", "\u{2013}", "\u{2014}"].contains(&core) {
            tokens.push(punct(core.chars().next().unwrap_or('-')));
        } else if !core.is_empty() {
            tokens.push(RawToken {
                code_like: is_code_like(core),
                text: core.to_lowercase(),
                punct: false,
            });
        }
        if let Some(c) = trailing {
            tokens.push(punct(c));
        }
    }
    tokens
}

fn punct(c: char) -> RawToken {
    RawToken {
        text: c.to_string(),
        code_like: false,
        punct: true,
    }
}

/// Identifier-like surface forms: member access, calls, paths, snake_case,
/// and camelCase or PascalCase with an inner capital. Oddly cased function
/// words (`tHe`, `oF`) are still function words.
pub fn is_code_like(word: &str) -> bool {
    if word.contains('.') || word.contains("()") || word.contains("::") {
        return true;
    }
    let inner = word.trim_matches('_');
    if inner.contains('_') {
        return true;
    }
    let has_lower = word.chars().any(|c| c.is_lowercase());
    let inner_upper = word.chars().skip(1).any(|c| c.is_uppercase());
    has_lower && inner_upper && !is_closed_class(&word.to_lowercase())
}

fn is_closed_class(word: &str) -> bool {
    [
        &DETERMINERS[..],
        &PREPOSITIONS[..],
        DETERMINER_LIKE,
        AUXILIARIES,
        NEGATIONS,
        CONJUNCTIONS,
        FUNCTION_WORDS,
    ]
    .iter()
    .any(|list| list.contains(&word))
}

fn tag_tokens(raw: Vec<RawToken>, lexicon: &Lexicon) -> Vec<TaggedToken> {
    let mut out: Vec<TaggedToken> = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        let token = &raw[i];
        let prev = out.last().map(|t| t.tag);
        let next = raw.get(i + 1);
        let after_next = raw.get(i + 2);
        let word = token.text.as_str();
        let mut lemma = None;

        let tag = if token.punct {
            PosTag::Punctuation
        } else if token.code_like {
            PosTag::Noun
        } else if Lexicon::is_determiner(word) || DETERMINER_LIKE.contains(&word) {
            PosTag::Determiner
        } else if NEGATIONS.contains(&word) || word.ends_with("n't") || word.ends_with("n\u{2019}t")
        {
            PosTag::Negation
        } else if AUXILIARIES.contains(&word) {
            PosTag::Auxiliary
        } else if CONJUNCTIONS.contains(&word) {
            PosTag::Conjunction
        } else if word == "to" {
            if prev.is_some_and(PosTag::is_content) {
                PosTag::Preposition
            } else {
                PosTag::Infinitive
            }
        } else if PREPOSITIONS.contains(&word) {
            PosTag::Preposition
        } else if lexicon.is_lead_in(word) || FUNCTION_WORDS.contains(&word) {
            PosTag::Other
        } else if word.chars().all(|c| c.is_ascii_digit()) {
            PosTag::Noun
        } else {
            let (tag, verb_lemma) = tag_content_word(word, prev, [next, after_next], &out, lexicon);
            lemma = verb_lemma;
            tag
        };
        out.push(TaggedToken {
            text: token.text.clone(),
            tag,
            code_like: token.code_like,
            lemma,
        });
    }
    out
}

/// Tags an open-class word from its form and its left context.
fn tag_content_word(
    word: &str,
    prev: Option<PosTag>,
    [next, after_next]: [Option<&RawToken>; 2],
    left: &[TaggedToken],
    lexicon: &Lexicon,
) -> (PosTag, Option<String>) {
    let lemmatizer = lexicon.lemmatizer();
    // Positions where a verb phrase may begin.
    let clause_start = matches!(
        prev,
        None | Some(
            PosTag::Infinitive
                | PosTag::Negation
                | PosTag::Conjunction
                | PosTag::Other
                | PosTag::Adverb
                | PosTag::Punctuation
        )
    );
    let ends_phrase = |t: Option<&RawToken>| {
        t.is_none_or(|t| {
            t.punct
                || PREPOSITIONS.contains(&t.text.as_str())
                || CONJUNCTIONS.contains(&t.text.as_str())
        })
    };
    let next_ends_phrase = ends_phrase(next);
    // "list sorted", "list is sorted": the word is the passive subject.
    let subject_of_passive = next.is_some_and(|t| {
        !t.punct
            && (AUXILIARIES.contains(&t.text.as_str())
                || ((lemmatizer.is_participle(&t.text)
                    || lemmatizer.is_same_form_participle(&t.text))
                    && ends_phrase(after_next)))
    });

    let base_action = lexicon.is_action(word);
    let inflected_action = !base_action
        && word.len() > 3
        && word.ends_with('s')
        && !word.ends_with("ss")
        && lexicon.is_action(&lexicon.verb_lemma(word));

    if base_action || inflected_action {
        let lemma = if base_action {
            word.to_string()
        } else {
            lexicon.verb_lemma(word)
        };
        if base_action && lemmatizer.is_same_form_participle(word) {
            let passive =
                prev == Some(PosTag::Auxiliary) || (prev == Some(PosTag::Noun) && next_ends_phrase);
            if passive {
                return (PosTag::Participle, Some(lemma));
            }
        }
        if (clause_start && !subject_of_passive) || prev == Some(PosTag::Auxiliary) {
            return (PosTag::Verb, Some(lemma));
        }
        return (PosTag::Noun, None);
    }

    if word.len() >= 5 && word.ends_with("ing") && !NON_GERUNDS.contains(&word) {
        let noun_context = matches!(prev, Some(PosTag::Determiner | PosTag::Noun));
        if !noun_context {
            return (PosTag::Gerund, Some(lexicon.verb_lemma(word)));
        }
        return (PosTag::Noun, None);
    }

    if lemmatizer.is_participle(word) {
        return (PosTag::Participle, Some(lexicon.verb_lemma(word)));
    }

    // Unlisted verbs: "how to frobnicate", "how do I frobnicate".
    let after_subject = prev == Some(PosTag::Other)
        && left.len() >= 2
        && SUBJECT_PRONOUNS.contains(&left[left.len() - 1].text.as_str())
        && MODALS.contains(&left[left.len() - 2].text.as_str());
    if prev == Some(PosTag::Infinitive) || after_subject {
        return (PosTag::Verb, Some(lexicon.verb_lemma(word)));
    }

    if word.len() > 4 && word.ends_with("ly") {
        return (PosTag::Adverb, None);
    }
    (PosTag::Noun, None)
}

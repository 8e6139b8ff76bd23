//! Verb-phrase patterns over a tagged token stream.

use super::lexicon::Lexicon;
use super::tagger::{PosTag, TaggedToken};

/// A task candidate before filtering and deduplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub verb: String,
    pub object: Option<Phrase>,
    pub prep_phrase: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Phrase {
    pub text: String,
    pub head: String,
}

/// Noun phrase spanning `start..end` of a clause.
struct NounPhrase {
    end: usize,
    phrase: Phrase,
}

/// Generates candidates clause by clause, left to right. Verbs inside a
/// negation scope produce nothing.
pub(crate) fn candidates(tokens: &[TaggedToken]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for clause in tokens.split(|t| matches!(t.tag, PosTag::Punctuation | PosTag::Conjunction)) {
        clause_candidates(clause, &mut out);
    }
    out
}

fn clause_candidates(clause: &[TaggedToken], out: &mut Vec<Candidate>) {
    for (i, token) in clause.iter().enumerate() {
        let negated = clause[..i].iter().any(|t| t.tag == PosTag::Negation);
        let Some(lemma) = token.lemma.as_deref() else {
            continue;
        };
        match token.tag {
            PosTag::Verb | PosTag::Gerund => {
                if negated {
                    continue;
                }
                let object = noun_phrase(clause, i + 1);
                let after = object.as_ref().map_or(i + 1, |np| np.end);
                emit(lemma, object.map(|np| np.phrase), clause, after, out);
            }
            PosTag::Participle if !is_modifier(clause, i) => {
                if negated {
                    continue;
                }
                let subject_end = if i > 0 && clause[i - 1].tag == PosTag::Auxiliary {
                    i - 1
                } else {
                    i
                };
                if let Some(subject) = preceding_noun_phrase(clause, subject_end) {
                    emit(lemma, Some(subject), clause, i + 1, out);
                }
            }
            _ => {}
        }
    }
}

/// Object-only, then object plus each single prepositional phrase. Without
/// an object, only the first prepositional phrase: later ones attach to its
/// noun ("iterate over lines of file").
fn emit(
    verb: &str,
    object: Option<Phrase>,
    clause: &[TaggedToken],
    from: usize,
    out: &mut Vec<Candidate>,
) {
    let mut pps = prepositional_phrases(clause, from);
    if object.is_none() {
        pps.truncate(1);
    }
    if object.is_some() {
        out.push(Candidate {
            verb: verb.to_string(),
            object: object.clone(),
            prep_phrase: None,
        });
    }
    for pp in pps {
        out.push(Candidate {
            verb: verb.to_string(),
            object: object.clone(),
            prep_phrase: Some(pp),
        });
    }
}

fn prepositional_phrases(clause: &[TaggedToken], mut at: usize) -> Vec<String> {
    let mut pps = Vec::new();
    while at < clause.len() && clause[at].tag == PosTag::Preposition {
        let Some(np) = noun_phrase(clause, at + 1) else {
            break;
        };
        if !Lexicon::is_context_noun(&np.phrase.text) {
            pps.push(format!("{} {}", clause[at].text, np.phrase.text));
        }
        at = np.end;
    }
    pps
}

/// A participle directly before a noun, with no noun of its own phrase to
/// its left, modifies that noun ("the sorted list", "get selected item").
fn is_modifier(clause: &[TaggedToken], i: usize) -> bool {
    let next_is_noun = clause.get(i + 1).is_some_and(|t| t.tag == PosTag::Noun);
    let prev = i.checked_sub(1).map(|p| clause[p].tag);
    next_is_noun && !matches!(prev, Some(PosTag::Noun | PosTag::Auxiliary))
}

/// Longest noun phrase starting at `start`: determiners, nouns, and
/// modifier participles, ending in at least one noun.
fn noun_phrase(clause: &[TaggedToken], start: usize) -> Option<NounPhrase> {
    let mut words: Vec<&str> = Vec::new();
    let mut end = start;
    let mut last_noun_end = None;
    while end < clause.len() {
        let token = &clause[end];
        match token.tag {
            PosTag::Determiner => {
                if last_noun_end.is_some() {
                    break;
                }
            }
            PosTag::Noun => {
                words.push(&token.text);
                last_noun_end = Some((end + 1, words.len()));
            }
            PosTag::Participle if last_noun_end.is_none() && is_modifier(clause, end) => {
                words.push(&token.text);
            }
            _ => break,
        }
        end += 1;
    }
    let (end, len) = last_noun_end?;
    words.truncate(len);
    Some(NounPhrase {
        end,
        phrase: phrase(&words),
    })
}

/// Noun phrase ending right before `end`, for passive subjects.
fn preceding_noun_phrase(clause: &[TaggedToken], end: usize) -> Option<Phrase> {
    let mut start = end;
    while start > 0 && clause[start - 1].tag == PosTag::Noun {
        start -= 1;
    }
    if start == end {
        return None;
    }
    let words: Vec<&str> = clause[start..end].iter().map(|t| t.text.as_str()).collect();
    Some(phrase(&words))
}

fn phrase(words: &[&str]) -> Phrase {
    Phrase {
        text: words.join(" "),
        head: words.last().copied().unwrap_or_default().to_string(),
    }
}

/// Keeps candidates whose verb is a known action or whose object head is a
/// generic programming object.
pub(crate) fn passes_filter(candidate: &Candidate, lexicon: &Lexicon) -> bool {
    lexicon.is_action(&candidate.verb)
        || candidate
            .object
            .as_ref()
            .is_some_and(|o| lexicon.is_generic_object(&o.head))
}

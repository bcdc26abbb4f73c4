//! Sentence boundaries and tokenisation.
//!
//! Boundaries: every line break, and any run of `.`, `!`, `?` (plus closing
//! quotes or brackets) followed by end of line, or by whitespace and an
//! uppercase letter. A single `.` after a word from the abbreviation list
//! is not a boundary.
//!
//! Tokens: maximal alphanumeric runs, where `'`/`’`/`-` between two
//! alphanumerics and `.`/`,` between two digits stay inside the run. Every
//! other non-whitespace character is a token of its own.

use std::collections::HashSet;

use super::{RawDocument, SentenceRecord};

pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "dr", "mr", "mrs", "ms", "prof", "st", "vs", "etc", "e.g", "i.e", "np", "tzn", "itd", "itp",
    "ok", "wg", "ul", "tj", "jw", "inż", "mgr", "ks", "św",
];

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 7] = ['"', '\'', ')', ']', '»', '”', '’'];

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::new(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl Segmenter {
    /// Abbreviations are matched case-insensitively, without the final dot.
    pub fn new<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Segmenter {
            abbreviations: abbreviations
                .into_iter()
                .map(|a| a.as_ref().trim_end_matches('.').to_lowercase())
                .collect(),
        }
    }

    pub fn segment_document(&self, doc: &RawDocument) -> Vec<SentenceRecord> {
        self.segment_and_tokenize(&doc.body)
    }

    pub fn segment_and_tokenize(&self, body: &str) -> Vec<SentenceRecord> {
        self.split_sentences(body)
            .into_iter()
            .map(SentenceRecord::new)
            .collect()
    }

    pub fn split_sentences(&self, body: &str) -> Vec<String> {
        let mut out = Vec::new();
        for line in body.lines() {
            self.split_line(line, &mut out);
        }
        out
    }

    fn split_line(&self, line: &str, out: &mut Vec<String>) {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let (_, c) = chars[i];
            if !TERMINATORS.contains(&c) {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < chars.len() && TERMINATORS.contains(&chars[i].1) {
                i += 1;
            }
            while i < chars.len() && CLOSERS.contains(&chars[i].1) {
                i += 1;
            }
            let end_byte = chars.get(i).map_or(line.len(), |&(b, _)| b);
            let boundary = if i == chars.len() {
                true
            } else if chars[i].1.is_whitespace() {
                let next = chars[i..].iter().find(|(_, c)| !c.is_whitespace());
                next.is_none_or(|&(_, c)| c.is_uppercase())
            } else {
                false
            };
            let single_dot = i - run_start == 1 && chars[run_start].1 == '.';
            let abbreviation = single_dot && self.is_abbreviation(&line[..chars[run_start].0]);
            if boundary && !abbreviation {
                push_trimmed(&line[start..end_byte], out);
                start = end_byte;
            }
        }
        push_trimmed(&line[start..], out);
    }

    fn is_abbreviation(&self, before: &str) -> bool {
        let word = before
            .rsplit(char::is_whitespace)
            .next()
            .unwrap_or("")
            .trim_start_matches(|c: char| !c.is_alphanumeric());
        !word.is_empty() && self.abbreviations.contains(&word.to_lowercase())
    }
}

fn push_trimmed(s: &str, out: &mut Vec<String>) {
    let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if !s.is_empty() {
        out.push(s);
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
            continue;
        }
        let prev = i.checked_sub(1).map(|p| chars[p]);
        let next = chars.get(i + 1).copied();
        let joins_word = matches!(c, '\'' | '’' | '-')
            && prev.is_some_and(char::is_alphanumeric)
            && next.is_some_and(char::is_alphanumeric);
        let joins_number = matches!(c, '.' | ',')
            && prev.is_some_and(|p| p.is_ascii_digit())
            && next.is_some_and(|n| n.is_ascii_digit());
        if (joins_word || joins_number) && !current.is_empty() {
            current.push(c);
            continue;
        }
        if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

const NO_SPACE_BEFORE: &[&str] = &[".", ",", "!", "?", ";", ":", ")", "]", "}", "%", "»", "”", "…"];
const NO_SPACE_AFTER: &[&str] = &["(", "[", "{", "«", "„", "“"];

/// Joins tokens with single spaces, attaching closing punctuation to the
/// previous token and opening brackets to the next.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = true;
    for token in tokens {
        let t = token.as_ref();
        if !glue_next && !NO_SPACE_BEFORE.contains(&t) {
            out.push(' ');
        }
        out.push_str(t);
        glue_next = NO_SPACE_AFTER.contains(&t);
    }
    out
}

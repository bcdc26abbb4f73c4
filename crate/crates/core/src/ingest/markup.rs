//! Wikitext reduction to segmentable plain text.
//!
//! This is not a wikitext parser. It removes templates (nested), tables,
//! references, comments and HTML tags, unwraps `[[target|label]]` links,
//! and pulls interwiki links `[[xx:Title]]` out of the body.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StrippedText {
    pub body: String,
    pub interwiki: Vec<(String, String)>,
}

pub fn strip_markup(text: &str) -> StrippedText {
    let text = remove_comments(text);
    let text = remove_refs(&text);
    let text = remove_braced(&text);
    let mut interwiki = Vec::new();
    let text = unwrap_links(&text, &mut interwiki);
    let text = remove_tags(&text);
    let body = clean_lines(&text);
    StrippedText { body, interwiki }
}

fn remove_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("<!--") {
        out.push_str(&rest[..start]);
        match rest[start + 4..].find("-->") {
            Some(end) => rest = &rest[start + 4 + end + 3..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

fn remove_refs(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let Some(start) = find_ref_open(rest) else {
            out.push_str(rest);
            return out;
        };
        out.push_str(&rest[..start]);
        let after = &rest[start..];
        let Some(tag_end) = after.find('>') else {
            return out;
        };
        if after[..tag_end].ends_with('/') {
            rest = &after[tag_end + 1..];
            continue;
        }
        let body = &after[tag_end + 1..];
        match find_ci(body, "</ref>") {
            Some(close) => rest = &body[close + "</ref>".len()..],
            None => return out,
        }
    }
}

fn find_ref_open(text: &str) -> Option<usize> {
    let mut from = 0;
    while let Some(pos) = find_ci(&text[from..], "<ref") {
        let at = from + pos;
        match text[at + 4..].chars().next() {
            Some(c) if c == '>' || c == '/' || c.is_whitespace() => return Some(at),
            None => return None,
            _ => from = at + 4,
        }
    }
    None
}

fn find_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.len() > h.len() {
        return None;
    }
    (0..=h.len() - n.len()).find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Brace {
    Template,
    Table,
}

/// Drops `{{...}}` templates and `{|...|}` tables, both arbitrarily nested.
fn remove_braced(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut stack: Vec<Brace> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match (c, next) {
            ('{', Some('{')) => {
                stack.push(Brace::Template);
                i += 2;
                continue;
            }
            ('{', Some('|')) => {
                stack.push(Brace::Table);
                i += 2;
                continue;
            }
            ('}', Some('}')) if stack.last() == Some(&Brace::Template) => {
                stack.pop();
                i += 2;
                continue;
            }
            ('|', Some('}')) if stack.last() == Some(&Brace::Table) => {
                stack.pop();
                i += 2;
                continue;
            }
            _ => {}
        }
        if stack.is_empty() {
            out.push(c);
        }
        i += 1;
    }
    out
}

/// Interwiki prefixes are language codes: `en`, `pl`, `simple`, `zh-min-nan`.
fn is_language_code(prefix: &str) -> bool {
    let mut parts = prefix.split('-');
    let Some(head) = parts.next() else {
        return false;
    };
    let head_ok = (2..=3).contains(&head.len()) && head.bytes().all(|b| b.is_ascii_lowercase())
        || head == "simple";
    head_ok && parts.all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_lowercase()))
}

fn unwrap_links(text: &str, interwiki: &mut Vec<(String, String)>) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '[' && chars.get(i + 1) == Some(&'[') {
            if let Some(end) = matching_link_end(&chars, i) {
                let inner: String = chars[i + 2..end].iter().collect();
                let inner = unwrap_links(&inner, interwiki);
                out.push_str(&render_link(&inner, interwiki));
                i = end + 2;
                continue;
            }
        }
        if chars[i] == '[' {
            if let Some((label, end)) = external_link(&chars, i) {
                out.push_str(&label);
                i = end + 1;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn matching_link_end(chars: &[char], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = open;
    while i + 1 < chars.len() {
        if chars[i] == '[' && chars[i + 1] == '[' {
            depth += 1;
            i += 2;
        } else if chars[i] == ']' && chars[i + 1] == ']' {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
            i += 2;
        } else {
            i += 1;
        }
    }
    None
}

fn external_link(chars: &[char], open: usize) -> Option<(String, usize)> {
    let rest: String = chars[open + 1..chars.len().min(open + 9)].iter().collect();
    if !(rest.starts_with("http://") || rest.starts_with("https://") || rest.starts_with("//")) {
        return None;
    }
    let end = chars[open..].iter().position(|&c| c == ']' || c == '\n')? + open;
    if chars[end] != ']' {
        return None;
    }
    let inner: String = chars[open + 1..end].iter().collect();
    let label = inner.split_once(' ').map(|(_, l)| l.trim().to_string()).unwrap_or_default();
    Some((label, end))
}

fn render_link(inner: &str, interwiki: &mut Vec<(String, String)>) -> String {
    let (target, label) = match inner.split_once('|') {
        Some((t, rest)) => (t, Some(rest.rsplit('|').next().unwrap_or(rest))),
        None => (inner, None),
    };
    let target = target.trim();
    if let Some(inline) = target.strip_prefix(':') {
        // `[[:en:Cat]]` is an inline link, not a language link.
        return label.unwrap_or(inline).trim().to_string();
    }
    if let Some((prefix, title)) = target.split_once(':') {
        if is_language_code(prefix) {
            if !title.trim().is_empty() {
                interwiki.push((prefix.to_string(), title.trim().to_string()));
            }
            return String::new();
        }
        // Category, File, Image and other namespaced links carry no prose.
        return String::new();
    }
    label.unwrap_or(target).trim().to_string()
}

fn remove_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find('<') {
        out.push_str(&rest[..start]);
        let after = &rest[start + 1..];
        let looks_like_tag = after
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '/' || c == '!');
        match (looks_like_tag, after.find('>')) {
            (true, Some(end)) if end < 512 => {
                rest = &after[end + 1..];
            }
            _ => {
                out.push('<');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

fn clean_lines(text: &str) -> String {
    let mut lines = Vec::new();
    for line in text.lines() {
        let mut l = line.trim();
        if l.starts_with('=') && l.ends_with('=') {
            l = l.trim_matches('=').trim();
        }
        l = l.trim_start_matches(['*', '#', ':', ';']).trim_start();
        if l.starts_with("__") && l.ends_with("__") {
            continue;
        }
        let l = l.replace("'''", "").replace("''", "");
        let collapsed = l.split_whitespace().collect::<Vec<_>>().join(" ");
        if collapsed.is_empty() {
            if lines.last().is_some_and(|p: &String| !p.is_empty()) {
                lines.push(String::new());
            }
        } else {
            lines.push(collapsed);
        }
    }
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    lines.join("\n")
}

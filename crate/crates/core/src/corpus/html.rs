//! Tolerant scanning of post bodies. Not an HTML parser: it finds
//! `<pre><code>` regions, strips tags, and decodes entities, and never fails.

/// Returns the contents of every `<pre><code>…</code></pre>` region in
/// document order, with inner tags stripped and entities decoded.
///
/// Inline `<code>` outside a `<pre>` is not a snippet. Regions without a
/// closing `</code>` and `</pre>` are ignored, as are blocks that are empty
/// after trimming, so the returned index of a block is its snippet ordinal.
pub fn extract_code_blocks(body_html: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut cursor = 0;
    while let Some(pre_open) = find_tag(body_html, cursor, "pre") {
        let Some(after_pre) = tag_end(body_html, pre_open) else {
            break;
        };
        let Some(pre_close) = find_ci(body_html, after_pre, "</pre") else {
            // Unclosed <pre>: nothing after it can be a complete region.
            break;
        };
        cursor = tag_end(body_html, pre_close).unwrap_or(body_html.len());

        let inner = &body_html[after_pre..pre_close];
        let trimmed = inner.trim_start();
        if !starts_with_tag(trimmed, "code") {
            continue;
        }
        let code_open = inner.len() - trimmed.len();
        let Some(after_code) = tag_end(inner, code_open) else {
            continue;
        };
        let Some(code_close) = rfind_ci(&inner[after_code..], "</code") else {
            continue;
        };
        let raw = &inner[after_code..after_code + code_close];
        let code = decode_entities(&strip_tags(raw));
        if !code.trim().is_empty() {
            blocks.push(code);
        }
    }
    blocks
}

/// Removes anything that looks like an HTML tag: `<` followed by a letter,
/// `/`, or `!`, up to the next `>`. A bare `<` is kept.
pub fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(lt) = rest.find('<') {
        out.push_str(&rest[..lt]);
        let tail = &rest[lt..];
        let opens_tag = tail[1..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '/' || c == '!');
        match (opens_tag, tail.find('>')) {
            (true, Some(gt)) => rest = &tail[gt + 1..],
            _ => {
                out.push('<');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Decodes named entities commonly found in posts plus numeric references.
/// Unknown entities are left as written.
pub fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail
            .find(';')
            .filter(|&semi| semi <= 10)
            .and_then(|semi| decode_one(&tail[1..semi]).map(|c| (c, semi)));
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &tail[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_one(name: &str) -> Option<char> {
    match name {
        "lt" => Some('<'),
        "gt" => Some('>'),
        "amp" => Some('&'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        "nbsp" => Some('\u{a0}'),
        _ => {
            let digits = name.strip_prefix('#')?;
            let code = match digits.strip_prefix(['x', 'X']) {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => digits.parse().ok()?,
            };
            char::from_u32(code)
        }
    }
}

/// Byte offset of the next `<name` tag (followed by `>`, `/`, or whitespace)
/// at or after `from`, case-insensitively.
fn find_tag(haystack: &str, from: usize, name: &str) -> Option<usize> {
    let mut at = from;
    loop {
        let open = at + haystack[at..].find('<')?;
        if starts_with_tag(&haystack[open..], name) {
            return Some(open);
        }
        at = open + 1;
    }
}

fn starts_with_tag(text: &str, name: &str) -> bool {
    let bytes = text.as_bytes();
    if bytes.first() != Some(&b'<') || bytes.len() < name.len() + 2 {
        return false;
    }
    let candidate = &bytes[1..1 + name.len()];
    candidate.eq_ignore_ascii_case(name.as_bytes())
        && matches!(
            bytes[1 + name.len()],
            b'>' | b'/' | b' ' | b'\t' | b'\n' | b'\r'
        )
}

/// Offset just past the `>` closing the tag that starts at `open`.
fn tag_end(text: &str, open: usize) -> Option<usize> {
    text[open..].find('>').map(|gt| open + gt + 1)
}

fn find_ci(haystack: &str, from: usize, needle: &str) -> Option<usize> {
    let hay = &haystack.as_bytes()[from..];
    let needle = needle.as_bytes();
    hay.windows(needle.len())
        .position(|w| w.eq_ignore_ascii_case(needle))
        .map(|p| from + p)
}

fn rfind_ci(haystack: &str, needle: &str) -> Option<usize> {
    let needle = needle.as_bytes();
    haystack
        .as_bytes()
        .windows(needle.len())
        .rposition(|w| w.eq_ignore_ascii_case(needle))
}

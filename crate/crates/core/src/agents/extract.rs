//! Pulling a JSON document out of free-form model output.

use serde_json::Value;

/// Tries, in order: the whole body, each fenced code block, then the first
/// balanced `{...}`/`[...]` span (closing unterminated strings and brackets
/// and dropping trailing commas when the span is cut off).
pub fn extract_structured(body: &str) -> Result<Value, String> {
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return Err("empty output".into());
    }
    if let Ok(v) = serde_json::from_str::<Value>(trimmed) {
        if v.is_object() || v.is_array() {
            return Ok(v);
        }
    }
    for block in fenced_blocks(body) {
        if let Ok(v) = serde_json::from_str::<Value>(block.trim()) {
            return Ok(v);
        }
        if let Some(v) = balanced(block) {
            return Ok(v);
        }
    }
    balanced(body).ok_or_else(|| {
        let preview: String = trimmed.chars().take(80).collect();
        format!("no JSON document found in output starting `{preview}`")
    })
}

fn fenced_blocks(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = body;
    while let Some(start) = rest.find("```") {
        let after = &rest[start + 3..];
        // skip an info string such as `json`
        let content_start = after.find('\n').map_or(after.len(), |i| i + 1);
        let content = &after[content_start..];
        match content.find("```") {
            Some(end) => {
                out.push(&content[..end]);
                rest = &content[end + 3..];
            }
            None => {
                out.push(content);
                break;
            }
        }
    }
    out
}

/// Parses from the first opening bracket, repairing truncation if needed.
fn balanced(text: &str) -> Option<Value> {
    let mut search = text;
    while let Some(start) = search.find(['{', '[']) {
        let candidate = &search[start..];
        if let Some(v) = scan(candidate) {
            return Some(v);
        }
        search = &search[start + 1..];
    }
    None
}

fn scan(text: &str) -> Option<Value> {
    let mut stack: Vec<char> = Vec::new();
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text.char_indices() {
        if in_string {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => stack.push('}'),
            '[' => stack.push(']'),
            '}' | ']' => {
                if stack.pop() != Some(c) {
                    return None;
                }
                if stack.is_empty() {
                    return serde_json::from_str(&text[..=i]).ok();
                }
            }
            _ => {}
        }
    }
    // cut off: close what is open
    let mut repaired = text.trim_end().to_string();
    if in_string {
        repaired.push('"');
    }
    while repaired.ends_with(',') {
        repaired.pop();
    }
    for closer in stack.iter().rev() {
        repaired.push(*closer);
    }
    serde_json::from_str(&repaired).ok()
}

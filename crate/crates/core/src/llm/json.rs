use serde_json::Value;

use crate::{Error, Result};

/// First balanced JSON object in `text`, tolerating code fences and
/// surrounding prose.
pub fn extract_json(text: &str) -> Result<Value> {
    let body = strip_fences(text);
    for (start, _) in body.match_indices('{') {
        if let Some(end) = balanced_end(&body[start..]) {
            if let Ok(value @ Value::Object(_)) = serde_json::from_str(&body[start..start + end]) {
                return Ok(value);
            }
        }
    }
    Err(Error::format("no JSON object found in provider output", text))
}

/// Contents of the first fenced block, or the whole text when unfenced.
fn strip_fences(text: &str) -> &str {
    let Some(open) = text.find("```") else { return text };
    let after = &text[open + 3..];
    // skip an info string such as `json`
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    match body.find("```") {
        Some(close) => &body[..close],
        None => body,
    }
}

/// Byte length of the object starting at `s[0] == '{'`, if it closes.
fn balanced_end(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, b) in s.bytes().enumerate() {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

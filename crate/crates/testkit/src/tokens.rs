//! Independent tokenizer-boundary oracle: finds a secret value occurring as
//! a token-delimited substring of a line. The alphabet is restated here from
//! the documented rule rather than imported from the crate under test.

pub fn is_token_byte(b: u8) -> bool {
    matches!(b,
        b'A'..=b'Z'
        | b'a'..=b'z'
        | b'0'..=b'9'
        | b'_' | b'-' | b'+' | b'/' | b'=' | b'.'
        | b'$' | b'%' | b'@' | b'!' | b'#' | b'~')
}

/// 1-based columns where `value` occurs in `line` with non-alphabet bytes
/// (or the line edges) on both sides.
pub fn token_delimited_occurrences(line: &str, value: &str) -> Vec<usize> {
    let bytes = line.as_bytes();
    let val = value.as_bytes();
    let mut out = Vec::new();
    if val.is_empty() || val.len() > bytes.len() {
        return out;
    }
    for start in 0..=bytes.len() - val.len() {
        if &bytes[start..start + val.len()] != val {
            continue;
        }
        let left_ok = start == 0 || !is_token_byte(bytes[start - 1]);
        let end = start + val.len();
        let right_ok = end == bytes.len() || !is_token_byte(bytes[end]);
        if left_ok && right_ok {
            out.push(start + 1);
        }
    }
    out
}

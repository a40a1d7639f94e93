//! Redacted detection records shared by both detection paths.

use std::fmt;

/// Fixed mask substituted for matched spans in excerpts.
pub const REDACTION_MASK: &str = "«REDACTED»";

/// Which detection path produced a finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Interruption-tolerant pattern match over file contents.
    Pattern,
    /// Peppered-digest token intersection over a revision's added lines.
    HashToken,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Pattern => "pattern",
            RuleKind::HashToken => "hash_token",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A redacted record that a known secret was observed.
///
/// For pattern findings, `byte_start`/`byte_end` are offsets within the
/// scanned file. Hash-token findings come from a diff and have no file
/// bytes, so there the offsets are within the added line (and
/// `column == byte_start + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub secret_id: String,
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub byte_start: u64,
    pub byte_end: u64,
    pub rule: RuleKind,
    /// Context around the detection with every matched span replaced by
    /// [`REDACTION_MASK`]; never contains a raw secret value.
    pub excerpt: String,
    /// First 8 hex characters of the secret's cache digest, for grouping
    /// findings by secret without identifying it.
    pub correlation: String,
}

impl Finding {
    /// Deterministic report order.
    pub fn sort_key(&self) -> (&str, u64, &str) {
        (&self.path, self.byte_start, &self.secret_id)
    }
}

/// Replaces the byte spans in `spans` (ascending, possibly overlapping) with
/// the redaction mask. Spans are clamped to the text and merged when they
/// touch.
pub fn mask_spans(text: &str, spans: &[(usize, usize)]) -> String {
    if spans.is_empty() {
        return text.to_string();
    }
    let mut merged: Vec<(usize, usize)> = Vec::new();
    let mut sorted = spans.to_vec();
    sorted.sort_unstable();
    for (s, e) in sorted {
        let s = s.min(text.len());
        let e = e.min(text.len()).max(s);
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    let bytes = text.as_bytes();
    let mut out = String::new();
    let mut cursor = 0usize;
    for (s, e) in merged {
        out.push_str(&String::from_utf8_lossy(&bytes[cursor..s]));
        out.push_str(REDACTION_MASK);
        cursor = e;
    }
    out.push_str(&String::from_utf8_lossy(&bytes[cursor..]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_single_span() {
        assert_eq!(
            mask_spans("key = hunter2; end", &[(6, 13)]),
            "key = «REDACTED»; end"
        );
    }

    #[test]
    fn mask_merges_overlapping_spans() {
        assert_eq!(mask_spans("abcdefgh", &[(1, 4), (3, 6)]), "a«REDACTED»gh");
    }

    #[test]
    fn mask_disjoint_spans() {
        assert_eq!(
            mask_spans("aXXbYYc", &[(1, 3), (4, 6)]),
            "a«REDACTED»b«REDACTED»c"
        );
    }

    #[test]
    fn mask_out_of_range_is_clamped() {
        assert_eq!(mask_spans("abc", &[(2, 99)]), "ab«REDACTED»");
    }

    #[test]
    fn no_spans_is_identity() {
        assert_eq!(mask_spans("abc", &[]), "abc");
    }
}

//! Reference implementation of interruption-tolerant matching.
//!
//! This is the naive search over (literal index, text offset, gap
//! whitespace count, gap non-whitespace count), memoized on the position
//! where each gap starts. It trades speed for directness: the match rule is
//! transcribed literally, with no prefilter, no streaming, and no shared
//! code with the production matcher.
//!
//! Rule: the secret's characters appear in order; between consecutive
//! characters sits a gap of interleaved whitespace (at most `max_ws` bytes)
//! and non-whitespace (at most `max_nonws` bytes); no gap before the first
//! or after the last character. A match starting at a given offset is the
//! shortest one. Whitespace is space, tab, CR, LF, VT, FF.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleMatch {
    pub byte_start: usize,
    pub byte_end: usize,
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c)
}

/// The secret split into its characters' byte slices.
fn char_literals(secret: &str) -> Vec<&[u8]> {
    let bytes = secret.as_bytes();
    let mut out = Vec::new();
    let mut indices = secret.char_indices().peekable();
    while let Some((start, _)) = indices.next() {
        let end = indices.peek().map(|&(i, _)| i).unwrap_or(bytes.len());
        out.push(&bytes[start..end]);
    }
    out
}

fn lit_at(text: &[u8], pos: usize, lit: &[u8]) -> bool {
    pos + lit.len() <= text.len() && &text[pos..pos + lit.len()] == lit
}

struct Search<'a> {
    text: &'a [u8],
    lits: Vec<&'a [u8]>,
    max_ws: usize,
    max_nonws: usize,
    // (literal index, gap start) -> minimal end of a match of lits[i..]
    memo: HashMap<(usize, usize), Option<usize>>,
}

impl<'a> Search<'a> {
    /// Minimal end position placing literals `i..` where literal `i` must be
    /// reachable from `gap_start` through an admissible gap.
    fn min_end(&mut self, i: usize, gap_start: usize) -> Option<usize> {
        if let Some(&cached) = self.memo.get(&(i, gap_start)) {
            return cached;
        }
        let lit = self.lits[i];
        let mut best: Option<usize> = None;
        let mut ws = 0usize;
        let mut nonws = 0usize;
        let mut pos = gap_start;
        loop {
            if lit_at(self.text, pos, lit) {
                let after = pos + lit.len();
                let cand = if i + 1 == self.lits.len() {
                    Some(after)
                } else {
                    self.min_end(i + 1, after)
                };
                if let Some(c) = cand {
                    best = Some(best.map_or(c, |b: usize| b.min(c)));
                }
            }
            if pos >= self.text.len() {
                break;
            }
            if is_ws(self.text[pos]) {
                ws += 1;
                if ws > self.max_ws {
                    break;
                }
            } else {
                nonws += 1;
                if nonws > self.max_nonws {
                    break;
                }
            }
            pos += 1;
        }
        self.memo.insert((i, gap_start), best);
        best
    }
}

/// Shortest match of `secret` starting exactly at `start`, or `None`.
pub fn match_at(
    secret: &str,
    text: &[u8],
    start: usize,
    max_ws: usize,
    max_nonws: usize,
) -> Option<OracleMatch> {
    let lits = char_literals(secret);
    if lits.is_empty() || !lit_at(text, start, lits[0]) {
        return None;
    }
    let first_len = lits[0].len();
    let mut search = Search {
        text,
        lits,
        max_ws,
        max_nonws,
        memo: HashMap::new(),
    };
    let end = if search.lits.len() == 1 {
        Some(start + first_len)
    } else {
        search.min_end(1, start + first_len)
    };
    end.map(|byte_end| OracleMatch {
        byte_start: start,
        byte_end,
    })
}

/// All matches of `secret` in `text`: `match_at` evaluated at every offset
/// holding the first character, then matches whose spans intersect an
/// earlier-starting kept match are dropped. The memo table is keyed only on
/// (literal index, gap start), so it is shared across candidate starts.
pub fn find_matches(secret: &str, text: &[u8], max_ws: usize, max_nonws: usize) -> Vec<OracleMatch> {
    let lits = char_literals(secret);
    if lits.is_empty() {
        return Vec::new();
    }
    let first = lits[0];
    let first_len = first.len();
    let single_literal = lits.len() == 1;
    let mut search = Search {
        text,
        lits,
        max_ws,
        max_nonws,
        memo: HashMap::new(),
    };
    let mut all = Vec::new();
    for start in 0..text.len() {
        if lit_at(text, start, first) {
            let end = if single_literal {
                Some(start + first_len)
            } else {
                search.min_end(1, start + first_len)
            };
            if let Some(byte_end) = end {
                all.push(OracleMatch {
                    byte_start: start,
                    byte_end,
                });
            }
        }
    }
    let mut kept: Vec<OracleMatch> = Vec::new();
    let mut max_end = 0usize;
    for m in all {
        if kept.is_empty() || m.byte_start >= max_end {
            max_end = max_end.max(m.byte_end);
            kept.push(m);
        }
    }
    kept
}

/// Union of `find_matches` over several `(id, value)` secrets, sorted by
/// `(byte_start, id)`.
pub fn find_all(
    secrets: &[(String, String)],
    text: &[u8],
    max_ws: usize,
    max_nonws: usize,
) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    for (id, value) in secrets {
        for m in find_matches(value, text, max_ws, max_nonws) {
            out.push((m.byte_start, m.byte_end, id.clone()));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.2.cmp(&b.2)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_occurrence() {
        let m = match_at("abcd", b"abcd", 0, 1000, 5).unwrap();
        assert_eq!((m.byte_start, m.byte_end), (0, 4));
    }

    #[test]
    fn five_filler_ok_six_not() {
        assert!(match_at("ab", b"a12345b", 0, 1000, 5).is_some());
        assert!(match_at("ab", b"a123456b", 0, 1000, 5).is_none());
    }

    #[test]
    fn whitespace_does_not_consume_nonws_budget() {
        assert!(match_at("ab", b"a  123  45  b", 0, 1000, 5).is_some());
    }

    #[test]
    fn shortest_end_wins() {
        let m = match_at("ab", b"ab b", 0, 1000, 5).unwrap();
        assert_eq!(m.byte_end, 2);
    }

    #[test]
    fn overlap_dedup_keeps_earliest() {
        let ms = find_matches("aa", b"aaa", 1000, 5);
        assert_eq!(ms.len(), 1);
        assert_eq!((ms[0].byte_start, ms[0].byte_end), (0, 2));
    }
}

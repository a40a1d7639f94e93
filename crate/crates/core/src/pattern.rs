//! Interruption-tolerant secret matching.
//!
//! A hard-coded secret rarely survives copy-paste intact: it gets wrapped
//! across lines, indented, or split with string concatenation. Each secret
//! is therefore compiled into a pattern that matches its characters in
//! order, allowing a bounded filler gap between consecutive characters:
//! any amount of whitespace (capped at `max_gap_ws` so scan windows stay
//! bounded) interleaved with at most `max_gap_nonws` non-whitespace bytes.
//! There is no gap before the first or after the last character, so every
//! match is anchored on real secret bytes.
//!
//! Matching is byte-exact and case-sensitive. Filler is counted in bytes;
//! whitespace means space, tab, CR, LF, vertical tab, and form feed.

use std::ops::Range;

use thiserror::Error;

use crate::secrets::Secret;

/// Matcher configuration. `max_gap_nonws` is 5 unless explicitly overridden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Secrets shorter than this (in characters) are not compiled into
    /// patterns; with generous gaps a very short secret matches everywhere.
    pub min_secret_length: usize,
    /// Whitespace filler budget per gap, in bytes.
    pub max_gap_ws: usize,
    /// Non-whitespace filler budget per gap, in bytes.
    pub max_gap_nonws: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            min_secret_length: 8,
            max_gap_ws: 1000,
            max_gap_nonws: 5,
        }
    }
}

/// Whitespace for gap purposes.
pub fn is_gap_whitespace(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c)
}

/// A compiled per-secret matcher: the secret's characters as ordered
/// literals plus the gap budgets in force when it was built.
#[derive(Debug, Clone)]
pub struct InterruptionPattern {
    secret_id: String,
    value: String,
    /// Byte range of each character of `value`.
    literals: Vec<Range<usize>>,
    /// First literal's byte length, and the second literal (if any),
    /// denormalized out of `literals` for the candidate-rejection hot path.
    first_len: usize,
    second: Option<Box<[u8]>>,
    max_gap_ws: usize,
    max_gap_nonws: usize,
}

/// A located occurrence. `byte_start` is the first byte of the first
/// literal and `byte_end` is one past the last byte of the last literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub secret_id: String,
    pub byte_start: usize,
    pub byte_end: usize,
    /// Total filler bytes inside the match.
    pub gap_chars_used: usize,
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("secret {id:?} is too short to pattern-match ({len} chars < minimum {min})")]
    TooShort { id: String, len: usize, min: usize },
}

/// Compiles a secret into a pattern. Every character of the value is a
/// literal; there are no wildcard or regex semantics.
pub fn build_pattern(
    secret: &Secret,
    config: &EngineConfig,
) -> Result<InterruptionPattern, PatternError> {
    let len = secret.value_chars();
    if len < config.min_secret_length {
        return Err(PatternError::TooShort {
            id: secret.id.clone(),
            len,
            min: config.min_secret_length,
        });
    }
    let mut literals = Vec::with_capacity(len);
    let bytes = secret.value.len();
    let mut indices = secret.value.char_indices().peekable();
    while let Some((start, _)) = indices.next() {
        let end = indices.peek().map(|&(i, _)| i).unwrap_or(bytes);
        literals.push(start..end);
    }
    let first_len = literals[0].len();
    let second = literals
        .get(1)
        .map(|r| secret.value.as_bytes()[r.clone()].to_vec().into_boxed_slice());
    Ok(InterruptionPattern {
        secret_id: secret.id.clone(),
        value: secret.value.clone(),
        literals,
        first_len,
        second,
        max_gap_ws: config.max_gap_ws,
        max_gap_nonws: config.max_gap_nonws,
    })
}

// Reusable buffers for the frontier search so the hot scan path does not
// allocate per candidate position.
#[derive(Default)]
struct MatchWork {
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl InterruptionPattern {
    pub fn secret_id(&self) -> &str {
        &self.secret_id
    }

    /// The raw secret value. Needed for redaction scrubbing; never emit it.
    pub fn secret_value(&self) -> &str {
        &self.value
    }

    pub fn literal_count(&self) -> usize {
        self.literals.len()
    }

    pub fn max_gap_ws(&self) -> usize {
        self.max_gap_ws
    }

    pub fn max_gap_nonws(&self) -> usize {
        self.max_gap_nonws
    }

    fn literal(&self, i: usize) -> &[u8] {
        &self.value.as_bytes()[self.literals[i].clone()]
    }

    fn first_byte(&self) -> u8 {
        self.value.as_bytes()[0]
    }

    /// Worst-case byte span of a single match: all literals plus a maximal
    /// gap between each pair. Used to size streaming overlap windows.
    pub fn max_span(&self) -> usize {
        let lit_bytes = self.value.len();
        let gaps = self.literals.len().saturating_sub(1);
        lit_bytes + gaps * (self.max_gap_ws + self.max_gap_nonws)
    }

    /// Pushes every position where `lit` can be placed after a gap starting
    /// at `from`. The walk stops as soon as either filler budget is blown,
    /// since budgets only grow with gap length.
    fn admissible_next(&self, text: &[u8], from: usize, lit: &[u8], out: &mut Vec<usize>) {
        let tail = &text[from.min(text.len())..];
        let lit0 = lit[0];
        let mut ws = 0usize;
        let mut nonws = 0usize;
        for (i, &b) in tail.iter().enumerate() {
            if b == lit0 && (lit.len() == 1 || tail[i..].starts_with(lit)) {
                out.push(from + i + lit.len());
            }
            if is_gap_whitespace(b) {
                ws += 1;
                if ws > self.max_gap_ws {
                    return;
                }
            } else {
                nonws += 1;
                if nonws > self.max_gap_nonws {
                    return;
                }
            }
        }
    }

    /// Cheap pre-check: is `lit` reachable at all from `from`? Saves the
    /// frontier bookkeeping for the overwhelmingly common case where the
    /// second literal is nowhere within the first gap's budget.
    fn gap_reaches(&self, text: &[u8], from: usize, lit: &[u8]) -> bool {
        let tail = &text[from.min(text.len())..];
        let mut ws = 0usize;
        let mut nonws = 0usize;
        if let [single] = lit {
            // single-byte literal: the dominant case for ASCII secrets
            for &b in tail {
                if b == *single {
                    return true;
                }
                if is_gap_whitespace(b) {
                    ws += 1;
                    if ws > self.max_gap_ws {
                        return false;
                    }
                } else {
                    nonws += 1;
                    if nonws > self.max_gap_nonws {
                        return false;
                    }
                }
            }
            return false;
        }
        let lit0 = lit[0];
        for (i, &b) in tail.iter().enumerate() {
            if b == lit0 && tail[i..].starts_with(lit) {
                return true;
            }
            if is_gap_whitespace(b) {
                ws += 1;
                if ws > self.max_gap_ws {
                    return false;
                }
            } else {
                nonws += 1;
                if nonws > self.max_gap_nonws {
                    return false;
                }
            }
        }
        false
    }

    fn match_at_impl(&self, text: &[u8], start: usize, work: &mut MatchWork) -> Option<Match> {
        let first = self.literal(0);
        if start >= text.len()
            || start + first.len() > text.len()
            || &text[start..start + first.len()] != first
        {
            return None;
        }
        if let Some(second) = &self.second {
            if !self.gap_reaches(text, start + self.first_len, second) {
                return None;
            }
        }
        work.frontier.clear();
        work.frontier.push(start + first.len());
        for i in 1..self.literals.len() {
            let lit = self.literal(i);
            work.next.clear();
            for idx in 0..work.frontier.len() {
                let p = work.frontier[idx];
                self.admissible_next(text, p, lit, &mut work.next);
            }
            if work.next.is_empty() {
                return None;
            }
            work.next.sort_unstable();
            work.next.dedup();
            std::mem::swap(&mut work.frontier, &mut work.next);
        }
        let end = work.frontier[0];
        Some(Match {
            secret_id: self.secret_id.clone(),
            byte_start: start,
            byte_end: end,
            gap_chars_used: end - start - self.value.len(),
        })
    }

    /// Shortest match starting exactly at `start`, if any. Returns `None`
    /// when `start` is out of range or does not sit on the first literal.
    pub fn match_at(&self, text: &[u8], start: usize) -> Option<Match> {
        let mut work = MatchWork::default();
        self.match_at_impl(text, start, &mut work)
    }

    /// All matches of this pattern, in start order. Matches whose spans
    /// intersect are collapsed to the earliest-starting one, so there is one
    /// result per leaked region.
    pub fn find_matches(&self, text: &[u8]) -> Vec<Match> {
        let mut out = Vec::new();
        let mut work = MatchWork::default();
        let b0 = self.first_byte();
        let mut last_end = 0usize;
        for (pos, &b) in text.iter().enumerate() {
            if b != b0 || pos < last_end {
                continue;
            }
            if let Some(m) = self.match_at_impl(text, pos, &mut work) {
                last_end = m.byte_end;
                out.push(m);
            }
        }
        out
    }
}

/// A match produced by streaming scans, with absolute offsets and a pattern
/// index instead of an owned id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamMatch {
    pub pattern_index: usize,
    pub byte_start: u64,
    pub byte_end: u64,
    pub gap_chars_used: usize,
}

/// Per-stream deduplication state: the absolute end of the last kept match
/// for each pattern. Carrying it across chunks makes chunked scanning
/// byte-for-byte equivalent to a single pass over the whole input.
#[derive(Debug, Clone)]
pub struct StreamState {
    last_end: Vec<u64>,
}

/// A set of patterns indexed by first byte, so scanning text that never
/// lines up with a secret stays near-linear: positions whose byte starts no
/// pattern are skipped with a single table lookup.
pub struct PatternSet {
    patterns: Vec<InterruptionPattern>,
    buckets: Vec<Vec<u32>>,
    max_span: usize,
}

impl PatternSet {
    pub fn new(patterns: Vec<InterruptionPattern>) -> Self {
        let mut buckets = vec![Vec::new(); 256];
        let mut max_span = 0;
        for (i, p) in patterns.iter().enumerate() {
            buckets[p.first_byte() as usize].push(i as u32);
            max_span = max_span.max(p.max_span());
        }
        Self {
            patterns,
            buckets,
            max_span,
        }
    }

    pub fn patterns(&self) -> &[InterruptionPattern] {
        &self.patterns
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Worst-case span of any single match; streaming scans must overlap
    /// consecutive chunks by at least this many bytes.
    pub fn max_span(&self) -> usize {
        self.max_span
    }

    pub fn stream_state(&self) -> StreamState {
        StreamState {
            last_end: vec![0; self.patterns.len()],
        }
    }

    /// Scans one chunk of a larger stream. `base` is the absolute offset of
    /// `data`; the first `new_from` bytes are overlap already scanned as the
    /// tail of the previous chunk, so matches ending inside them were
    /// already reported and are suppressed here.
    pub fn scan_chunk(
        &self,
        state: &mut StreamState,
        base: u64,
        data: &[u8],
        new_from: usize,
        out: &mut Vec<StreamMatch>,
    ) {
        let mut work = MatchWork::default();
        let emit_after = base + new_from as u64;
        for (pos, &b) in data.iter().enumerate() {
            let bucket = &self.buckets[b as usize];
            if bucket.is_empty() {
                continue;
            }
            let abs = base + pos as u64;
            for &pid in bucket {
                let pid = pid as usize;
                if abs < state.last_end[pid] {
                    continue;
                }
                if let Some(m) = self.patterns[pid].match_at_impl(data, pos, &mut work) {
                    let abs_end = base + m.byte_end as u64;
                    state.last_end[pid] = abs_end;
                    if abs_end > emit_after {
                        out.push(StreamMatch {
                            pattern_index: pid,
                            byte_start: abs,
                            byte_end: abs_end,
                            gap_chars_used: m.gap_chars_used,
                        });
                    }
                }
            }
        }
    }

    /// All matches of all patterns over one in-memory text, sorted by
    /// `(byte_start, secret_id)`.
    pub fn find_all(&self, text: &[u8]) -> Vec<Match> {
        let mut state = self.stream_state();
        let mut raw = Vec::new();
        self.scan_chunk(&mut state, 0, text, 0, &mut raw);
        let mut out: Vec<Match> = raw
            .into_iter()
            .map(|m| Match {
                secret_id: self.patterns[m.pattern_index].secret_id.clone(),
                byte_start: m.byte_start as usize,
                byte_end: m.byte_end as usize,
                gap_chars_used: m.gap_chars_used,
            })
            .collect();
        out.sort_by(|a, b| {
            a.byte_start
                .cmp(&b.byte_start)
                .then_with(|| a.secret_id.cmp(&b.secret_id))
        });
        out
    }
}

/// Convenience wrapper over [`PatternSet::find_all`] for a plain slice of
/// patterns.
pub fn find_all(patterns: &[InterruptionPattern], text: &[u8]) -> Vec<Match> {
    PatternSet::new(patterns.to_vec()).find_all(text)
}

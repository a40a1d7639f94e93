//! The hashed-secret cache and the token-intersection detector.
//!
//! The continuous sniffer must not hold raw secrets: a long-lived cache of
//! plaintext credentials is an attack surface of its own. Instead it keeps
//! `SHA-256(pepper ‖ value)` for every known secret. The pepper is a
//! 32-byte deployment value kept in the environment or a file — never next
//! to the cache — so a leaked cache cannot be brute-forced offline against
//! low-entropy secrets.
//!
//! Detection tokenizes each added line, digests every token with the same
//! pepper, and reports an intersection with the cache. This path is
//! token-exact by construction: hashing destroys gap tolerance, so secrets
//! interrupted across tokens (or containing non-token characters such as
//! spaces) are invisible here and remain the pattern path's job.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diff::{numbered_lines, Revision};
use crate::finding::{mask_spans, Finding, RuleKind};
use crate::secrets::SecretStore;

pub const CACHE_ALGORITHM: &str = "sha256-peppered-v1";
pub const PEPPER_ENV: &str = "SECRETSNIFF_PEPPER";

/// Deployment-wide random value mixed into every digest.
#[derive(Clone)]
pub struct Pepper {
    id: String,
    bytes: [u8; 32],
}

// Never expose pepper bytes through Debug.
impl fmt::Debug for Pepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pepper").field("id", &self.id).finish()
    }
}

#[derive(Debug, Error)]
pub enum PepperError {
    #[error("pepper must be exactly 32 bytes, got {got}")]
    BadLength { got: usize },
    #[error("{PEPPER_ENV} must be 64 hex characters")]
    BadHex,
    #[error("cannot read pepper file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Pepper {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        let digest = Sha256::digest(bytes);
        let id = hex::encode(&digest[..4]);
        Self { id, bytes }
    }

    /// Parses the 64-hex-char form used by the environment variable.
    pub fn from_hex(s: &str) -> Result<Self, PepperError> {
        let raw = hex::decode(s.trim()).map_err(|_| PepperError::BadHex)?;
        let bytes: [u8; 32] = raw.try_into().map_err(|_| PepperError::BadHex)?;
        Ok(Self::from_bytes(bytes))
    }

    /// Reads 32 raw bytes from a pepper file.
    pub fn from_file(path: &Path) -> Result<Self, PepperError> {
        let raw = fs::read(path).map_err(|source| PepperError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let bytes: [u8; 32] = raw
            .try_into()
            .map_err(|v: Vec<u8>| PepperError::BadLength { got: v.len() })?;
        Ok(Self::from_bytes(bytes))
    }

    pub fn from_env() -> Result<Option<Self>, PepperError> {
        match std::env::var(PEPPER_ENV) {
            Ok(v) => Ok(Some(Self::from_hex(&v)?)),
            Err(_) => Ok(None),
        }
    }

    /// All-zero pepper used when no deployment pepper is configured (e.g.
    /// correlation digests for a plain tree scan). Not suitable for caches
    /// meant to leave the machine.
    pub fn zero() -> Self {
        Self::from_bytes([0u8; 32])
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// `SHA-256(pepper ‖ data)`.
    pub fn digest(&self, data: &[u8]) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(self.bytes);
        hasher.update(data);
        hasher.finalize().into()
    }

    /// First 8 hex characters of the peppered digest: the correlation tag
    /// attached to findings.
    pub fn correlation(&self, data: &[u8]) -> String {
        hex::encode(&self.digest(data)[..4])
    }
}

/// Persisted set of peppered digests. Contains no raw secret bytes and no
/// pepper bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashedSecretCache {
    pepper_id: String,
    digests: BTreeSet<[u8; 32]>,
    built_at: DateTime<Utc>,
}

/// Per-secret observations surfaced while building a cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheWarning {
    /// Two or more ids share one value and collapse to a single digest.
    DuplicateValue { ids: Vec<String> },
    /// The value contains characters outside the token alphabet and can
    /// never equal a token, so the hash path cannot see it.
    Untokenizable { id: String },
}

impl fmt::Display for CacheWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheWarning::DuplicateValue { ids } => {
                write!(f, "secrets {} share one value; cached as a single digest", ids.join(", "))
            }
            CacheWarning::Untokenizable { id } => write!(
                f,
                "secret {id} contains characters outside the token alphabet; \
                 the hash path cannot detect it (pattern scans still can)"
            ),
        }
    }
}

/// Builds the digest cache for a store. Deterministic apart from `built_at`.
pub fn build_cache(store: &SecretStore, pepper: &Pepper) -> (HashedSecretCache, Vec<CacheWarning>) {
    let mut digests = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut by_value: Vec<(&str, Vec<String>)> = Vec::new();

    for secret in store.secrets() {
        digests.insert(pepper.digest(secret.value.as_bytes()));
        if !secret.value.bytes().all(is_token_byte) {
            warnings.push(CacheWarning::Untokenizable {
                id: secret.id.clone(),
            });
        }
        match by_value.iter_mut().find(|(v, _)| *v == secret.value) {
            Some((_, ids)) => ids.push(secret.id.clone()),
            None => by_value.push((&secret.value, vec![secret.id.clone()])),
        }
    }
    for (_, ids) in by_value {
        if ids.len() > 1 {
            warnings.push(CacheWarning::DuplicateValue { ids });
        }
    }

    let cache = HashedSecretCache {
        pepper_id: pepper.id().to_string(),
        digests,
        built_at: now_secs(),
    };
    (cache, warnings)
}

fn now_secs() -> DateTime<Utc> {
    DateTime::from_timestamp(Utc::now().timestamp(), 0).expect("valid timestamp")
}

impl HashedSecretCache {
    pub fn algorithm(&self) -> &'static str {
        CACHE_ALGORITHM
    }

    pub fn pepper_id(&self) -> &str {
        &self.pepper_id
    }

    pub fn built_at(&self) -> DateTime<Utc> {
        self.built_at
    }

    /// Number of distinct secret values represented.
    pub fn secret_count(&self) -> usize {
        self.digests.len()
    }

    pub fn contains(&self, digest: &[u8; 32]) -> bool {
        self.digests.contains(digest)
    }

    pub fn digests(&self) -> impl Iterator<Item = &[u8; 32]> {
        self.digests.iter()
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cannot access cache file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed cache file {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("cache algorithm {found:?} is not supported (expected {CACHE_ALGORITHM:?})")]
    VersionMismatch { found: String },
    #[error("cache digest {index} is corrupted: {message}")]
    CorruptDigest { index: usize, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheDoc {
    algorithm: String,
    pepper_id: String,
    built_at: String,
    digests: Vec<String>,
}

/// Writes the cache as deterministic JSON: hex digests sorted ascending,
/// seconds-precision timestamp.
pub fn save_cache(cache: &HashedSecretCache, path: &Path) -> Result<(), CacheError> {
    let doc = CacheDoc {
        algorithm: CACHE_ALGORITHM.to_string(),
        pepper_id: cache.pepper_id.clone(),
        built_at: cache.built_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        digests: cache.digests.iter().map(hex::encode).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("cache serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| CacheError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_cache(path: &Path) -> Result<HashedSecretCache, CacheError> {
    let text = fs::read_to_string(path).map_err(|source| CacheError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: CacheDoc = serde_json::from_str(&text).map_err(|e| CacheError::Malformed {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if doc.algorithm != CACHE_ALGORITHM {
        return Err(CacheError::VersionMismatch {
            found: doc.algorithm,
        });
    }
    let built_at = DateTime::parse_from_rfc3339(&doc.built_at)
        .map_err(|e| CacheError::Malformed {
            path: path.display().to_string(),
            message: format!("built_at: {e}"),
        })?
        .with_timezone(&Utc);
    let mut digests = BTreeSet::new();
    for (index, hex_digest) in doc.digests.iter().enumerate() {
        let raw = hex::decode(hex_digest).map_err(|e| CacheError::CorruptDigest {
            index,
            message: e.to_string(),
        })?;
        let digest: [u8; 32] = raw.try_into().map_err(|v: Vec<u8>| CacheError::CorruptDigest {
            index,
            message: format!("expected 32 bytes, got {}", v.len()),
        })?;
        digests.insert(digest);
    }
    Ok(HashedSecretCache {
        pepper_id: doc.pepper_id,
        digests,
        built_at,
    })
}

// --- tokenization ---

/// The token alphabet covers base64, hex, and common API-key character
/// sets. `=` is included (base64 padding) which is why assignments like
/// `key=value` need the sub-token split below.
pub fn is_token_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric()
        || matches!(
            b,
            b'_' | b'-' | b'+' | b'/' | b'=' | b'.' | b'$' | b'%' | b'@' | b'!' | b'#' | b'~'
        )
}

const EDGE_STRIP: &[u8] = b".=-";

/// A token with its 1-based byte column in the originating line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

/// Tokenizes one line. Emits every maximal run of token-alphabet bytes,
/// each run split at `=` (so both `key=value` and its parts are seen), and
/// each of those with leading/trailing `.`, `=`, `-` stripped. Duplicated
/// (text, column) pairs collapse.
pub fn tokenize(line: &str) -> Vec<Token<'_>> {
    let bytes = line.as_bytes();
    let mut out: Vec<(usize, &str)> = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        if !is_token_byte(bytes[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && is_token_byte(bytes[i]) {
            i += 1;
        }
        let run = &line[start..i];
        push_variants(&mut out, run, start);
        // sub-tokens: the run split at '=' characters
        let mut piece_start = start;
        for (off, _) in run.match_indices('=') {
            let piece = &line[piece_start..start + off];
            if !piece.is_empty() {
                push_variants(&mut out, piece, piece_start);
            }
            piece_start = start + off + 1;
        }
        if piece_start > start {
            let piece = &line[piece_start..i];
            if !piece.is_empty() {
                push_variants(&mut out, piece, piece_start);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out.into_iter()
        .map(|(pos, text)| Token {
            text,
            column: pos + 1,
        })
        .collect()
}

/// Pushes `piece` plus its edge-stripped variant.
fn push_variants<'a>(out: &mut Vec<(usize, &'a str)>, piece: &'a str, start: usize) {
    out.push((start, piece));
    let bytes = piece.as_bytes();
    let mut s = 0usize;
    let mut e = bytes.len();
    while s < e && EDGE_STRIP.contains(&bytes[s]) {
        s += 1;
    }
    while e > s && EDGE_STRIP.contains(&bytes[e - 1]) {
        e -= 1;
    }
    if (s, e) != (0, bytes.len()) && s < e {
        out.push((start + s, &piece[s..e]));
    }
}

/// Token occurrences gathered from a revision, the unit set compared
/// against the cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenOccurrence {
    pub text: String,
    pub path: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSet {
    pub tokens: Vec<TokenOccurrence>,
}

/// Tokenizes a revision's added lines (plus context lines if requested).
pub fn tokenize_revision(revision: &Revision, include_context: bool) -> TokenSet {
    let mut tokens = Vec::new();
    for added in numbered_lines(revision, include_context) {
        for tok in tokenize(&added.text) {
            tokens.push(TokenOccurrence {
                text: tok.text.to_string(),
                path: added.path.clone(),
                line: added.line,
                column: tok.column,
            });
        }
    }
    TokenSet { tokens }
}

#[derive(Debug, Clone, Default)]
pub struct DetectConfig {
    pub include_context: bool,
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error(
        "pepper {pepper_id} does not match the cache (built with pepper {cache_pepper_id}); \
         refusing to run — every digest would silently miss"
    )]
    PepperMismatch {
        pepper_id: String,
        cache_pepper_id: String,
    },
}

/// Runs hash-token detection over a revision. Findings carry a digest-based
/// id (`digest:<correlation>`) because the cache deliberately stores no
/// secret ids.
pub fn detect(
    revision: &Revision,
    cache: &HashedSecretCache,
    pepper: &Pepper,
    config: &DetectConfig,
) -> Result<Vec<Finding>, DetectError> {
    if pepper.id() != cache.pepper_id() {
        return Err(DetectError::PepperMismatch {
            pepper_id: pepper.id().to_string(),
            cache_pepper_id: cache.pepper_id().to_string(),
        });
    }

    let mut findings = Vec::new();
    for added in numbered_lines(revision, config.include_context) {
        let mut hits: Vec<(usize, usize, String)> = Vec::new(); // (start0, end0, correlation)
        for tok in tokenize(&added.text) {
            let digest = pepper.digest(tok.text.as_bytes());
            if cache.contains(&digest) {
                let start0 = tok.column - 1;
                hits.push((start0, start0 + tok.text.len(), hex::encode(&digest[..4])));
            }
        }
        if hits.is_empty() {
            continue;
        }
        // one shared excerpt per line with every hit span masked, so no
        // finding's context re-exposes a neighbouring hit
        let spans: Vec<(usize, usize)> = hits.iter().map(|&(s, e, _)| (s, e)).collect();
        let excerpt = clip_excerpt(&mask_spans(&added.text, &spans));
        for (start0, end0, correlation) in hits {
            findings.push(Finding {
                secret_id: format!("digest:{correlation}"),
                path: added.path.clone(),
                line: added.line,
                column: start0 + 1,
                byte_start: start0 as u64,
                byte_end: end0 as u64,
                rule: RuleKind::HashToken,
                excerpt: excerpt.clone(),
                correlation,
            });
        }
    }
    findings.sort_by(|a, b| {
        a.path
            .cmp(&b.path)
            .then_with(|| a.line.cmp(&b.line))
            .then_with(|| a.column.cmp(&b.column))
            .then_with(|| a.secret_id.cmp(&b.secret_id))
    });
    Ok(findings)
}

const EXCERPT_MAX: usize = 200;

/// Truncates an excerpt to a bounded length on a char boundary.
pub(crate) fn clip_excerpt(s: &str) -> String {
    if s.len() <= EXCERPT_MAX {
        return s.to_string();
    }
    let mut cut = EXCERPT_MAX;
    while cut > 0 && !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}…", &s[..cut])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;
    use crate::secrets::{Secret, SecretStore};

    fn store(values: &[(&str, &str)]) -> SecretStore {
        SecretStore::new(
            values
                .iter()
                .map(|(id, v)| Secret {
                    id: id.to_string(),
                    value: v.to_string(),
                    tags: vec![],
                })
                .collect(),
            "test",
        )
        .unwrap()
    }

    fn test_pepper() -> Pepper {
        Pepper::from_bytes([7u8; 32])
    }

    #[test]
    fn pepper_id_is_8_hex() {
        let p = test_pepper();
        assert_eq!(p.id().len(), 8);
        assert!(p.id().bytes().all(|b| b.is_ascii_hexdigit()));
    }

    #[test]
    fn pepper_debug_hides_bytes() {
        let dbg = format!("{:?}", test_pepper());
        assert!(!dbg.contains("7, 7"));
        assert!(dbg.contains("id"));
    }

    #[test]
    fn cache_counts_distinct_values() {
        let s = store(&[("a", "valueone"), ("b", "valuetwo"), ("c", "value333")]);
        let (cache, warnings) = build_cache(&s, &test_pepper());
        assert_eq!(cache.secret_count(), 3);
        assert!(warnings.is_empty());
    }

    #[test]
    fn duplicate_values_collapse_with_warning() {
        let s = store(&[("a", "samevalue"), ("b", "samevalue")]);
        let (cache, warnings) = build_cache(&s, &test_pepper());
        assert_eq!(cache.secret_count(), 1);
        assert!(matches!(
            &warnings[0],
            CacheWarning::DuplicateValue { ids } if ids == &vec!["a".to_string(), "b".to_string()]
        ));
    }

    #[test]
    fn space_containing_secret_warns() {
        let s = store(&[("sp", "has a space")]);
        let (_, warnings) = build_cache(&s, &test_pepper());
        assert!(matches!(
            &warnings[0],
            CacheWarning::Untokenizable { id } if id == "sp"
        ));
    }

    #[test]
    fn tokenize_quoted_assignment() {
        let tokens = tokenize(r#"password = "hunter2token";"#);
        let texts: Vec<&str> = tokens.iter().map(|t| t.text).collect();
        assert!(texts.contains(&"password"));
        assert!(texts.contains(&"hunter2token"));
        let tok = tokens.iter().find(|t| t.text == "hunter2token").unwrap();
        assert_eq!(tok.column, 13);
    }

    #[test]
    fn tokenize_splits_at_equals() {
        let tokens = tokenize("key=AKxZq91abc");
        let texts: Vec<&str> = tokens.iter().map(|t| t.text).collect();
        assert!(texts.contains(&"key=AKxZq91abc"));
        assert!(texts.contains(&"key"));
        assert!(texts.contains(&"AKxZq91abc"));
        let sub = tokens.iter().find(|t| t.text == "AKxZq91abc").unwrap();
        assert_eq!(sub.column, 5);
    }

    #[test]
    fn tokenize_strips_edge_punctuation() {
        let tokens = tokenize("see config.value. here");
        let texts: Vec<&str> = tokens.iter().map(|t| t.text).collect();
        assert!(texts.contains(&"config.value."));
        assert!(texts.contains(&"config.value"));
    }

    #[test]
    fn tokenize_empty_line() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_dedups_variants() {
        // stripping changes nothing here; no duplicate pairs
        let tokens = tokenize("plain");
        assert_eq!(tokens.len(), 1);
    }

    #[test]
    fn detect_reports_cached_token() {
        let s = store(&[("db", "hunter2token")]);
        let pepper = test_pepper();
        let (cache, _) = build_cache(&s, &pepper);
        let rev = parse_unified_diff(
            "--- a/f\n+++ b/f\n@@ -1,1 +1,2 @@\n ctx\n+password = \"hunter2token\"\n",
            "r1",
        )
        .unwrap();
        let findings = detect(&rev, &cache, &pepper, &DetectConfig::default()).unwrap();
        assert_eq!(findings.len(), 1);
        let f = &findings[0];
        assert_eq!(f.rule, RuleKind::HashToken);
        assert_eq!((f.path.as_str(), f.line, f.column), ("f", 2, 13));
        assert!(!f.excerpt.contains("hunter2token"));
        assert_eq!(f.correlation.len(), 8);
        assert_eq!(f.secret_id, format!("digest:{}", f.correlation));
    }

    #[test]
    fn detect_empty_intersection() {
        let s = store(&[("other", "unrelatedvalue")]);
        let pepper = test_pepper();
        let (cache, _) = build_cache(&s, &pepper);
        let rev = parse_unified_diff(
            "--- a/f\n+++ b/f\n@@ -1,0 +1,1 @@\n+password = \"hunter2token\"\n",
            "r1",
        )
        .unwrap();
        let findings = detect(&rev, &cache, &pepper, &DetectConfig::default()).unwrap();
        assert!(findings.is_empty());
    }

    #[test]
    fn detect_misses_concatenation_split() {
        // the hash path is token-exact: a secret split across two lines by
        // concatenation is its documented blind spot
        let s = store(&[("db", "hunter2token")]);
        let pepper = test_pepper();
        let (cache, _) = build_cache(&s, &pepper);
        let rev = parse_unified_diff(
            "--- a/f\n+++ b/f\n@@ -1,0 +1,2 @@\n+x = \"hunter2\" +\n+    \"token\"\n",
            "r1",
        )
        .unwrap();
        let findings = detect(&rev, &cache, &pepper, &DetectConfig::default()).unwrap();
        assert!(findings.is_empty());
    }

    #[test]
    fn detect_refuses_wrong_pepper() {
        let s = store(&[("db", "hunter2token")]);
        let (cache, _) = build_cache(&s, &test_pepper());
        let other = Pepper::from_bytes([9u8; 32]);
        let rev = parse_unified_diff("--- a/f\n+++ b/f\n@@ -1,0 +1,1 @@\n+x\n", "r").unwrap();
        let err = detect(&rev, &cache, &other, &DetectConfig::default()).unwrap_err();
        assert!(matches!(err, DetectError::PepperMismatch { .. }));
    }

    #[test]
    fn detect_masks_every_hit_on_a_line() {
        let s = store(&[("db", "hunter2token")]);
        let pepper = test_pepper();
        let (cache, _) = build_cache(&s, &pepper);
        let rev = parse_unified_diff(
            "--- a/f\n+++ b/f\n@@ -1,0 +1,1 @@\n+a = \"hunter2token\"; b = \"hunter2token\"\n",
            "r1",
        )
        .unwrap();
        let findings = detect(&rev, &cache, &pepper, &DetectConfig::default()).unwrap();
        assert_eq!(findings.len(), 2);
        for f in &findings {
            assert!(!f.excerpt.contains("hunter2token"));
        }
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let s = store(&[("a", "valueone"), ("b", "valuetwo")]);
        let (cache, _) = build_cache(&s, &test_pepper());
        save_cache(&cache, &path).unwrap();
        let loaded = load_cache(&path).unwrap();
        assert_eq!(cache, loaded);
    }

    #[test]
    fn cache_file_contains_no_secret_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let s = store(&[("a", "sup3rs3cretvalue")]);
        let (cache, _) = build_cache(&s, &test_pepper());
        save_cache(&cache, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains("sup3rs3cretvalue"));
    }

    #[test]
    fn load_rejects_unknown_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        fs::write(
            &path,
            r#"{"algorithm":"sha256-peppered-v0","pepper_id":"00000000","built_at":"2024-01-01T00:00:00Z","digests":[]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_cache(&path).unwrap_err(),
            CacheError::VersionMismatch { found } if found == "sha256-peppered-v0"
        ));
    }

    #[test]
    fn load_rejects_short_digest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        // 31 bytes = 62 hex chars
        let short = "ab".repeat(31);
        fs::write(
            &path,
            format!(
                r#"{{"algorithm":"sha256-peppered-v1","pepper_id":"00000000","built_at":"2024-01-01T00:00:00Z","digests":["{short}"]}}"#
            ),
        )
        .unwrap();
        assert!(matches!(
            load_cache(&path).unwrap_err(),
            CacheError::CorruptDigest { index: 0, .. }
        ));
    }

    #[test]
    fn load_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        fs::write(&path, "not json").unwrap();
        assert!(matches!(
            load_cache(&path).unwrap_err(),
            CacheError::Malformed { .. }
        ));
    }

    #[test]
    fn different_peppers_disjoint_digests() {
        let s = store(&[("a", "valueone"), ("b", "valuetwo")]);
        let (c1, _) = build_cache(&s, &Pepper::from_bytes([1u8; 32]));
        let (c2, _) = build_cache(&s, &Pepper::from_bytes([2u8; 32]));
        for d in c1.digests() {
            assert!(!c2.contains(d));
        }
    }
}

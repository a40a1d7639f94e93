//! Whole-tree scanning.
//!
//! Walks a directory, streams every candidate file through the pattern set
//! in bounded-memory chunks, and assembles a deterministic report. Chunks
//! overlap by the worst-case match span, and per-pattern dedup state is
//! carried across chunk boundaries, so chunked output is identical to a
//! single pass over the whole file.
//!
//! Line/column numbers and excerpts are resolved lazily with an extra pass
//! over the file, paid only when a file actually has findings.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use globset::{Glob, GlobSet, GlobSetBuilder};
use thiserror::Error;
use walkdir::WalkDir;

use crate::finding::{mask_spans, Finding, RuleKind};
use crate::hashcache::{clip_excerpt, Pepper};
use crate::pattern::{build_pattern, EngineConfig, PatternSet, StreamMatch};
use crate::secrets::{filter_by_min_length, SecretStore};

/// Bytes inspected for the NUL-byte binary heuristic.
const BINARY_PROBE_LEN: usize = 8192;
/// Context captured around a match for the excerpt.
const EXCERPT_CONTEXT: usize = 120;

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub engine: EngineConfig,
    /// Glob patterns (relative to the scan root) to exclude.
    pub ignore_globs: Vec<String>,
    /// Directory names never descended into.
    pub ignore_dirs: Vec<String>,
    /// Streaming chunk size; raised automatically to the overlap window when
    /// patterns could span more.
    pub chunk_size: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            ignore_globs: Vec::new(),
            ignore_dirs: vec![".git".into(), ".hg".into(), ".svn".into()],
            chunk_size: 4 * 1024 * 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub path: String,
    pub reason: String,
}

#[derive(Debug)]
pub struct ScanReport {
    pub root: PathBuf,
    pub findings: Vec<Finding>,
    pub files_scanned: usize,
    pub files_skipped: Vec<SkippedFile>,
    pub bytes_scanned: u64,
    pub duration: Duration,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("cannot read scan root {path}: {message}")]
    RootUnreadable { path: String, message: String },
    #[error(
        "none of the {total} secrets is usable for pattern matching \
         (all shorter than {min} characters); check min_secret_length"
    )]
    NoUsablePatterns { total: usize, min: usize },
    #[error("invalid ignore glob {glob:?}: {message}")]
    BadIgnoreGlob { glob: String, message: String },
}

fn build_globset(globs: &[String]) -> Result<GlobSet, ScanError> {
    let mut builder = GlobSetBuilder::new();
    for g in globs {
        let glob = Glob::new(g).map_err(|e| ScanError::BadIgnoreGlob {
            glob: g.clone(),
            message: e.to_string(),
        })?;
        builder.add(glob);
    }
    builder.build().map_err(|e| ScanError::BadIgnoreGlob {
        glob: String::new(),
        message: e.to_string(),
    })
}

/// Walks `root` and returns candidate files in deterministic order plus the
/// skip records for entries that were excluded for cause (symlinks,
/// unreadable entries). Configured ignores are silent exclusions.
pub fn walk_tree(
    root: &Path,
    config: &ScanConfig,
) -> Result<(Vec<PathBuf>, Vec<SkippedFile>), ScanError> {
    if !root.is_dir() {
        return Err(ScanError::RootUnreadable {
            path: root.display().to_string(),
            message: "not a readable directory".into(),
        });
    }
    let ignore = build_globset(&config.ignore_globs)?;
    let mut files = Vec::new();
    let mut skipped = Vec::new();

    let walker = WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|entry| {
            if entry.depth() == 0 {
                return true;
            }
            let name = entry.file_name().to_string_lossy();
            if entry.file_type().is_dir() && config.ignore_dirs.iter().any(|d| d == name.as_ref()) {
                return false;
            }
            true
        });

    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| root.display().to_string());
                skipped.push(SkippedFile {
                    path: rel_or_self(&path, root),
                    reason: format!("unreadable: {e}"),
                });
                continue;
            }
        };
        if entry.file_type().is_symlink() {
            skipped.push(SkippedFile {
                path: rel_display(entry.path(), root),
                reason: "symlink".into(),
            });
            continue;
        }
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_path_buf();
        if ignore.is_match(&rel) {
            continue;
        }
        files.push(entry.into_path());
    }
    Ok((files, skipped))
}

fn rel_display(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .display()
        .to_string()
}

fn rel_or_self(path: &str, root: &Path) -> String {
    Path::new(path)
        .strip_prefix(root)
        .map(|p| p.display().to_string())
        .unwrap_or_else(|_| path.to_string())
}

/// Compiled inputs shared by every file scan: the pattern set, per-pattern
/// correlation tags, and the raw values used to scrub excerpts.
pub struct ScanContext {
    set: PatternSet,
    correlations: Vec<String>,
    scrub_values: Vec<String>,
    chunk_size: usize,
}

impl ScanContext {
    /// Builds patterns from the store (applying the minimum-length filter)
    /// and precomputes correlation tags with `pepper` (the all-zero pepper
    /// when none is deployed).
    pub fn new(
        store: &SecretStore,
        config: &ScanConfig,
        pepper: Option<&Pepper>,
    ) -> Result<Self, ScanError> {
        let (kept, _excluded) = filter_by_min_length(store, config.engine.min_secret_length);
        if !store.is_empty() && kept.is_empty() {
            return Err(ScanError::NoUsablePatterns {
                total: store.len(),
                min: config.engine.min_secret_length,
            });
        }
        let zero = Pepper::zero();
        let pepper = pepper.unwrap_or(&zero);
        let mut patterns = Vec::with_capacity(kept.len());
        let mut correlations = Vec::with_capacity(kept.len());
        for secret in kept.secrets() {
            // cannot fail: the filter applied the same length bound
            let pattern = build_pattern(secret, &config.engine).expect("filtered by length");
            correlations.push(pepper.correlation(secret.value.as_bytes()));
            patterns.push(pattern);
        }
        let mut scrub_values: Vec<String> =
            store.secrets().iter().map(|s| s.value.clone()).collect();
        // longest first so nested values scrub correctly
        scrub_values.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(Self {
            set: PatternSet::new(patterns),
            correlations,
            scrub_values,
            chunk_size: config.chunk_size,
        })
    }

    pub fn pattern_count(&self) -> usize {
        self.set.patterns().len()
    }

    /// Replaces any raw secret value occurring in `text` with the mask.
    pub fn scrub(&self, text: &str) -> String {
        let mut out = text.to_string();
        for value in &self.scrub_values {
            if out.contains(value.as_str()) {
                out = out.replace(value.as_str(), crate::finding::REDACTION_MASK);
            }
        }
        out
    }

    /// Pattern-scans one in-memory buffer, reporting findings under
    /// `path_label`. Used by embedders that hold content themselves.
    pub fn scan_bytes(&self, data: &[u8], path_label: &str) -> Vec<Finding> {
        let mut raw: Vec<StreamMatch> = Vec::new();
        let mut state = self.set.stream_state();
        self.set.scan_chunk(&mut state, 0, data, 0, &mut raw);
        raw.sort_by_key(|m| (m.byte_start, m.byte_end));

        let mut findings = Vec::with_capacity(raw.len());
        for m in &raw {
            let start = m.byte_start as usize;
            let end = m.byte_end as usize;
            let line = 1 + data[..start].iter().filter(|&&b| b == b'\n').count();
            let line_start = data[..start]
                .iter()
                .rposition(|&b| b == b'\n')
                .map(|p| p + 1)
                .unwrap_or(0);
            let column = start - line_start + 1;

            let win_lo = start.saturating_sub(EXCERPT_CONTEXT).max(line_start);
            let win_hi = (end + EXCERPT_CONTEXT).min(data.len());
            let win_hi = data[end..win_hi]
                .iter()
                .position(|&b| b == b'\n')
                .map(|p| end + p)
                .unwrap_or(win_hi);
            let window = String::from_utf8_lossy(&data[win_lo..win_hi]).into_owned();
            let spans: Vec<(usize, usize)> = raw
                .iter()
                .filter(|o| o.byte_end as usize > win_lo && (o.byte_start as usize) < win_hi)
                .map(|o| {
                    (
                        (o.byte_start as usize).saturating_sub(win_lo),
                        (o.byte_end as usize).saturating_sub(win_lo).min(window.len()),
                    )
                })
                .collect();
            let excerpt = clip_excerpt(&self.scrub(&mask_spans(&window, &spans)));

            findings.push(Finding {
                secret_id: self.set.patterns()[m.pattern_index].secret_id().to_string(),
                path: path_label.to_string(),
                line,
                column,
                byte_start: m.byte_start,
                byte_end: m.byte_end,
                rule: RuleKind::Pattern,
                excerpt,
                correlation: self.correlations[m.pattern_index].clone(),
            });
        }
        findings.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        findings
    }
}

/// Scans one file. Returns the findings and the bytes read, or the reason
/// the file was skipped (binary content, read failure).
pub fn scan_file(
    path: &Path,
    rel_path: &str,
    ctx: &ScanContext,
) -> Result<(Vec<Finding>, u64), String> {
    let mut buf = Vec::new();
    scan_file_with_buf(path, rel_path, ctx, &mut buf)
}

/// As [`scan_file`], reusing `buf` as the chunk buffer so a tree scan does
/// not re-fault a fresh allocation per file.
fn scan_file_with_buf(
    path: &Path,
    rel_path: &str,
    ctx: &ScanContext,
    buf: &mut Vec<u8>,
) -> Result<(Vec<Finding>, u64), String> {
    let mut file = File::open(path).map_err(|e| format!("unreadable: {e}"))?;

    let overlap = ctx.set.max_span();
    let chunk = ctx.chunk_size.max(overlap).max(BINARY_PROBE_LEN);
    if buf.len() < overlap + chunk {
        buf.resize(overlap + chunk, 0);
    }
    let mut raw: Vec<StreamMatch> = Vec::new();
    let mut state = ctx.set.stream_state();

    let mut base = 0u64; // absolute offset of buf[0]
    let mut prefix = 0usize; // bytes at the front already scanned last round
    let mut nul_budget = BINARY_PROBE_LEN;
    let mut total_read = 0u64;

    loop {
        let mut filled = prefix;
        while filled < prefix + chunk {
            let n = file
                .read(&mut buf[filled..prefix + chunk])
                .map_err(|e| format!("read error: {e}"))?;
            if n == 0 {
                break;
            }
            filled += n;
        }
        let fresh = filled - prefix;
        total_read += fresh as u64;
        if fresh == 0 {
            break;
        }

        if nul_budget > 0 {
            let probe = &buf[prefix..prefix + fresh.min(nul_budget)];
            if probe.contains(&0) {
                return Err("binary".into());
            }
            nul_budget -= probe.len();
        }

        ctx.set
            .scan_chunk(&mut state, base, &buf[..filled], prefix, &mut raw);

        if fresh < chunk {
            break; // EOF
        }
        let keep = overlap.min(filled);
        buf.copy_within(filled - keep..filled, 0);
        base += (filled - keep) as u64;
        prefix = keep;
    }

    if raw.is_empty() {
        return Ok((Vec::new(), total_read));
    }
    raw.sort_by_key(|m| (m.byte_start, m.byte_end));
    let findings = resolve_findings(path, rel_path, &raw, ctx, total_read)
        .map_err(|e| format!("read error while resolving findings: {e}"))?;
    Ok((findings, total_read))
}

/// Second pass over a file with matches: counts newlines up to each match
/// for line/column, then captures a bounded window around each span for the
/// redacted excerpt.
fn resolve_findings(
    path: &Path,
    rel_path: &str,
    raw: &[StreamMatch],
    ctx: &ScanContext,
    file_len: u64,
) -> std::io::Result<Vec<Finding>> {
    let mut file = File::open(path)?;

    // pass: line number and line-start offset at each match start
    let mut positions = Vec::with_capacity(raw.len()); // (line, column)
    {
        let mut reader_buf = vec![0u8; 64 * 1024];
        let mut offset = 0u64;
        let mut line = 1usize;
        let mut line_start = 0u64;
        let mut next = 0usize;
        'outer: loop {
            let n = file.read(&mut reader_buf)?;
            if n == 0 {
                break;
            }
            for (i, &b) in reader_buf[..n].iter().enumerate() {
                let abs = offset + i as u64;
                while next < raw.len() && raw[next].byte_start == abs {
                    positions.push((line, (abs - line_start + 1) as usize));
                    next += 1;
                }
                if next == raw.len() {
                    break 'outer;
                }
                if b == b'\n' {
                    line += 1;
                    line_start = abs + 1;
                }
            }
            offset += n as u64;
        }
        // matches at EOF boundary cannot exist (spans end on literals), but
        // keep the lists aligned if anything was left unresolved
        while positions.len() < raw.len() {
            positions.push((0, 0));
        }
    }

    let mut findings = Vec::with_capacity(raw.len());
    for (m, &(line, column)) in raw.iter().zip(&positions) {
        let capture_start = m.byte_start.saturating_sub(EXCERPT_CONTEXT as u64);
        let capture_end = (m.byte_end + EXCERPT_CONTEXT as u64).min(file_len);
        let mut window = vec![0u8; (capture_end - capture_start) as usize];
        file.seek(SeekFrom::Start(capture_start))?;
        file.read_exact(&mut window)?;

        // trim to the lines containing the span
        let span_lo = (m.byte_start - capture_start) as usize;
        let span_hi = (m.byte_end - capture_start) as usize;
        let begin = window[..span_lo]
            .iter()
            .rposition(|&b| b == b'\n')
            .map(|p| p + 1)
            .unwrap_or(0);
        let end = window[span_hi..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| span_hi + p)
            .unwrap_or(window.len());
        let window_abs = capture_start + begin as u64;
        let trimmed = String::from_utf8_lossy(&window[begin..end]).into_owned();

        // mask every match span that intersects the excerpt, not just this
        // one, so neighbouring detections are not re-exposed
        let spans: Vec<(usize, usize)> = raw
            .iter()
            .filter(|other| other.byte_end > window_abs && other.byte_start < capture_start + end as u64)
            .map(|other| {
                let s = other.byte_start.saturating_sub(window_abs) as usize;
                let e = (other.byte_end.saturating_sub(window_abs) as usize).min(trimmed.len());
                (s, e)
            })
            .collect();
        let excerpt = clip_excerpt(&ctx.scrub(&mask_spans(&trimmed, &spans)));

        findings.push(Finding {
            secret_id: ctx.set.patterns()[m.pattern_index].secret_id().to_string(),
            path: rel_path.to_string(),
            line,
            column,
            byte_start: m.byte_start,
            byte_end: m.byte_end,
            rule: RuleKind::Pattern,
            excerpt,
            correlation: ctx.correlations[m.pattern_index].clone(),
        });
    }
    Ok(findings)
}

/// Runs the pattern engine over a revision's added lines (the bridge used
/// by `check-diff --also-pattern`): catches gap-interrupted occurrences the
/// token-exact hash path cannot see, at the cost of needing raw secrets.
/// Offsets are line-relative, as for hash-token findings.
pub fn scan_added_lines(
    revision: &crate::diff::Revision,
    ctx: &ScanContext,
    include_context: bool,
) -> Vec<Finding> {
    let mut findings = Vec::new();
    for added in crate::diff::numbered_lines(revision, include_context) {
        let mut raw: Vec<StreamMatch> = Vec::new();
        let mut state = ctx.set.stream_state();
        ctx.set.scan_chunk(&mut state, 0, added.text.as_bytes(), 0, &mut raw);
        if raw.is_empty() {
            continue;
        }
        raw.sort_by_key(|m| (m.byte_start, m.pattern_index));
        let spans: Vec<(usize, usize)> = raw
            .iter()
            .map(|m| (m.byte_start as usize, m.byte_end as usize))
            .collect();
        let excerpt = clip_excerpt(&ctx.scrub(&mask_spans(&added.text, &spans)));
        for m in raw {
            findings.push(Finding {
                secret_id: ctx.set.patterns()[m.pattern_index].secret_id().to_string(),
                path: added.path.clone(),
                line: added.line,
                column: m.byte_start as usize + 1,
                byte_start: m.byte_start,
                byte_end: m.byte_end,
                rule: RuleKind::Pattern,
                excerpt: excerpt.clone(),
                correlation: ctx.correlations[m.pattern_index].clone(),
            });
        }
    }
    findings.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.line.cmp(&b.line)));
    findings
}

/// Scans the whole tree under `root` with patterns built from `store`.
/// The report is deterministic: files are visited in sorted order and
/// findings are sorted by `(path, byte_start, secret_id)`.
pub fn scan_tree(
    root: &Path,
    store: &SecretStore,
    config: &ScanConfig,
    pepper: Option<&Pepper>,
) -> Result<ScanReport, ScanError> {
    let started = Instant::now();
    let ctx = ScanContext::new(store, config, pepper)?;
    let (files, mut skipped) = walk_tree(root, config)?;

    let mut findings = Vec::new();
    let mut files_scanned = 0usize;
    let mut bytes_scanned = 0u64;
    let mut buf = Vec::new();
    for path in files {
        let rel = rel_display(&path, root);
        match scan_file_with_buf(&path, &rel, &ctx, &mut buf) {
            Ok((file_findings, bytes)) => {
                files_scanned += 1;
                bytes_scanned += bytes;
                findings.extend(file_findings);
            }
            Err(reason) => skipped.push(SkippedFile { path: rel, reason }),
        }
    }
    findings.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    skipped.sort_by(|a, b| a.path.cmp(&b.path));

    Ok(ScanReport {
        root: root.to_path_buf(),
        findings,
        files_scanned,
        files_skipped: skipped,
        bytes_scanned,
        duration: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secrets::Secret;
    use std::fs;

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

    fn ctx_for(store: &SecretStore, config: &ScanConfig) -> ScanContext {
        ScanContext::new(store, config, None).unwrap()
    }

    #[test]
    fn walk_ignores_vcs_dirs() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        fs::create_dir_all(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("sub/b.txt"), "y").unwrap();
        fs::create_dir_all(dir.path().join(".git")).unwrap();
        fs::write(dir.path().join(".git/config"), "z").unwrap();

        let (files, skipped) = walk_tree(dir.path(), &ScanConfig::default()).unwrap();
        let rels: Vec<String> = files
            .iter()
            .map(|p| rel_display(p, dir.path()))
            .collect();
        assert_eq!(rels, vec!["a.txt", "sub/b.txt"]);
        assert!(skipped.is_empty());
    }

    #[cfg(unix)]
    #[test]
    fn walk_skips_symlinks_and_terminates_on_loops() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        std::os::unix::fs::symlink(dir.path(), dir.path().join("loop")).unwrap();

        let (files, skipped) = walk_tree(dir.path(), &ScanConfig::default()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].reason, "symlink");
    }

    #[test]
    fn walk_empty_dir() {
        let dir = tempfile::tempdir().unwrap();
        let (files, skipped) = walk_tree(dir.path(), &ScanConfig::default()).unwrap();
        assert!(files.is_empty());
        assert!(skipped.is_empty());
    }

    #[test]
    fn walk_missing_root_fails() {
        let err = walk_tree(Path::new("/nonexistent-root"), &ScanConfig::default()).unwrap_err();
        assert!(matches!(err, ScanError::RootUnreadable { .. }));
    }

    #[test]
    fn walk_applies_ignore_globs() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("keep.txt"), "x").unwrap();
        fs::write(dir.path().join("drop.log"), "y").unwrap();
        let config = ScanConfig {
            ignore_globs: vec!["*.log".into()],
            ..ScanConfig::default()
        };
        let (files, _) = walk_tree(dir.path(), &config).unwrap();
        assert_eq!(files.len(), 1);
        assert!(files[0].ends_with("keep.txt"));
    }

    #[test]
    fn scan_file_finds_planted_secret_with_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("src.txt");
        fs::write(&path, "line one\nline two\nkey = \"sekret99word\";\n").unwrap();
        let s = store(&[("k", "sekret99word")]);
        let cfg = ScanConfig::default();
        let ctx = ctx_for(&s, &cfg);
        let (findings, bytes) = scan_file(&path, "src.txt", &ctx).unwrap();
        assert_eq!(findings.len(), 1);
        let f = &findings[0];
        assert_eq!(f.line, 3);
        assert_eq!(f.column, 8);
        assert_eq!(f.rule, RuleKind::Pattern);
        assert!(!f.excerpt.contains("sekret99word"));
        assert!(f.excerpt.contains("«REDACTED»"));
        assert_eq!(bytes, 40);
    }

    #[test]
    fn scan_file_skips_binary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blob.bin");
        fs::write(&path, b"\x00\x01\x02sekret99word").unwrap();
        let s = store(&[("k", "sekret99word")]);
        let ctx = ctx_for(&s, &ScanConfig::default());
        let err = scan_file(&path, "blob.bin", &ctx).unwrap_err();
        assert_eq!(err, "binary");
    }

    #[test]
    fn chunked_scan_equals_whole_file_scan() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("big.txt");
        // secret straddles the chunk boundary
        let secret = "straddle8secret";
        let mut content = "x".repeat(10_000);
        content.push_str(secret);
        content.push_str(&"y".repeat(10_000));
        content.push_str(secret);
        fs::write(&path, &content).unwrap();

        let s = store(&[("k", secret)]);
        let small = ScanConfig {
            chunk_size: 1, // forced up to the overlap window internally
            ..ScanConfig::default()
        };
        let whole = ScanConfig {
            chunk_size: 1 << 26,
            ..ScanConfig::default()
        };
        let (small_findings, _) = scan_file(&path, "big.txt", &ctx_for(&s, &small)).unwrap();
        let (whole_findings, _) = scan_file(&path, "big.txt", &ctx_for(&s, &whole)).unwrap();
        assert_eq!(small_findings, whole_findings);
        assert_eq!(small_findings.len(), 2);
    }

    #[test]
    fn scan_tree_reports_and_sorts() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("clean1.txt"), "nothing here\n").unwrap();
        fs::write(dir.path().join("clean2.txt"), "nor here\n").unwrap();
        fs::write(dir.path().join("leaky.txt"), "x sekret99word y\n").unwrap();
        let s = store(&[("k", "sekret99word")]);
        let report = scan_tree(dir.path(), &s, &ScanConfig::default(), None).unwrap();
        assert_eq!(report.files_scanned, 3);
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.findings[0].path, "leaky.txt");

        // determinism
        let again = scan_tree(dir.path(), &s, &ScanConfig::default(), None).unwrap();
        assert_eq!(report.findings, again.findings);
        assert_eq!(report.files_scanned, again.files_scanned);
        assert_eq!(report.bytes_scanned, again.bytes_scanned);
    }

    #[test]
    fn scan_tree_rejects_all_short_store() {
        let dir = tempfile::tempdir().unwrap();
        let s = store(&[("tiny", "abc")]);
        let err = scan_tree(dir.path(), &s, &ScanConfig::default(), None).unwrap_err();
        assert!(matches!(err, ScanError::NoUsablePatterns { total: 1, .. }));
    }

    #[test]
    fn scan_tree_empty_store_is_clean() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "content\n").unwrap();
        let s = store(&[]);
        let report = scan_tree(dir.path(), &s, &ScanConfig::default(), None).unwrap();
        assert!(report.findings.is_empty());
        assert_eq!(report.files_scanned, 1);
    }

    #[test]
    fn excerpt_masks_adjacent_occurrences() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("two.txt");
        fs::write(&path, "a sekret99word b sekret99word c\n").unwrap();
        let s = store(&[("k", "sekret99word")]);
        let ctx = ctx_for(&s, &ScanConfig::default());
        let (findings, _) = scan_file(&path, "two.txt", &ctx).unwrap();
        assert_eq!(findings.len(), 2);
        for f in &findings {
            assert!(
                !f.excerpt.contains("sekret99word"),
                "excerpt leaked: {}",
                f.excerpt
            );
        }
    }

    #[test]
    fn added_line_pattern_bridge_catches_interruption() {
        let s = store(&[("k", "sekret99word")]);
        let ctx = ctx_for(&s, &ScanConfig::default());
        let rev = crate::diff::parse_unified_diff(
            "--- a/f\n+++ b/f\n@@ -1,0 +1,1 @@\n+x = \"sekre\" + \"t99word\"\n",
            "r1",
        )
        .unwrap();
        let findings = scan_added_lines(&rev, &ctx, false);
        assert_eq!(findings.len(), 1);
        let f = &findings[0];
        assert_eq!(f.rule, RuleKind::Pattern);
        assert_eq!((f.path.as_str(), f.line), ("f", 1));
        assert!(!f.excerpt.contains("sekre"));
    }

    #[test]
    fn interrupted_occurrence_is_found_and_redacted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wrapped.txt");
        // secret wrapped across lines with quote-plus concatenation
        fs::write(&path, "k = \"sekret9\" +\n    \"9word\"\n").unwrap();
        let s = store(&[("k", "sekret99word")]);
        let ctx = ctx_for(&s, &ScanConfig::default());
        let (findings, _) = scan_file(&path, "wrapped.txt", &ctx).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].line, 1);
        assert!(!findings[0].excerpt.contains("sekret9"));
    }
}

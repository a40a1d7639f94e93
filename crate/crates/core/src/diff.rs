//! Unified diff parsing and added-line extraction.
//!
//! A differential revision arrives as unified diff text (the format every
//! VCS emits). Parsing validates hunk headers against their bodies and is
//! tolerant of leading noise such as commit-message headers; git binary
//! patches are skipped with a warning. Only added lines feed detection by
//! default — content in context or removed lines was already in the
//! codebase and belongs to the whole-tree sniffer.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Context,
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub old_start: usize,
    pub old_count: usize,
    pub new_start: usize,
    pub new_count: usize,
    pub lines: Vec<(LineKind, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub old_path: String,
    pub new_path: String,
    pub hunks: Vec<Hunk>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Revision {
    pub revision_id: String,
    pub files: Vec<FileDiff>,
    /// Non-fatal oddities encountered while parsing (e.g. binary patches).
    pub warnings: Vec<String>,
}

/// One added line with its new-file coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddedLine {
    pub path: String,
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("line {line}: malformed hunk header {header:?}")]
    BadHunkHeader { line: usize, header: String },
    #[error("line {line}: expected '+++ <path>' after '--- {old_path}'")]
    MissingNewPath { line: usize, old_path: String },
    #[error(
        "line {line}: hunk line counts disagree with header \
         (old {old_seen}/{old_want}, new {new_seen}/{new_want})"
    )]
    CountMismatch {
        line: usize,
        old_seen: usize,
        old_want: usize,
        new_seen: usize,
        new_want: usize,
    },
    #[error("line {line}: hunk truncated by end of input (old {old_seen}/{old_want}, new {new_seen}/{new_want})")]
    Truncated {
        line: usize,
        old_seen: usize,
        old_want: usize,
        new_seen: usize,
        new_want: usize,
    },
    #[error("line {line}: added line outside any hunk; a dropped '+' line would be a silent miss")]
    StrayAddedLine { line: usize },
}

fn strip_vcs_prefix(path: &str) -> &str {
    if path == "/dev/null" {
        return path;
    }
    path.strip_prefix("a/")
        .or_else(|| path.strip_prefix("b/"))
        .unwrap_or(path)
}

/// Path part of a `---`/`+++` header line, without the marker and with any
/// trailing tab-separated timestamp removed.
fn header_path(rest: &str) -> String {
    let trimmed = rest.split('\t').next().unwrap_or(rest).trim_end();
    strip_vcs_prefix(trimmed).to_string()
}

/// Parses one side of a hunk range: `start[,count]`, count defaulting to 1.
fn parse_range(s: &str) -> Option<(usize, usize)> {
    let mut parts = s.splitn(2, ',');
    let start: usize = parts.next()?.parse().ok()?;
    let count: usize = match parts.next() {
        Some(c) => c.parse().ok()?,
        None => 1,
    };
    Some((start, count))
}

/// Parses `@@ -old_start[,old_count] +new_start[,new_count] @@ ...`.
fn parse_hunk_header(line: &str) -> Option<(usize, usize, usize, usize)> {
    let rest = line.strip_prefix("@@ -")?;
    let end = rest.find(" @@")?;
    let ranges = &rest[..end];
    let mut parts = ranges.splitn(2, " +");
    let old = parse_range(parts.next()?)?;
    let new = parse_range(parts.next()?)?;
    Some((old.0, old.1, new.0, new.1))
}

/// Parses unified diff text into a [`Revision`]. Leading noise before the
/// first file header is skipped; `diff --git`, `index`, and mode lines are
/// tolerated between files.
pub fn parse_unified_diff(text: &str, revision_id: &str) -> Result<Revision, DiffError> {
    let mut files: Vec<FileDiff> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    // lines are 1-based for error reporting; trailing \r is treated as part
    // of the line terminator
    let lines: Vec<&str> = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let mut i = 0usize;

    while i < lines.len() {
        let line = lines[i];

        if let Some(rest) = line.strip_prefix("--- ") {
            let old_path = header_path(rest);
            let Some(next) = lines.get(i + 1) else {
                return Err(DiffError::MissingNewPath {
                    line: i + 2,
                    old_path,
                });
            };
            let Some(new_rest) = next.strip_prefix("+++ ") else {
                return Err(DiffError::MissingNewPath {
                    line: i + 2,
                    old_path,
                });
            };
            let new_path = header_path(new_rest);
            i += 2;

            let mut hunks = Vec::new();
            while i < lines.len() {
                let l = lines[i];
                if let Some((old_start, old_count, new_start, new_count)) = parse_hunk_header(l) {
                    let (hunk, consumed) = parse_hunk_body(
                        &lines,
                        i + 1,
                        old_start,
                        old_count,
                        new_start,
                        new_count,
                    )?;
                    hunks.push(hunk);
                    i += 1 + consumed;
                } else if l.starts_with("@@") {
                    return Err(DiffError::BadHunkHeader {
                        line: i + 1,
                        header: l.to_string(),
                    });
                } else if !hunks.is_empty() && l.starts_with('+') && !l.starts_with("+++ ") {
                    // a '+' line past the declared counts would be an added
                    // line we silently drop — for a leak sniffer that is a
                    // miss, so fail loudly instead
                    let last: &Hunk = hunks.last().expect("nonempty");
                    return Err(DiffError::CountMismatch {
                        line: i + 1,
                        old_seen: last.old_count,
                        old_want: last.old_count,
                        new_seen: last.new_count + 1,
                        new_want: last.new_count,
                    });
                } else {
                    break;
                }
            }
            files.push(FileDiff {
                old_path,
                new_path,
                hunks,
            });
            continue;
        }

        if line.starts_with("GIT binary patch")
            || (line.starts_with("Binary files ") && line.ends_with(" differ"))
        {
            warnings.push(format!("line {}: binary patch skipped", i + 1));
            i += 1;
            continue;
        }

        if !files.is_empty() && line.starts_with('+') && !line.starts_with("+++ ") {
            return Err(DiffError::StrayAddedLine { line: i + 1 });
        }

        // anything else (commit noise, diff --git, index, mode lines) is
        // skipped until the next file header
        i += 1;
    }

    Ok(Revision {
        revision_id: revision_id.to_string(),
        files,
        warnings,
    })
}

/// Consumes hunk body lines starting at `start`, enforcing header counts.
/// Returns the hunk and the number of lines consumed.
fn parse_hunk_body(
    lines: &[&str],
    start: usize,
    old_start: usize,
    old_count: usize,
    new_start: usize,
    new_count: usize,
) -> Result<(Hunk, usize), DiffError> {
    let mut body = Vec::new();
    let mut old_seen = 0usize;
    let mut new_seen = 0usize;
    let mut i = start;

    while old_seen < old_count || new_seen < new_count {
        let Some(&l) = lines.get(i) else {
            return Err(DiffError::Truncated {
                line: i + 1,
                old_seen,
                old_want: old_count,
                new_seen,
                new_want: new_count,
            });
        };
        let mismatch = |at: usize| DiffError::CountMismatch {
            line: at,
            old_seen,
            old_want: old_count,
            new_seen,
            new_want: new_count,
        };
        if let Some(rest) = l.strip_prefix('+') {
            if new_seen >= new_count {
                return Err(mismatch(i + 1));
            }
            new_seen += 1;
            body.push((LineKind::Added, rest.to_string()));
        } else if let Some(rest) = l.strip_prefix('-') {
            if old_seen >= old_count {
                return Err(mismatch(i + 1));
            }
            old_seen += 1;
            body.push((LineKind::Removed, rest.to_string()));
        } else if l.starts_with('\\') {
            // "\ No newline at end of file" annotates the previous line
        } else if l.starts_with("@@") || l.starts_with("--- ") || l.starts_with("diff --git ") {
            // next structure began before the header's counts were satisfied
            return Err(mismatch(i + 1));
        } else {
            // context; a fully empty line is an empty context line emitted
            // by tools that trim trailing whitespace
            let rest = l.strip_prefix(' ').unwrap_or(l);
            if old_seen >= old_count || new_seen >= new_count {
                return Err(mismatch(i + 1));
            }
            old_seen += 1;
            new_seen += 1;
            body.push((LineKind::Context, rest.to_string()));
        }
        i += 1;
    }

    // trailing no-newline marker belongs to this hunk
    if let Some(&l) = lines.get(i) {
        if l.starts_with('\\') {
            i += 1;
        }
    }

    Ok((
        Hunk {
            old_start,
            old_count,
            new_start,
            new_count,
            lines: body,
        },
        i - start,
    ))
}

/// Every added line across the revision, with its new-file line number.
pub fn added_lines(revision: &Revision) -> Vec<AddedLine> {
    numbered_lines(revision, false)
}

/// Added lines, plus context lines when `include_context` is set.
pub fn numbered_lines(revision: &Revision, include_context: bool) -> Vec<AddedLine> {
    let mut out = Vec::new();
    for file in &revision.files {
        for hunk in &file.hunks {
            let mut new_no = hunk.new_start;
            for (kind, text) in &hunk.lines {
                match kind {
                    LineKind::Added => {
                        out.push(AddedLine {
                            path: file.new_path.clone(),
                            line: new_no,
                            text: text.clone(),
                        });
                        new_no += 1;
                    }
                    LineKind::Context => {
                        if include_context {
                            out.push(AddedLine {
                                path: file.new_path.clone(),
                                line: new_no,
                                text: text.clone(),
                            });
                        }
                        new_no += 1;
                    }
                    LineKind::Removed => {}
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "--- a/f\n+++ b/f\n@@ -1,1 +1,2 @@\n ctx\n+added\n";

    #[test]
    fn minimal_diff_parses() {
        let rev = parse_unified_diff(MINIMAL, "r1").unwrap();
        assert_eq!(rev.files.len(), 1);
        assert_eq!(rev.files[0].new_path, "f");
        assert_eq!(rev.files[0].hunks.len(), 1);
        let added = added_lines(&rev);
        assert_eq!(added.len(), 1);
        assert_eq!(added[0].path, "f");
        assert_eq!(added[0].line, 2);
        assert_eq!(added[0].text, "added");
    }

    #[test]
    fn hunk_header_grammar() {
        assert_eq!(parse_hunk_header("@@ -1,2 +1,3 @@"), Some((1, 2, 1, 3)));
        assert_eq!(parse_hunk_header("@@ -5 +7 @@"), Some((5, 1, 7, 1)));
        assert_eq!(
            parse_hunk_header("@@ -10,5 +20,3 @@ fn foo()"),
            Some((10, 5, 20, 3))
        );
        assert_eq!(parse_hunk_header("@@ -0,0 +1,3 @@"), Some((0, 0, 1, 3)));
        assert_eq!(parse_hunk_header("@@ nonsense @@"), None);
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let text = "--- a/f\n+++ b/f\n@@ -1,1 +1,3 @@\n ctx\n+added\n";
        let err = parse_unified_diff(text, "r").unwrap_err();
        match err {
            DiffError::Truncated { new_seen, new_want, .. } => {
                assert_eq!((new_seen, new_want), (2, 3));
            }
            other => panic!("expected truncation, got {other}"),
        }
    }

    #[test]
    fn surplus_line_is_count_mismatch() {
        let text = "--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n ctx\n+extra\n--- a/g\n+++ b/g\n";
        let err = parse_unified_diff(text, "r").unwrap_err();
        assert!(matches!(err, DiffError::CountMismatch { line: 5, .. }), "{err}");
    }

    #[test]
    fn tolerates_format_patch_signature() {
        let text = format!("{MINIMAL}-- \n2.39.2\n");
        let rev = parse_unified_diff(&text, "r").unwrap();
        assert_eq!(added_lines(&rev).len(), 1);
    }

    #[test]
    fn tolerates_leading_commit_noise() {
        let text = format!(
            "commit 123abc\nAuthor: someone\nDate: today\n\n    message line\n\n{MINIMAL}"
        );
        let rev = parse_unified_diff(&text, "r").unwrap();
        assert_eq!(rev.files.len(), 1);
        assert_eq!(added_lines(&rev).len(), 1);
    }

    #[test]
    fn tolerates_git_headers() {
        let text = "diff --git a/f b/f\nindex 111..222 100644\n--- a/f\n+++ b/f\n@@ -1 +1 @@\n-x\n+y\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        assert_eq!(rev.files.len(), 1);
        let added = added_lines(&rev);
        assert_eq!(added[0].text, "y");
        assert_eq!(added[0].line, 1);
    }

    #[test]
    fn multiple_hunks_number_per_hunk() {
        let text = "--- a/f\n+++ b/f\n@@ -1,3 +1,4 @@\n l1\n+new2\n l3\n l4\n@@ -10,2 +11,3 @@\n l10\n+new13\n l11\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        let added = added_lines(&rev);
        assert_eq!(added.len(), 2);
        assert_eq!(added[0].line, 2);
        assert_eq!(added[1].line, 12);
    }

    #[test]
    fn removal_only_diff_has_no_added_lines() {
        let text = "--- a/f\n+++ b/f\n@@ -1,2 +1,1 @@\n keep\n-gone\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        assert!(added_lines(&rev).is_empty());
    }

    #[test]
    fn no_newline_marker_is_consumed() {
        let text = "--- a/f\n+++ b/f\n@@ -1 +1 @@\n-old\n+new\n\\ No newline at end of file\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        let added = added_lines(&rev);
        assert_eq!(added.len(), 1);
        assert_eq!(added[0].text, "new");
    }

    #[test]
    fn dev_null_paths_are_preserved() {
        let text = "--- /dev/null\n+++ b/created\n@@ -0,0 +1,1 @@\n+hello\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        assert_eq!(rev.files[0].old_path, "/dev/null");
        assert_eq!(rev.files[0].new_path, "created");
        assert_eq!(added_lines(&rev)[0].line, 1);
    }

    #[test]
    fn binary_patch_warns_and_continues() {
        let text = format!(
            "diff --git a/img b/img\nBinary files a/img and b/img differ\n{MINIMAL}"
        );
        let rev = parse_unified_diff(&text, "r").unwrap();
        assert_eq!(rev.warnings.len(), 1);
        assert_eq!(rev.files.len(), 1);
    }

    #[test]
    fn include_context_adds_context_lines() {
        let rev = parse_unified_diff(MINIMAL, "r").unwrap();
        let all = numbered_lines(&rev, true);
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].text, "ctx");
        assert_eq!(all[0].line, 1);
    }

    #[test]
    fn crlf_input_parses() {
        let text = "--- a/f\r\n+++ b/f\r\n@@ -1 +1,2 @@\r\n ctx\r\n+added\r\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        assert_eq!(added_lines(&rev)[0].text, "added");
    }

    #[test]
    fn empty_input_is_an_empty_revision() {
        let rev = parse_unified_diff("", "r").unwrap();
        assert!(rev.files.is_empty());
    }

    #[test]
    fn timestamp_suffix_stripped_from_paths() {
        let text = "--- a/f\t2024-01-01 00:00:00\n+++ b/f\t2024-01-02 00:00:00\n@@ -1 +1 @@\n-x\n+y\n";
        let rev = parse_unified_diff(text, "r").unwrap();
        assert_eq!(rev.files[0].new_path, "f");
    }
}

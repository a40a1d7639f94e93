//! Unified-diff generator with known ground truth.
//!
//! Diffs are rendered from an explicit edit script rather than computed by
//! a diff algorithm, so the exact set of added lines (with their new-file
//! line numbers) is known by construction.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Keep(String),
    Del(String),
    Ins(String),
}

#[derive(Debug, Clone)]
pub struct GeneratedDiff {
    pub path: String,
    pub old: Vec<String>,
    pub new: Vec<String>,
    /// (1-based new-file line number, text) for every inserted line.
    pub added: Vec<(usize, String)>,
    pub text: String,
}

const LINE_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789 _.,;()";

pub fn random_line(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(0..60);
    (0..len)
        .map(|_| *LINE_CHARS.choose(rng).unwrap() as char)
        .collect()
}

/// Random edit script over a fresh old file, guaranteeing that every line in
/// `must_insert` appears exactly once as an insertion.
pub fn random_ops(rng: &mut ChaCha8Rng, old_len: usize, must_insert: &[String]) -> Vec<Op> {
    let mut ops: Vec<Op> = (0..old_len)
        .map(|_| {
            let line = random_line(rng);
            if rng.gen_bool(0.15) {
                Op::Del(line)
            } else {
                Op::Keep(line)
            }
        })
        .collect();
    let extra_inserts = rng.gen_range(0..4);
    let mut inserts: Vec<String> = must_insert.to_vec();
    for _ in 0..extra_inserts {
        inserts.push(random_line(rng));
    }
    for line in inserts {
        let at = rng.gen_range(0..=ops.len());
        ops.insert(at, Op::Ins(line));
    }
    ops
}

pub fn old_lines(ops: &[Op]) -> Vec<String> {
    ops.iter()
        .filter_map(|op| match op {
            Op::Keep(l) | Op::Del(l) => Some(l.clone()),
            Op::Ins(_) => None,
        })
        .collect()
}

pub fn new_lines(ops: &[Op]) -> Vec<String> {
    ops.iter()
        .filter_map(|op| match op {
            Op::Keep(l) | Op::Ins(l) => Some(l.clone()),
            Op::Del(_) => None,
        })
        .collect()
}

pub fn added_lines(ops: &[Op]) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut new_no = 0usize;
    for op in ops {
        match op {
            Op::Keep(_) => new_no += 1,
            Op::Ins(l) => {
                new_no += 1;
                out.push((new_no, l.clone()));
            }
            Op::Del(_) => {}
        }
    }
    out
}

fn is_change(op: &Op) -> bool {
    !matches!(op, Op::Keep(_))
}

/// Renders the edit script as a unified diff with `context` context lines.
/// `git_headers` prepends `diff --git`/`index` lines; `omit_unit_counts`
/// randomly drops `,1` from hunk headers to exercise the header grammar.
pub fn render_unified(
    rng: &mut ChaCha8Rng,
    path: &str,
    ops: &[Op],
    context: usize,
    git_headers: bool,
) -> String {
    let mut out = String::new();
    if git_headers {
        out.push_str(&format!("diff --git a/{path} b/{path}\n"));
        out.push_str("index 1111111..2222222 100644\n");
    }
    out.push_str(&format!("--- a/{path}\n+++ b/{path}\n"));

    let changes: Vec<usize> = ops
        .iter()
        .enumerate()
        .filter(|(_, op)| is_change(op))
        .map(|(i, _)| i)
        .collect();
    if changes.is_empty() {
        return out;
    }

    // group change indices whose context windows touch
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = changes[0];
    let mut prev = changes[0];
    for &c in &changes[1..] {
        if c - prev - 1 > 2 * context {
            groups.push((start, prev));
            start = c;
        }
        prev = c;
    }
    groups.push((start, prev));

    for (first, last) in groups {
        let hunk_start = first.saturating_sub(context);
        let hunk_end = (last + context).min(ops.len() - 1);
        let hunk = &ops[hunk_start..=hunk_end];

        let old_before = ops[..hunk_start]
            .iter()
            .filter(|op| matches!(op, Op::Keep(_) | Op::Del(_)))
            .count();
        let new_before = ops[..hunk_start]
            .iter()
            .filter(|op| matches!(op, Op::Keep(_) | Op::Ins(_)))
            .count();
        let old_count = hunk
            .iter()
            .filter(|op| matches!(op, Op::Keep(_) | Op::Del(_)))
            .count();
        let new_count = hunk
            .iter()
            .filter(|op| matches!(op, Op::Keep(_) | Op::Ins(_)))
            .count();
        let old_start = if old_count == 0 {
            old_before
        } else {
            old_before + 1
        };
        let new_start = if new_count == 0 {
            new_before
        } else {
            new_before + 1
        };

        let old_part = if old_count == 1 && rng.gen_bool(0.5) {
            format!("{old_start}")
        } else {
            format!("{old_start},{old_count}")
        };
        let new_part = if new_count == 1 && rng.gen_bool(0.5) {
            format!("{new_start}")
        } else {
            format!("{new_start},{new_count}")
        };
        out.push_str(&format!("@@ -{old_part} +{new_part} @@\n"));
        for op in hunk {
            match op {
                Op::Keep(l) => out.push_str(&format!(" {l}\n")),
                Op::Del(l) => out.push_str(&format!("-{l}\n")),
                Op::Ins(l) => out.push_str(&format!("+{l}\n")),
            }
        }
    }
    out
}

/// One random (old, new) pair rendered as a diff, with every line of
/// `planted` inserted exactly once.
pub fn generate(rng: &mut ChaCha8Rng, path: &str, planted: &[String]) -> GeneratedDiff {
    let old_len = rng.gen_range(0..40);
    let context = rng.gen_range(0..=3);
    let git_headers = rng.gen_bool(0.5);
    let ops = random_ops(rng, old_len, planted);
    let text = render_unified(rng, path, &ops, context, git_headers);
    GeneratedDiff {
        path: path.to_string(),
        old: old_lines(&ops),
        new: new_lines(&ops),
        added: added_lines(&ops),
        text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn script_accounting_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let planted = vec!["THE PLANT".to_string()];
        for _ in 0..100 {
            let ops = random_ops(&mut rng, 20, &planted);
            let old = old_lines(&ops);
            let new = new_lines(&ops);
            let added = added_lines(&ops);
            // every added line is present in new at its recorded position
            for (no, line) in &added {
                assert_eq!(&new[no - 1], line);
            }
            assert_eq!(
                old.len() + added.len(),
                new.len() + ops.iter().filter(|o| matches!(o, Op::Del(_))).count()
            );
            assert!(added.iter().any(|(_, l)| l == "THE PLANT"));
        }
    }

    #[test]
    fn render_headers_present() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ops = vec![
            Op::Keep("ctx".into()),
            Op::Ins("added".into()),
            Op::Keep("ctx2".into()),
        ];
        let text = render_unified(&mut rng, "f.txt", &ops, 3, false);
        assert!(text.starts_with("--- a/f.txt\n+++ b/f.txt\n@@ "));
        assert!(text.contains("\n+added\n"));
    }

    #[test]
    fn no_changes_renders_no_hunks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ops = vec![Op::Keep("same".into())];
        let text = render_unified(&mut rng, "f.txt", &ops, 3, false);
        assert!(!text.contains("@@"));
    }
}

//! The `secretsniff` command set.
//!
//! - `build-cache`: digest the secret store into the peppered cache file.
//! - `scan`: whole-tree pattern sniff.
//! - `check-diff`: hash-token sniff of one unified diff (optionally also
//!   pattern-matching added lines).
//! - `watch`: long-running inbox poller that treats every dropped `*.diff`
//!   file as a revision to check.
//!
//! Exit codes everywhere: 0 clean, 1 findings, 2 error.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::config::{load_file_config, resolve, FileConfig, Overrides, ResolvedConfig};
use crate::diff::parse_unified_diff;
use crate::finding::Finding;
use crate::hashcache::{
    build_cache, detect, load_cache, save_cache, DetectConfig, HashedSecretCache, Pepper,
    PEPPER_ENV,
};
use crate::report::{emit_report, send_alert, AlertPayload, Outcome};
use crate::scan::{scan_added_lines, scan_tree, ScanContext};
use crate::secrets::{filter_by_min_length, load_secrets, SecretStore};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const ALERT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Parser, Debug)]
#[command(
    name = "secretsniff",
    version,
    about = "Sniffs codebases and code revisions for leaks of known production secrets"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat JSON config file; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Secret store file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    secrets: Option<PathBuf>,

    /// Hashed-secret cache file.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    /// File holding the 32-byte pepper (alternative to SECRETSNIFF_PEPPER).
    #[arg(long, global = true, value_name = "PATH")]
    pepper_file: Option<PathBuf>,

    /// Report format: human, json, or jsonl.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Write the report here instead of stdout (watch: the results log).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Glob (relative to the scan root) to exclude; repeatable.
    #[arg(long, global = true, value_name = "GLOB")]
    ignore: Vec<String>,

    /// Secrets shorter than this many characters are not pattern-matched.
    #[arg(long, global = true, value_name = "N")]
    min_secret_length: Option<usize>,

    /// Whitespace filler budget per gap.
    #[arg(long, global = true, value_name = "N")]
    max_gap_ws: Option<usize>,

    /// Webhook URL for alerts on findings.
    #[arg(long, global = true, value_name = "URL")]
    webhook: Option<String>,

    /// In check-diff/watch, also pattern-match added lines (needs --secrets).
    #[arg(long, global = true)]
    also_pattern: bool,

    /// Sniff context lines of diffs, not only added lines.
    #[arg(long, global = true)]
    include_context: bool,

    /// Watch poll interval in seconds.
    #[arg(long, global = true, value_name = "SECS")]
    interval: Option<f64>,

    /// Watch worker threads.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Print the fully resolved configuration (peppers masked) and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the hashed-secret cache from the secret store.
    BuildCache,
    /// Scan a directory tree for leaked secrets.
    Scan {
        /// Root directory to scan.
        root: PathBuf,
    },
    /// Check one unified diff (from a file or stdin) against the cache.
    CheckDiff {
        /// Diff file; `-` or omitted reads stdin.
        diff: Option<PathBuf>,
    },
    /// Poll an inbox directory and check every dropped *.diff file.
    Watch {
        /// Inbox directory.
        inbox: PathBuf,
    },
}

/// Parses arguments from the environment and runs. The return value is the
/// process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let file_config = match &cli.config {
        Some(path) => match load_file_config(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("secretsniff: {e}");
                return EXIT_ERROR;
            }
        },
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        secrets: cli.secrets.clone(),
        cache: cli.cache.clone(),
        pepper_file: cli.pepper_file.clone(),
        format: cli.format.clone(),
        out: cli.out.clone(),
        ignore: cli.ignore.clone(),
        min_secret_length: cli.min_secret_length,
        max_gap_ws: cli.max_gap_ws,
        webhook: cli.webhook.clone(),
        also_pattern: cli.also_pattern,
        include_context: cli.include_context,
        interval: cli.interval,
        workers: cli.workers,
    };
    let cfg = match resolve(&file_config, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("secretsniff: {e}");
            return EXIT_ERROR;
        }
    };

    if cli.print_config {
        print!("{}", cfg.to_printable_json());
        return EXIT_CLEAN;
    }

    let result = match &cli.command {
        Command::BuildCache => cmd_build_cache(&cfg),
        Command::Scan { root } => cmd_scan(root, &cfg),
        Command::CheckDiff { diff } => cmd_check_diff(diff.as_deref(), &cfg),
        Command::Watch { inbox } => cmd_watch(inbox, &cfg),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("secretsniff: {message}");
            EXIT_ERROR
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// The pepper from `--pepper-file` (preferred) or the environment.
fn resolve_pepper(cfg: &ResolvedConfig) -> Result<Option<Pepper>, String> {
    if let Some(path) = &cfg.pepper_file {
        return Pepper::from_file(path).map(Some).map_err(err);
    }
    Pepper::from_env().map_err(err)
}

fn require_pepper(cfg: &ResolvedConfig) -> Result<Pepper, String> {
    resolve_pepper(cfg)?.ok_or_else(|| {
        format!("no pepper configured: set {PEPPER_ENV} (64 hex chars) or pass --pepper-file")
    })
}

fn require_secrets(cfg: &ResolvedConfig) -> Result<SecretStore, String> {
    let path = cfg
        .secrets
        .as_ref()
        .ok_or("--secrets <path> is required for this command")?;
    load_secrets(path).map_err(err)
}

fn warn_short_secrets(store: &SecretStore, min_len: usize) {
    let (_, excluded) = filter_by_min_length(store, min_len);
    for id in excluded {
        eprintln!(
            "secretsniff: warning: secret {id} is shorter than {min_len} characters \
             and will not be pattern-matched"
        );
    }
}

fn write_output(cfg: &ResolvedConfig, body: &str) -> Result<(), String> {
    match &cfg.out {
        Some(path) => fs::write(path, body).map_err(err),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn cmd_build_cache(cfg: &ResolvedConfig) -> Result<i32, String> {
    let store = require_secrets(cfg)?;
    let pepper = require_pepper(cfg)?;
    let out_path = cfg
        .cache
        .as_ref()
        .ok_or("--cache <path> is required: it names the cache file to write")?;

    let (cache, warnings) = build_cache(&store, &pepper);
    for w in &warnings {
        eprintln!("secretsniff: warning: {w}");
    }
    warn_short_secrets(&store, cfg.min_secret_length);
    save_cache(&cache, out_path).map_err(err)?;
    println!(
        "cache written: {} distinct digests (pepper {}) -> {}",
        cache.secret_count(),
        cache.pepper_id(),
        out_path.display()
    );
    Ok(EXIT_CLEAN)
}

fn cmd_scan(root: &Path, cfg: &ResolvedConfig) -> Result<i32, String> {
    let store = require_secrets(cfg)?;
    let pepper = resolve_pepper(cfg)?;
    warn_short_secrets(&store, cfg.min_secret_length);

    let report = scan_tree(root, &store, &cfg.scan_config(), pepper.as_ref()).map_err(err)?;
    let findings = report.findings.len();
    let outcome = Outcome::from_scan(&report);
    write_output(cfg, &emit_report(&outcome, cfg.report_format()))?;
    eprintln!(
        "secretsniff: scanned {} files ({} bytes) in {:.2}s: {} finding(s), {} skipped",
        report.files_scanned,
        report.bytes_scanned,
        report.duration.as_secs_f64(),
        findings,
        report.files_skipped.len()
    );
    Ok(if findings > 0 { EXIT_FINDINGS } else { EXIT_CLEAN })
}

fn read_diff_input(diff: Option<&Path>) -> Result<(String, String), String> {
    match diff {
        Some(path) if path.as_os_str() != "-" => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read diff {}: {e}", path.display()))?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok((text, id))
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("cannot read diff from stdin: {e}"))?;
            Ok((text, "stdin".to_string()))
        }
    }
}

/// Shared revision-checking core for check-diff and watch.
struct RevisionChecker {
    cache: HashedSecretCache,
    pepper: Pepper,
    detect_config: DetectConfig,
    /// Present when --also-pattern: compiled patterns + redaction data.
    pattern_ctx: Option<ScanContext>,
    include_context: bool,
}

impl RevisionChecker {
    fn from_config(cfg: &ResolvedConfig) -> Result<Self, String> {
        let cache_path = cfg
            .cache
            .as_ref()
            .ok_or("--cache <path> is required for diff checking")?;
        let cache = load_cache(cache_path).map_err(err)?;
        let pepper = require_pepper(cfg)?;
        if pepper.id() != cache.pepper_id() {
            return Err(format!(
                "pepper {} does not match cache pepper {}; refusing to run",
                pepper.id(),
                cache.pepper_id()
            ));
        }
        let pattern_ctx = if cfg.also_pattern {
            let store = require_secrets(cfg)
                .map_err(|e| format!("--also-pattern needs the secret store: {e}"))?;
            warn_short_secrets(&store, cfg.min_secret_length);
            Some(ScanContext::new(&store, &cfg.scan_config(), Some(&pepper)).map_err(err)?)
        } else {
            None
        };
        Ok(Self {
            cache,
            pepper,
            detect_config: DetectConfig {
                include_context: cfg.include_context,
            },
            pattern_ctx,
            include_context: cfg.include_context,
        })
    }

    fn check(&self, diff_text: &str, revision_id: &str) -> Result<(Vec<Finding>, Vec<String>), String> {
        let revision = parse_unified_diff(diff_text, revision_id).map_err(err)?;
        let mut findings =
            detect(&revision, &self.cache, &self.pepper, &self.detect_config).map_err(err)?;
        if let Some(ctx) = &self.pattern_ctx {
            findings.extend(scan_added_lines(&revision, ctx, self.include_context));
        }
        findings.sort_by(|a, b| {
            a.path
                .cmp(&b.path)
                .then_with(|| a.line.cmp(&b.line))
                .then_with(|| a.column.cmp(&b.column))
                .then_with(|| a.secret_id.cmp(&b.secret_id))
        });
        Ok((findings, revision.warnings))
    }
}

fn alert_if_configured(cfg: &ResolvedConfig, outcome: &Outcome) {
    if let Some(url) = &cfg.webhook {
        if !outcome.findings.is_empty() {
            let result = send_alert(&AlertPayload::new(outcome), url, ALERT_TIMEOUT);
            if !result.delivered() {
                eprintln!(
                    "secretsniff: warning: alert delivery {:?} after {} attempt(s){}",
                    result.outcome,
                    result.attempts,
                    result
                        .error
                        .map(|e| format!(": {e}"))
                        .unwrap_or_default()
                );
            }
        }
    }
}

fn cmd_check_diff(diff: Option<&Path>, cfg: &ResolvedConfig) -> Result<i32, String> {
    let checker = RevisionChecker::from_config(cfg)?;
    let (text, revision_id) = read_diff_input(diff)?;
    let (findings, warnings) = checker.check(&text, &revision_id)?;
    for w in warnings {
        eprintln!("secretsniff: warning: {w}");
    }
    let count = findings.len();
    let outcome = Outcome::from_revision(revision_id, findings);
    write_output(cfg, &emit_report(&outcome, cfg.report_format()))?;
    alert_if_configured(cfg, &outcome);
    eprintln!("secretsniff: revision checked: {count} finding(s)");
    Ok(if count > 0 { EXIT_FINDINGS } else { EXIT_CLEAN })
}

// --- watch mode ---

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Routed {
    Processed,
    Flagged,
    Failed,
}

struct WatchShared {
    checker: RevisionChecker,
    cfg: ResolvedConfig,
    inbox: PathBuf,
    log: Mutex<fs::File>,
    flagged_count: AtomicUsize,
}

/// Handles one claimed diff file end to end: check, route, log.
fn watch_process_one(shared: &WatchShared, work_path: &Path) -> Routed {
    let name = work_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed.diff".into());
    let revision_id = Path::new(&name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.clone());

    let checked = fs::read_to_string(work_path)
        .map_err(|e| format!("cannot read diff: {e}"))
        .and_then(|text| shared.checker.check(&text, &revision_id));

    let (routed, log_line) = match checked {
        Ok((findings, _warnings)) => {
            let count = findings.len();
            let outcome = Outcome::from_revision(revision_id.clone(), findings);
            if count > 0 {
                shared.flagged_count.fetch_add(1, Ordering::SeqCst);
                alert_if_configured(&shared.cfg, &outcome);
                (
                    Routed::Flagged,
                    serde_json::json!({
                        "revision_id": revision_id,
                        "file": name,
                        "status": "findings",
                        "findings": count,
                    }),
                )
            } else {
                (
                    Routed::Processed,
                    serde_json::json!({
                        "revision_id": revision_id,
                        "file": name,
                        "status": "clean",
                        "findings": 0,
                    }),
                )
            }
        }
        Err(message) => {
            let note_path = shared
                .inbox
                .join("failed")
                .join(format!("{name}.error.txt"));
            let _ = fs::write(&note_path, format!("{message}\n"));
            (
                Routed::Failed,
                serde_json::json!({
                    "revision_id": revision_id,
                    "file": name,
                    "status": "failed",
                    "findings": 0,
                    "error": message,
                }),
            )
        }
    };

    let dest_dir = match routed {
        Routed::Processed => "processed",
        Routed::Flagged => "flagged",
        Routed::Failed => "failed",
    };
    let dest = shared.inbox.join(dest_dir).join(&name);
    if let Err(e) = fs::rename(work_path, &dest) {
        eprintln!("secretsniff: warning: cannot move {name} to {dest_dir}/: {e}");
    }

    {
        let mut log = shared.log.lock().expect("log lock");
        let _ = writeln!(log, "{log_line}");
        let _ = log.flush();
    }
    routed
}

fn cmd_watch(inbox: &Path, cfg: &ResolvedConfig) -> Result<i32, String> {
    if !inbox.is_dir() {
        return Err(format!("inbox {} is not a directory", inbox.display()));
    }
    let checker = RevisionChecker::from_config(cfg)?;

    for sub in ["processed", "flagged", "failed", ".work"] {
        fs::create_dir_all(inbox.join(sub)).map_err(err)?;
    }
    // recover files left claimed by a previous run
    let work_dir = inbox.join(".work");
    if let Ok(entries) = fs::read_dir(&work_dir) {
        for entry in entries.flatten() {
            let _ = fs::rename(entry.path(), inbox.join(entry.file_name()));
        }
    }

    let log_path = cfg
        .out
        .clone()
        .unwrap_or_else(|| inbox.join("results.jsonl"));
    let log = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&log_path)
        .map_err(err)?;

    let shared = Arc::new(WatchShared {
        checker,
        cfg: cfg.clone(),
        inbox: inbox.to_path_buf(),
        log: Mutex::new(log),
        flagged_count: AtomicUsize::new(0),
    });

    let workers = cfg.workers.max(1);
    let (tx, rx) = mpsc::channel::<PathBuf>();
    let rx = Arc::new(Mutex::new(rx));
    let mut handles = Vec::new();
    for _ in 0..workers {
        let rx = Arc::clone(&rx);
        let shared = Arc::clone(&shared);
        handles.push(std::thread::spawn(move || loop {
            let job = rx.lock().expect("queue lock").recv();
            match job {
                Ok(path) => {
                    watch_process_one(&shared, &path);
                }
                Err(_) => break,
            }
        }));
    }

    eprintln!(
        "secretsniff: watching {} every {:.1}s with {} worker(s); log: {}",
        inbox.display(),
        cfg.interval,
        workers,
        log_path.display()
    );

    let interval = Duration::from_secs_f64(cfg.interval.max(0.05));
    loop {
        let mut batch: Vec<PathBuf> = Vec::new();
        let entries = fs::read_dir(inbox).map_err(err)?;
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_file() && path.extension().is_some_and(|e| e == "diff") {
                batch.push(path);
            }
        }
        batch.sort();
        for path in batch {
            let Some(name) = path.file_name() else { continue };
            let claimed = work_dir.join(name);
            // claim by rename so a file is processed exactly once
            if fs::rename(&path, &claimed).is_ok() {
                let _ = tx.send(claimed);
            }
        }
        std::thread::sleep(interval);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes_are_the_documented_trio() {
        assert_eq!(EXIT_CLEAN, 0);
        assert_eq!(EXIT_FINDINGS, 1);
        assert_eq!(EXIT_ERROR, 2);
    }
}

//! C ABI for embedding the sniffer in other languages.
//!
//! Handles are opaque pointers created and destroyed by this library.
//! Every fallible call returns a [`SniffStatus`]; results travel through
//! out-parameters. String getters return pointers owned by the queried
//! handle, valid until that handle is freed. All entry points are
//! panic-safe: a Rust panic is caught and reported as
//! `SniffStatusInternal`.
//!
//! The generated header lands in `include/secretsniff.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use secretsniff::diff::parse_unified_diff;
use secretsniff::finding::{Finding, RuleKind};
use secretsniff::hashcache::{detect, load_cache, DetectConfig, HashedSecretCache, Pepper};
use secretsniff::scan::{scan_tree, ScanConfig, ScanContext};
use secretsniff::secrets::{load_secrets, SecretStore};

/// Result codes for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SniffStatus {
    SniffStatusOk = 0,
    /// A path could not be read or written.
    SniffStatusIo = 1,
    /// Input could not be parsed (store, cache, or diff).
    SniffStatusParse = 2,
    /// Inputs are inconsistent (e.g. pepper does not match the cache).
    SniffStatusConfig = 3,
    /// A required pointer argument was NULL or not valid UTF-8.
    SniffStatusBadArgument = 4,
    /// An internal panic was caught; this is a bug.
    SniffStatusInternal = 5,
}

use SniffStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread. Borrowed; valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sniff_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sniff_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

unsafe fn path_arg(ptr: *const c_char) -> Result<PathBuf, SniffStatus> {
    Ok(PathBuf::from(str_arg(ptr, "path")?))
}

unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, SniffStatus> {
    if ptr.is_null() {
        set_error(format!("NULL {what} argument"));
        return Err(SniffStatusBadArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(format!("{what} argument is not valid UTF-8"));
            Err(SniffStatusBadArgument)
        }
    }
}

fn guard<F: FnOnce() -> SniffStatus>(f: F) -> SniffStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SniffStatusInternal
        }
    }
}

fn parse_pepper_hex(hex: &str) -> Result<Pepper, SniffStatus> {
    Pepper::from_hex(hex).map_err(|e| {
        set_error(e.to_string());
        SniffStatusConfig
    })
}

// --- engine: whole-tree / buffer pattern scanning ---

/// Compiled pattern engine over a secret store.
pub struct SniffEngine {
    store: SecretStore,
    ctx: ScanContext,
    config: ScanConfig,
}

/// Opens an engine from a secret store file. `pepper_hex` may be NULL; it
/// only affects correlation tags. On success writes a handle to `out`.
///
/// # Safety
/// `secrets_path` (and `pepper_hex` when non-NULL) must point to
/// NUL-terminated strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sniff_engine_open(
    secrets_path: *const c_char,
    pepper_hex: *const c_char,
    out: *mut *mut SniffEngine,
) -> SniffStatus {
    guard(|| {
        if out.is_null() {
            set_error("NULL out argument");
            return SniffStatusBadArgument;
        }
        let path = match path_arg(secrets_path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let pepper = if pepper_hex.is_null() {
            None
        } else {
            match str_arg(pepper_hex, "pepper_hex").and_then(parse_pepper_hex) {
                Ok(p) => Some(p),
                Err(s) => return s,
            }
        };
        let store = match load_secrets(&path) {
            Ok(s) => s,
            Err(e) => {
                set_error(e.to_string());
                return SniffStatusParse;
            }
        };
        let config = ScanConfig::default();
        let ctx = match ScanContext::new(&store, &config, pepper.as_ref()) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return SniffStatusConfig;
            }
        };
        *out = Box::into_raw(Box::new(SniffEngine { store, ctx, config }));
        SniffStatusOk
    })
}

/// Frees an engine handle. NULL is a no-op.
///
/// # Safety
/// `engine` must be a pointer from [`sniff_engine_open`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sniff_engine_close(engine: *mut SniffEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Number of compiled patterns (secrets long enough to match).
///
/// # Safety
/// `engine` must be a live handle from [`sniff_engine_open`] or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_engine_pattern_count(engine: *const SniffEngine) -> usize {
    if engine.is_null() {
        return 0;
    }
    (*engine).ctx.pattern_count()
}

/// Scans a directory tree; writes a findings handle to `out`.
///
/// # Safety
/// `engine` must be a live handle, `root` a NUL-terminated path, `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sniff_engine_scan_tree(
    engine: *const SniffEngine,
    root: *const c_char,
    out: *mut *mut SniffFindings,
) -> SniffStatus {
    guard(|| {
        if engine.is_null() || out.is_null() {
            set_error("NULL engine or out argument");
            return SniffStatusBadArgument;
        }
        let root = match path_arg(root) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let e = &*engine;
        match scan_tree(&root, &e.store, &e.config, None) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(SniffFindings::from_findings(&report.findings)));
                SniffStatusOk
            }
            Err(err) => {
                set_error(err.to_string());
                SniffStatusIo
            }
        }
    })
}

/// Pattern-scans one in-memory buffer (reported under the pseudo-path
/// `<buffer>`); writes a findings handle to `out`.
///
/// # Safety
/// `engine` must be a live handle; `data` must point to `len` readable
/// bytes (may be NULL only when `len == 0`); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sniff_engine_scan_bytes(
    engine: *const SniffEngine,
    data: *const u8,
    len: usize,
    out: *mut *mut SniffFindings,
) -> SniffStatus {
    guard(|| {
        if engine.is_null() || out.is_null() || (data.is_null() && len > 0) {
            set_error("NULL engine, data, or out argument");
            return SniffStatusBadArgument;
        }
        let bytes: &[u8] = if len == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(data, len)
        };
        let findings = (*engine).ctx.scan_bytes(bytes, "<buffer>");
        *out = Box::into_raw(Box::new(SniffFindings::from_findings(&findings)));
        SniffStatusOk
    })
}

// --- checker: hashed-cache diff detection ---

/// Loaded digest cache plus its pepper, ready to check revisions.
pub struct SniffChecker {
    cache: HashedSecretCache,
    pepper: Pepper,
}

/// Opens a checker from a cache file and the matching pepper (64 hex
/// chars). Fails with `SniffStatusConfig` when they do not match.
///
/// # Safety
/// `cache_path` and `pepper_hex` must be NUL-terminated strings; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sniff_checker_open(
    cache_path: *const c_char,
    pepper_hex: *const c_char,
    out: *mut *mut SniffChecker,
) -> SniffStatus {
    guard(|| {
        if out.is_null() {
            set_error("NULL out argument");
            return SniffStatusBadArgument;
        }
        let path = match path_arg(cache_path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let pepper = match str_arg(pepper_hex, "pepper_hex").and_then(parse_pepper_hex) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let cache = match load_cache(&path) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return SniffStatusParse;
            }
        };
        if cache.pepper_id() != pepper.id() {
            set_error(format!(
                "pepper {} does not match cache pepper {}",
                pepper.id(),
                cache.pepper_id()
            ));
            return SniffStatusConfig;
        }
        *out = Box::into_raw(Box::new(SniffChecker { cache, pepper }));
        SniffStatusOk
    })
}

/// Frees a checker handle. NULL is a no-op.
///
/// # Safety
/// `checker` must be a pointer from [`sniff_checker_open`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sniff_checker_close(checker: *mut SniffChecker) {
    if !checker.is_null() {
        drop(Box::from_raw(checker));
    }
}

/// Checks a unified diff (UTF-8 bytes) against the cache; writes a
/// findings handle to `out`.
///
/// # Safety
/// `checker` must be a live handle; `diff` must point to `len` readable
/// bytes (NULL only when `len == 0`); `revision_id` must be a
/// NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sniff_checker_check_diff(
    checker: *const SniffChecker,
    diff: *const u8,
    len: usize,
    revision_id: *const c_char,
    out: *mut *mut SniffFindings,
) -> SniffStatus {
    guard(|| {
        if checker.is_null() || out.is_null() || (diff.is_null() && len > 0) {
            set_error("NULL checker, diff, or out argument");
            return SniffStatusBadArgument;
        }
        let revision_id = match str_arg(revision_id, "revision_id") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let bytes: &[u8] = if len == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(diff, len)
        };
        let text = match std::str::from_utf8(bytes) {
            Ok(t) => t,
            Err(_) => {
                set_error("diff is not valid UTF-8");
                return SniffStatusBadArgument;
            }
        };
        let c = &*checker;
        let revision = match parse_unified_diff(text, revision_id) {
            Ok(r) => r,
            Err(e) => {
                set_error(e.to_string());
                return SniffStatusParse;
            }
        };
        match detect(&revision, &c.cache, &c.pepper, &DetectConfig::default()) {
            Ok(findings) => {
                *out = Box::into_raw(Box::new(SniffFindings::from_findings(&findings)));
                SniffStatusOk
            }
            Err(e) => {
                set_error(e.to_string());
                SniffStatusConfig
            }
        }
    })
}

// --- findings accessors ---

/// Which detection path produced a finding.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SniffRule {
    SniffRulePattern = 0,
    SniffRuleHashToken = 1,
}

struct FindingRow {
    secret_id: CString,
    path: CString,
    line: usize,
    column: usize,
    byte_start: u64,
    byte_end: u64,
    rule: SniffRule,
    excerpt: CString,
    correlation: CString,
}

/// An owned, immutable list of findings.
pub struct SniffFindings {
    rows: Vec<FindingRow>,
}

impl SniffFindings {
    fn from_findings(findings: &[Finding]) -> Self {
        let rows = findings
            .iter()
            .map(|f| FindingRow {
                secret_id: CString::new(f.secret_id.replace('\0', " ")).unwrap_or_default(),
                path: CString::new(f.path.replace('\0', " ")).unwrap_or_default(),
                line: f.line,
                column: f.column,
                byte_start: f.byte_start,
                byte_end: f.byte_end,
                rule: match f.rule {
                    RuleKind::Pattern => SniffRule::SniffRulePattern,
                    RuleKind::HashToken => SniffRule::SniffRuleHashToken,
                },
                excerpt: CString::new(f.excerpt.replace('\0', " ")).unwrap_or_default(),
                correlation: CString::new(f.correlation.clone()).unwrap_or_default(),
            })
            .collect();
        Self { rows }
    }
}

/// Frees a findings handle. NULL is a no-op.
///
/// # Safety
/// `findings` must be a handle returned by a scan/check call, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sniff_findings_free(findings: *mut SniffFindings) {
    if !findings.is_null() {
        drop(Box::from_raw(findings));
    }
}

/// Number of findings in the list (0 for NULL).
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_findings_len(findings: *const SniffFindings) -> usize {
    if findings.is_null() {
        return 0;
    }
    (*findings).rows.len()
}

unsafe fn row<'a>(findings: *const SniffFindings, index: usize) -> Option<&'a FindingRow> {
    findings.as_ref()?.rows.get(index)
}

/// Secret id of finding `index`, or NULL when out of range. Borrowed from
/// the handle.
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_secret_id(
    findings: *const SniffFindings,
    index: usize,
) -> *const c_char {
    row(findings, index).map_or(std::ptr::null(), |r| r.secret_id.as_ptr())
}

/// Path of finding `index`, or NULL when out of range.
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_path(
    findings: *const SniffFindings,
    index: usize,
) -> *const c_char {
    row(findings, index).map_or(std::ptr::null(), |r| r.path.as_ptr())
}

/// Redacted excerpt of finding `index`, or NULL when out of range.
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_excerpt(
    findings: *const SniffFindings,
    index: usize,
) -> *const c_char {
    row(findings, index).map_or(std::ptr::null(), |r| r.excerpt.as_ptr())
}

/// Correlation tag of finding `index`, or NULL when out of range.
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_correlation(
    findings: *const SniffFindings,
    index: usize,
) -> *const c_char {
    row(findings, index).map_or(std::ptr::null(), |r| r.correlation.as_ptr())
}

/// 1-based line of finding `index` (0 when out of range).
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_line(findings: *const SniffFindings, index: usize) -> usize {
    row(findings, index).map_or(0, |r| r.line)
}

/// 1-based column of finding `index` (0 when out of range).
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_column(
    findings: *const SniffFindings,
    index: usize,
) -> usize {
    row(findings, index).map_or(0, |r| r.column)
}

/// Byte span start of finding `index` (0 when out of range).
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_byte_start(
    findings: *const SniffFindings,
    index: usize,
) -> u64 {
    row(findings, index).map_or(0, |r| r.byte_start)
}

/// Byte span end of finding `index` (0 when out of range).
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_byte_end(
    findings: *const SniffFindings,
    index: usize,
) -> u64 {
    row(findings, index).map_or(0, |r| r.byte_end)
}

/// Rule kind of finding `index` (pattern when out of range).
///
/// # Safety
/// `findings` must be a live findings handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sniff_finding_rule(
    findings: *const SniffFindings,
    index: usize,
) -> SniffRule {
    row(findings, index).map_or(SniffRule::SniffRulePattern, |r| r.rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::fs;
    use std::path::Path;
    use std::ptr;

    const PEPPER_HEX: &str = "1111111111111111111111111111111111111111111111111111111111111111";

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn write_store(dir: &Path, value: &str) -> CString {
        let path = dir.join("secrets.json");
        fs::write(
            &path,
            format!(r#"{{"secrets": [{{"id": "k", "value": "{value}"}}]}}"#),
        )
        .unwrap();
        c(path.to_str().unwrap())
    }

    #[test]
    fn engine_scan_tree_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let store_path = write_store(dir.path(), "sekrit99value");
        let tree = dir.path().join("tree");
        fs::create_dir_all(&tree).unwrap();
        fs::write(tree.join("a.txt"), "x = sekrit99value;\n").unwrap();

        unsafe {
            let mut engine: *mut SniffEngine = ptr::null_mut();
            let status = sniff_engine_open(store_path.as_ptr(), ptr::null(), &mut engine);
            assert_eq!(status, SniffStatusOk);
            assert_eq!(sniff_engine_pattern_count(engine), 1);

            let root = c(tree.to_str().unwrap());
            let mut findings: *mut SniffFindings = ptr::null_mut();
            let status = sniff_engine_scan_tree(engine, root.as_ptr(), &mut findings);
            assert_eq!(status, SniffStatusOk);
            assert_eq!(sniff_findings_len(findings), 1);

            let id = CStr::from_ptr(sniff_finding_secret_id(findings, 0));
            assert_eq!(id.to_str().unwrap(), "k");
            let path = CStr::from_ptr(sniff_finding_path(findings, 0));
            assert_eq!(path.to_str().unwrap(), "a.txt");
            assert_eq!(sniff_finding_line(findings, 0), 1);
            assert_eq!(sniff_finding_column(findings, 0), 5);
            assert_eq!(sniff_finding_rule(findings, 0), SniffRule::SniffRulePattern);
            let excerpt = CStr::from_ptr(sniff_finding_excerpt(findings, 0));
            assert!(!excerpt.to_str().unwrap().contains("sekrit99value"));

            // out of range is well-defined
            assert!(sniff_finding_secret_id(findings, 9).is_null());
            assert_eq!(sniff_finding_line(findings, 9), 0);

            sniff_findings_free(findings);
            sniff_engine_close(engine);
        }
    }

    #[test]
    fn engine_scan_bytes_finds_interrupted() {
        let dir = tempfile::tempdir().unwrap();
        let store_path = write_store(dir.path(), "sekrit99value");
        unsafe {
            let mut engine: *mut SniffEngine = ptr::null_mut();
            assert_eq!(
                sniff_engine_open(store_path.as_ptr(), ptr::null(), &mut engine),
                SniffStatusOk
            );
            let text = b"k = \"sekrit\" + \"99value\"";
            let mut findings: *mut SniffFindings = ptr::null_mut();
            assert_eq!(
                sniff_engine_scan_bytes(engine, text.as_ptr(), text.len(), &mut findings),
                SniffStatusOk
            );
            assert_eq!(sniff_findings_len(findings), 1);
            let excerpt = CStr::from_ptr(sniff_finding_excerpt(findings, 0));
            assert!(!excerpt.to_str().unwrap().contains("sekrit"));
            sniff_findings_free(findings);
            sniff_engine_close(engine);
        }
    }

    #[test]
    fn checker_detects_and_validates_pepper() {
        let dir = tempfile::tempdir().unwrap();
        let store = secretsniff::secrets::SecretStore::new(
            vec![secretsniff::secrets::Secret {
                id: "k".into(),
                value: "sekrit99value".into(),
                tags: vec![],
            }],
            "t",
        )
        .unwrap();
        let pepper = Pepper::from_hex(PEPPER_HEX).unwrap();
        let (cache, _) = secretsniff::hashcache::build_cache(&store, &pepper);
        let cache_path = dir.path().join("cache.json");
        secretsniff::hashcache::save_cache(&cache, &cache_path).unwrap();
        let cache_c = c(cache_path.to_str().unwrap());
        let pepper_c = c(PEPPER_HEX);
        let wrong_pepper = c("2222222222222222222222222222222222222222222222222222222222222222");

        unsafe {
            // wrong pepper refuses to open
            let mut checker: *mut SniffChecker = ptr::null_mut();
            assert_eq!(
                sniff_checker_open(cache_c.as_ptr(), wrong_pepper.as_ptr(), &mut checker),
                SniffStatusConfig
            );
            let msg = CStr::from_ptr(sniff_last_error()).to_str().unwrap().to_string();
            assert!(msg.contains("does not match"), "{msg}");

            assert_eq!(
                sniff_checker_open(cache_c.as_ptr(), pepper_c.as_ptr(), &mut checker),
                SniffStatusOk
            );
            let diff = b"--- a/f\n+++ b/f\n@@ -1,0 +1,1 @@\n+pw = \"sekrit99value\"\n";
            let rev = c("r1");
            let mut findings: *mut SniffFindings = ptr::null_mut();
            assert_eq!(
                sniff_checker_check_diff(
                    checker,
                    diff.as_ptr(),
                    diff.len(),
                    rev.as_ptr(),
                    &mut findings
                ),
                SniffStatusOk
            );
            assert_eq!(sniff_findings_len(findings), 1);
            assert_eq!(
                sniff_finding_rule(findings, 0),
                SniffRule::SniffRuleHashToken
            );
            sniff_findings_free(findings);

            // malformed diff is a parse error with a located message
            let broken = b"--- a/f\n+++ b/f\n@@ -1,5 +1,5 @@\n x\n";
            let mut findings2: *mut SniffFindings = ptr::null_mut();
            assert_eq!(
                sniff_checker_check_diff(
                    checker,
                    broken.as_ptr(),
                    broken.len(),
                    rev.as_ptr(),
                    &mut findings2
                ),
                SniffStatusParse
            );
            let msg = CStr::from_ptr(sniff_last_error()).to_str().unwrap().to_string();
            assert!(msg.contains("line "), "{msg}");

            sniff_checker_close(checker);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut engine: *mut SniffEngine = ptr::null_mut();
            assert_eq!(
                sniff_engine_open(ptr::null(), ptr::null(), &mut engine),
                SniffStatusBadArgument
            );
            let path = c("x");
            assert_eq!(
                sniff_engine_open(path.as_ptr(), ptr::null(), ptr::null_mut()),
                SniffStatusBadArgument
            );
            assert_eq!(sniff_findings_len(ptr::null()), 0);
            sniff_engine_close(ptr::null_mut());
            sniff_findings_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_is_a_c_string() {
        unsafe {
            let v = CStr::from_ptr(sniff_version()).to_str().unwrap();
            assert!(!v.is_empty());
        }
    }
}

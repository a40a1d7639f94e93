//! Finding serialization and alert delivery.
//!
//! Reports exist in three formats: a line-oriented human format, a single
//! JSON document, and JSONL (one finding per line plus a trailing summary
//! object). Alerts are the JSON document POSTed to a webhook — detection
//! notifies incident responders, it never blocks anyone; exit codes let an
//! outer CI layer make the blocking call if it wants to.

use std::str::FromStr;
use std::time::{Duration, Instant};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::finding::Finding;
use crate::scan::{ScanReport, SkippedFile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Json,
    Jsonl,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" => Ok(Self::Human),
            "json" => Ok(Self::Json),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(format!("unknown format {other:?} (expected human, json, or jsonl)")),
        }
    }
}

/// What was sniffed: a tree scan or a differential revision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    Scan { root: String },
    Revision { id: String },
}

impl Subject {
    fn kind(&self) -> &'static str {
        match self {
            Subject::Scan { .. } => "scan",
            Subject::Revision { .. } => "revision",
        }
    }

    fn id(&self) -> &str {
        match self {
            Subject::Scan { root } => root,
            Subject::Revision { id } => id,
        }
    }
}

/// Everything a report or alert needs, assembled by the caller so that
/// serialization itself is a pure function.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub subject: Subject,
    pub findings: Vec<Finding>,
    pub files_scanned: Option<usize>,
    pub files_skipped: Option<Vec<SkippedFile>>,
    pub emitted_at: DateTime<Utc>,
}

impl Outcome {
    pub fn from_scan(report: &ScanReport) -> Self {
        Self {
            subject: Subject::Scan {
                root: report.root.display().to_string(),
            },
            findings: report.findings.clone(),
            files_scanned: Some(report.files_scanned),
            files_skipped: Some(report.files_skipped.clone()),
            emitted_at: Utc::now(),
        }
    }

    pub fn from_revision(id: impl Into<String>, findings: Vec<Finding>) -> Self {
        Self {
            subject: Subject::Revision { id: id.into() },
            findings,
            files_scanned: None,
            files_skipped: None,
            emitted_at: Utc::now(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingDoc {
    pub secret_id: String,
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub rule: String,
    pub correlation: String,
    pub excerpt: String,
}

impl From<&Finding> for FindingDoc {
    fn from(f: &Finding) -> Self {
        Self {
            secret_id: f.secret_id.clone(),
            path: f.path.clone(),
            line: f.line,
            column: f.column,
            rule: f.rule.as_str().to_string(),
            correlation: f.correlation.clone(),
            excerpt: f.excerpt.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectDoc {
    pub kind: String,
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedDoc {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub tool_version: String,
    pub emitted_at: String,
    pub subject: SubjectDoc,
    pub findings: Vec<FindingDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub files_scanned: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub files_skipped: Option<Vec<SkippedDoc>>,
}

impl ReportDoc {
    fn from_outcome(outcome: &Outcome) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            emitted_at: outcome
                .emitted_at
                .to_rfc3339_opts(SecondsFormat::Secs, true),
            subject: SubjectDoc {
                kind: outcome.subject.kind().to_string(),
                id: outcome.subject.id().to_string(),
            },
            findings: outcome.findings.iter().map(FindingDoc::from).collect(),
            files_scanned: outcome.files_scanned,
            files_skipped: outcome.files_skipped.as_ref().map(|skips| {
                skips
                    .iter()
                    .map(|s| SkippedDoc {
                        path: s.path.clone(),
                        reason: s.reason.clone(),
                    })
                    .collect()
            }),
        }
    }
}

/// Serializes an outcome. Deterministic for a fixed outcome (the timestamp
/// is part of the outcome, not sampled here).
pub fn emit_report(outcome: &Outcome, format: ReportFormat) -> String {
    match format {
        ReportFormat::Human => {
            let mut out = String::new();
            for f in &outcome.findings {
                out.push_str(&format!(
                    "{}:{}:{} {} {} {}\n",
                    f.path, f.line, f.column, f.secret_id, f.rule, f.correlation
                ));
            }
            out
        }
        ReportFormat::Json => {
            let doc = ReportDoc::from_outcome(outcome);
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Jsonl => {
            let doc = ReportDoc::from_outcome(outcome);
            let mut out = String::new();
            for f in &doc.findings {
                out.push_str(&serde_json::to_string(f).expect("finding serializes"));
                out.push('\n');
            }
            let summary = serde_json::json!({
                "summary": {
                    "tool_version": doc.tool_version,
                    "emitted_at": doc.emitted_at,
                    "subject": doc.subject,
                    "findings": doc.findings.len(),
                    "files_scanned": doc.files_scanned,
                    "files_skipped": doc.files_skipped.as_ref().map(|s| s.len()),
                }
            });
            out.push_str(&summary.to_string());
            out.push('\n');
            out
        }
    }
}

/// Alert content: all redacted, safe to hand to any incident tooling.
#[derive(Debug, Clone)]
pub struct AlertPayload {
    doc: ReportDoc,
}

impl AlertPayload {
    pub fn new(outcome: &Outcome) -> Self {
        Self {
            doc: ReportDoc::from_outcome(outcome),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.doc).expect("alert serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeliveryOutcome {
    /// 2xx from the webhook.
    Delivered,
    /// 4xx: the receiver refused; retrying would not help.
    Rejected,
    /// Connection failures or 5xx on every attempt.
    Failed,
}

#[derive(Debug, Clone)]
pub struct DeliveryResult {
    pub outcome: DeliveryOutcome,
    pub status: Option<u16>,
    pub attempts: u32,
    pub latency: Duration,
    pub error: Option<String>,
}

impl DeliveryResult {
    pub fn delivered(&self) -> bool {
        self.outcome == DeliveryOutcome::Delivered
    }
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_backoff: Duration::from_millis(200),
        }
    }
}

/// POSTs the alert to `webhook_url`, retrying connection failures and 5xx
/// with exponential backoff. 4xx is final (recorded, not raised).
pub fn send_alert(payload: &AlertPayload, webhook_url: &str, timeout: Duration) -> DeliveryResult {
    send_alert_with_policy(payload, webhook_url, timeout, &RetryPolicy::default())
}

pub fn send_alert_with_policy(
    payload: &AlertPayload,
    webhook_url: &str,
    timeout: Duration,
    policy: &RetryPolicy,
) -> DeliveryResult {
    let started = Instant::now();
    let body = payload.to_json();
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .http_status_as_error(false)
        .build()
        .into();

    let mut last_status: Option<u16> = None;
    let mut last_error: Option<String> = None;
    let mut attempts = 0u32;
    while attempts < policy.max_attempts {
        attempts += 1;
        match agent
            .post(webhook_url)
            .header("content-type", "application/json")
            .send(body.as_bytes())
        {
            Ok(resp) => {
                let status = resp.status().as_u16();
                last_status = Some(status);
                if (200..300).contains(&status) {
                    return DeliveryResult {
                        outcome: DeliveryOutcome::Delivered,
                        status: last_status,
                        attempts,
                        latency: started.elapsed(),
                        error: None,
                    };
                }
                if (400..500).contains(&status) {
                    return DeliveryResult {
                        outcome: DeliveryOutcome::Rejected,
                        status: last_status,
                        attempts,
                        latency: started.elapsed(),
                        error: None,
                    };
                }
                // 5xx and anything else: retry
            }
            Err(e) => {
                last_error = Some(e.to_string());
            }
        }
        if attempts < policy.max_attempts {
            let backoff = policy.base_backoff * 2u32.saturating_pow(attempts - 1);
            std::thread::sleep(backoff);
        }
    }
    DeliveryResult {
        outcome: DeliveryOutcome::Failed,
        status: last_status,
        attempts,
        latency: started.elapsed(),
        error: last_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finding::RuleKind;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn sample_finding() -> Finding {
        Finding {
            secret_id: "db-pass".into(),
            path: "src/a.txt".into(),
            line: 3,
            column: 5,
            byte_start: 20,
            byte_end: 32,
            rule: RuleKind::Pattern,
            excerpt: "x = «REDACTED»".into(),
            correlation: "1a2b3c4d".into(),
        }
    }

    fn outcome_with(findings: Vec<Finding>) -> Outcome {
        Outcome {
            subject: Subject::Scan {
                root: "/repo".into(),
            },
            findings,
            files_scanned: Some(3),
            files_skipped: Some(vec![]),
            emitted_at: DateTime::from_timestamp(1_700_000_000, 0).unwrap(),
        }
    }

    #[test]
    fn human_format_one_line_per_finding() {
        let out = emit_report(&outcome_with(vec![sample_finding()]), ReportFormat::Human);
        assert_eq!(out, "src/a.txt:3:5 db-pass pattern 1a2b3c4d\n");
    }

    #[test]
    fn json_format_roundtrips() {
        let out = emit_report(&outcome_with(vec![]), ReportFormat::Json);
        let doc: ReportDoc = serde_json::from_str(&out).unwrap();
        assert_eq!(doc.subject.kind, "scan");
        assert_eq!(doc.findings.len(), 0);
        assert_eq!(doc.files_scanned, Some(3));
        let again = serde_json::to_string_pretty(&doc).unwrap();
        assert_eq!(out.trim_end(), again);
    }

    #[test]
    fn jsonl_format_lines_plus_summary() {
        let out = emit_report(
            &outcome_with(vec![sample_finding(), sample_finding()]),
            ReportFormat::Jsonl,
        );
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        let f: FindingDoc = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(f.secret_id, "db-pass");
        let summary: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
        assert_eq!(summary["summary"]["findings"], 2);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("human".parse::<ReportFormat>(), Ok(ReportFormat::Human));
        assert_eq!("json".parse::<ReportFormat>(), Ok(ReportFormat::Json));
        assert_eq!("jsonl".parse::<ReportFormat>(), Ok(ReportFormat::Jsonl));
        assert!("xml".parse::<ReportFormat>().is_err());
    }

    /// Minimal webhook endpoint: answers each request with the next queued
    /// status code and counts hits.
    fn spawn_server(statuses: Vec<u16>) -> (String, Arc<AtomicUsize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicUsize::new(0));
        let hits2 = hits.clone();
        std::thread::spawn(move || {
            for (i, stream) in listener.incoming().enumerate() {
                let Ok(stream) = stream else { break };
                let status = statuses.get(i).copied().unwrap_or(200);
                hits2.fetch_add(1, Ordering::SeqCst);
                let mut reader = BufReader::new(stream);
                let mut content_length = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).is_err() || line.trim().is_empty() {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        content_length = v.trim().parse().unwrap_or(0);
                    }
                }
                let mut body = vec![0u8; content_length];
                let _ = reader.read_exact(&mut body);
                let mut stream = reader.into_inner();
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\ncontent-length: 0\r\nconnection: close\r\n\r\n"
                );
                if i + 1 >= statuses.len() {
                    break;
                }
            }
        });
        (format!("http://{addr}/hook"), hits)
    }

    fn fast_policy() -> RetryPolicy {
        RetryPolicy {
            max_attempts: 3,
            base_backoff: Duration::from_millis(5),
        }
    }

    #[test]
    fn alert_delivered_on_200() {
        let (url, hits) = spawn_server(vec![200]);
        let payload = AlertPayload::new(&outcome_with(vec![sample_finding()]));
        let res = send_alert_with_policy(&payload, &url, Duration::from_secs(2), &fast_policy());
        assert_eq!(res.outcome, DeliveryOutcome::Delivered);
        assert_eq!(res.status, Some(200));
        assert_eq!(hits.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn alert_retries_5xx_then_delivers() {
        let (url, hits) = spawn_server(vec![500, 500, 200]);
        let payload = AlertPayload::new(&outcome_with(vec![sample_finding()]));
        let res = send_alert_with_policy(&payload, &url, Duration::from_secs(2), &fast_policy());
        assert_eq!(res.outcome, DeliveryOutcome::Delivered);
        assert_eq!(res.attempts, 3);
        assert_eq!(hits.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn alert_4xx_is_rejected_without_retry() {
        let (url, hits) = spawn_server(vec![400, 200, 200]);
        let payload = AlertPayload::new(&outcome_with(vec![sample_finding()]));
        let res = send_alert_with_policy(&payload, &url, Duration::from_secs(2), &fast_policy());
        assert_eq!(res.outcome, DeliveryOutcome::Rejected);
        assert_eq!(res.status, Some(400));
        assert_eq!(res.attempts, 1);
        assert_eq!(hits.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn alert_unreachable_fails_after_attempts() {
        // a port that nothing listens on
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        drop(listener);
        let payload = AlertPayload::new(&outcome_with(vec![sample_finding()]));
        let res = send_alert_with_policy(
            &payload,
            &format!("http://{addr}/hook"),
            Duration::from_secs(1),
            &fast_policy(),
        );
        assert_eq!(res.outcome, DeliveryOutcome::Failed);
        assert_eq!(res.attempts, 3);
    }
}

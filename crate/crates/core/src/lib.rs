//! Leak detection backed by known production secrets.
//!
//! Two detection paths share this crate:
//!
//! - a whole-tree sniffer that compiles every known secret into an
//!   interruption-tolerant pattern and streams file contents through the
//!   matcher ([`pattern`], [`scan`]), and
//! - a differential revision sniffer that never touches raw secrets at
//!   detection time: it keeps a cache of peppered digests, tokenizes the
//!   added lines of a unified diff, and flags any token whose digest is in
//!   the cache ([`diff`], [`hashcache`]).
//!
//! Findings from both paths are redacted records ([`finding`]) that can be
//! serialized for humans or machines and pushed to an incident webhook
//! ([`report`]). The `secretsniff` binary wires the pieces into the
//! `build-cache`, `scan`, `check-diff`, and `watch` commands ([`cli`]).

pub mod cli;
pub mod config;
pub mod diff;
pub mod finding;
pub mod hashcache;
pub mod pattern;
pub mod report;
pub mod scan;
pub mod secrets;

//! Known-secret ingestion from a file-backed store.
//!
//! The store file is a stand-in for a real secret manager pull; anything
//! that can produce the same document (or implement [`SecretSource`]) can
//! feed the sniffers. Secrets are referenced by id everywhere outside this
//! module — error messages and reports never carry the raw value.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Deserialize;
use thiserror::Error;

/// A single known secret. `id` is the only part that may appear in logs,
/// errors, or reports.
#[derive(Clone, PartialEq, Eq)]
pub struct Secret {
    pub id: String,
    pub value: String,
    pub tags: Vec<String>,
}

impl Secret {
    /// Value length in characters, the unit used by the pattern-length guard.
    pub fn value_chars(&self) -> usize {
        self.value.chars().count()
    }
}

// Debug must not leak the value; secrets end up in test failure output.
impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Secret")
            .field("id", &self.id)
            .field("value", &"«REDACTED»")
            .field("tags", &self.tags)
            .finish()
    }
}

/// Immutable collection of known secrets. Safe to share across threads once
/// loaded; refresh is a re-load, not an in-place mutation.
#[derive(Debug, Clone)]
pub struct SecretStore {
    secrets: Vec<Secret>,
    source_label: String,
    loaded_at: DateTime<Utc>,
}

impl SecretStore {
    /// Builds a store from already-validated entries, enforcing the same
    /// invariants as [`load_secrets`].
    pub fn new(secrets: Vec<Secret>, source_label: impl Into<String>) -> Result<Self, StoreError> {
        let mut seen = HashSet::new();
        for (index, secret) in secrets.iter().enumerate() {
            validate_entry(secret, index)?;
            if !seen.insert(secret.id.clone()) {
                return Err(StoreError::DuplicateId {
                    id: secret.id.clone(),
                });
            }
        }
        Ok(Self {
            secrets,
            source_label: source_label.into(),
            loaded_at: Utc::now(),
        })
    }

    pub fn secrets(&self) -> &[Secret] {
        &self.secrets
    }

    pub fn len(&self) -> usize {
        self.secrets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.secrets.is_empty()
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn loaded_at(&self) -> DateTime<Utc> {
        self.loaded_at
    }

    pub fn get(&self, id: &str) -> Option<&Secret> {
        self.secrets.iter().find(|s| s.id == id)
    }
}

/// Where secrets come from. The file store below is the only built-in
/// implementation; a live secret-manager client would slot in here.
pub trait SecretSource {
    fn load(&self) -> Result<SecretStore, StoreError>;
}

/// File-backed [`SecretSource`].
pub struct FileSecretSource {
    path: PathBuf,
}

impl FileSecretSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }
}

impl SecretSource for FileSecretSource {
    fn load(&self) -> Result<SecretStore, StoreError> {
        load_secrets(&self.path)
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read secret store {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed secret store {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("duplicate secret id {id:?}")]
    DuplicateId { id: String },
    #[error("secret entry {index} has an empty id")]
    EmptyId { index: usize },
    #[error("secret {id:?} has an empty value")]
    EmptyValue { id: String },
    #[error("secret {id:?} has a value containing a newline; multi-line secrets are not supported")]
    MultilineValue { id: String },
}

// Wire format of the store file. Unknown keys are rejected so an operator
// typo (`vlaue`) fails loudly instead of silently dropping a secret.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreDoc {
    secrets: Vec<EntryDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    id: String,
    value: String,
    #[serde(default)]
    tags: Vec<String>,
}

fn validate_entry(secret: &Secret, index: usize) -> Result<(), StoreError> {
    if secret.id.is_empty() {
        return Err(StoreError::EmptyId { index });
    }
    if secret.value.is_empty() {
        return Err(StoreError::EmptyValue {
            id: secret.id.clone(),
        });
    }
    if secret.value.contains('\n') || secret.value.contains('\r') {
        return Err(StoreError::MultilineValue {
            id: secret.id.clone(),
        });
    }
    Ok(())
}

/// Loads and validates a secret store file. Deterministic: the same file
/// bytes always produce the same entries (only `loaded_at` differs).
pub fn load_secrets(path: &Path) -> Result<SecretStore, StoreError> {
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: StoreDoc = serde_json::from_str(&text).map_err(|e| StoreError::Malformed {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let secrets = doc
        .secrets
        .into_iter()
        .map(|e| Secret {
            id: e.id,
            value: e.value,
            tags: e.tags,
        })
        .collect();
    let mut store = SecretStore::new(secrets, path.display().to_string())?;
    store.loaded_at = Utc::now();
    Ok(store)
}

/// Splits a store into secrets long enough for pattern matching and the ids
/// of those that are not. Length is measured in characters.
pub fn filter_by_min_length(store: &SecretStore, min_len: usize) -> (SecretStore, Vec<String>) {
    debug_assert!(min_len >= 1);
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for secret in store.secrets() {
        if secret.value_chars() >= min_len {
            kept.push(secret.clone());
        } else {
            excluded.push(secret.id.clone());
        }
    }
    let filtered = SecretStore {
        secrets: kept,
        source_label: store.source_label.clone(),
        loaded_at: store.loaded_at,
    };
    (filtered, excluded)
}

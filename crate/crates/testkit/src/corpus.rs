//! Synthetic scan corpora with recorded ground truth.
//!
//! Files are filled with random printable text and secrets are planted at
//! known offsets, either verbatim or interrupted with admissible filler.
//! Each plant is fenced with `#` guard runs so no match can bleed across
//! its boundary, which keeps the recorded offsets exact.

use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SECRET_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
// interruption filler disjoint from the secret alphabet
const NONWS_FILLER: &[u8] = b"()<>[]{}|;:'\"\\*,?";
const WS_FILLER: &[u8] = b" \t";
const GUARD: &[u8] = b"########";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSecret {
    pub id: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plant {
    pub rel_path: String,
    pub secret_id: String,
    pub byte_start: u64,
    pub byte_end: u64,
    pub interrupted: bool,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random alphanumeric secrets with unique ids.
pub fn gen_secrets(
    rng: &mut ChaCha8Rng,
    count: usize,
    min_len: usize,
    max_len: usize,
) -> Vec<TestSecret> {
    (0..count)
        .map(|i| {
            let len = rng.gen_range(min_len..=max_len);
            let value: String = (0..len)
                .map(|_| *SECRET_ALPHABET.choose(rng).unwrap() as char)
                .collect();
            TestSecret {
                id: format!("secret-{i:03}"),
                value,
            }
        })
        .collect()
}

/// Serializes secrets in the store file format.
pub fn store_json(secrets: &[TestSecret]) -> String {
    let entries: Vec<serde_json::Value> = secrets
        .iter()
        .map(|s| serde_json::json!({"id": s.id, "value": s.value}))
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "secrets": entries })).unwrap()
}

pub fn write_store(path: &Path, secrets: &[TestSecret]) -> io::Result<()> {
    fs::write(path, store_json(secrets))
}

/// Random line-oriented filler that cannot contain an alphanumeric secret of
/// any useful length by accident (checked by the caller's oracle screens).
/// One bulk-generated random byte drives each output byte so gigabyte-scale
/// corpora assemble in seconds.
fn push_filler(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, bytes: usize) {
    use rand::RngCore;
    let start = out.len();
    out.resize(start + bytes, 0);
    rng.fill_bytes(&mut out[start..]);
    let mut col = 0usize;
    for b in &mut out[start..] {
        let r = *b;
        if col > 60 && (r & 0x07) == 0 {
            *b = b'\n';
            col = 0;
            continue;
        }
        *b = if r < 31 {
            b' '
        } else {
            SECRET_ALPHABET[r as usize % SECRET_ALPHABET.len()]
        };
        col += 1;
    }
}

/// Renders one occurrence of `value`, optionally interrupted. Returns the
/// rendered bytes plus the offsets of the first and one-past-last secret
/// character within them.
pub fn render_plant(
    rng: &mut ChaCha8Rng,
    value: &str,
    interrupted: bool,
) -> (Vec<u8>, usize, usize) {
    let mut out = Vec::new();
    out.extend_from_slice(GUARD);
    let start = out.len();
    let chars: Vec<char> = value.chars().collect();
    for (i, c) in chars.iter().enumerate() {
        let mut buf = [0u8; 4];
        out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
        let is_last = i + 1 == chars.len();
        if interrupted && !is_last && rng.gen_bool(0.35) {
            let nonws = rng.gen_range(0..=5usize);
            let ws = rng.gen_range(0..=2usize);
            let mut gap: Vec<u8> = Vec::new();
            gap.extend((0..nonws).map(|_| *NONWS_FILLER.choose(rng).unwrap()));
            gap.extend((0..ws).map(|_| *WS_FILLER.choose(rng).unwrap()));
            gap.shuffle(rng);
            out.extend_from_slice(&gap);
        }
    }
    let end = out.len();
    out.extend_from_slice(GUARD);
    (out, start, end)
}

#[derive(Debug, Clone)]
pub struct CorpusParams {
    pub seed: u64,
    pub file_count: usize,
    /// Approximate filler bytes per file, before plants.
    pub file_size: usize,
    /// Total planted occurrences across the tree.
    pub plants: usize,
}

/// Writes a corpus tree under `root` and returns the ground-truth plants.
/// Secrets are drawn round-robin so plant counts are reproducible.
pub fn write_corpus(
    root: &Path,
    params: &CorpusParams,
    secrets: &[TestSecret],
) -> io::Result<Vec<Plant>> {
    let mut rng = rng(params.seed);
    let dirs = ["", "src", "src/deep", "lib", "docs"];
    for d in dirs.iter().skip(1) {
        fs::create_dir_all(root.join(d))?;
    }

    // spread plants over distinct files
    let mut plant_files: Vec<usize> = (0..params.plants)
        .map(|i| i % params.file_count)
        .collect();
    plant_files.shuffle(&mut rng);

    let mut plants = Vec::new();
    let mut plant_no = 0usize;
    for file_idx in 0..params.file_count {
        let dir = dirs[file_idx % dirs.len()];
        let rel_path = if dir.is_empty() {
            format!("file{file_idx:04}.txt")
        } else {
            format!("{dir}/file{file_idx:04}.txt")
        };
        let n_here = plant_files.iter().filter(|&&f| f == file_idx).count();

        let mut content = Vec::with_capacity(params.file_size + n_here * 128);
        let seg = params.file_size / (n_here + 1).max(1);
        push_filler(&mut rng, &mut content, seg);
        for _ in 0..n_here {
            let secret = &secrets[plant_no % secrets.len()];
            let interrupted = plant_no % 2 == 1;
            let (rendered, s, e) = render_plant(&mut rng, &secret.value, interrupted);
            let base = content.len();
            content.extend_from_slice(&rendered);
            plants.push(Plant {
                rel_path: rel_path.clone(),
                secret_id: secret.id.clone(),
                byte_start: (base + s) as u64,
                byte_end: (base + e) as u64,
                interrupted,
            });
            plant_no += 1;
            push_filler(&mut rng, &mut content, seg);
        }
        fs::write(root.join(&rel_path), &content)?;
    }
    Ok(plants)
}

use std::time::Instant;
use secretsniff::scan::{scan_tree, ScanConfig};
use secretsniff::secrets::{Secret, SecretStore};
use secretsniff_testkit::corpus::{self, gen_secrets, CorpusParams};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = corpus::rng(1);
    let secrets = gen_secrets(&mut rng, 100, 16, 40);
    let store = SecretStore::new(
        secrets.iter().map(|s| Secret { id: s.id.clone(), value: s.value.clone(), tags: vec![] }).collect(),
        "bench",
    ).unwrap();
    let params = CorpusParams { seed: 2, file_count: 16, file_size: 4 * 1024 * 1024, plants: 5 };
    let t0 = Instant::now();
    corpus::write_corpus(dir.path(), &params, &secrets).unwrap();
    println!("gen: {:?}", t0.elapsed());
    let t1 = Instant::now();
    let report = scan_tree(dir.path(), &store, &ScanConfig::default(), None).unwrap();
    let mib = report.bytes_scanned as f64 / (1024.0 * 1024.0);
    println!("scan: {:?} for {:.0} MiB = {:.1} MiB/s, {} findings", t1.elapsed(), mib, mib / t1.elapsed().as_secs_f64(), report.findings.len());
}

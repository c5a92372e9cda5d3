//! Every checked-in fuzz seed goes through the parsers without panicking,
//! and the well-formed ones are accepted.

use std::fs;
use std::path::PathBuf;

use oco_core::bench::RegretTrace;
use oco_core::experiment::{ExperimentConfig, SweepConfig};

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn experiment_config_seeds() {
    for (name, bytes) in corpus("experiment_config") {
        let parsed = ExperimentConfig::from_json_str(std::str::from_utf8(&bytes).unwrap());
        assert_eq!(parsed.is_ok(), !name.starts_with("missing"), "{name}: {parsed:?}");
    }
}

#[test]
fn sweep_config_seeds() {
    for (name, bytes) in corpus("sweep_config") {
        let parsed = SweepConfig::from_json_str(std::str::from_utf8(&bytes).unwrap());
        assert!(parsed.is_ok(), "{name}: {parsed:?}");
    }
}

#[test]
fn trace_csv_seeds() {
    for (name, bytes) in corpus("trace_csv") {
        let parsed = RegretTrace::read_csv(bytes.as_slice());
        assert_eq!(parsed.is_ok(), !name.starts_with("bad"), "{name}: {parsed:?}");
    }
}

#![no_main]

use libfuzzer_sys::fuzz_target;
use oco_core::experiment::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::from_json_str(text) {
            // Accepted configs must round-trip and hash deterministically.
            let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
            assert_eq!(cfg.hash(), again.hash());
        }
    }
});

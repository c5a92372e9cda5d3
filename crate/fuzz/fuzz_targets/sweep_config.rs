#![no_main]

use libfuzzer_sys::fuzz_target;
use oco_core::experiment::SweepConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = SweepConfig::from_json_str(text) {
            let points = cfg.points();
            assert_eq!(points.len(), cfg.grid.horizons.len());
            for p in &points {
                assert!(p.validate().is_ok());
            }
        }
    }
});

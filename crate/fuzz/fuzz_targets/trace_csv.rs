#![no_main]

use libfuzzer_sys::fuzz_target;
use oco_core::bench::RegretTrace;

fuzz_target!(|data: &[u8]| {
    if let Ok(trace) = RegretTrace::read_csv(data) {
        let text = trace.to_csv_string();
        let back = RegretTrace::read_csv(text.as_bytes()).expect("written traces parse");
        assert_eq!(back.rows(), trace.rows());
    }
});

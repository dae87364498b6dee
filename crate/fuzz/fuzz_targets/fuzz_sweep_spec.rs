#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = vcdn::cli::parse_sweep(text) {
        assert!(!values.is_empty());
        assert!(values.iter().all(|&v| v >= 1));
    }
});

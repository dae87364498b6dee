#![no_main]

use std::io::Write;

use libfuzzer_sys::fuzz_target;

// The report reader must reject arbitrary CSV gracefully, never panic.
fuzz_target!(|data: &[u8]| {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(data).expect("write");
    let _ = vcdn::cli::report(file.path());
});

#![no_main]

use libfuzzer_sys::fuzz_target;

// Scenario JSON parsing must never panic, and anything it accepts must
// survive a serialize/parse round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scenario) = vcdn::Scenario::parse(text) {
        let json = scenario.to_json();
        let again = vcdn::Scenario::parse(&json).expect("round trip");
        assert_eq!(scenario, again);
    }
});

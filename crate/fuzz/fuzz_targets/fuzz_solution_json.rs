#![no_main]

use libfuzzer_sys::fuzz_target;
use vcdn::PlacementSolution;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sol) = PlacementSolution::from_json(text) {
        let json = sol.to_json();
        let again = PlacementSolution::from_json(&json).expect("round trip");
        assert_eq!(sol, again);
    }
});

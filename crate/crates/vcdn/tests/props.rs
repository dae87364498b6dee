//! Property tests for the parsing/serialization boundaries.

use proptest::prelude::*;

use vcdn::Rat;

proptest! {
    // Exact rationals survive the JSON boundary bit-for-bit.
    #[test]
    fn rational_json_round_trip(numer in -1_000_000i64..1_000_000, denom in 1i64..10_000) {
        let value = Rat::new(numer, denom);
        let json = serde_json::to_string(&value).unwrap();
        let back: Rat = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(value, back);
    }

    // Decimal text parses to the exact fraction it denotes.
    #[test]
    fn decimal_text_parses_exactly(int_part in 0i64..100_000, frac in 0u32..1000u32) {
        let text = format!("{int_part}.{frac:03}");
        let parsed = Rat::parse(&text).unwrap();
        let expected = Rat::int(int_part) + Rat::new(frac as i64, 1000);
        prop_assert_eq!(parsed, expected);
    }

    // Sweep parsing accepts exactly the inclusive ranges it documents.
    #[test]
    fn sweep_range_is_inclusive(a in 1usize..50, len in 0usize..50) {
        let b = a + len;
        let values = vcdn::cli::parse_sweep(&format!("{a}..{b}")).unwrap();
        prop_assert_eq!(values.len(), len + 1);
        prop_assert_eq!(values[0], a);
        prop_assert_eq!(*values.last().unwrap(), b);
    }

    // Arbitrary junk must be rejected, not panic.
    #[test]
    fn sweep_parser_never_panics(text in "\\PC{0,20}") {
        let _ = vcdn::cli::parse_sweep(&text);
    }
}

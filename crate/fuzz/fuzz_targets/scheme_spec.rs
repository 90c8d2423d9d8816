#![no_main]

use kepler_core::scoring::ScoreScheme;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(scheme) = s.parse::<ScoreScheme>() {
        let (a, b) = scheme.constants();
        assert!(a > 0.0 && b > 0.0);
        assert_eq!(scheme.to_string().parse::<ScoreScheme>().unwrap(), scheme);
    }
});

#![no_main]

use kepler_core::packing::{validate, Packing};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(p) = Packing::from_json(s) else { return };
    let back = Packing::from_json(&p.to_json().unwrap()).unwrap();
    assert_eq!(back, p);
    if p.len() <= 64 && p.domain.volume() <= 1e4 {
        let _ = validate(&p);
    }
});

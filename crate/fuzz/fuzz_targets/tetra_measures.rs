#![no_main]

use kepler_core::geometry::Tetra;
use kepler_core::scoring::{gamma_tetra, vor, vor_trunc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|lengths: [f64; 6]| {
    if lengths.iter().any(|l| !l.is_finite() || *l < 1.0 || *l > 4.0) {
        return;
    }
    let Ok(t) = Tetra::from_edge_lengths(lengths) else { return };
    if let Ok(g) = gamma_tetra(&t) {
        assert!(g.is_finite());
        let mut sum = 0.0;
        for k in 0..4 {
            let Ok(v) = vor(&t, k) else { return };
            sum += v;
            if let Ok((r, _)) = vor_trunc(&t, k, 1.255) {
                assert!(r.is_finite());
            }
        }
        assert!((sum - 4.0 * g).abs() <= 1e-6 * (1.0 + g.abs()));
    }
});

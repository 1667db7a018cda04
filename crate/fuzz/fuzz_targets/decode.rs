#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde::analysis::{decode_phase, resolution};

fuzz_target!(|data: &[u8]| {
    if data.len() < 17 {
        return;
    }
    let bin = u64::from_le_bytes(data[..8].try_into().unwrap()) as usize;
    let na = data[8] as usize;
    let t = f64::from_le_bytes(data[9..17].try_into().unwrap());
    if let Ok(g) = decode_phase(bin, na, t) {
        assert!(g.signed_phase.abs() <= 0.25);
        assert!((g.resolution - resolution(na, t)).abs() <= 1e-12 * g.resolution.abs());
    }
});

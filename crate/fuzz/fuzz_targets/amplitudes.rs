#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde::statevector::{RegisterLayout, StateVector};

fuzz_target!(|data: &[u8]| {
    let Some((&shape, bytes)) = data.split_first() else { return };
    let (na, ns) = ((shape >> 4) as usize % 4 + 1, (shape & 0x0f) as usize % 4 + 1);
    let layout = RegisterLayout::new(na, ns).unwrap();
    if let Ok(state) = StateVector::read_amplitudes(layout, bytes) {
        let mut out = Vec::new();
        state.write_amplitudes(&mut out).unwrap();
        assert_eq!(out, bytes);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde::fermion::DeterminantSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let norb = text.trim().chars().count();
    if let Ok(det) = DeterminantSpec::from_notation(text, norb) {
        let again = DeterminantSpec::from_notation(&det.notation(), norb).unwrap();
        assert_eq!(again, det);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde::pauli::PauliTerm;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(term) = PauliTerm::parse(text, 0.5) {
        let again = PauliTerm::parse(&term.string.to_string(), 0.5).unwrap();
        assert_eq!(again, term);
    }
});

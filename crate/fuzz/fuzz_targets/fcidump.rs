#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde::fcidump::parse_fcidump;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ints) = parse_fcidump(text) {
        assert!(ints.nelec <= 2 * ints.norb);
        for p in 0..ints.norb {
            for q in 0..ints.norb {
                assert_eq!(ints.one_body(p, q), ints.one_body(q, p));
            }
        }
    }
});

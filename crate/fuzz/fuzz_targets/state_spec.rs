#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde::state_prep::{build_pr_circuit, StateSpecFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = StateSpecFile::from_json(text) else { return };
    for norb in 1..=4 {
        if let Ok(spec) = file.resolve(norb) {
            build_pr_circuit(&spec).expect("validated specs have a preparation circuit");
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use qpde_cli::manifest::ManifestFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = ManifestFile::from_json(text) {
        // Resolution only touches the filesystem beneath an empty directory.
        let _ = m.resolve(std::path::Path::new("/nonexistent-qpde-fuzz"));
    }
});

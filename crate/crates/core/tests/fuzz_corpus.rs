//! Replays the checked-in fuzz seeds through the parsers so they stay valid
//! inputs and never panic.

use std::path::{Path, PathBuf};

use qpde::analysis::decode_phase;
use qpde::fcidump::parse_fcidump;
use qpde::fermion::DeterminantSpec;
use qpde::pauli::PauliTerm;
use qpde::state_prep::StateSpecFile;
use qpde::statevector::{RegisterLayout, StateVector};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn fcidump_seeds_parse() {
    for (p, b) in seeds("fcidump") {
        parse_fcidump(text(&b)).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn determinant_seeds_round_trip() {
    for (_, b) in seeds("determinant") {
        let s = text(&b);
        let norb = s.chars().count();
        let det = DeterminantSpec::from_notation(s, norb).unwrap();
        assert_eq!(DeterminantSpec::from_notation(&det.notation(), norb).unwrap(), det);
    }
}

#[test]
fn pauli_seeds_round_trip() {
    for (_, b) in seeds("pauli_term") {
        let term = PauliTerm::parse(text(&b), 1.0).unwrap();
        assert_eq!(term.string.to_string(), text(&b));
    }
}

#[test]
fn state_spec_seeds_resolve() {
    for (p, b) in seeds("state_spec") {
        let file = StateSpecFile::from_json(text(&b)).unwrap();
        assert!((1..=4).any(|norb| file.resolve(norb).is_ok()), "{}", p.display());
    }
}

#[test]
fn decode_seeds() {
    let mut ambiguous = 0;
    for (_, b) in seeds("decode") {
        let bin = u64::from_le_bytes(b[..8].try_into().unwrap()) as usize;
        let t = f64::from_le_bytes(b[9..17].try_into().unwrap());
        if decode_phase(bin, b[8] as usize, t).is_err() {
            ambiguous += 1;
        }
    }
    assert_eq!(ambiguous, 1);
}

#[test]
fn amplitude_seeds_round_trip() {
    for (_, b) in seeds("amplitudes") {
        let (shape, bytes) = b.split_first().unwrap();
        let layout = RegisterLayout::new((shape >> 4) as usize % 4 + 1, (shape & 0x0f) as usize % 4 + 1).unwrap();
        let state = StateVector::read_amplitudes(layout, bytes).unwrap();
        let mut out = Vec::new();
        state.write_amplitudes(&mut out).unwrap();
        assert_eq!(out, bytes);
    }
}

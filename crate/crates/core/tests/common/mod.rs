#![allow(dead_code)]

use std::path::{Path, PathBuf};

use qpde::analysis::{gap_report, oracle_gaps, reference_spectrum, spectral_decomposition, DecodeParams, GapReport, SpectrumReference};
use qpde::circuits::{run_circuit, CircuitMode, CircuitRunConfig};
use qpde::evolution::{EvolutionPath, EvolutionSpec};
use qpde::fcidump::{parse_fcidump, MolecularIntegrals};
use qpde::fermion::{build_fermion_hamiltonian, jordan_wigner, DeterminantSpec};
use qpde::pauli::{PauliSum, PauliTerm};
use qpde::state_prep::SuperpositionSpec;
use qpde::statevector::{OutcomeDistribution, RegisterLayout};

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn integrals(name: &str) -> MolecularIntegrals {
    parse_fcidump(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

pub fn hamiltonian(name: &str) -> PauliSum {
    jordan_wigner(&build_fermion_hamiltonian(&integrals(name))).unwrap()
}

pub fn det(notation: &str) -> DeterminantSpec {
    DeterminantSpec::from_notation(notation, notation.len()).unwrap()
}

pub fn single(notation: &str) -> SuperpositionSpec {
    SuperpositionSpec::single(det(notation))
}

/// Two-qubit Hamiltonian diagonal in the computational basis.
pub fn diagonal_toy(c0: f64, c1: f64, c01: f64, constant: f64) -> PauliSum {
    PauliSum::new(
        2,
        vec![
            PauliTerm::parse("II", constant).unwrap(),
            PauliTerm::parse("ZI", c0).unwrap(),
            PauliTerm::parse("IZ", c1).unwrap(),
            PauliTerm::parse("ZZ", c01).unwrap(),
        ],
    )
    .unwrap()
}

/// Basis state from a bit string, qubit 0 first.
pub fn bits(bits: &str) -> SuperpositionSpec {
    let occ = bits
        .chars()
        .enumerate()
        .filter(|(_, c)| *c == '1')
        .map(|(i, _)| 1u64 << i)
        .sum();
    SuperpositionSpec::single(DeterminantSpec::new(bits.len(), occ).unwrap())
}

pub fn evolution(path: EvolutionPath, t: f64, dt: f64) -> EvolutionSpec {
    match path {
        EvolutionPath::Exact => EvolutionSpec::exact(t).unwrap(),
        _ => EvolutionSpec::from_step_size(t, dt, path).unwrap(),
    }
}

pub fn run(
    h: &PauliSum,
    mode: CircuitMode,
    na: usize,
    evolution: EvolutionSpec,
    phi0: &SuperpositionSpec,
    phi1: Option<&SuperpositionSpec>,
) -> OutcomeDistribution {
    let config = CircuitRunConfig {
        layout: RegisterLayout::new(na, h.n_qubits()).unwrap(),
        evolution,
        phi0: phi0.clone(),
        phi1: phi1.cloned(),
        mode,
    };
    run_circuit(h, &config).unwrap()
}

/// QPDE problem on a fixture with its oracle reference.
pub struct GapProblem {
    pub h: PauliSum,
    pub reference: SpectrumReference,
    pub phi0: SuperpositionSpec,
    pub phi1: SuperpositionSpec,
}

impl GapProblem {
    pub fn new(h: PauliSum, phi0: SuperpositionSpec, phi1: SuperpositionSpec) -> Self {
        let reference = reference_spectrum(&h, None).unwrap();
        GapProblem { h, reference, phi0, phi1 }
    }

    pub fn oracle_gap(&self, label: &str) -> f64 {
        let (from, to) = label.split_once('-').unwrap();
        self.reference.energy_of(to).unwrap() - self.reference.energy_of(from).unwrap()
    }

    pub fn qpde(&self, na: usize, t: f64, path: EvolutionPath, dt: f64) -> OutcomeDistribution {
        run(&self.h, CircuitMode::Qpde, na, evolution(path, t, dt), &self.phi0, Some(&self.phi1))
    }

    pub fn report(&self, dist: &OutcomeDistribution, t: f64) -> GapReport {
        let c = spectral_decomposition(&self.reference, &self.phi0).unwrap();
        let d = spectral_decomposition(&self.reference, &self.phi1).unwrap();
        let lines = oracle_gaps(&self.reference, &c, &d, 1e-6);
        gap_report(
            dist,
            &lines,
            &DecodeParams {
                n_ancilla: dist.n_ancilla,
                total_time: t,
                min_mass: 0.005,
            },
        )
        .unwrap()
    }
}

/// Dominant decoded gap, panicking on an ambiguous reading.
pub fn dominant_gap(report: &GapReport) -> f64 {
    report.dominant().unwrap().delta_e_hartree.expect("dominant peak decodes")
}

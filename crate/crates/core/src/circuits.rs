//! Phase estimation circuits: multi-ancilla QPE, the corrected and naive
//! phase-difference circuits, the inverse QFT readout and the single-ancilla
//! `Prob(0)` evaluators.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{EvolutionPath, EvolutionSpec, Propagator};
use crate::pauli::PauliSum;
use crate::state_prep::{build_controlled_pr, build_pr_circuit, excitation_operator, SuperpositionSpec};
use crate::statevector::{Control, Gate, OutcomeDistribution, RegisterLayout, StateVector, SystemOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitMode {
    Qpe,
    Qpde,
    QpdeNaive,
}

#[derive(Clone, Debug)]
pub struct CircuitRunConfig {
    pub layout: RegisterLayout,
    pub evolution: EvolutionSpec,
    pub phi0: SuperpositionSpec,
    pub phi1: Option<SuperpositionSpec>,
    pub mode: CircuitMode,
}

impl CircuitRunConfig {
    pub fn validate(&self, h: &PauliSum) -> Result<()> {
        let ns = self.layout.n_system();
        if h.n_qubits() != ns {
            return Err(Error::invalid(format!(
                "Hamiltonian acts on {} qubits, layout has {ns} system qubits",
                h.n_qubits()
            )));
        }
        if self.phi0.n_modes() != ns {
            return Err(Error::invalid("phi0 does not match the system register"));
        }
        match (&self.phi1, self.mode) {
            (None, CircuitMode::Qpde | CircuitMode::QpdeNaive) => {
                Err(Error::invalid("phase difference estimation needs phi1"))
            }
            (Some(p), _) if p.n_modes() != ns => Err(Error::invalid("phi1 does not match the system register")),
            _ => Ok(()),
        }
    }

    fn phi1(&self) -> Result<&SuperpositionSpec> {
        self.phi1
            .as_ref()
            .ok_or_else(|| Error::invalid("phase difference estimation needs phi1"))
    }
}

fn dft_along_ancillas(state: &mut StateVector, inverse_transform: bool) {
    let layout = state.layout();
    let n = layout.ancilla_dim();
    let d = layout.system_dim();
    if n == 1 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    // The readout maps e^{2πi xφ} to |φN⟩, i.e. kernel e^{-2πi xy/N}.
    let fft: Arc<dyn Fft<f64>> = if inverse_transform {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let amps = state.amplitudes_mut();
    let mut columns = vec![Complex64::new(0.0, 0.0); n * d];
    for y in 0..n {
        for s in 0..d {
            columns[s * n + y] = amps[y * d + s];
        }
    }
    fft.process(&mut columns);
    let scale = 1.0 / (n as f64).sqrt();
    for y in 0..n {
        for s in 0..d {
            amps[y * d + s] = columns[s * n + y] * scale;
        }
    }
}

/// Inverse QFT on the ancilla register: `|x⟩ ↦ N^{-1/2} Σ_y e^{-2πi xy/N}|y⟩`.
pub fn inverse_qft(state: &mut StateVector) {
    dft_along_ancillas(state, true);
}

/// Forward QFT on the ancilla register, the inverse of [`inverse_qft`].
pub fn forward_qft(state: &mut StateVector) {
    dft_along_ancillas(state, false);
}

fn hadamard_ancillas(state: &mut StateVector) -> Result<()> {
    for m in 0..state.layout().n_ancilla() {
        state.apply_gate(Gate::H, m, &[])?;
    }
    Ok(())
}

fn power_exponent(layout: RegisterLayout, m: usize) -> usize {
    layout.n_ancilla() - 1 - m
}

/// Runs the configured circuit against a prebuilt propagator holding at
/// least `N_a` binary powers, and returns the pre-measurement state.
pub fn run_state(h: &PauliSum, config: &CircuitRunConfig, propagator: &Propagator) -> Result<StateVector> {
    config.validate(h)?;
    let layout = config.layout;
    let na = layout.n_ancilla();
    let mut state = StateVector::new(layout);
    hadamard_ancillas(&mut state)?;
    match config.mode {
        CircuitMode::Qpe => {
            state.apply_system_circuit(&build_pr_circuit(&config.phi0)?)?;
            // Trotterized paths drop the identity; restore its phase on the control.
            let constant = match config.evolution.path {
                EvolutionPath::Exact => 0.0,
                _ => h.identity_coefficient(),
            };
            for m in 0..na {
                let k = power_exponent(layout, m);
                propagator.apply_power(&mut state, k, Some(Control::on(m)))?;
                if constant != 0.0 {
                    let angle = -constant * config.evolution.total_time * (1u64 << k) as f64;
                    state.apply_gate(Gate::Phase(angle), m, &[])?;
                }
            }
        }
        CircuitMode::Qpde => {
            let cpr = build_controlled_pr(&config.phi0, config.phi1()?)?;
            for m in 0..na {
                state.apply_circuit(&cpr.circuit(m, na))?;
                propagator.apply_power(&mut state, power_exponent(layout, m), None)?;
                state.apply_circuit(&cpr.inverse_circuit(m, na))?;
            }
        }
        CircuitMode::QpdeNaive => {
            state.apply_system_circuit(&build_pr_circuit(&config.phi0)?)?;
            let ex = SystemOperator::new(excitation_operator(&config.phi0, config.phi1()?)?)?;
            let ex_dag = ex.adjoint();
            for m in 0..na {
                state.apply_system_operator(&ex, Some(Control::on(m)))?;
                propagator.apply_power(&mut state, power_exponent(layout, m), None)?;
                state.apply_system_operator(&ex_dag, Some(Control::on(m)))?;
            }
        }
    }
    inverse_qft(&mut state);
    Ok(state)
}

pub fn run_with_propagator(h: &PauliSum, config: &CircuitRunConfig, propagator: &Propagator) -> Result<OutcomeDistribution> {
    Ok(run_state(h, config, propagator)?.ancilla_distribution())
}

/// Builds the propagator for `config` and runs it.
pub fn run_circuit(h: &PauliSum, config: &CircuitRunConfig) -> Result<OutcomeDistribution> {
    config.validate(h)?;
    let propagator = Propagator::build(h, &config.evolution, config.layout.n_ancilla())?;
    run_with_propagator(h, config, &propagator)
}

fn expect_mode(config: &CircuitRunConfig, mode: CircuitMode) -> Result<()> {
    if config.mode != mode {
        return Err(Error::invalid(format!("configuration mode is {:?}, expected {mode:?}", config.mode)));
    }
    Ok(())
}

pub fn run_qpe(h: &PauliSum, config: &CircuitRunConfig) -> Result<OutcomeDistribution> {
    expect_mode(config, CircuitMode::Qpe)?;
    run_circuit(h, config)
}

pub fn run_qpde(h: &PauliSum, config: &CircuitRunConfig) -> Result<OutcomeDistribution> {
    expect_mode(config, CircuitMode::Qpde)?;
    run_circuit(h, config)
}

pub fn run_qpde_naive(h: &PauliSum, config: &CircuitRunConfig) -> Result<OutcomeDistribution> {
    expect_mode(config, CircuitMode::QpdeNaive)?;
    run_circuit(h, config)
}

fn ancilla_zero_probability(state: &StateVector) -> f64 {
    state.ancilla_distribution().probabilities[0]
}

/// Single-ancilla `Prob(0)` of H, controlled-U(t), P(εt), H for each ε.
pub fn bpe_prob0(h: &PauliSum, phi0: &SuperpositionSpec, grid: &[f64], evolution: &EvolutionSpec) -> Result<Vec<f64>> {
    let layout = RegisterLayout::new(1, h.n_qubits())?;
    if phi0.n_modes() != h.n_qubits() {
        return Err(Error::invalid("phi0 does not match the Hamiltonian register"));
    }
    let t = evolution.total_time;
    let propagator = Propagator::build(h, evolution, 1)?;
    let mut base = StateVector::new(layout);
    base.apply_gate(Gate::H, 0, &[])?;
    base.apply_system_circuit(&build_pr_circuit(phi0)?)?;
    propagator.apply_power(&mut base, 0, Some(Control::on(0)))?;
    if evolution.path != EvolutionPath::Exact && h.identity_coefficient() != 0.0 {
        base.apply_gate(Gate::Phase(-h.identity_coefficient() * t), 0, &[])?;
    }
    grid.iter()
        .map(|&eps| {
            let mut state = base.clone();
            state.apply_gate(Gate::Phase(eps * t), 0, &[])?;
            state.apply_gate(Gate::H, 0, &[])?;
            Ok(ancilla_zero_probability(&state))
        })
        .collect()
}

/// Single-ancilla `Prob(0)` of H, Pr(g), controlled-Ex, U(t),
/// controlled-Ex†, P(Δε t), H for each Δε.
pub fn bpde_prob0(
    h: &PauliSum,
    phi0: &SuperpositionSpec,
    phi1: &SuperpositionSpec,
    grid: &[f64],
    evolution: &EvolutionSpec,
) -> Result<Vec<f64>> {
    let layout = RegisterLayout::new(1, h.n_qubits())?;
    if phi0.n_modes() != h.n_qubits() || phi1.n_modes() != h.n_qubits() {
        return Err(Error::invalid("input states do not match the Hamiltonian register"));
    }
    let t = evolution.total_time;
    let propagator = Propagator::build(h, evolution, 1)?;
    let ex = SystemOperator::new(excitation_operator(phi0, phi1)?)?;
    let mut base = StateVector::new(layout);
    base.apply_gate(Gate::H, 0, &[])?;
    base.apply_system_circuit(&build_pr_circuit(phi0)?)?;
    base.apply_system_operator(&ex, Some(Control::on(0)))?;
    propagator.apply_power(&mut base, 0, None)?;
    base.apply_system_operator(&ex.adjoint(), Some(Control::on(0)))?;
    grid.iter()
        .map(|&delta| {
            let mut state = base.clone();
            state.apply_gate(Gate::Phase(delta * t), 0, &[])?;
            state.apply_gate(Gate::H, 0, &[])?;
            Ok(ancilla_zero_probability(&state))
        })
        .collect()
}

/// Closed-form readout distribution for a single eigenphase `φ`:
/// `p(y) = |sin(Nπδ) / (N sin(πδ))|²`, `δ = φ - y/N`.
pub fn phase_kernel(phase: f64, n_ancilla: usize) -> Vec<f64> {
    let n = (1usize << n_ancilla) as f64;
    (0..1usize << n_ancilla)
        .map(|y| {
            let delta = phase - y as f64 / n;
            let den = (std::f64::consts::PI * delta).sin();
            if den.abs() < 1e-15 {
                1.0
            } else {
                let r = (n * std::f64::consts::PI * delta).sin() / (n * den);
                r * r
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateEcho {
    pub determinant: String,
    pub coefficient: f64,
}

impl StateEcho {
    pub fn from_spec(spec: &SuperpositionSpec) -> Vec<StateEcho> {
        spec.entries()
            .iter()
            .map(|(d, c)| StateEcho {
                determinant: d.notation(),
                coefficient: *c,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: CircuitMode,
    pub n_ancilla: usize,
    pub n_system: usize,
    pub total_time: f64,
    pub steps: u64,
    pub dt: f64,
    pub path: EvolutionPath,
    pub phi0: Vec<StateEcho>,
    pub phi1: Option<Vec<StateEcho>>,
}

impl From<&CircuitRunConfig> for ConfigEcho {
    fn from(c: &CircuitRunConfig) -> Self {
        ConfigEcho {
            mode: c.mode,
            n_ancilla: c.layout.n_ancilla(),
            n_system: c.layout.n_system(),
            total_time: c.evolution.total_time,
            steps: c.evolution.steps,
            dt: c.evolution.dt(),
            path: c.evolution.path,
            phi0: StateEcho::from_spec(&c.phi0),
            phi1: c.phi1.as_ref().map(StateEcho::from_spec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinRecord {
    pub index: usize,
    pub bitstring: String,
    pub probability: f64,
}

/// Serialized circuit run. Timings live in `metadata` so that the rest of
/// the record is reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ConfigEcho,
    pub bins: Vec<BinRecord>,
    pub metadata: serde_json::Value,
}

impl RunRecord {
    pub fn new(config: &CircuitRunConfig, dist: &OutcomeDistribution, metadata: serde_json::Value) -> Self {
        let bins = dist
            .probabilities
            .iter()
            .enumerate()
            .map(|(index, &probability)| BinRecord {
                index,
                bitstring: dist.bitstring(index),
                probability,
            })
            .collect();
        RunRecord {
            config: config.into(),
            bins,
            metadata,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::DeterminantSpec;
    use crate::pauli::PauliTerm;
    use std::f64::consts::PI;

    fn det(bits: &str) -> DeterminantSpec {
        let occ = bits
            .chars()
            .enumerate()
            .filter(|(_, c)| *c == '1')
            .map(|(i, _)| 1u64 << i)
            .sum();
        DeterminantSpec::new(bits.len(), occ).unwrap()
    }

    fn diagonal_hamiltonian(c0: f64, c1: f64, c01: f64) -> PauliSum {
        PauliSum::new(
            2,
            vec![
                PauliTerm::parse("ZI", c0).unwrap(),
                PauliTerm::parse("IZ", c1).unwrap(),
                PauliTerm::parse("ZZ", c01).unwrap(),
            ],
        )
        .unwrap()
    }

    fn diag_energy(bits: &str, c: (f64, f64, f64)) -> f64 {
        let z: Vec<f64> = bits.chars().map(|b| if b == '1' { -1.0 } else { 1.0 }).collect();
        c.0 * z[0] + c.1 * z[1] + c.2 * z[0] * z[1]
    }

    fn layout(na: usize, ns: usize) -> RegisterLayout {
        RegisterLayout::new(na, ns).unwrap()
    }

    fn random_state(layout: RegisterLayout, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1usize << layout.total_qubits())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(layout, amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn inverse_qft_matches_brute_force_dft() {
        let l = layout(4, 2);
        let input = random_state(l, 7);
        let mut fast = input.clone();
        inverse_qft(&mut fast);
        let n = 16;
        let d = 4;
        for y in 0..n {
            for s in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..n {
                    let phase = -2.0 * PI * (x * y) as f64 / n as f64;
                    acc += Complex64::from_polar(1.0, phase) * input.amplitudes()[x * d + s];
                }
                acc /= (n as f64).sqrt();
                assert!((acc - fast.amplitudes()[y * d + s]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_qft_matches_gate_circuit() {
        // Textbook QFT from H and controlled phases, then bit reversal,
        // inverted gate by gate.
        let na = 4;
        let l = layout(na, 1);
        let input = random_state(l, 11);
        let mut gates = Vec::new();
        for j in 0..na {
            gates.push(crate::statevector::Instruction::new(Gate::H, j));
            for k in j + 1..na {
                let angle = 2.0 * PI / (1u64 << (k - j + 1)) as f64;
                gates.push(crate::statevector::Instruction::controlled(Gate::Phase(angle), j, vec![Control::on(k)]));
            }
        }
        let mut by_gates = input.clone();
        by_gates.apply_circuit(&gates).unwrap();
        let mut reversed = by_gates.clone();
        let d = 2;
        for y in 0..16usize {
            let r = y.reverse_bits() >> (usize::BITS as usize - na);
            for s in 0..d {
                reversed.amplitudes_mut()[r * d + s] = by_gates.amplitudes()[y * d + s];
            }
        }
        let mut fast = input.clone();
        forward_qft(&mut fast);
        for (a, b) in fast.amplitudes().iter().zip(reversed.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_round_trip_and_ramps() {
        let l = layout(5, 2);
        let input = random_state(l, 3);
        let mut s = input.clone();
        forward_qft(&mut s);
        inverse_qft(&mut s);
        for (a, b) in s.amplitudes().iter().zip(input.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }

        let mut uniform = StateVector::new(layout(4, 1));
        hadamard_ancillas(&mut uniform).unwrap();
        inverse_qft(&mut uniform);
        assert!((uniform.ancilla_distribution().probabilities[0] - 1.0).abs() < 1e-12);

        let n = 16;
        let amps: Vec<Complex64> = (0..n)
            .flat_map(|x| {
                let a = Complex64::from_polar(0.25, 2.0 * PI * x as f64 * 5.0 / 16.0);
                [a, Complex64::new(0.0, 0.0)]
            })
            .collect();
        let mut ramp = StateVector::from_amplitudes(layout(4, 1), amps).unwrap();
        inverse_qft(&mut ramp);
        assert!((ramp.ancilla_distribution().probabilities[5] - 1.0).abs() < 1e-12);
    }

    fn config(mode: CircuitMode, na: usize, t: f64, phi0: &str, phi1: Option<&str>) -> CircuitRunConfig {
        CircuitRunConfig {
            layout: layout(na, 2),
            evolution: EvolutionSpec::exact(t).unwrap(),
            phi0: SuperpositionSpec::single(det(phi0)),
            phi1: phi1.map(|p| SuperpositionSpec::single(det(p))),
            mode,
        }
    }

    fn wrapped_phase(energy: f64, t: f64) -> f64 {
        (-energy * t / (2.0 * PI)).rem_euclid(1.0)
    }

    #[test]
    fn qpe_eigenstate_matches_kernel() {
        let c = (0.31, -0.17, 0.05);
        let h = diagonal_hamiltonian(c.0, c.1, c.2).with_identity(0.4);
        let t = 1.3;
        let dist = run_qpe(&h, &config(CircuitMode::Qpe, 6, t, "10", None)).unwrap();
        let phase = wrapped_phase(diag_energy("10", c) + 0.4, t);
        for (p, q) in dist.probabilities.iter().zip(phase_kernel(phase, 6)) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn qpe_trotter_path_restores_identity_phase() {
        let c = (0.31, -0.17, 0.05);
        let h = diagonal_hamiltonian(c.0, c.1, c.2).with_identity(0.4);
        let mut cfg = config(CircuitMode::Qpe, 5, 1.3, "11", None);
        let exact = run_qpe(&h, &cfg).unwrap();
        cfg.evolution = EvolutionSpec::new(1.3, 2, EvolutionPath::Compiled).unwrap();
        let compiled = run_qpe(&h, &cfg).unwrap();
        assert!(exact.total_variation(&compiled) < 1e-9);
    }

    #[test]
    fn qpe_two_eigenstate_projection() {
        let c = (PI / 8.0, PI / 16.0, 0.0);
        let h = diagonal_hamiltonian(c.0, c.1, c.2);
        let t = 1.0;
        let spec = SuperpositionSpec::new(vec![(det("10"), 0.6), (det("01"), 0.8)]).unwrap();
        let mut cfg = config(CircuitMode::Qpe, 5, t, "10", None);
        cfg.phi0 = spec;
        let dist = run_qpe(&h, &cfg).unwrap();
        let y1 = (wrapped_phase(diag_energy("10", c), t) * 32.0).round() as usize % 32;
        let y2 = (wrapped_phase(diag_energy("01", c), t) * 32.0).round() as usize % 32;
        assert!((dist.probabilities[y1] - 0.36).abs() < 1e-9);
        assert!((dist.probabilities[y2] - 0.64).abs() < 1e-9);
    }

    #[test]
    fn qpde_eigenstates_grid_aligned() {
        // ΔE = -3π/16, so -ΔE t/2π = 3/16 at t = 2.
        let c = (3.0 * PI / 32.0, 0.0, 0.0);
        let h = diagonal_hamiltonian(c.0, c.1, c.2).with_identity(-0.7);
        let t = 2.0;
        let dist = run_qpde(&h, &config(CircuitMode::Qpde, 4, t, "00", Some("10"))).unwrap();
        let delta = diag_energy("10", c) - diag_energy("00", c);
        let y = (wrapped_phase(delta, t) * 16.0).round() as usize;
        assert_eq!(y, 3);
        assert!(dist.probabilities[y] > 1.0 - 1e-9);
        assert!((dist.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn naive_and_corrected_agree_for_eigenstate_reference() {
        let c = (0.21, 0.13, -0.08);
        let h = diagonal_hamiltonian(c.0, c.1, c.2);
        let a = run_qpde(&h, &config(CircuitMode::Qpde, 5, 1.7, "01", Some("11"))).unwrap();
        let b = run_qpde_naive(&h, &config(CircuitMode::QpdeNaive, 5, 1.7, "01", Some("11"))).unwrap();
        assert!(a.total_variation(&b) < 1e-8);
    }

    #[test]
    fn bpe_and_bpde_hand_values() {
        let c = (0.4, 0.0, 0.0);
        let h = diagonal_hamiltonian(c.0, c.1, c.2);
        let t = PI / 0.8;
        let spec = EvolutionSpec::exact(t).unwrap();
        let e0 = diag_energy("10", c);
        let e1 = diag_energy("01", c);
        assert!(((e1 - e0) * t - PI).abs() < 1e-12);
        let p = bpe_prob0(&h, &SuperpositionSpec::single(det("10")), &[e0], &spec).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        let h50 = std::f64::consts::FRAC_1_SQRT_2;
        let mix = SuperpositionSpec::new(vec![(det("10"), h50), (det("01"), h50)]).unwrap();
        let p = bpe_prob0(&h, &mix, &[e0], &spec).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);

        let phi0 = SuperpositionSpec::single(det("10"));
        let phi1 = SuperpositionSpec::single(det("01"));
        let gap = e1 - e0;
        let p = bpde_prob0(&h, &phi0, &phi1, &[gap, gap - PI / t], &spec).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[1].abs() < 1e-12);
    }

    #[test]
    fn mode_and_shape_checks() {
        let h = diagonal_hamiltonian(0.1, 0.2, 0.3);
        assert!(run_qpde(&h, &config(CircuitMode::Qpde, 3, 1.0, "00", None)).is_err());
        assert!(run_qpe(&h, &config(CircuitMode::Qpde, 3, 1.0, "00", Some("11"))).is_err());
        let mut cfg = config(CircuitMode::Qpe, 3, 1.0, "00", None);
        cfg.layout = layout(3, 3);
        assert!(run_qpe(&h, &cfg).is_err());
    }

    #[test]
    fn run_record_echo() {
        let h = diagonal_hamiltonian(0.1, 0.2, 0.3);
        let cfg = config(CircuitMode::Qpde, 3, 1.0, "00", Some("11"));
        let dist = run_qpde(&h, &cfg).unwrap();
        let rec = RunRecord::new(&cfg, &dist, serde_json::json!({}));
        assert_eq!(rec.bins.len(), 8);
        assert_eq!(rec.bins[5].bitstring, "101");
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
    }
}

//! Dense statevector over an ancilla register followed by a system register.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the amplitude
//! index. Ancillas are qubits `0..n_ancilla`, so the ancilla bitstring read
//! in register order is the integer `index >> n_system`, and each ancilla
//! branch owns a contiguous block of `2^n_system` amplitudes.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{unitarity_deviation, CMatrix, ZERO};
use crate::pauli::PauliTerm;

pub const MAX_TOTAL_QUBITS: usize = 26;

/// Amplitude count below which kernels stay serial.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Branches per dense-operator task.
const GEMM_COLUMNS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    n_ancilla: usize,
    n_system: usize,
}

impl RegisterLayout {
    pub fn new(n_ancilla: usize, n_system: usize) -> Result<Self> {
        if n_ancilla == 0 || n_system == 0 {
            return Err(Error::invalid("ancilla and system registers need at least one qubit each"));
        }
        let total = n_ancilla + n_system;
        if total > MAX_TOTAL_QUBITS {
            return Err(Error::SizeGuard {
                what: "statevector",
                requested: total,
                limit: MAX_TOTAL_QUBITS,
            });
        }
        Ok(RegisterLayout { n_ancilla, n_system })
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn total_qubits(&self) -> usize {
        self.n_ancilla + self.n_system
    }

    pub fn system_qubit(&self, s: usize) -> usize {
        self.n_ancilla + s
    }

    pub fn system_dim(&self) -> usize {
        1 << self.n_system
    }

    pub fn ancilla_dim(&self) -> usize {
        1 << self.n_ancilla
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    /// `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry(f64),
    /// `diag(1, e^{iθ})`.
    Phase(f64),
}

impl Gate {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let c = |re: f64| Complex64::new(re, 0.0);
        match self {
            Gate::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                [[c(h), c(h)], [c(h), c(-h)]]
            }
            Gate::X => [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
            Gate::Ry(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co), c(-s)], [c(s), c(co)]]
            }
            Gate::Phase(theta) => [[c(1.0), c(0.0)], [c(0.0), Complex64::from_polar(1.0, theta)]],
        }
    }

    pub fn inverse(self) -> Gate {
        match self {
            Gate::H | Gate::X => self,
            Gate::Ry(t) => Gate::Ry(-t),
            Gate::Phase(t) => Gate::Phase(-t),
        }
    }
}

/// Condition on a qubit holding `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, value: false }
    }
}

/// One gate application inside a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Instruction {
    pub fn new(gate: Gate, target: usize) -> Self {
        Instruction {
            gate,
            target,
            controls: Vec::new(),
        }
    }

    pub fn controlled(gate: Gate, target: usize, controls: Vec<Control>) -> Self {
        Instruction { gate, target, controls }
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Instruction {
            gate: self.gate,
            target: self.target + offset,
            controls: self
                .controls
                .iter()
                .map(|c| Control {
                    qubit: c.qubit + offset,
                    value: c.value,
                })
                .collect(),
        }
    }

    pub fn with_control(&self, control: Control) -> Self {
        let mut out = self.clone();
        out.controls.push(control);
        out
    }
}

/// Inverse of a gate sequence.
pub fn inverse_circuit(circuit: &[Instruction]) -> Vec<Instruction> {
    circuit
        .iter()
        .rev()
        .map(|ins| Instruction {
            gate: ins.gate.inverse(),
            target: ins.target,
            controls: ins.controls.clone(),
        })
        .collect()
}

fn control_masks(controls: &[Control], n_qubits: usize) -> (usize, usize) {
    controls.iter().fold((0, 0), |(mask, want), c| {
        let bit = 1 << (n_qubits - 1 - c.qubit);
        (mask | bit, if c.value { want | bit } else { want })
    })
}

/// Applies a (controlled) single-qubit gate to a raw amplitude slice.
pub fn apply_gate_slice(
    amps: &mut [Complex64],
    n_qubits: usize,
    gate: Gate,
    target: usize,
    controls: &[Control],
) -> Result<()> {
    if target >= n_qubits || controls.iter().any(|c| c.qubit >= n_qubits) {
        return Err(Error::invalid(format!("qubit index out of range for {n_qubits} qubits")));
    }
    if controls.iter().any(|c| c.qubit == target) {
        return Err(Error::invalid("target qubit is also a control"));
    }
    let (mask, want) = control_masks(controls, n_qubits);
    let stride = 1usize << (n_qubits - 1 - target);
    let [[a, b], [c, d]] = gate.matrix();
    let kernel = |base: usize, lo: &mut [Complex64], hi: &mut [Complex64]| {
        for (k, (x, y)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if (base + k) & mask != want {
                continue;
            }
            let (u, v) = (*x, *y);
            *x = a * u + b * v;
            *y = c * u + d * v;
        }
    };
    let block = 2 * stride;
    if amps.len() >= PARALLEL_THRESHOLD {
        if amps.len() / block >= 64 {
            amps.par_chunks_mut(block).enumerate().for_each(|(i, blk)| {
                let (lo, hi) = blk.split_at_mut(stride);
                kernel(i * block, lo, hi);
            });
        } else {
            const PIECE: usize = 4096;
            for (i, blk) in amps.chunks_mut(block).enumerate() {
                let (lo, hi) = blk.split_at_mut(stride);
                lo.par_chunks_mut(PIECE)
                    .zip(hi.par_chunks_mut(PIECE))
                    .enumerate()
                    .for_each(|(j, (l, h))| kernel(i * block + j * PIECE, l, h));
            }
        }
    } else {
        for (i, blk) in amps.chunks_mut(block).enumerate() {
            let (lo, hi) = blk.split_at_mut(stride);
            kernel(i * block, lo, hi);
        }
    }
    Ok(())
}

/// `exp(-i θ P)` on the low `n_target` bits of each index, with
/// `θ = coefficient·angle_scale`. Only indices matching the control mask
/// are touched.
pub fn apply_pauli_rotation_slice(
    amps: &mut [Complex64],
    n_target: usize,
    term: &PauliTerm,
    angle_scale: f64,
    control: Option<(usize, usize)>,
) {
    let theta = term.coefficient * angle_scale;
    if theta == 0.0 {
        return;
    }
    assert_eq!(term.string.len(), n_target, "Pauli term width mismatch");
    let (x, z) = term.string.index_masks();
    let (mask, want) = control.unwrap_or((0, 0));
    let (sin, cos) = theta.sin_cos();
    let cos = Complex64::new(cos, 0.0);
    // -i sinθ · i^{nY}
    let coupling = Complex64::new(0.0, -sin) * crate::pauli::y_phase(term.string.y_count());
    let parity = |b: usize| if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    if x == 0 {
        for (b, amp) in amps.iter_mut().enumerate() {
            if b & mask == want {
                *amp *= cos + coupling * parity(b);
            }
        }
        return;
    }
    let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 || b & mask != want {
            continue;
        }
        let p = b ^ x;
        let (u, v) = (amps[b], amps[p]);
        amps[b] = cos * u + coupling * parity(p) * v;
        amps[p] = cos * v + coupling * parity(b) * u;
    }
}

/// Unitary acting on the system register, validated once.
#[derive(Clone, Debug)]
pub struct SystemOperator {
    matrix: CMatrix,
}

impl SystemOperator {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        let deviation = unitarity_deviation(&matrix);
        if deviation > Self::TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(SystemOperator { matrix })
    }

    /// Wraps a matrix already known to be unitary (e.g. an exact propagator).
    pub(crate) fn trusted(matrix: CMatrix) -> Self {
        SystemOperator { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        SystemOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `U X` for `X` the `d × r` column-major matrix stored in `columns`.
    fn apply_columns(&self, columns: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let d = self.dim();
        debug_assert_eq!(columns.len() % d, 0);
        let r = columns.len() / d;
        scratch.clear();
        scratch.resize(columns.len(), ZERO);
        // SAFETY: Complex64 is repr(C) {re, im}, layout-identical to [f64; 2].
        // Both operands are column-major with leading dimension d and the
        // output buffer holds exactly d·r elements.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                d,
                d,
                r,
                [1.0, 0.0],
                self.matrix.as_ptr() as *const [f64; 2],
                1,
                d as isize,
                columns.as_ptr() as *const [f64; 2],
                1,
                d as isize,
                [0.0, 0.0],
                scratch.as_mut_ptr() as *mut [f64; 2],
                1,
                d as isize,
            );
        }
        columns.copy_from_slice(scratch);
    }
}

/// Register measurement statistics: `probabilities[y]` for ancilla value `y`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OutcomeDistribution {
    pub n_ancilla: usize,
    pub probabilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Outcome {
    pub index: usize,
    pub bitstring: String,
}

impl OutcomeDistribution {
    pub const NEGATIVE_SLACK: f64 = 1e-14;

    /// Builds a distribution, clamping rounding noise at zero.
    pub fn new(n_ancilla: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << n_ancilla {
            return Err(Error::invalid("distribution length is not 2^n_ancilla"));
        }
        let mut probabilities = probabilities;
        for p in probabilities.iter_mut() {
            if *p < -Self::NEGATIVE_SLACK || !p.is_finite() {
                return Err(Error::Numerical(format!("invalid probability {p}")));
            }
            *p = p.max(0.0);
        }
        Ok(OutcomeDistribution {
            n_ancilla,
            probabilities,
        })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn bitstring(&self, index: usize) -> String {
        format!("{index:0width$b}", width = self.n_ancilla)
    }

    /// Most probable bin; ties go to the lower index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Inverse-CDF draw from a seeded ChaCha8 stream.
    pub fn sample(&self, seed: u64) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> Outcome {
        let total = self.total();
        let r: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            chosen = Some(i);
            if r < acc {
                break;
            }
        }
        let index = chosen.unwrap_or(0);
        Outcome {
            index,
            bitstring: self.bitstring(index),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0⟩^{⊗N_a} ⊗ |0⟩^{⊗N_s}`.
    pub fn new(layout: RegisterLayout) -> Self {
        let mut amps = vec![ZERO; 1 << layout.total_qubits()];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { layout, amps }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << layout.total_qubits() {
            return Err(Error::invalid("amplitude count does not match layout"));
        }
        Ok(StateVector { layout, amps })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_gate(&mut self, gate: Gate, target: usize, controls: &[Control]) -> Result<()> {
        apply_gate_slice(&mut self.amps, self.layout.total_qubits(), gate, target, controls)
    }

    pub fn apply(&mut self, ins: &Instruction) -> Result<()> {
        self.apply_gate(ins.gate, ins.target, &ins.controls)
    }

    pub fn apply_circuit(&mut self, circuit: &[Instruction]) -> Result<()> {
        circuit.iter().try_for_each(|ins| self.apply(ins))
    }

    /// System-register circuit (qubit indices relative to the system).
    pub fn apply_system_circuit(&mut self, circuit: &[Instruction]) -> Result<()> {
        let offset = self.layout.n_ancilla();
        circuit.iter().try_for_each(|ins| self.apply(&ins.shifted(offset)))
    }

    /// `exp(-i ω s P)` on the system register, `ω` the term coefficient.
    pub fn apply_pauli_rotation(&mut self, term: &PauliTerm, angle_scale: f64) -> Result<()> {
        self.apply_controlled_pauli_rotation(term, angle_scale, None)
    }

    pub fn apply_controlled_pauli_rotation(
        &mut self,
        term: &PauliTerm,
        angle_scale: f64,
        control: Option<Control>,
    ) -> Result<()> {
        let ns = self.layout.n_system();
        if term.string.len() != ns {
            return Err(Error::invalid(format!(
                "Pauli term acts on {} qubits, system has {ns}",
                term.string.len()
            )));
        }
        let control = match control {
            None => None,
            Some(c) => {
                self.check_ancilla(c.qubit)?;
                let bit = 1usize << (self.layout.n_ancilla() - 1 - c.qubit);
                Some((bit, if c.value { bit } else { 0 }))
            }
        };
        let d = self.layout.system_dim();
        let run = |(y, block): (usize, &mut [Complex64])| {
            if let Some((mask, want)) = control {
                if y & mask != want {
                    return;
                }
            }
            apply_pauli_rotation_slice(block, ns, term, angle_scale, None);
        };
        if self.amps.len() >= PARALLEL_THRESHOLD && self.layout.ancilla_dim() > 1 {
            self.amps.par_chunks_mut(d).enumerate().for_each(run);
        } else {
            self.amps.chunks_mut(d).enumerate().for_each(run);
        }
        Ok(())
    }

    /// Applies `op` to the system register of every ancilla branch, or only
    /// the branches where `control` holds.
    pub fn apply_system_operator(&mut self, op: &SystemOperator, control: Option<Control>) -> Result<()> {
        let d = self.layout.system_dim();
        if op.dim() != d {
            return Err(Error::invalid(format!(
                "operator dimension {} does not match system dimension {d}",
                op.dim()
            )));
        }
        let control = match control {
            None => None,
            Some(c) => {
                self.check_ancilla(c.qubit)?;
                let bit = 1usize << (self.layout.n_ancilla() - 1 - c.qubit);
                Some((bit, if c.value { bit } else { 0 }))
            }
        };
        // Selected branches form runs of `run` consecutive blocks.
        let (run, offset) = match control {
            None => (self.layout.ancilla_dim(), 0),
            Some((bit, want)) => (bit, want),
        };
        let span = if control.is_some() { 2 * run * d } else { run * d };
        let parallel = self.amps.len() >= PARALLEL_THRESHOLD;
        let mut runs: Vec<&mut [Complex64]> = self
            .amps
            .chunks_mut(span)
            .map(|chunk| &mut chunk[offset * d..(offset + run) * d])
            .collect();
        if parallel {
            let piece = d * GEMM_COLUMNS;
            let pieces: Vec<&mut [Complex64]> = runs.iter_mut().flat_map(|r| r.chunks_mut(piece)).collect();
            pieces
                .into_par_iter()
                .for_each_init(Vec::new, |scratch, cols| op.apply_columns(cols, scratch));
        } else {
            let mut scratch = Vec::new();
            for cols in runs {
                op.apply_columns(cols, &mut scratch);
            }
        }
        Ok(())
    }

    fn check_ancilla(&self, qubit: usize) -> Result<()> {
        if qubit >= self.layout.n_ancilla() {
            return Err(Error::invalid(format!("control qubit {qubit} is not an ancilla")));
        }
        Ok(())
    }

    /// `p(y) = Σ_s |ψ(y, s)|²`; the state is left untouched.
    pub fn ancilla_distribution(&self) -> OutcomeDistribution {
        let d = self.layout.system_dim();
        let probabilities = self
            .amps
            .chunks(d)
            .map(|block| block.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .collect();
        OutcomeDistribution::new(self.layout.n_ancilla(), probabilities)
            .expect("squared moduli are non-negative")
    }

    pub fn sample_outcome(&self, seed: u64) -> Outcome {
        self.ancilla_distribution().sample(seed)
    }

    /// Raw dump: little-endian `(re, im)` f64 pairs in index order.
    pub fn write_amplitudes<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for a in &self.amps {
            out.write_all(&a.re.to_le_bytes())?;
            out.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump produced by [`StateVector::write_amplitudes`].
    pub fn read_amplitudes(layout: RegisterLayout, bytes: &[u8]) -> Result<Self> {
        let expected = (1usize << layout.total_qubits()) * 16;
        if bytes.len() != expected {
            return Err(Error::invalid(format!(
                "amplitude dump has {} bytes, expected {expected}",
                bytes.len()
            )));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        StateVector::from_amplitudes(layout, amps)
    }
}

/// Simulates a circuit on `|0…0⟩` of an `n_qubits` register.
pub fn simulate_circuit(n_qubits: usize, circuit: &[Instruction]) -> Result<Vec<Complex64>> {
    let mut amps = vec![ZERO; 1 << n_qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    for ins in circuit {
        apply_gate_slice(&mut amps, n_qubits, ins.gate, ins.target, &ins.controls)?;
    }
    Ok(amps)
}

/// Dense unitary of a circuit on `n_qubits`, column `j` the image of `|j⟩`.
pub fn circuit_unitary(n_qubits: usize, circuit: &[Instruction]) -> Result<CMatrix> {
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut amps = vec![ZERO; dim];
        amps[j] = Complex64::new(1.0, 0.0);
        for ins in circuit {
            apply_gate_slice(&mut amps, n_qubits, ins.gate, ins.target, &ins.controls)?;
        }
        m.set_column(j, &crate::linalg::CVector::from_vec(amps));
    }
    Ok(m)
}

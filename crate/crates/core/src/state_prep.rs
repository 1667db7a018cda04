//! Preparation circuits for one- and two-determinant input states and the
//! ancilla-controlled preparation block.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{DeterminantSpec, Ladder};
use crate::linalg::{CMatrix, CVector, ONE, ZERO};
use crate::statevector::{circuit_unitary, inverse_circuit, simulate_circuit, Control, Gate, Instruction};

const NORM_TOLERANCE: f64 = 1e-12;

/// Real superposition of at most two determinants.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositionSpec {
    entries: Vec<(DeterminantSpec, f64)>,
}

impl SuperpositionSpec {
    pub fn new(entries: Vec<(DeterminantSpec, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("superposition needs at least one determinant"));
        }
        let n_modes = entries[0].0.n_modes;
        let electrons = entries[0].0.electron_count();
        if entries.iter().any(|(d, _)| d.n_modes != n_modes) {
            return Err(Error::invalid("determinants have different mode counts"));
        }
        if entries.iter().any(|(d, _)| d.electron_count() != electrons) {
            return Err(Error::invalid("determinants have different particle numbers"));
        }
        for i in 0..entries.len() {
            for j in 0..i {
                if entries[i].0 == entries[j].0 {
                    return Err(Error::invalid("duplicate determinant in superposition"));
                }
            }
        }
        if entries.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let norm: f64 = entries.iter().map(|(_, c)| c * c).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("coefficients are not normalized (Σc² = {norm})")));
        }
        Ok(SuperpositionSpec { entries })
    }

    pub fn single(det: DeterminantSpec) -> Self {
        SuperpositionSpec {
            entries: vec![(det, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(DeterminantSpec, f64)] {
        &self.entries
    }

    pub fn n_modes(&self) -> usize {
        self.entries[0].0.n_modes
    }

    pub fn electron_count(&self) -> u32 {
        self.entries[0].0.electron_count()
    }

    /// Amplitude vector in the register ordering contract.
    pub fn statevector(&self) -> CVector {
        let mut v = CVector::zeros(1 << self.n_modes());
        for (det, c) in &self.entries {
            v[det.basis_index()] += Complex64::new(*c, 0.0);
        }
        v
    }
}

/// `y = 1 - 2(1 - n)/(1 + (1 - n)²)` for LUNO occupation `n`.
pub fn diradical_character(n_luno: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n_luno) {
        return Err(Error::invalid(format!("LUNO occupation {n_luno} outside [0, 1]")));
    }
    let h = 1.0 - n_luno;
    Ok(1.0 - 2.0 * h / (1.0 + h * h))
}

/// `√(1 - y/2)|homo⟩ - √(y/2)|lumo⟩` where `lumo` replaces the doubly
/// occupied HONO pair of `homo` with the empty LUNO pair.
pub fn two_config_state(y: f64, homo: DeterminantSpec, lumo: DeterminantSpec) -> Result<SuperpositionSpec> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::invalid(format!("diradical character {y} outside [0, 1]")));
    }
    if homo.n_modes != lumo.n_modes {
        return Err(Error::invalid("determinants have different mode counts"));
    }
    let removed = homo.occupation & !lumo.occupation;
    let added = lumo.occupation & !homo.occupation;
    let is_pair = |mask: u64| mask.count_ones() == 2 && mask.trailing_zeros() % 2 == 0 && mask >> mask.trailing_zeros() == 0b11;
    if !is_pair(removed) || !is_pair(added) {
        return Err(Error::invalid(format!(
            "'{}' -> '{}' is not a paired double replacement",
            homo.notation(),
            lumo.notation()
        )));
    }
    let a = (1.0 - y / 2.0).sqrt();
    let b = (y / 2.0).sqrt();
    if b == 0.0 {
        return Ok(SuperpositionSpec::single(homo));
    }
    SuperpositionSpec::new(vec![(homo, a), (lumo, -b)])
}

/// Singlet-adapted single excitation `(a†_qα a_pα + a†_qβ a_pβ)|hf⟩/√2`
/// over spatial orbitals `p → q` (0-based), with Jordan-Wigner signs.
pub fn spin_adapted_single(hf: DeterminantSpec, p: usize, q: usize) -> Result<SuperpositionSpec> {
    let norb = hf.n_modes / 2;
    if p >= norb || q >= norb || p == q {
        return Err(Error::invalid(format!("orbital indices {p} -> {q} invalid for {norb} orbitals")));
    }
    let doubly = hf.is_occupied(2 * p) && hf.is_occupied(2 * p + 1);
    let empty = !hf.is_occupied(2 * q) && !hf.is_occupied(2 * q + 1);
    if !doubly || !empty {
        return Err(Error::invalid(format!(
            "excitation {p} -> {q} requires orbital {p} doubly occupied and {q} empty in '{}'",
            hf.notation()
        )));
    }
    let excite = |spin: usize| -> Result<(DeterminantSpec, f64)> {
        let (s1, occ) = Ladder::annihilate(2 * p + spin)
            .apply(hf.occupation)
            .expect("orbital is occupied");
        let (s2, occ) = Ladder::create(2 * q + spin).apply(occ).expect("orbital is empty");
        Ok((DeterminantSpec::new(hf.n_modes, occ)?, s1 * s2 * std::f64::consts::FRAC_1_SQRT_2))
    };
    SuperpositionSpec::new(vec![excite(0)?, excite(1)?])
}

/// Gate list preparing `spec` from `|0…0⟩` on qubits `0..n_modes`.
///
/// Common occupations get X gates. For two determinants one `R_y` on a
/// pivot qubit sets the amplitudes and CNOTs from the pivot flip the
/// remaining differing qubits. The pivot is chosen empty in the first
/// determinant, so `θ = 2·atan2(c₂, c₁)`.
pub fn build_pr_circuit(spec: &SuperpositionSpec) -> Result<Vec<Instruction>> {
    let n = spec.n_modes();
    let x_on = |mask: u64| (0..n).filter(move |q| mask >> q & 1 == 1).map(|q| Instruction::new(Gate::X, q));
    match spec.entries() {
        [(det, c)] => {
            if *c < 0.0 {
                return Err(Error::invalid("single-determinant coefficient must be +1"));
            }
            Ok(x_on(det.occupation).collect())
        }
        [(d1, c1), (d2, c2)] => {
            let common = d1.occupation & d2.occupation;
            let diff = d1.occupation ^ d2.occupation;
            let pivot = (0..n)
                .find(|&q| diff >> q & 1 == 1 && !d1.is_occupied(q))
                .expect("equal particle numbers leave a qubit empty in the first determinant");
            let theta = 2.0 * c2.atan2(*c1);
            let mut out: Vec<Instruction> = x_on(common).collect();
            out.push(Instruction::new(Gate::Ry(theta), pivot));
            for q in (0..n).filter(|&q| diff >> q & 1 == 1 && q != pivot) {
                // bit_q = d1_q XOR pivot, since the pivot is 0 on d1
                if d1.is_occupied(q) {
                    out.push(Instruction::new(Gate::X, q));
                }
                out.push(Instruction::controlled(Gate::X, q, vec![Control::on(pivot)]));
            }
            Ok(out)
        }
        _ => Err(Error::invalid("preparation circuits support at most two determinants")),
    }
}

/// Dense unitary of the preparation circuit.
pub fn pr_unitary(spec: &SuperpositionSpec) -> Result<CMatrix> {
    circuit_unitary(spec.n_modes(), &build_pr_circuit(spec)?)
}

/// `|0⟩⟨0| ⊗ Pr(g) + |1⟩⟨1| ⊗ Pr(e)` on `1 + N_s` qubits.
#[derive(Clone, Debug)]
pub struct ControlledPr {
    n_system: usize,
    ground: Vec<Instruction>,
    excited: Vec<Instruction>,
}

impl ControlledPr {
    pub fn n_system(&self) -> usize {
        self.n_system
    }

    /// Gate list with the given control qubit; system qubit `s` is placed
    /// at `system_offset + s`.
    pub fn circuit(&self, control: usize, system_offset: usize) -> Vec<Instruction> {
        let ground = self
            .ground
            .iter()
            .map(|g| g.shifted(system_offset).with_control(Control::off(control)));
        let excited = self
            .excited
            .iter()
            .map(|g| g.shifted(system_offset).with_control(Control::on(control)));
        ground.chain(excited).collect()
    }

    pub fn inverse_circuit(&self, control: usize, system_offset: usize) -> Vec<Instruction> {
        inverse_circuit(&self.circuit(control, system_offset))
    }

    /// Dense `2^{N_s+1}` matrix with the control as the most significant qubit.
    pub fn dense(&self) -> Result<CMatrix> {
        circuit_unitary(self.n_system + 1, &self.circuit(0, 1))
    }

    pub fn ground_circuit(&self) -> &[Instruction] {
        &self.ground
    }

    pub fn excited_circuit(&self) -> &[Instruction] {
        &self.excited
    }
}

pub fn build_controlled_pr(phi0: &SuperpositionSpec, phi1: &SuperpositionSpec) -> Result<ControlledPr> {
    if phi0.n_modes() != phi1.n_modes() {
        return Err(Error::invalid("input states act on different registers"));
    }
    Ok(ControlledPr {
        n_system: phi0.n_modes(),
        ground: build_pr_circuit(phi0)?,
        excited: build_pr_circuit(phi1)?,
    })
}

/// Rotation taking `|Φ0⟩` to `|Φ1⟩` inside their common plane and acting
/// as the identity on its orthogonal complement.
///
/// With `c = ⟨Φ0|Φ1⟩`, `s = ‖Φ1 − cΦ0‖` and `w = (Φ1 − cΦ0)/s`, the plane
/// block in the basis `(Φ0, w)` is `[[c, −s], [s, c̄]]`.
pub fn excitation_operator(phi0: &SuperpositionSpec, phi1: &SuperpositionSpec) -> Result<CMatrix> {
    if phi0.n_modes() != phi1.n_modes() {
        return Err(Error::invalid("input states act on different registers"));
    }
    let u = prepared_state(phi0)?;
    let v = prepared_state(phi1)?;
    let dim = u.len();
    let c = u.dotc(&v);
    let rest = &v - &u * c;
    let s = rest.norm();
    let mut ex = CMatrix::identity(dim, dim);
    if s < 1e-14 {
        // Φ1 = cΦ0 with |c| = 1: a global phase on Φ0.
        ex.gerc(c - ONE, &u, &u, ONE);
        return Ok(ex);
    }
    let w = rest / Complex64::new(s, 0.0);
    let s = Complex64::new(s, 0.0);
    ex.gerc(c - ONE, &u, &u, ONE);
    ex.gerc(c.conj() - ONE, &w, &w, ONE);
    ex.gerc(s, &w, &u, ONE);
    ex.gerc(-s, &u, &w, ONE);
    Ok(ex)
}

/// Statevector produced by running the preparation circuit.
pub fn prepared_state(spec: &SuperpositionSpec) -> Result<CVector> {
    let amps = simulate_circuit(spec.n_modes(), &build_pr_circuit(spec)?)?;
    Ok(CVector::from_vec(amps))
}

/// Serializable description of an input state, in orbital notation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpecFile {
    Determinants(Vec<DeterminantEntry>),
    TwoConfig {
        reference: String,
        excited: String,
        #[serde(default)]
        y: Option<f64>,
        #[serde(default)]
        n_luno: Option<f64>,
    },
    SpinAdaptedSingle {
        reference: String,
        /// 0-based spatial orbital.
        from: usize,
        to: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeterminantEntry {
    pub occupation: String,
    pub coefficient: f64,
}

impl StateSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn resolve(&self, norb: usize) -> Result<SuperpositionSpec> {
        match self {
            StateSpecFile::Determinants(entries) => {
                let parsed = entries
                    .iter()
                    .map(|e| Ok((DeterminantSpec::from_notation(&e.occupation, norb)?, e.coefficient)))
                    .collect::<Result<Vec<_>>>()?;
                SuperpositionSpec::new(parsed)
            }
            StateSpecFile::TwoConfig {
                reference,
                excited,
                y,
                n_luno,
            } => {
                let y = match (y, n_luno) {
                    (Some(y), None) => *y,
                    (None, Some(n)) => diradical_character(*n)?,
                    (Some(y), Some(n)) => {
                        let derived = diradical_character(*n)?;
                        if (derived - y).abs() > 1e-12 {
                            return Err(Error::invalid(format!(
                                "y = {y} is inconsistent with n_LUNO = {n} (gives {derived})"
                            )));
                        }
                        *y
                    }
                    (None, None) => return Err(Error::invalid("two_config needs y or n_luno")),
                };
                two_config_state(
                    y,
                    DeterminantSpec::from_notation(reference, norb)?,
                    DeterminantSpec::from_notation(excited, norb)?,
                )
            }
            StateSpecFile::SpinAdaptedSingle { reference, from, to } => {
                spin_adapted_single(DeterminantSpec::from_notation(reference, norb)?, *from, *to)
            }
        }
    }
}

/// Dense `|Φ⟩` of a gate list applied to a given input vector.
pub fn apply_dense(u: &CMatrix, v: &CVector) -> CVector {
    let mut out = CVector::from_element(v.len(), ZERO);
    out.gemv(Complex64::new(1.0, 0.0), u, v, ZERO);
    out
}

//! Second-order product formulas, compiled step unitaries and exact
//! propagators.
//!
//! One symmetric step over `dt` applies every term of the magnitude-ordered
//! Hamiltonian with angle `dt/2`, then the same terms in reverse order. The
//! identity coefficient only contributes a global phase and is left out of
//! the Trotterized paths.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matmul, matrix_power, CMatrix, CVector, HermitianEigen, ZERO};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statevector::{apply_pauli_rotation_slice, Control, StateVector, SystemOperator};

/// Size limit for dense step and propagator matrices.
pub const MAX_COMPILED_QUBITS: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionPath {
    /// Factor-by-factor Pauli rotations on the statevector.
    #[serde(alias = "gate")]
    GateLevel,
    /// Dense step matrix raised to powers by repeated squaring.
    #[serde(alias = "compiled_dense")]
    Compiled,
    /// `exp(-iHτ)` from the eigendecomposition, no Trotter error.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec {
    /// Atomic units.
    pub total_time: f64,
    pub steps: u64,
    pub path: EvolutionPath,
}

impl EvolutionSpec {
    pub fn new(total_time: f64, steps: u64, path: EvolutionPath) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::invalid(format!("evolution time must be positive, got {total_time}")));
        }
        if steps == 0 {
            return Err(Error::invalid("at least one Trotter step is required"));
        }
        Ok(EvolutionSpec {
            total_time,
            steps,
            path,
        })
    }

    /// Derives `M = t / dt`, which must be an integer to within 1e-9.
    pub fn from_step_size(total_time: f64, dt: f64, path: EvolutionPath) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("step size must be positive, got {dt}")));
        }
        let ratio = total_time / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 || steps < 1.0 {
            return Err(Error::invalid(format!(
                "t = {total_time} is not an integer multiple of dt = {dt}"
            )));
        }
        EvolutionSpec::new(total_time, steps as u64, path)
    }

    pub fn exact(total_time: f64) -> Result<Self> {
        EvolutionSpec::new(total_time, 1, EvolutionPath::Exact)
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

/// Ordered `(term, angle_scale)` factors of one symmetric step.
pub fn trotter_factor_sequence(h: &PauliSum, dt: f64) -> Result<Vec<(PauliTerm, f64)>> {
    if h.is_empty() {
        return Err(Error::invalid("Hamiltonian has no non-identity terms to Trotterize"));
    }
    let ordered = h.magnitude_order();
    let half = dt / 2.0;
    Ok(ordered
        .iter()
        .cloned()
        .chain(ordered.iter().rev().cloned())
        .map(|t| (t, half))
        .collect())
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_COMPILED_QUBITS {
        return Err(Error::SizeGuard {
            what: "dense evolution operator",
            requested: n,
            limit: MAX_COMPILED_QUBITS,
        });
    }
    Ok(())
}

/// Dense matrix of one symmetric step; column `j` is the step applied to `|j⟩`.
pub fn compile_step(h: &PauliSum, dt: f64) -> Result<CMatrix> {
    let n = h.n_qubits();
    guard(n)?;
    let factors = trotter_factor_sequence(h, dt)?;
    let dim = 1usize << n;
    let columns: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut col = vec![ZERO; dim];
            col[j] = Complex64::new(1.0, 0.0);
            for (term, scale) in &factors {
                apply_pauli_rotation_slice(&mut col, n, term, *scale, None);
            }
            col
        })
        .collect();
    let mut m = CMatrix::zeros(dim, dim);
    for (j, col) in columns.into_iter().enumerate() {
        m.set_column(j, &CVector::from_vec(col));
    }
    Ok(m)
}

/// `[S^{M·2^m}]` for `m = 0..count`: `S^M` by binary exponentiation, then
/// repeated squaring.
pub fn evolution_powers(step: &CMatrix, steps: u64, count: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(matrix_power(step, steps));
    for m in 1..count {
        let prev = &out[m - 1];
        let next = matmul(prev, prev);
        out.push(next);
    }
    out
}

/// `exp(-iHτ)` with the identity coefficient included.
pub fn exact_evolution(h: &PauliSum, tau: f64) -> Result<CMatrix> {
    Ok(ExactPropagator::new(h)?.propagator(tau))
}

/// Cached eigendecomposition of `H` for repeated exact propagators.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    eigen: HermitianEigen,
}

impl ExactPropagator {
    pub fn new(h: &PauliSum) -> Result<Self> {
        guard(h.n_qubits())?;
        Ok(ExactPropagator {
            eigen: HermitianEigen::new(&h.realize_matrix()?)?,
        })
    }

    pub fn propagator(&self, tau: f64) -> CMatrix {
        self.eigen.propagator(tau)
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }
}

/// `U(t)^{2^k}` for a fixed Hamiltonian, realized along one of the paths.
#[derive(Clone, Debug)]
pub enum Propagator {
    GateLevel {
        factors: Vec<(PauliTerm, f64)>,
        steps: u64,
    },
    Dense {
        powers: Vec<SystemOperator>,
    },
}

impl Propagator {
    /// Prepares `U(t)^{2^k}` for `k = 0..n_powers`.
    pub fn build(h: &PauliSum, spec: &EvolutionSpec, n_powers: usize) -> Result<Self> {
        match spec.path {
            EvolutionPath::GateLevel => Ok(Propagator::GateLevel {
                factors: trotter_factor_sequence(&h.without_identity(), spec.dt())?,
                steps: spec.steps,
            }),
            EvolutionPath::Compiled => {
                let step = compile_step(&h.without_identity(), spec.dt())?;
                let powers = evolution_powers(&step, spec.steps, n_powers)
                    .into_iter()
                    .map(SystemOperator::new)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Propagator::Dense { powers })
            }
            EvolutionPath::Exact => {
                let exact = ExactPropagator::new(h)?;
                let powers = (0..n_powers)
                    .map(|k| SystemOperator::trusted(exact.propagator(spec.total_time * (1u64 << k) as f64)))
                    .collect();
                Ok(Propagator::Dense { powers })
            }
        }
    }

    /// Applies `U(t)^{2^k}` to the system register (optionally controlled).
    pub fn apply_power(&self, state: &mut StateVector, k: usize, control: Option<Control>) -> Result<()> {
        match self {
            Propagator::GateLevel { factors, steps } => {
                let reps = steps
                    .checked_mul(1u64 << k)
                    .ok_or_else(|| Error::invalid("evolution repetition count overflows"))?;
                for _ in 0..reps {
                    for (term, scale) in factors {
                        state.apply_controlled_pauli_rotation(term, *scale, control)?;
                    }
                }
                Ok(())
            }
            Propagator::Dense { powers } => {
                let op = powers
                    .get(k)
                    .ok_or_else(|| Error::invalid(format!("power 2^{k} was not prepared")))?;
                state.apply_system_operator(op, control)
            }
        }
    }

    /// Dense matrix of `U(t)^{2^k}` (gate-level paths are compiled on demand).
    pub fn power_matrix(&self, n_system: usize, k: usize) -> Result<CMatrix> {
        match self {
            Propagator::Dense { powers } => powers
                .get(k)
                .map(|p| p.matrix().clone())
                .ok_or_else(|| Error::invalid(format!("power 2^{k} was not prepared"))),
            Propagator::GateLevel { factors, steps } => {
                guard(n_system)?;
                let dim = 1usize << n_system;
                let mut step = CMatrix::zeros(dim, dim);
                for j in 0..dim {
                    let mut col = vec![ZERO; dim];
                    col[j] = Complex64::new(1.0, 0.0);
                    for (term, scale) in factors {
                        apply_pauli_rotation_slice(&mut col, n_system, term, *scale, None);
                    }
                    step.set_column(j, &CVector::from_vec(col));
                }
                Ok(matrix_power(&step, steps * (1u64 << k)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_deviation};
    use crate::statevector::{Gate, RegisterLayout};

    fn term(s: &str, c: f64) -> PauliTerm {
        PauliTerm::parse(s, c).unwrap()
    }

    #[test]
    fn symmetric_step_structure() {
        let h = PauliSum::new(2, [term("ZI", 0.2), term("XX", -0.9)]).unwrap();
        let seq = trotter_factor_sequence(&h, 0.4).unwrap();
        let names: Vec<String> = seq.iter().map(|(t, _)| t.string.to_string()).collect();
        assert_eq!(names, ["XX", "ZI", "ZI", "XX"]);
        assert!(seq.iter().all(|(_, s)| (*s - 0.2).abs() < 1e-15));
        assert!(trotter_factor_sequence(&PauliSum::new(2, []).unwrap(), 0.1).is_err());
    }

    #[test]
    fn single_term_step_is_exact() {
        let h = PauliSum::new(2, [term("XY", 0.7)]).unwrap();
        let s = compile_step(&h, 0.3).unwrap();
        assert!(max_abs_diff(&s, &exact_evolution(&h, 0.3).unwrap()) < 1e-12);
    }

    #[test]
    fn commuting_terms_step_is_exact() {
        let h = PauliSum::new(3, [term("ZZI", 0.5), term("IZZ", -0.3), term("XXX", 0.2)]).unwrap();
        let s = compile_step(&h, 0.7).unwrap();
        assert!(max_abs_diff(&s, &exact_evolution(&h, 0.7).unwrap()) < 1e-12);
    }

    #[test]
    fn exact_evolution_of_z() {
        let h = PauliSum::new(1, [term("Z", 1.0)]).unwrap();
        let u = exact_evolution(&h, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((u[(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((u[(1, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn powers_by_squaring() {
        let h = PauliSum::new(2, [term("XZ", 0.4), term("YY", 0.25), term("ZI", -0.6)]).unwrap();
        let s = compile_step(&h, 0.5).unwrap();
        let p = evolution_powers(&s, 3, 4);
        assert!(max_abs_diff(&p[0], &(&s * &s * &s)) < 1e-12);
        assert!(max_abs_diff(&(&p[1] * &p[1]), &p[2]) < 1e-11);
        for m in &p {
            assert!(unitarity_deviation(m) < 1e-9);
        }
    }

    #[test]
    fn diagonal_powers_match_closed_form_phases() {
        let h = PauliSum::new(2, [term("ZI", 0.4), term("ZZ", -0.15)]).unwrap();
        let s = compile_step(&h, 0.3).unwrap();
        let p = evolution_powers(&s, 5, 6);
        let diag = h.realize_matrix().unwrap();
        for (m, pm) in p.iter().enumerate() {
            let tau = 0.3 * 5.0 * (1u64 << m) as f64;
            for i in 0..4 {
                let expect = Complex64::from_polar(1.0, -diag[(i, i)].re * tau);
                assert!((pm[(i, i)] - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn step_defect_is_third_order() {
        let h = PauliSum::new(3, [term("XXI", 0.5), term("ZIZ", 0.3), term("IYY", -0.4), term("ZZZ", 0.2)]).unwrap();
        let defect = |dt: f64| (compile_step(&h, dt).unwrap() - exact_evolution(&h, dt).unwrap()).norm();
        let ratio = defect(0.1) / defect(0.05);
        assert!((6.0..=10.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn global_error_is_second_order() {
        let h = PauliSum::new(3, [term("XXI", 0.5), term("ZIZ", 0.3), term("IYY", -0.4), term("ZZZ", 0.2)]).unwrap();
        let t = 2.0;
        let exact = exact_evolution(&h, t).unwrap();
        let err = |m: u64| {
            let step = compile_step(&h, t / m as f64).unwrap();
            (matrix_power(&step, m) - &exact).norm()
        };
        let ratio = err(20) / err(40);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn compiled_step_matches_gate_level() {
        let h = PauliSum::new(
            4,
            [term("XXYY", 0.21), term("ZIII", -0.8), term("IZZI", 0.33), term("YXXY", -0.11), term("IIIZ", 0.05)],
        )
        .unwrap();
        let layout = RegisterLayout::new(1, 4).unwrap();
        let mut gate = StateVector::new(layout);
        gate.apply_gate(Gate::H, 0, &[]).unwrap();
        for q in 1..5 {
            gate.apply_gate(Gate::Ry(0.3 * q as f64), q, &[]).unwrap();
        }
        let mut dense = gate.clone();
        for (t, s) in trotter_factor_sequence(&h, 0.5).unwrap() {
            gate.apply_pauli_rotation(&t, s).unwrap();
        }
        let step = SystemOperator::new(compile_step(&h, 0.5).unwrap()).unwrap();
        assert!(unitarity_deviation(step.matrix()) < 1e-11);
        dense.apply_system_operator(&step, None).unwrap();
        for (a, b) in gate.amplitudes().iter().zip(dense.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn step_size_must_divide_time() {
        assert_eq!(EvolutionSpec::from_step_size(10.0, 1.25, EvolutionPath::Compiled).unwrap().steps, 8);
        assert!(EvolutionSpec::from_step_size(10.0, 0.3, EvolutionPath::Compiled).is_err());
        assert!(EvolutionSpec::new(0.0, 1, EvolutionPath::Exact).is_err());
        assert!(EvolutionSpec::new(1.0, 0, EvolutionPath::Exact).is_err());
    }

    #[test]
    fn size_guard() {
        let h = PauliSum::new(14, [PauliTerm::new("Z".repeat(14).parse().unwrap(), 1.0)]).unwrap();
        assert!(matches!(compile_step(&h, 0.1), Err(Error::SizeGuard { .. })));
    }
}

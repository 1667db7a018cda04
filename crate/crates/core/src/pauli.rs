//! Pauli strings and real-weighted Pauli sums.
//!
//! A [`PauliString`] stores its axes as two bitmasks where bit `q` refers to
//! qubit `q`. The operator on qubit `q` is `X^x Z^z` up to phase: `(1,0)` is
//! X, `(1,1)` is Y and `(0,1)` is Z. In dense matrices and statevectors qubit
//! 0 is the most significant bit of the basis index.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest qubit count for which dense Hamiltonian matrices are built.
pub const MAX_DENSE_QUBITS: usize = 14;

/// Terms below this magnitude (Hartree) are dropped when merging.
pub const DEFAULT_PRUNE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    len: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        assert!(len <= 64, "Pauli strings are limited to 64 qubits");
        PauliString { len, x: 0, z: 0 }
    }

    pub fn from_axes(axes: &[Pauli]) -> Self {
        let mut s = PauliString::identity(axes.len());
        for (q, &p) in axes.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Builds a string from raw masks (bit `q` = qubit `q`).
    pub fn from_masks(len: usize, x: u64, z: u64) -> Self {
        assert!(len <= 64, "Pauli strings are limited to 64 qubits");
        let keep = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        PauliString {
            len,
            x: x & keep,
            z: z & keep,
        }
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.len, "qubit {qubit} out of range");
        let (x, z) = p.bits();
        let bit = 1u64 << qubit;
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn axis(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn axes(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len).map(|q| self.axis(q))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Qubits carrying a Z factor, Y included.
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Masks translated to basis-index bits for an `n_qubits` register whose
    /// qubit 0 is the most significant bit.
    pub fn index_masks(&self) -> (usize, usize) {
        let reverse = |mask: u64| {
            (0..self.len)
                .filter(|q| mask >> q & 1 == 1)
                .fold(0usize, |acc, q| acc | 1 << (self.len - 1 - q))
        };
        (reverse(self.x), reverse(self.z))
    }

    /// Relabels qubit `q` as `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len, "permutation length mismatch");
        let mut out = PauliString::identity(self.len);
        for q in 0..self.len {
            out.set(perm[q], self.axis(q));
        }
        out
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.axes().cmp(other.axes()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.axes() {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses text such as `"XZIY"`, qubit 0 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::invalid(format!(
                "Pauli string of length {} exceeds 64 qubits",
                s.len()
            )));
        }
        let axes = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::invalid(format!("invalid Pauli symbol '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_axes(&axes))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    /// Hartree.
    pub coefficient: f64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coefficient: f64) -> Self {
        PauliTerm {
            string,
            coefficient,
        }
    }

    /// Shorthand for tests and fixtures: `PauliTerm::parse("XZ", 0.5)`.
    pub fn parse(text: &str, coefficient: f64) -> Result<Self> {
        Ok(PauliTerm::new(text.parse()?, coefficient))
    }
}

/// Qubit Hamiltonian `C + Σ_j ω_j P_j` with the constant `C` kept apart.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    identity_coefficient: f64,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, raw: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        Self::merge_terms(n_qubits, raw, DEFAULT_PRUNE_TOLERANCE)
    }

    /// Sums duplicate strings, drops terms below `prune_tolerance` and moves
    /// the identity into `identity_coefficient`. Terms come out sorted by
    /// string.
    pub fn merge_terms(
        n_qubits: usize,
        raw: impl IntoIterator<Item = PauliTerm>,
        prune_tolerance: f64,
    ) -> Result<Self> {
        let mut identity = 0.0;
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for term in raw {
            if term.string.len() != n_qubits {
                return Err(Error::invalid(format!(
                    "Pauli string {} has length {}, expected {n_qubits}",
                    term.string,
                    term.string.len()
                )));
            }
            if !term.coefficient.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite coefficient on {}",
                    term.string
                )));
            }
            if term.string.is_identity() {
                identity += term.coefficient;
            } else {
                *merged.entry(term.string).or_insert(0.0) += term.coefficient;
            }
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= prune_tolerance)
            .map(|(string, coefficient)| PauliTerm {
                string,
                coefficient,
            })
            .collect();
        Ok(PauliSum {
            n_qubits,
            identity_coefficient: identity,
            terms,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.identity_coefficient
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn without_identity(&self) -> Self {
        PauliSum {
            identity_coefficient: 0.0,
            ..self.clone()
        }
    }

    pub fn with_identity(&self, constant: f64) -> Self {
        PauliSum {
            identity_coefficient: constant,
            ..self.clone()
        }
    }

    /// Terms by descending `|ω|`, ties by axis sequence (I < X < Y < Z).
    pub fn magnitude_order(&self) -> Vec<PauliTerm> {
        magnitude_order(&self.terms)
    }

    /// Relabels qubit `q` as `perm[q]` in every term.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_qubits];
        if perm.len() != self.n_qubits
            || perm.iter().any(|&p| p >= self.n_qubits || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::invalid("not a permutation of the qubit indices"));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm::new(t.string.permuted(perm), t.coefficient))
            .chain(std::iter::once(PauliTerm::new(
                PauliString::identity(self.n_qubits),
                self.identity_coefficient,
            )));
        PauliSum::merge_terms(self.n_qubits, terms, 0.0)
    }

    /// Dense `2^n × 2^n` matrix, identity coefficient included.
    pub fn realize_matrix(&self) -> Result<CMatrix> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::SizeGuard {
                what: "dense Hamiltonian",
                requested: self.n_qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::from_diagonal_element(dim, dim, Complex64::new(self.identity_coefficient, 0.0));
        for term in &self.terms {
            let (x, z) = term.string.index_masks();
            let base = y_phase(term.string.y_count()) * term.coefficient;
            for col in 0..dim {
                let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                m[(col ^ x, col)] += base * sign;
            }
        }
        Ok(m)
    }

    /// `H v` without forming the matrix.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        if v.len() != dim {
            return Err(Error::invalid(format!("vector length {} does not match 2^{}", v.len(), self.n_qubits)));
        }
        let mut out: Vec<Complex64> = v.iter().map(|a| a * self.identity_coefficient).collect();
        for term in &self.terms {
            let (x, z) = term.string.index_masks();
            let base = y_phase(term.string.y_count()) * term.coefficient;
            for (col, a) in v.iter().enumerate() {
                let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                out[col ^ x] += base * sign * a;
            }
        }
        Ok(out)
    }

    /// Matrix element `⟨row|H|col⟩` restricted to the given basis indices.
    pub fn realize_block(&self, basis: &[usize]) -> CMatrix {
        let position: std::collections::HashMap<usize, usize> =
            basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let n = basis.len();
        let mut m = CMatrix::from_diagonal_element(n, n, Complex64::new(self.identity_coefficient, 0.0));
        for term in &self.terms {
            let (x, z) = term.string.index_masks();
            let base = y_phase(term.string.y_count()) * term.coefficient;
            for (j, &col) in basis.iter().enumerate() {
                if let Some(&i) = position.get(&(col ^ x)) {
                    let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    m[(i, j)] += base * sign;
                }
            }
        }
        m
    }
}

/// `i^k`: the phase of `X^x Z^z` rewritten with Y factors.
pub(crate) fn y_phase(y_count: u32) -> Complex64 {
    match y_count % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn magnitude_order(terms: &[PauliTerm]) -> Vec<PauliTerm> {
    let mut ordered = terms.to_vec();
    ordered.sort_by(|a, b| {
        b.coefficient
            .abs()
            .total_cmp(&a.coefficient.abs())
            .then_with(|| a.string.cmp(&b.string))
    });
    ordered
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:+.12} {}", self.identity_coefficient, "I".repeat(self.n_qubits))?;
        for t in &self.terms {
            writeln!(f, "{:+.12} {}", t.coefficient, t.string)?;
        }
        Ok(())
    }
}

//! Second-quantized Hamiltonians and the Jordan-Wigner mapping.
//!
//! Register ordering contract: spin orbital `2k` is orbital `k` spin α,
//! `2k + 1` is orbital `k` spin β, and spin orbital `p` maps to qubit `p`.
//! Under Jordan-Wigner `a_p = Z_0 ⋯ Z_{p-1} (X_p + iY_p) / 2`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fcidump::MolecularIntegrals;
use crate::linalg::CMatrix;
use crate::pauli::{PauliString, PauliSum, PauliTerm, DEFAULT_PRUNE_TOLERANCE};

/// Largest mode count accepted by [`jordan_wigner`] and the dense oracle.
pub const MAX_MODES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Ladder { mode, dagger: false }
    }

    /// Acts on an occupation bitmask (bit `p` = mode `p`), returning the
    /// fermionic sign and the new occupation, or `None` if the result vanishes.
    pub fn apply(self, occupation: u64) -> Option<(f64, u64)> {
        let bit = 1u64 << self.mode;
        let occupied = occupation & bit != 0;
        if occupied == self.dagger {
            return None;
        }
        let parity = (occupation & (bit - 1)).count_ones();
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, occupation ^ bit))
    }
}

/// Product of ladder operators, leftmost applied last.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub ops: Vec<Ladder>,
    pub coefficient: f64,
}

impl FermionTerm {
    /// Applies the product to a basis occupation.
    pub fn apply(&self, occupation: u64) -> Option<(f64, u64)> {
        let mut sign = self.coefficient;
        let mut occ = occupation;
        for op in self.ops.iter().rev() {
            let (s, next) = op.apply(occ)?;
            sign *= s;
            occ = next;
        }
        Some((sign, occ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    pub n_modes: usize,
    pub constant: f64,
    pub terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn new(n_modes: usize) -> Self {
        FermionOperator {
            n_modes,
            constant: 0.0,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, coefficient: f64, ops: &[Ladder]) {
        self.terms.push(FermionTerm {
            ops: ops.to_vec(),
            coefficient,
        });
    }

    /// Dense matrix in the occupation basis, built from explicit sign
    /// bookkeeping. Basis index bit `n_modes - 1 - p` is the occupation of
    /// mode `p`, matching the qubit-side convention.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        guard_modes(self.n_modes)?;
        let dim = 1usize << self.n_modes;
        let mut m = CMatrix::from_diagonal_element(dim, dim, Complex64::new(self.constant, 0.0));
        for col in 0..dim {
            let occ = index_to_occupation(col, self.n_modes);
            for term in &self.terms {
                if let Some((amp, out)) = term.apply(occ) {
                    m[(occupation_to_index(out, self.n_modes), col)] += amp;
                }
            }
        }
        Ok(m)
    }

    /// Products of this operator with another (used to build `S²`).
    pub fn product(&self, other: &FermionOperator) -> FermionOperator {
        assert_eq!(self.n_modes, other.n_modes);
        let mut out = FermionOperator::new(self.n_modes);
        out.constant = self.constant * other.constant;
        for a in &self.terms {
            if other.constant != 0.0 {
                out.push(a.coefficient * other.constant, &a.ops);
            }
            for b in &other.terms {
                let ops: Vec<Ladder> = a.ops.iter().chain(&b.ops).copied().collect();
                out.push(a.coefficient * b.coefficient, &ops);
            }
        }
        if self.constant != 0.0 {
            for b in &other.terms {
                out.push(self.constant * b.coefficient, &b.ops);
            }
        }
        out
    }

    pub fn add(&mut self, other: &FermionOperator) {
        assert_eq!(self.n_modes, other.n_modes);
        self.constant += other.constant;
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn scaled(&self, factor: f64) -> FermionOperator {
        FermionOperator {
            n_modes: self.n_modes,
            constant: self.constant * factor,
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    ops: t.ops.clone(),
                    coefficient: t.coefficient * factor,
                })
                .collect(),
        }
    }
}

fn guard_modes(n: usize) -> Result<()> {
    if n > MAX_MODES {
        return Err(Error::SizeGuard {
            what: "fermionic mode register",
            requested: n,
            limit: MAX_MODES,
        });
    }
    Ok(())
}

/// Occupation bitmask (bit `p` = mode `p`) for a basis index.
pub fn index_to_occupation(index: usize, n_modes: usize) -> u64 {
    (0..n_modes)
        .filter(|p| index >> (n_modes - 1 - p) & 1 == 1)
        .fold(0u64, |acc, p| acc | 1 << p)
}

pub fn occupation_to_index(occupation: u64, n_modes: usize) -> usize {
    (0..n_modes)
        .filter(|p| occupation >> p & 1 == 1)
        .fold(0usize, |acc, p| acc | 1 << (n_modes - 1 - p))
}

/// `H = E_core + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
pub fn build_fermion_hamiltonian(ints: &MolecularIntegrals) -> FermionOperator {
    let n = ints.norb;
    let mut op = FermionOperator::new(2 * n);
    op.constant = ints.core_energy;
    let so = |k: usize, spin: usize| 2 * k + spin;
    for p in 0..n {
        for q in 0..n {
            let h = ints.one_body(p, q);
            if h == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                op.push(h, &[Ladder::create(so(p, sigma)), Ladder::annihilate(so(q, sigma))]);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.two_body(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (a, b, c, d) = (so(p, sigma), so(r, tau), so(s, tau), so(q, sigma));
                            if a == b || c == d {
                                continue;
                            }
                            op.push(
                                0.5 * v,
                                &[
                                    Ladder::create(a),
                                    Ladder::create(b),
                                    Ladder::annihilate(c),
                                    Ladder::annihilate(d),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    op
}

/// Number operator `Σ_p n_p`.
pub fn number_operator(n_modes: usize) -> FermionOperator {
    let mut op = FermionOperator::new(n_modes);
    for p in 0..n_modes {
        op.push(1.0, &[Ladder::create(p), Ladder::annihilate(p)]);
    }
    op
}

/// `S_z = ½ Σ_k (n_kα - n_kβ)`.
pub fn sz_operator(norb: usize) -> FermionOperator {
    let mut op = FermionOperator::new(2 * norb);
    for k in 0..norb {
        op.push(0.5, &[Ladder::create(2 * k), Ladder::annihilate(2 * k)]);
        op.push(-0.5, &[Ladder::create(2 * k + 1), Ladder::annihilate(2 * k + 1)]);
    }
    op
}

/// `S² = S_- S_+ + S_z (S_z + 1)`.
pub fn s_squared_operator(norb: usize) -> FermionOperator {
    let n = 2 * norb;
    let mut s_plus = FermionOperator::new(n);
    let mut s_minus = FermionOperator::new(n);
    for k in 0..norb {
        s_plus.push(1.0, &[Ladder::create(2 * k), Ladder::annihilate(2 * k + 1)]);
        s_minus.push(1.0, &[Ladder::create(2 * k + 1), Ladder::annihilate(2 * k)]);
    }
    let sz = sz_operator(norb);
    let mut sz_plus_one = sz.clone();
    sz_plus_one.constant += 1.0;
    let mut total = s_minus.product(&s_plus);
    total.add(&sz.product(&sz_plus_one));
    total
}

/// Jordan-Wigner image of a fermionic operator.
///
/// Products are accumulated in the phase-free `X^x Z^z` form, where
/// `(X^a Z^b)(X^c Z^d) = (-1)^{|b∧c|} X^{a⊕c} Z^{b⊕d}`, and converted to
/// Hermitian Pauli strings at the end via `XZ = -iY`.
pub fn jordan_wigner(op: &FermionOperator) -> Result<PauliSum> {
    guard_modes(op.n_modes)?;
    let n = op.n_modes;
    let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
    for term in &op.terms {
        let mut partial: Vec<((u64, u64), Complex64)> = vec![((0, 0), Complex64::new(term.coefficient, 0.0))];
        for ladder in &term.ops {
            if ladder.mode >= n {
                return Err(Error::invalid(format!("mode {} out of range for {n} modes", ladder.mode)));
            }
            let p = ladder.mode;
            let below = (1u64 << p) - 1;
            let bit = 1u64 << p;
            // a_p = ½ (X_p Z_<p - X_p Z_p Z_<p); a†_p = ½ (X_p Z_<p + X_p Z_p Z_<p)
            let second = if ladder.dagger { 0.5 } else { -0.5 };
            let factors = [((bit, below), 0.5), ((bit, below | bit), second)];
            let mut next = Vec::with_capacity(partial.len() * 2);
            for &((x1, z1), c1) in &partial {
                for &((x2, z2), c2) in &factors {
                    let sign = if (z1 & x2).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    next.push(((x1 ^ x2, z1 ^ z2), c1 * (c2 * sign)));
                }
            }
            partial = next;
        }
        for (key, c) in partial {
            *acc.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }

    let mut actual: HashMap<(u64, u64), Complex64> = HashMap::new();
    for ((x, z), c) in acc {
        // X^x Z^z = (-i)^{|x∧z|} P(x, z)
        let phase = match (x & z).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
        *actual.entry((x, z)).or_insert(Complex64::new(0.0, 0.0)) += c * phase;
    }

    let mut terms = Vec::with_capacity(actual.len() + 1);
    terms.push(PauliTerm::new(PauliString::identity(n), op.constant));
    let mut worst = 0.0f64;
    for ((x, z), c) in actual {
        if c.norm() < DEFAULT_PRUNE_TOLERANCE {
            continue;
        }
        worst = worst.max(c.im.abs());
        terms.push(PauliTerm::new(PauliString::from_masks(n, x, z), c.re));
    }
    if worst > DEFAULT_PRUNE_TOLERANCE {
        return Err(Error::ImaginaryResidue { residue: worst });
    }
    PauliSum::new(n, terms)
}

/// Single Slater determinant as a spin-orbital occupation mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeterminantSpec {
    pub n_modes: usize,
    /// Bit `p` set when spin orbital `p` is occupied.
    pub occupation: u64,
}

impl DeterminantSpec {
    pub fn new(n_modes: usize, occupation: u64) -> Result<Self> {
        if n_modes == 0 || n_modes > 64 {
            return Err(Error::invalid(format!("unsupported mode count {n_modes}")));
        }
        if n_modes < 64 && occupation >> n_modes != 0 {
            return Err(Error::invalid("occupation has bits beyond the mode count"));
        }
        Ok(DeterminantSpec { n_modes, occupation })
    }

    /// Parses orbital notation such as `"2000"` or `"aa00"`: one character
    /// per spatial orbital, `2` doubly occupied, `a`/`α` α only, `b`/`β` β
    /// only, `0` empty.
    pub fn from_notation(s: &str, norb: usize) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != norb {
            return Err(Error::invalid(format!(
                "determinant '{s}' has {} orbitals, expected {norb}",
                chars.len()
            )));
        }
        if norb == 0 || norb > 32 {
            return Err(Error::invalid(format!("unsupported orbital count {norb}")));
        }
        let mut occupation = 0u64;
        for (k, c) in chars.iter().enumerate() {
            let (alpha, beta) = match c {
                '0' => (false, false),
                '2' => (true, true),
                'a' | 'A' | 'α' => (true, false),
                'b' | 'B' | 'β' => (false, true),
                other => {
                    return Err(Error::invalid(format!(
                        "invalid occupation character '{other}' in '{s}'"
                    )))
                }
            };
            if alpha {
                occupation |= 1 << (2 * k);
            }
            if beta {
                occupation |= 1 << (2 * k + 1);
            }
        }
        DeterminantSpec::new(2 * norb, occupation)
    }

    pub fn electron_count(&self) -> u32 {
        self.occupation.count_ones()
    }

    /// `2 S_z`.
    pub fn two_sz(&self) -> i32 {
        let alpha = (self.occupation & 0x5555_5555_5555_5555).count_ones() as i32;
        let beta = (self.occupation & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i32;
        alpha - beta
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.occupation >> mode & 1 == 1
    }

    pub fn basis_index(&self) -> usize {
        occupation_to_index(self.occupation, self.n_modes)
    }

    pub fn notation(&self) -> String {
        (0..self.n_modes / 2)
            .map(|k| match (self.is_occupied(2 * k), self.is_occupied(2 * k + 1)) {
                (false, false) => '0',
                (true, true) => '2',
                (true, false) => 'a',
                (false, true) => 'b',
            })
            .collect()
    }
}

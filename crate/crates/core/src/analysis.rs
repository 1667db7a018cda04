//! Phase decoding, peak finding, quadratic error mitigation and the exact
//! diagonalization reference.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::MAX_COMPILED_QUBITS;
use crate::fermion::{jordan_wigner, s_squared_operator, DeterminantSpec};
use crate::linalg::{CVector, HermitianEigen};
use crate::pauli::PauliSum;
use crate::state_prep::SuperpositionSpec;
use crate::statevector::OutcomeDistribution;
use crate::HARTREE_TO_EV;

/// Half-width of the admissible phase window on either side of zero.
const SIGN_WINDOW: f64 = 0.25;

/// Ancilla outcome read as the binary fraction `0.x_1 x_2 … x_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReading {
    pub bin: usize,
    pub n_ancilla: usize,
    pub delta_phi: f64,
    pub bits: String,
}

impl PhaseReading {
    pub fn new(bin: usize, n_ancilla: usize) -> Result<Self> {
        if n_ancilla == 0 || n_ancilla >= usize::BITS as usize {
            return Err(Error::invalid(format!("unsupported ancilla count {n_ancilla}")));
        }
        let n = 1usize << n_ancilla;
        if bin >= n {
            return Err(Error::invalid(format!("bin {bin} out of range for {n_ancilla} ancillas")));
        }
        Ok(PhaseReading {
            bin,
            n_ancilla,
            delta_phi: bin as f64 / n as f64,
            bits: format!("{bin:0width$b}", width = n_ancilla),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    /// Hartree.
    pub delta_e: f64,
    pub bin: usize,
    pub delta_phi: f64,
    /// `Δφ` or `Δφ - 1` after the sign rule.
    pub signed_phase: f64,
    pub resolution: f64,
}

/// Energy spacing of adjacent bins, `2π / (2^N t)`.
pub fn resolution(n_ancilla: usize, total_time: f64) -> f64 {
    2.0 * PI / ((1u64 << n_ancilla) as f64 * total_time)
}

/// `ΔE = -2π Δφ' / t` with `Δφ' = Δφ` on `[0, ¼]` and `Δφ - 1` on `[¾, 1)`.
pub fn decode_phase(bin: usize, n_ancilla: usize, total_time: f64) -> Result<GapEstimate> {
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(Error::invalid(format!("evolution time must be positive, got {total_time}")));
    }
    let reading = PhaseReading::new(bin, n_ancilla)?;
    let phi = reading.delta_phi;
    let signed_phase = if phi <= SIGN_WINDOW {
        phi
    } else if phi >= 1.0 - SIGN_WINDOW {
        phi - 1.0
    } else {
        return Err(Error::AmbiguousPhase { delta_phi: phi });
    };
    Ok(GapEstimate {
        delta_e: -2.0 * PI * signed_phase / total_time,
        bin,
        delta_phi: phi,
        signed_phase,
        resolution: resolution(n_ancilla, total_time),
    })
}

/// Fractional bin position `(-ΔE t/2π mod 1)·2^N` at which a gap appears.
pub fn gap_bin_position(delta_e: f64, n_ancilla: usize, total_time: f64) -> f64 {
    let n = (1u64 << n_ancilla) as f64;
    (-delta_e * total_time / (2.0 * PI)).rem_euclid(1.0) * n
}

/// Nearest bin to a gap's phase.
pub fn encode_gap(delta_e: f64, n_ancilla: usize, total_time: f64) -> usize {
    let n = 1usize << n_ancilla;
    (gap_bin_position(delta_e, n_ancilla, total_time).round() as usize) % n
}

/// Alias `-2π(Δφ - k)/t` of a bin closest to `target`.
pub fn nearest_alias(bin: usize, n_ancilla: usize, total_time: f64, target: f64) -> f64 {
    let phi = bin as f64 / (1u64 << n_ancilla) as f64;
    let k = (phi + target * total_time / (2.0 * PI)).round();
    -2.0 * PI * (phi - k) / total_time
}

fn circular_distance(a: f64, b: f64, n: f64) -> f64 {
    let d = (a - b).rem_euclid(n);
    d.min(n - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub bin: usize,
    /// Mass of the bin and its two circular neighbours.
    pub mass: f64,
}

/// Circular local maxima (`p[y] ≥ p[y-1]`, `p[y] > p[y+1]`) whose ±1-bin
/// mass reaches `min_mass`, by descending mass then bin.
pub fn find_peaks(dist: &OutcomeDistribution, min_mass: f64) -> Vec<Peak> {
    let p = &dist.probabilities;
    let n = p.len();
    let mut peaks = Vec::new();
    for y in 0..n {
        let left = (y + n - 1) % n;
        let right = (y + 1) % n;
        let is_max = if n >= 3 {
            p[y] >= p[left] && p[y] > p[right]
        } else {
            (0..n).all(|k| k == y || p[y] > p[k])
        };
        if !is_max || p[y] <= 0.0 {
            continue;
        }
        let mut window = vec![left, y, right];
        window.sort_unstable();
        window.dedup();
        let mass: f64 = window.iter().map(|&k| p[k]).sum();
        if mass >= min_mass {
            peaks.push(Peak { bin: y, mass });
        }
    }
    peaks.sort_by(|a, b| b.mass.total_cmp(&a.mass).then(a.bin.cmp(&b.bin)));
    peaks
}

/// Result of fitting `f(dt) = a·dt² + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AemFit {
    pub a: f64,
    /// Zero-step-size limit.
    pub b: f64,
    pub residual_norm: f64,
    /// `f(dt_i) - value_i` in input order.
    pub residuals: Vec<f64>,
}

/// Least-squares fit on the basis `{1, dt²}`.
pub fn aem_extrapolate(points: &[(f64, f64)]) -> Result<AemFit> {
    if points.iter().any(|(dt, v)| !dt.is_finite() || !v.is_finite()) {
        return Err(Error::invalid("non-finite extrapolation input"));
    }
    let mut distinct: Vec<f64> = points.iter().map(|(dt, _)| dt.abs()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid("extrapolation needs at least two distinct step sizes"));
    }
    // Centred normal equations, better conditioned for close step sizes.
    let n = points.len() as f64;
    let mx = points.iter().map(|(dt, _)| dt * dt).sum::<f64>() / n;
    let my = points.iter().map(|(_, v)| v).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(dt, v) in points {
        let dx = dt * dt - mx;
        sxx += dx * dx;
        sxy += dx * (v - my);
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let residuals: Vec<f64> = points.iter().map(|&(dt, v)| a * dt * dt + b - v).collect();
    let residual_norm = residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    Ok(AemFit {
        a,
        b,
        residual_norm,
        residuals,
    })
}

/// Particle-number and `S_z` sector in the interleaved spin-orbital layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sector {
    pub n_particles: u32,
    pub two_sz: i32,
}

impl Sector {
    /// Sector of a basis index, qubit `q` being index bit `n - 1 - q`.
    pub fn of_index(index: usize, n_qubits: usize) -> Sector {
        let mut n_particles = 0;
        let mut two_sz = 0;
        for q in 0..n_qubits {
            if index >> (n_qubits - 1 - q) & 1 == 1 {
                n_particles += 1;
                two_sz += if q % 2 == 0 { 1 } else { -1 };
            }
        }
        Sector { n_particles, two_sz }
    }

    pub fn of_determinant(det: &DeterminantSpec) -> Sector {
        Sector {
            n_particles: det.electron_count(),
            two_sz: det.two_sz(),
        }
    }

    /// Sectors touched by the determinants of a superposition.
    pub fn of_spec(spec: &SuperpositionSpec) -> Vec<Sector> {
        let mut out: Vec<Sector> = spec.entries().iter().map(|(d, _)| Sector::of_determinant(d)).collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateLabel {
    pub n_particles: f64,
    pub two_sz: f64,
    pub s_squared: Option<f64>,
    /// `S0, S1, …` for singlets, `T1, T2, …` for triplets; degenerate
    /// multiplet partners share a name.
    pub name: String,
}

/// Eigenpairs of a qubit Hamiltonian in ascending energy.
#[derive(Clone, Debug)]
pub struct SpectrumReference {
    pub n_qubits: usize,
    pub energies: Vec<f64>,
    pub vectors: Vec<CVector>,
    pub labels: Vec<StateLabel>,
}

impl SpectrumReference {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Index of the first state called `name`.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.name == name)
    }

    pub fn energy_of(&self, name: &str) -> Option<f64> {
        self.find(name).map(|k| self.energies[k])
    }

    /// `max_k ‖H v_k - E_k v_k‖`.
    pub fn max_residual(&self, h: &PauliSum) -> Result<f64> {
        let mut worst = 0.0f64;
        for (e, v) in self.energies.iter().zip(&self.vectors) {
            let hv = h.apply(v.as_slice())?;
            let r = hv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b * e).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

fn expectation(op: &PauliSum, v: &CVector) -> Result<f64> {
    let ov = op.apply(v.as_slice())?;
    Ok(v.iter().zip(&ov).map(|(a, b)| (a.conj() * b).re).sum())
}

/// True when no Hamiltonian matrix element couples different sectors.
fn is_sector_diagonal(h: &PauliSum) -> bool {
    let n = h.n_qubits();
    let dim = 1usize << n;
    let mut coupling: HashMap<(usize, usize), Complex64> = HashMap::new();
    for term in h.terms() {
        let (x, z) = term.string.index_masks();
        if x == 0 {
            continue;
        }
        let base = crate::pauli::y_phase(term.string.y_count()) * term.coefficient;
        for col in 0..dim {
            let row = col ^ x;
            if Sector::of_index(row, n) != Sector::of_index(col, n) {
                let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                *coupling.entry((row, col)).or_default() += base * sign;
            }
        }
    }
    coupling.values().all(|c| c.norm() < 1e-12)
}

/// Exact eigenpairs of `h` (identity coefficient included), optionally
/// restricted to one `(N, S_z)` sector.
///
/// Number- and `S_z`-conserving Hamiltonians are diagonalized block by
/// block; anything else falls back to the full matrix with sectors
/// assigned from expectation values.
pub fn reference_spectrum(h: &PauliSum, sector: Option<Sector>) -> Result<SpectrumReference> {
    match sector {
        Some(s) => reference_spectrum_in(h, Some(&[s])),
        None => reference_spectrum_in(h, None),
    }
}

/// As [`reference_spectrum`], keeping the union of the listed sectors.
pub fn reference_spectrum_in(h: &PauliSum, sectors: Option<&[Sector]>) -> Result<SpectrumReference> {
    let n = h.n_qubits();
    if n > MAX_COMPILED_QUBITS {
        return Err(Error::SizeGuard {
            what: "reference diagonalization",
            requested: n,
            limit: MAX_COMPILED_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut pairs: Vec<(f64, CVector)> = Vec::new();
    if is_sector_diagonal(h) {
        let mut blocks: BTreeMap<Sector, Vec<usize>> = BTreeMap::new();
        for index in 0..dim {
            blocks.entry(Sector::of_index(index, n)).or_default().push(index);
        }
        for (s, basis) in blocks {
            if sectors.is_some_and(|want| !want.contains(&s)) {
                continue;
            }
            let eig = HermitianEigen::new(&h.realize_block(&basis))?;
            for (k, &e) in eig.values.iter().enumerate() {
                let mut v = CVector::zeros(dim);
                for (i, &b) in basis.iter().enumerate() {
                    v[b] = eig.vectors[(i, k)];
                }
                pairs.push((e, v));
            }
        }
    } else {
        let eig = HermitianEigen::new(&h.realize_matrix()?)?;
        for (k, &e) in eig.values.iter().enumerate() {
            pairs.push((e, eig.vectors.column(k).into_owned()));
        }
    }

    let number = number_pauli(n);
    let sz = sz_pauli(n);
    let s2 = if n % 2 == 0 {
        Some(jordan_wigner(&s_squared_operator(n / 2))?)
    } else {
        None
    };
    let mut labelled = Vec::with_capacity(pairs.len());
    for (e, v) in pairs {
        let np = expectation(&number, &v)?;
        let tsz = 2.0 * expectation(&sz, &v)?;
        if let Some(want) = sectors {
            let inside = want
                .iter()
                .any(|w| (np - w.n_particles as f64).abs() <= 1e-6 && (tsz - w.two_sz as f64).abs() <= 1e-6);
            if !inside {
                continue;
            }
        }
        let s_squared = s2.as_ref().map(|op| expectation(op, &v)).transpose()?;
        labelled.push((e, v, np, tsz, s_squared));
    }
    labelled.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.3.total_cmp(&a.3)));

    let names = multiplet_names(&labelled.iter().map(|l| (l.0, l.2, l.4)).collect::<Vec<_>>());
    let mut out = SpectrumReference {
        n_qubits: n,
        energies: Vec::new(),
        vectors: Vec::new(),
        labels: Vec::new(),
    };
    for ((e, v, np, tsz, s_squared), name) in labelled.into_iter().zip(names) {
        out.energies.push(e);
        out.vectors.push(v);
        out.labels.push(StateLabel {
            n_particles: np,
            two_sz: tsz,
            s_squared,
            name,
        });
    }
    Ok(out)
}

fn number_pauli(n: usize) -> PauliSum {
    let z = |q: usize| {
        let mut s = crate::pauli::PauliString::identity(n);
        s.set(q, crate::pauli::Pauli::Z);
        crate::pauli::PauliTerm::new(s, -0.5)
    };
    PauliSum::new(n, (0..n).map(z)).expect("uniform lengths").with_identity(n as f64 / 2.0)
}

fn sz_pauli(n: usize) -> PauliSum {
    let z = |q: usize| {
        let mut s = crate::pauli::PauliString::identity(n);
        s.set(q, crate::pauli::Pauli::Z);
        let sign = if q % 2 == 0 { -0.25 } else { 0.25 };
        crate::pauli::PauliTerm::new(s, sign)
    };
    PauliSum::new(n, (0..n).map(z)).expect("uniform lengths")
}

fn multiplet_letter(two_s: i64) -> char {
    match two_s {
        0 => 'S',
        1 => 'D',
        2 => 'T',
        3 => 'Q',
        _ => 'M',
    }
}

/// Names states by spin multiplicity within each particle number, in
/// energy order. Degenerate partners of one multiplet share the name.
fn multiplet_names(states: &[(f64, f64, Option<f64>)]) -> Vec<String> {
    const DEGENERACY: f64 = 1e-8;
    let mut counters: HashMap<(i64, i64), usize> = HashMap::new();
    let mut last: HashMap<(i64, i64), (f64, String)> = HashMap::new();
    states
        .iter()
        .enumerate()
        .map(|(k, &(e, np, s2))| {
            let Some(s2) = s2 else {
                return format!("E{k}");
            };
            let two_s = ((-1.0 + (1.0 + 4.0 * s2.max(0.0)).sqrt()).round()) as i64;
            let key = (np.round() as i64, two_s);
            if let Some((e_prev, name)) = last.get(&key) {
                if (e - e_prev).abs() < DEGENERACY && two_s > 0 {
                    return name.clone();
                }
            }
            let start = if two_s <= 1 { 0 } else { 1 };
            let counter = counters.entry(key).or_insert(start);
            let name = format!("{}{}", multiplet_letter(two_s), counter);
            *counter += 1;
            last.insert(key, (e, name.clone()));
            name
        })
        .collect()
}

/// Overlaps `⟨Ψ_j|Φ⟩` of a prepared state with every reference state.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub overlaps: Vec<Complex64>,
}

impl SpectralDecomposition {
    pub fn weights(&self) -> Vec<f64> {
        self.overlaps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.overlaps.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn spectral_decomposition(reference: &SpectrumReference, spec: &SuperpositionSpec) -> Result<SpectralDecomposition> {
    decompose_vector(reference, &spec.statevector())
}

pub fn decompose_vector(reference: &SpectrumReference, v: &CVector) -> Result<SpectralDecomposition> {
    if v.len() != 1usize << reference.n_qubits {
        return Err(Error::invalid("state dimension does not match the reference"));
    }
    let overlaps = reference.vectors.iter().map(|psi| psi.dotc(v)).collect();
    Ok(SpectralDecomposition { overlaps })
}

/// `½[1 + Σ_j |c_j|² cos((E_j - ε)t)]`.
pub fn bpe_formula(c: &SpectralDecomposition, energies: &[f64], epsilon: f64, t: f64) -> f64 {
    let sum: f64 = c
        .weights()
        .iter()
        .zip(energies)
        .map(|(w, e)| w * ((e - epsilon) * t).cos())
        .sum();
    0.5 * (1.0 + sum)
}

/// `½[1 + Σ_jk |c_j|²|d_k|² cos((E_k - E_j - Δε)t)]`.
pub fn bpde_formula(c: &SpectralDecomposition, d: &SpectralDecomposition, energies: &[f64], delta: f64, t: f64) -> f64 {
    let wc = c.weights();
    let wd = d.weights();
    let mut sum = 0.0;
    for (j, &cj) in wc.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        for (k, &dk) in wd.iter().enumerate() {
            sum += cj * dk * ((energies[k] - energies[j] - delta) * t).cos();
        }
    }
    0.5 * (1.0 + sum)
}

/// A reference value a peak can be matched against: an eigenvalue gap
/// `E_k - E_j` (or an eigenvalue) with its expected weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleLine {
    pub label: String,
    /// Hartree.
    pub value: f64,
    pub weight: f64,
}

/// Gaps `E_k - E_j` with `|c_j|²|d_k|² ≥ min_weight`, merged by label and
/// sorted by descending weight.
pub fn oracle_gaps(
    reference: &SpectrumReference,
    c: &SpectralDecomposition,
    d: &SpectralDecomposition,
    min_weight: f64,
) -> Vec<OracleLine> {
    let wc = c.weights();
    let wd = d.weights();
    let mut merged: BTreeMap<String, OracleLine> = BTreeMap::new();
    for (j, &cj) in wc.iter().enumerate() {
        for (k, &dk) in wd.iter().enumerate() {
            let w = cj * dk;
            if w < min_weight {
                continue;
            }
            let label = format!("{}-{}", reference.labels[k].name, reference.labels[j].name);
            let value = reference.energies[k] - reference.energies[j];
            merged
                .entry(label.clone())
                .and_modify(|l| l.weight += w)
                .or_insert(OracleLine { label, value, weight: w });
        }
    }
    sort_lines(merged.into_values().collect())
}

/// Eigenvalues with `|c_j|² ≥ min_weight`.
pub fn oracle_levels(reference: &SpectrumReference, c: &SpectralDecomposition, min_weight: f64) -> Vec<OracleLine> {
    let mut merged: BTreeMap<String, OracleLine> = BTreeMap::new();
    for (j, w) in c.weights().into_iter().enumerate() {
        if w < min_weight {
            continue;
        }
        let label = reference.labels[j].name.clone();
        merged
            .entry(label.clone())
            .and_modify(|l| l.weight += w)
            .or_insert(OracleLine {
                label,
                value: reference.energies[j],
                weight: w,
            });
    }
    sort_lines(merged.into_values().collect())
}

fn sort_lines(mut lines: Vec<OracleLine>) -> Vec<OracleLine> {
    lines.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.label.cmp(&b.label)));
    lines
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub n_ancilla: usize,
    pub total_time: f64,
    pub min_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The bin lies in the band where the sign rule does not apply.
    Ambiguous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReportRow {
    pub bin: usize,
    pub bitstring: String,
    pub mass: f64,
    pub delta_phi: f64,
    #[serde(rename = "delta_E_hartree")]
    pub delta_e_hartree: Option<f64>,
    #[serde(rename = "delta_E_ev")]
    pub delta_e_ev: Option<f64>,
    pub nearest_oracle_gap: Option<f64>,
    /// Decoded (or, for ambiguous rows, nearest-alias) value minus oracle.
    pub deviation: Option<f64>,
    pub oracle_label: Option<String>,
    /// Alias of the bin nearest the matched oracle value.
    pub aliased_delta_e_hartree: Option<f64>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n_ancilla: usize,
    pub total_time: f64,
    /// Hartree per bin.
    pub resolution: f64,
    pub rows: Vec<GapReportRow>,
}

impl GapReport {
    /// Row of the heaviest peak.
    pub fn dominant(&self) -> Option<&GapReportRow> {
        self.rows.first()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            let status = match row.status {
                RowStatus::Ok => "ok",
                RowStatus::Ambiguous => "ambiguous",
            };
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
            w.write_record([
                row.bin.to_string(),
                row.bitstring.clone(),
                format!("{:.12}", row.mass),
                format!("{:.12}", row.delta_phi),
                opt(row.delta_e_hartree),
                opt(row.delta_e_ev),
                opt(row.nearest_oracle_gap),
                opt(row.deviation),
                row.oracle_label.clone().unwrap_or_default(),
                status.to_string(),
            ])
            .map_err(|e| Error::Numerical(format!("CSV write failed: {e}")))?;
        }
        w.flush().map_err(|e| Error::Numerical(format!("CSV write failed: {e}")))?;
        Ok(())
    }

    pub const CSV_HEADER: [&'static str; 10] = [
        "bin",
        "bitstring",
        "mass",
        "delta_phi",
        "delta_E_hartree",
        "delta_E_ev",
        "nearest_oracle_gap",
        "deviation",
        "oracle_label",
        "status",
    ];

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Self::CSV_HEADER.join(",").into_bytes();
        buf.push(b'\n');
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Numerical(e.to_string()))
    }
}

/// Joins peaks with decoded values and the nearest oracle line, matched by
/// circular bin distance so that aliased peaks still find their partner.
/// Lines lighter than `min_mass` could not produce a reported peak and are
/// not candidates.
pub fn gap_report(dist: &OutcomeDistribution, oracle: &[OracleLine], params: &DecodeParams) -> Result<GapReport> {
    if dist.n_ancilla != params.n_ancilla {
        return Err(Error::invalid("distribution and decode parameters disagree on the ancilla count"));
    }
    let n = (1u64 << params.n_ancilla) as f64;
    let t = params.total_time;
    let mut rows = Vec::new();
    for peak in find_peaks(dist, params.min_mass) {
        let reading = PhaseReading::new(peak.bin, params.n_ancilla)?;
        let decoded = match decode_phase(peak.bin, params.n_ancilla, t) {
            Ok(g) => Some(g.delta_e),
            Err(Error::AmbiguousPhase { .. }) => None,
            Err(e) => return Err(e),
        };
        let nearest = oracle.iter().filter(|l| l.weight >= params.min_mass).min_by(|a, b| {
            let da = circular_distance(gap_bin_position(a.value, params.n_ancilla, t), peak.bin as f64, n);
            let db = circular_distance(gap_bin_position(b.value, params.n_ancilla, t), peak.bin as f64, n);
            da.total_cmp(&db).then(b.weight.total_cmp(&a.weight))
        });
        let alias = nearest.map(|l| nearest_alias(peak.bin, params.n_ancilla, t, l.value));
        let deviation = nearest.map(|l| decoded.or(alias).expect("alias exists with a match") - l.value);
        rows.push(GapReportRow {
            bin: peak.bin,
            bitstring: reading.bits,
            mass: peak.mass,
            delta_phi: reading.delta_phi,
            delta_e_hartree: decoded,
            delta_e_ev: decoded.map(|e| e * HARTREE_TO_EV),
            nearest_oracle_gap: nearest.map(|l| l.value),
            deviation,
            oracle_label: nearest.map(|l| l.label.clone()),
            aliased_delta_e_hartree: alias,
            status: if decoded.is_some() {
                RowStatus::Ok
            } else {
                RowStatus::Ambiguous
            },
        });
    }
    Ok(GapReport {
        n_ancilla: params.n_ancilla,
        total_time: t,
        resolution: resolution(params.n_ancilla, t),
        rows,
    })
}

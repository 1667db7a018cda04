//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to
//! see the table.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use qpde::analysis::{
    aem_extrapolate, bpde_formula, bpe_formula, find_peaks, reference_spectrum, resolution, spectral_decomposition,
    Sector,
};
use qpde::circuits::{bpde_prob0, bpe_prob0, phase_kernel, CircuitMode};
use qpde::evolution::{EvolutionPath, EvolutionSpec};
use qpde::fermion::build_fermion_hamiltonian;
use qpde::linalg::{CMatrix, HermitianEigen};
use qpde::pauli::{PauliSum, PauliTerm};
use qpde::state_prep::{two_config_state, StateSpecFile, SuperpositionSpec};
use qpde::HARTREE_TO_EV;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn wrap(x: f64) -> f64 {
    x - x.floor()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let h = diagonal_toy(0.3, 0.7, 0.2, 0.15);
    let (e00, e10) = (1.35, 0.35);
    let t = 1.3;
    let na = 8;
    let ev = EvolutionSpec::exact(t).unwrap();
    let qpe = run(&h, CircuitMode::Qpe, na, ev, &bits("00"), None);
    let qpe_dev = max_diff(&qpe.probabilities, &phase_kernel(wrap(-e00 * t / (2.0 * PI)), na));
    let qpde = run(&h, CircuitMode::Qpde, na, ev, &bits("00"), Some(&bits("10")));
    let qpde_dev = max_diff(&qpde.probabilities, &phase_kernel(wrap(-(e10 - e00) * t / (2.0 * PI)), na));
    let secs = start.elapsed().as_secs_f64();
    outcome(
        qpe_dev < 1e-9 && qpde_dev < 1e-9 && secs < 10.0,
        format!("max |p - kernel|: QPE {qpe_dev:.1e}, QPDE {qpde_dev:.1e} (tol 1e-9); {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    // ΔE = 5·2π/(2^6·t) puts Δφ at -5/64, bin 59.
    let (na, t) = (6, 2.0);
    let gap = 5.0 * 2.0 * PI / (64.0 * t);
    let h = diagonal_toy(-gap / 2.0, 0.4, 0.0, 0.0);
    let dist = run(&h, CircuitMode::Qpde, na, EvolutionSpec::exact(t).unwrap(), &bits("00"), Some(&bits("10")));
    let p = dist.probabilities[59];
    let first = dist.sample(0).bitstring;
    let same = (0..100).all(|seed| dist.sample(seed).bitstring == first);
    outcome(
        p >= 1.0 - 1e-9 && same && first == "111011",
        format!("p(bin 59) = {p:.12}; 100 seeds all give {first}: {same}"),
    )
}

fn h2_631g() -> (PauliSum, SuperpositionSpec, SuperpositionSpec) {
    let h = hamiltonian("h2_631g_r20.fcidump");
    (h, single("2000"), single("aa00"))
}

fn window_mass(p: &[f64], centre: usize, half: usize) -> f64 {
    let n = p.len();
    (0..=2 * half).map(|k| p[(centre + n - half + k) % n]).sum()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (h, hf, triplet) = h2_631g();
    let two_config = two_config_state(0.4398, det("2000"), det("0200")).unwrap();
    let hf_problem = GapProblem::new(h.clone(), hf, triplet.clone());
    let tc_problem = GapProblem::new(h, two_config, triplet);
    let t = 10.0;
    let d_hf = hf_problem.qpde(12, t, EvolutionPath::Compiled, 0.5);
    let d_tc = tc_problem.qpde(12, t, EvolutionPath::Compiled, 0.5);
    let peaks_hf = find_peaks(&d_hf, 0.005);
    let peaks_tc = find_peaks(&d_tc, 0.005);
    let secondary = peaks_hf[1].bin;
    let m_hf = window_mass(&d_hf.probabilities, secondary, 2);
    let m_tc = window_mass(&d_tc.probabilities, secondary, 2);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        peaks_hf[0].bin == peaks_tc[0].bin && m_tc < m_hf && secs < 300.0,
        format!(
            "dominant bin HF {} / two-config {}; mass near bin {secondary}: {m_hf:.4} -> {m_tc:.2e}; {secs:.1} s",
            peaks_hf[0].bin, peaks_tc[0].bin
        ),
    )
}

fn triplet_problem() -> GapProblem {
    let (h, hf, triplet) = h2_631g();
    GapProblem::new(h, hf, triplet)
}

fn criterion_4(problem: &GapProblem) -> Outcome {
    let t = 10.0;
    let oracle = problem.oracle_gap("S0-T1");
    let half_bin = resolution(12, t) / 2.0;
    let exact = dominant_gap(&problem.report(&problem.qpde(12, t, EvolutionPath::Exact, 0.0), t));
    let trotter = dominant_gap(&problem.report(&problem.qpde(12, t, EvolutionPath::Compiled, 0.5), t));
    let (de, dt) = ((exact - oracle).abs(), (trotter - oracle).abs());
    outcome(
        de <= half_bin && dt < 5e-3,
        format!("oracle T1-S0 {oracle:.6} Ha; exact deviation {de:.2e} (tol {half_bin:.2e}); dt 0.5 deviation {dt:.2e} (tol 5e-3)"),
    )
}

fn criterion_5(problem: &GapProblem) -> Outcome {
    let t = 10.0;
    let oracle = problem.oracle_gap("S0-T1");
    let points: Vec<(f64, f64)> = [0.5, 1.0, 1.25]
        .iter()
        .map(|&dt| (dt, dominant_gap(&problem.report(&problem.qpde(12, t, EvolutionPath::Compiled, dt), t))))
        .collect();
    let err = |k: usize| (points[k].1 - oracle).abs();
    let ratio = err(1) / err(0);
    let fit = aem_extrapolate(&points).unwrap();
    let mitigated = (fit.b - oracle).abs();
    let cf2 = aem_extrapolate(&[(0.5, 0.056), (1.0, 0.240), (1.25, 0.357)]).unwrap();
    outcome(
        (3.0..=5.0).contains(&ratio) && mitigated < 1.6e-3 && (cf2.b - 0.002).abs() < 5e-4,
        format!(
            "error ratio dt1.0/dt0.5 {ratio:.2} (range 3-5); AEM deviation {mitigated:.2e} Ha (tol 1.6e-3); CF2 b {:.4} eV (0.002 ± 5e-4)",
            cf2.b
        ),
    )
}

fn criterion_6() -> Outcome {
    // Either input being an eigenstate makes the product formula exact;
    // in the minimal basis the α-α triplet is the only determinant of its sector.
    let h = hamiltonian("h2_sto3g_r20.fcidump");
    let reference = reference_spectrum(&h, None).unwrap();
    let hf = single("20");
    let two_config = two_config_state(0.3, det("20"), det("02")).unwrap();
    let triplet = single("aa");
    let t = 3.0;
    let ev = EvolutionSpec::exact(t).unwrap();
    let grid = |a: f64, b: f64| -> Vec<f64> { (0..200).map(|k| a + (b - a) * k as f64 / 199.0).collect() };
    let mut worst = 0.0f64;
    for phi0 in [&hf, &two_config] {
        let c = spectral_decomposition(&reference, phi0).unwrap();
        let g = grid(-2.0, 0.5);
        let circuit = bpe_prob0(&h, phi0, &g, &ev).unwrap();
        let formula: Vec<f64> = g.iter().map(|&e| bpe_formula(&c, &reference.energies, e, t)).collect();
        worst = worst.max(max_diff(&circuit, &formula));

        let d = spectral_decomposition(&reference, &triplet).unwrap();
        let g = grid(-0.5, 1.5);
        let circuit = bpde_prob0(&h, phi0, &triplet, &g, &ev).unwrap();
        let formula: Vec<f64> = g.iter().map(|&x| bpde_formula(&c, &d, &reference.energies, x, t)).collect();
        worst = worst.max(max_diff(&circuit, &formula));
    }
    outcome(worst < 1e-8, format!("max |circuit - formula| over 4 x 200 points {worst:.1e} (tol 1e-8)"))
}

fn fermion_sector_spectrum(dense: &CMatrix, n_qubits: usize, sector: Sector) -> Vec<f64> {
    let basis: Vec<usize> = (0..1usize << n_qubits)
        .filter(|&i| Sector::of_index(i, n_qubits) == sector)
        .collect();
    let block = CMatrix::from_fn(basis.len(), basis.len(), |r, c| dense[(basis[r], basis[c])]);
    HermitianEigen::new(&block).unwrap().values
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for name in [
        "h2_sto3g_r20.fcidump",
        "h2_631g_r15.fcidump",
        "h2_631g_r20.fcidump",
        "h2_631g_r25.fcidump",
        "h2_631g_r30.fcidump",
    ] {
        let ints = integrals(name);
        let ferm = build_fermion_hamiltonian(&ints);
        let h = qpde::fermion::jordan_wigner(&ferm).unwrap();
        let n = h.n_qubits();
        let dense = ferm.dense_matrix().unwrap();
        for n_particles in 0..=n as u32 {
            let max_sz = n_particles.min(n as u32 - n_particles) as i32;
            for two_sz in (-max_sz..=max_sz).step_by(2) {
                let sector = Sector { n_particles, two_sz };
                let oracle = fermion_sector_spectrum(&dense, n, sector);
                let mut qubit = reference_spectrum(&h, Some(sector)).unwrap().energies;
                qubit.sort_by(f64::total_cmp);
                assert_eq!(oracle.len(), qubit.len());
                worst = worst.max(max_diff(&oracle, &qubit));
                checked += 1;
            }
        }
    }
    outcome(worst < 1e-9, format!("{checked} sectors over 5 fixtures, max eigenvalue difference {worst:.1e} (tol 1e-9)"))
}

fn criterion_8() -> Outcome {
    let h = hamiltonian("h2_sto3g_r20.fcidump");
    let reference = reference_spectrum(&h, None).unwrap();
    let s0 = &reference.vectors[reference.find("S0").unwrap()];
    // The minimal-basis ground state lives on the two closed-shell determinants.
    let (a, b) = (s0[det("20").basis_index()], s0[det("02").basis_index()]);
    let phase = a / a.norm();
    let (ca, cb) = ((a / phase).re, (b / phase).re);
    let norm = (ca * ca + cb * cb).sqrt();
    let ground = SuperpositionSpec::new(vec![(det("20"), ca / norm), (det("02"), cb / norm)]).unwrap();
    let triplet = single("aa");
    let ev = EvolutionSpec::exact(10.0).unwrap();
    let tv = |phi0: &SuperpositionSpec| {
        let full = run(&h, CircuitMode::Qpde, 8, ev, phi0, Some(&triplet));
        let naive = run(&h, CircuitMode::QpdeNaive, 8, ev, phi0, Some(&triplet));
        full.total_variation(&naive)
    };
    let (eig, non) = (tv(&ground), tv(&single("20")));

    // Two-qubit hopping toy; the 50/50 one-particle mixture is not an eigenstate.
    let toy = PauliSum::new(
        2,
        vec![
            PauliTerm::parse("ZI", 0.5).unwrap(),
            PauliTerm::parse("IZ", 0.2).unwrap(),
            PauliTerm::parse("XX", 0.3).unwrap(),
            PauliTerm::parse("YY", 0.3).unwrap(),
        ],
    )
    .unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mixture = SuperpositionSpec::new(vec![(bits("10").entries()[0].0, h), (bits("01").entries()[0].0, h)]).unwrap();
    let ev = EvolutionSpec::exact(2.0).unwrap();
    let full = run(&toy, CircuitMode::Qpde, 6, ev, &mixture, Some(&bits("00")));
    let naive = run(&toy, CircuitMode::QpdeNaive, 6, ev, &mixture, Some(&bits("00")));
    let toy_tv = full.total_variation(&naive);
    outcome(
        eig < 1e-8 && non > 0.05 && toy_tv > 0.05,
        format!(
            "TV naive vs corrected: eigenstate {eig:.1e} (tol 1e-8); non-eigenstate 2-qubit toy {toy_tv:.3}, Hartree-Fock input {non:.3} (> 0.05)"
        ),
    )
}

fn peak_memory_mib() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib / 1024.0)
}

fn criterion_9(problem: &GapProblem) -> Outcome {
    let start = Instant::now();
    let dist = problem.qpde(12, 10.0, EvolutionPath::Compiled, 0.5);
    let secs = start.elapsed().as_secs_f64();
    let mem = peak_memory_mib();
    let mem_ok = mem.is_none_or(|m| m < 1024.0);
    outcome(
        secs < 60.0 && mem_ok && (dist.total() - 1.0).abs() < 1e-9,
        format!(
            "N_a = 12, N_s = 8, dt 0.5: {secs:.2} s (limit 60); peak resident {} (limit 1 GiB)",
            mem.map(|m| format!("{m:.0} MiB")).unwrap_or_else(|| "unavailable".into())
        ),
    )
}

/// Optional check against user-supplied integrals:
/// `QPDE_USER_FCIDUMP`, `QPDE_USER_PHI0`, `QPDE_USER_PHI1` (state-spec JSON)
/// and `QPDE_USER_EXPECTED_EV`. Ten ancillas, t = 10, dt ∈ {0.5, 1.0, 1.25}.
fn criterion_10() -> Option<Outcome> {
    let path = std::env::var("QPDE_USER_FCIDUMP").ok()?;
    let var = |k: &str| std::env::var(k).unwrap_or_else(|_| panic!("{k} must be set alongside QPDE_USER_FCIDUMP"));
    let ints = qpde::fcidump::parse_fcidump(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let h = qpde::fermion::jordan_wigner(&build_fermion_hamiltonian(&ints)).unwrap();
    let phi0 = StateSpecFile::from_json(&var("QPDE_USER_PHI0")).unwrap().resolve(ints.norb).unwrap();
    let phi1 = StateSpecFile::from_json(&var("QPDE_USER_PHI1")).unwrap().resolve(ints.norb).unwrap();
    let expected: f64 = var("QPDE_USER_EXPECTED_EV").parse().unwrap();
    let t = 10.0;
    let points: Vec<(f64, f64)> = [0.5, 1.0, 1.25]
        .iter()
        .map(|&dt| {
            let dist = run(&h, CircuitMode::Qpde, 10, evolution(EvolutionPath::Compiled, t, dt), &phi0, Some(&phi1));
            let peak = find_peaks(&dist, 0.005)[0].bin;
            (dt, qpde::analysis::decode_phase(peak, 10, t).unwrap().delta_e)
        })
        .collect();
    let ev = aem_extrapolate(&points).unwrap().b * HARTREE_TO_EV;
    Some(outcome(
        (ev - expected).abs() < 0.02,
        format!("{path}: AEM gap {ev:.4} eV vs {expected:.4} eV (tol 0.02)"),
    ))
}

#[test]
fn acceptance() {
    let problem = triplet_problem();
    let results: Vec<(u32, &str, Option<Outcome>)> = vec![
        (1, "analytic kernel", Some(criterion_1())),
        (2, "single-shot determinism", Some(criterion_2())),
        (3, "projective position invariance", Some(criterion_3())),
        (4, "gap accuracy vs oracle", Some(criterion_4(&problem))),
        (5, "Trotter scaling and AEM", Some(criterion_5(&problem))),
        (6, "single-ancilla circuit-formula identity", Some(criterion_6())),
        (7, "JW vs fermionic oracle", Some(criterion_7())),
        (8, "naive-circuit negative control", Some(criterion_8())),
        (9, "performance gate", Some(criterion_9(&problem))),
        (10, "user-supplied integrals", criterion_10()),
    ];
    let mut failed = Vec::new();
    for (id, name, result) in &results {
        match result {
            Some(o) => {
                println!("{} [{id}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
                if !o.pass {
                    failed.push(*id);
                }
            }
            None => println!("SKIP [{id}] {name}: set QPDE_USER_FCIDUMP to enable"),
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

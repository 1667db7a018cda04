"""Regenerate the H2 FCIDUMP fixtures (RHF canonical orbitals, no frozen core)."""
from pyscf import gto, scf, fci
from pyscf.tools import fcidump

CASES = [("sto-3g", r) for r in (2.0,)] + [("6-31g", r) for r in (1.5, 2.0, 2.5, 3.0)]

for basis, r in CASES:
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    name = f"h2_{basis.replace('-', '')}_r{r:.1f}.fcidump".replace(".0.", "0.").replace(".5.", "5.")
    fcidump.from_scf(mf, name, tol=1e-12)
    cis = fci.FCI(mf)
    cis.nroots = 6
    e, _ = cis.kernel()
    print(name, "RHF", mf.e_tot, "FCI(Sz=0)", e[:4])

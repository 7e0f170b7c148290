"""Optimal joint-measurement fidelity for purity estimation.

Run:  python demos/01_joint_bound.py
"""
from puritylab import PurityPrior, max_fidelity
from puritylab.analysis import fit_scaling

# The optimal collective measurement projects onto the SU(2) blocks of the
# N-qubit space.  Each block j has an optimal guess R_j ~ 2j/N, and the
# maximum fidelity approaches 1 - 1/(2N) for any prior.

for lam, name in [(0.0, "hard sphere"), (0.5, "Bures")]:
    prior = PurityPrior(lam)
    print(f"\n{name} prior (lambda = {lam})")
    print(f"{'N':>6} {'F_max':>20} {'N(1-F_max)':>12}")
    pts = []
    for N in (1, 2, 5, 10, 50, 250, 500, 1000, 2000):
        res = max_fidelity(N, prior)
        print(f"{N:>6} {res.f_max:>20.15f} {res.gap:>12.6f}")
        if N >= 250:
            pts.append((N, 1 - res.f_max))
    fit = fit_scaling(pts)
    print(f"log-log fit over N >= 250: 1-F ~ {fit.coefficient:.3f} N^{fit.exponent:.3f}")

# Look inside one large-N result: the guesses track 2j/N where the blocks
# carry weight.
res = max_fidelity(1000, PurityPrior(0.5))
print("\nN = 1000, Bures prior: a few blocks")
for b in res.blocks[::100]:
    print(f"  2j = {b.two_j:4d}  R_j = {b.r_j:.4f}  2j/N = {b.two_j / 1000:.4f}  "
          f"contribution = {b.contribution:.3e}")

"""Pointwise view: mean squared error of the adaptive estimate.

Run:  python demos/04_cramer_rao.py
"""
from puritylab.analysis import mse_decompose, quantum_fisher
from puritylab.protocols import AdaptiveConfig, simulate

# For fixed r the quantum Cramer-Rao floor is Var R >= (1 - r^2)/N.  The
# adaptive protocol only uses N1 copies for the purity read-out, so at finite
# N the natural yardstick is N1; the two agree as N^(alpha-1) -> 0.

cfg = AdaptiveConfig(10**6, 0.8)
print(f"N = {cfg.total_copies}, N0 = {cfg.n0}, N1 = {cfg.n1}")
print(f"{'r':>5} {'MSE':>12} {'bias^2':>10} {'N MSE H':>9} {'N1 MSE H':>9}")
for r in (0.2, 0.5, 0.8, 0.95):
    batch = simulate("adaptive", cfg, 50_000, master_seed=5, fixed_r=r)
    d = mse_decompose(batch.estimate, r)
    h = quantum_fisher(r)
    print(f"{r:>5} {d.mse:>12.4e} {d.bias_sq:>10.2e} "
          f"{cfg.total_copies * d.mse * h:>9.4f} {cfg.n1 * d.mse * h:>9.4f}")

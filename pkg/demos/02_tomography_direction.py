"""How well three-axis tomography finds the direction of the Bloch vector.

Run:  python demos/02_tomography_direction.py
"""
from puritylab.protocols import AdaptiveConfig, mc_average, predicted_theta2

# N0 copies are split evenly over x, y, z.  The direction estimate is the
# normalized vector of 2*frequency - 1 per axis.  Its mean squared angular
# error falls as 6/N0 (1/r^2 - 1/5), so low-purity states are harder.

trials = 50_000
print(f"{'r':>5} {'N0':>7} {'<Theta^2>/2 (MC)':>18} {'asymptotic':>12}")
for n0 in (3_000, 30_000):
    cfg = AdaptiveConfig.from_split(n0, 1)
    for r in (0.3, 0.5, 0.8, 1.0):
        s = mc_average("adaptive", cfg, trials, master_seed=1, fixed_r=r)
        print(f"{r:>5} {n0:>7} {s.mean_theta2 / 2:>18.4e} {predicted_theta2(r, n0) / 2:>12.4e}")

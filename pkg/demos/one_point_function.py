"""
The one-point function rho(n) = P(D_n(0)) decays like 1/n.

D_n(0) asks for two disjoint occupied paths from the neighbours of the
origin to the far boundary of the half-disc of radius n.  We estimate it
for a few n, fit three shapes and look at n * rho(n), which should stay
roughly flat.

    python demos/one_point_function.py
"""

from lowxing.events import EventSpec
from lowxing.experiments import fit_scaling, run_estimate

ns = [4, 8, 16, 32]
records = [run_estimate(EventSpec("D", n=n, v=0), {"truncation_factor": 4}, 40_000, 11)
           for n in ns]

print(" n   rho_hat     95% CI              n*rho")
for r in records:
    print(f"{r.n:3d}  {r.p_hat:.5f}  [{r.ci_low:.5f}, {r.ci_high:.5f}]  {r.n * r.p_hat:.3f}")

for model in ("inverse_linear", "inverse_log", "constant"):
    fit = fit_scaling(records, model)
    print(f"{model:15s} residual {fit.residual_sum:.4f}  max/min ratio {fit.max_min_ratio:.3f}")

power = fit_scaling(records, "power")
print(f"free exponent: {power.mu:.3f} (95% CI {power.mu_ci_low:.3f}..{power.mu_ci_high:.3f})")

"""Relay-based (measurement-device-independent) key rates.

Demonstrates that fourteen phase slices already perform like continuous
randomization, and why the decoy intensities must differ from the signal for
the closed-form component bound to exist.

Run:  python demos/mdi_rates.py            (about twenty seconds)
"""

from dprqkd import CprStatistics, SIGNAL, mdi_analytic_bounds, simulate_mdi
from dprqkd.sweep import _stats_for, default_run_config, optimize_intensities, rate_point

cfg = default_run_config("mdi")
params = cfg.channel


def optimize(d_value, dist):
    def ev(mu, nu):
        stats = _stats_for("mdi", d_value, mu, nu)
        rate, _ = rate_point("mdi", "analytic", stats, params, mu, nu, dist)
        return rate

    return optimize_intensities(cfg, dist, ev, d_value)


print("=" * 70)
print("Relay protocol: D = 14 vs the continuous baseline (analytic bounds)")
print("=" * 70)
print("L/km    rate (D=14)    rate (CPR)     relative gap")
for dist in (0, 10, 20, 30, 40, 50):
    _, _, r14 = optimize(14, float(dist))
    mu_c, _, rc = optimize(0, float(dist))
    gap = abs(rc - r14) / rc if rc > 0 else float("nan")
    print(f"{dist:<8}{r14:<15.4e}{rc:<15.4e}{100 * gap:.2f}%")
print()
mu_c, _, _ = optimize(0, 0.0)
print(f"Optimized signal intensity at L=0 (CPR): {mu_c:.3f}")
print("Fourteen slices are effectively indistinguishable from perfect phase")
print("randomization for this protocol.")
print()

print("=" * 70)
print("Why the decoy setting matters")
print("=" * 70)
cpr = CprStatistics()
obs = simulate_mdi(params, 0.01, 0.37, 0.0)
good = mdi_analytic_bounds(obs, cpr)
bad = mdi_analytic_bounds(obs, cpr, pair=(SIGNAL, SIGNAL))
print(f"decoy pair (nu, nu):     feasible={good.feasible}, Y11 lower bound={good.y11_lower_x:.4e}")
print(f"decoy pair (mu, mu):     feasible={bad.feasible}, Y11 lower bound={bad.y11_lower_x:.4e}")
print()
print("Estimating the single-component pair yield from the signal intensity")
print("alone makes the bounding denominator non-positive; the bound set is")
print("flagged infeasible and contributes no key, which is exactly why decoy")
print("states are indispensable here.")

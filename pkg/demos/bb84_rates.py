"""Point-to-point key rates under discrete phase randomization.

Sweeps distance for a few phase-slice counts, optimizing the signal and decoy
intensities at every point, and compares the closed-form bounds with the
LP-based ones where both are meaningful.

Run:  python demos/bb84_rates.py            (about half a minute)
"""

from dprqkd import bb84_key_rate, bb84_numeric_bounds, simulate_bb84
from dprqkd.sweep import _stats_for, default_run_config, optimize_intensities, rate_point

cfg = default_run_config("bb84")
params = cfg.channel
D_VALUES = (5, 7, 10, 0)  # 0 = continuous-randomization baseline
DISTANCES = list(range(0, 141, 20))


def optimize(d_value, dist):
    def ev(mu, nu):
        stats = _stats_for("bb84", d_value, mu, nu)
        rate, _ = rate_point("bb84", "analytic", stats, params, mu, nu, dist)
        return rate

    return optimize_intensities(cfg, dist, ev, d_value)


print("=" * 78)
print("Key rate vs distance, intensities optimized per point (analytic bounds)")
print("=" * 78)
label = {0: "CPR"}
head = "L/km  " + "".join(f"{label.get(d, f'D={d}'):>12}" for d in D_VALUES)
print(head + "      mu*(D=10)")
for dist in DISTANCES:
    row = f"{dist:<6}"
    mu10 = None
    for d_value in D_VALUES:
        mu, nu, rate = optimize(d_value, float(dist))
        if d_value == 10:
            mu10 = mu
        row += f"{rate:>12.3e}"
    print(row + f"      {mu10:.3f}")
print()
print("Fewer phase slices cost both rate and reach; the optimized signal")
print("intensity backs off as the channel gets longer, mirroring the model's")
print("published behavior.")
print()

print("=" * 78)
print("Closed-form vs linear-programming bounds (D = 10)")
print("=" * 78)
print("L/km    analytic rate    LP rate        gap")
for dist in (0.0, 20.0, 40.0, 60.0):
    mu, nu, r_analytic = optimize(10, dist)
    stats = _stats_for("bb84", 10, mu, nu)
    obs = simulate_bb84(params, nu, mu, dist)
    r_lp = bb84_key_rate(bb84_numeric_bounds(obs, stats), obs, stats, params)
    gap = abs(r_analytic - r_lp) / r_lp if r_lp > 0 else float("nan")
    print(f"{dist:<8.0f}{r_analytic:<17.6e}{r_lp:<15.6e}{100 * gap:.3f}%")
print()
print("At ten phase slices the closed forms track the LP optima to a fraction")
print("of a percent, at a tiny fraction of the computational cost.")

"""Tour of the discretely phase-randomized source model.

Shows how the emission statistics converge to Poisson as the number of phase
slices grows, how distinguishability between intensity settings melts away,
and why only the first two mixture components are usable for key generation.

Run:  python demos/source_statistics.py
"""

import math

from dprqkd import (
    SourceConfig,
    basis_fidelity_bb84,
    basis_fidelity_mdi,
    intensity_fidelity,
    pseudo_poisson_pmf,
)

MU, NU = 0.5, 0.02

print("=" * 72)
print("Emission statistics: pseudo-Poisson vs Poisson at intensity", MU)
print("=" * 72)
header = "k    " + "".join(f"D={d:<12}" for d in (2, 4, 8, 16)) + "Poisson"
print(header)
for k in range(4):
    row = f"{k}    "
    for d in (2, 4, 8, 16):
        if k < d:
            cfg = SourceConfig(n_phases=d, mu=MU, nu=NU)
            row += f"{pseudo_poisson_pmf(cfg, MU, k):<13.6f}"
        else:
            row += f"{'-':<13}"
    row += f"{math.exp(-MU) * MU**k / math.factorial(k):.6f}"
    print(row)
print()
print("With only two phase values the even/odd components soak up all the")
print("probability; by D = 16 the distribution is Poisson to ~1e-10.")
print()

print("=" * 72)
print(f"Intensity distinguishability: epsilon = sqrt(1 - F^2) for ({MU}, {NU})")
print("=" * 72)
for d in (4, 6, 8, 10, 12, 16):
    rec = intensity_fidelity(SourceConfig(n_phases=d, mu=MU, nu=NU), MU, NU)
    print(f"D={d:<3}  F={rec.fidelity:.12f}   epsilon={rec.epsilon:.3e}")
print()
print("Every decoy-state bound pays a penalty proportional to epsilon, so a")
print("few extra phase slices directly translate into tighter estimates.")
print()

print("=" * 72)
print("Basis dependence per component (D=10, signal intensity 0.5)")
print("=" * 72)
cfg = SourceConfig(n_phases=10, mu=MU, nu=NU)
print("k    F(single link)     F(two links via relay)")
for k in range(4):
    single = basis_fidelity_bb84(cfg, MU, k)
    pair = basis_fidelity_mdi(cfg, MU, k)
    print(f"{k}    {single:.9f}        {pair:.9f}")
print()
print("Components k = 0, 1 are indistinguishable across bases (fidelity ~ 1)")
print("and carry the secret key; k >= 2 drops to about one half, which is why")
print("the key-rate formulas sum only the first two components.")

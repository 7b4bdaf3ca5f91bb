"""LP realizations of the yield-estimation problems.

Instead of the joint nonlinear minimization of the key rate, each bounded
quantity (a yield lower bound or an error-product upper bound) is extremized
by its own linear program over truncated per-component variables.  The rate
is monotone in each bounded quantity, so per-quantity extrema give a valid,
at most slightly looser, overall lower bound -- and the LPs are deterministic
and fast.

Two relaxations keep the LPs sound and numerically well-posed:

* Truncation: the gain/error mixing equalities are relaxed to two-sided
  inequalities whose slack equals the probability mass of the dropped
  components, so any ground truth over the full support stays feasible.
* Merging: intensities whose distinguishability bound is below float noise
  (epsilon <= 1e-12) share one variable group.  The shared variable stands
  for the ground truth at the group representative; mixing rows for other
  members are widened by their (measured) epsilon to the representative, and
  the final bounds are shifted by the same amount.  Without this, thousands
  of near-equality rows at RHS ~1e-17 break the solver.
"""

from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse as sp

from .analytic import Bb84BoundSet, MdiBoundSet, _finish_bb84, _finish_mdi
from .channel import SIGNAL, X_BASIS, Y_BASIS, ObservableSet
from .lp import LpProblem, lp_solve

__all__ = ["bb84_numeric_bounds", "mdi_numeric_bounds"]

# Intensities closer than this in epsilon are modeled by one variable group.
_MERGE_TOL = 1e-12
# Mixing coefficients below this are shifted into the truncation tail.
_COEF_FLOOR = 1e-16


def _intensity_groups(eps: np.ndarray):
    """Partition intensity indices into indistinguishability groups.

    Returns (group id per intensity, representative per intensity, epsilon to
    the representative per intensity).  Epsilon is subadditive, so chained
    merges stay within (group size - 1) * _MERGE_TOL of the representative.
    """
    n = eps.shape[0]
    group = list(range(n))

    def find(i):
        while group[i] != i:
            group[i] = group[group[i]]
            i = group[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if eps[i, j] <= _MERGE_TOL:
                gi, gj = find(i), find(j)
                if gi != gj:
                    group[max(gi, gj)] = min(gi, gj)
    root = [find(i) for i in range(n)]
    comp = [float(eps[i, root[i]]) for i in range(n)]
    return root, comp


def _solve_block(rows, rhs, n_vars, objectives):
    """Solve one constraint block for several (column, sense) objectives.

    Rows are rescaled to unit right-hand-side magnitude before solving: the
    solver's feasibility tolerances are absolute, and the vacuum rows have
    right-hand sides around 1e-12, so without equilibration the permitted
    slop there would dwarf the quantities being bounded.
    """
    b_raw = np.asarray(rhs, dtype=float)
    scale = 1.0 / np.maximum(np.abs(b_raw), 1e-8)
    data, ri, ci = [], [], []
    for r, row in enumerate(rows):
        s = scale[r]
        for c, v in row:
            ri.append(r)
            ci.append(c)
            data.append(v * s)
    a_ub = sp.csr_matrix(
        (np.array(data), (np.array(ri), np.array(ci))), shape=(len(rows), n_vars)
    )
    b_ub = b_raw * scale
    bounds = [(0.0, 1.0)] * n_vars
    out = []
    for col, sense in objectives:
        c = np.zeros(n_vars)
        c[col] = 1.0
        sol = lp_solve(LpProblem(c, a_ub=a_ub, b_ub=b_ub, bounds=bounds, sense=sense))
        out.append(sol.objective if sol.optimal else None)
    return out


def _bb84_block(obs: ObservableSet, stats, basis: int, cutoff: int):
    """Constraint rows of the per-basis BB84 LP after merging/truncation.

    Returns (rows, rhs, n_vars, y_var, w_var, comp) where y_var/w_var map an
    intensity index and component k to a column, and comp[a] is the bound
    shift owed to merging for intensity a.
    """
    ints = obs.intensities
    eps = np.array(
        [[stats.epsilon(ints[i], ints[j]) for j in range(3)] for i in range(3)]
    )
    root, comp = _intensity_groups(eps)
    groups = sorted(set(root))
    gidx = {g: i for i, g in enumerate(groups)}
    pvecs = [stats.pmf_vector(a, cutoff) for a in ints]
    k_eff = len(pvecs[0])
    n_y = len(groups) * k_eff

    def y_var(a, k):
        return gidx[root[a]] * k_eff + k

    def w_var(a, k):
        return n_y + gidx[root[a]] * k_eff + k

    rows, rhs = [], []
    for a in range(3):
        p = pvecs[a]
        keep = [k for k in range(k_eff) if p[k] >= _COEF_FLOOR]
        tail = max(0.0, 1.0 - float(p[keep].sum()))
        slack = comp[a]
        q = obs.gain[basis, a]
        qe = obs.error_product[basis, a]
        rows.append([(y_var(a, k), p[k]) for k in keep])
        rhs.append(q + slack)
        rows.append([(y_var(a, k), -p[k]) for k in keep])
        rhs.append(tail + slack - q)
        rows.append([(w_var(a, k), p[k]) for k in keep])
        rhs.append(qe + slack)
        rows.append([(w_var(a, k), -p[k]) for k in keep])
        rhs.append(tail + slack - qe)
    for a, b in itertools.combinations(range(3), 2):
        if root[a] == root[b]:
            continue
        gap = float(eps[root[a], root[b]])
        if gap >= 1.0:
            continue
        for k in range(k_eff):
            for var in (y_var, w_var):
                rows.append([(var(a, k), 1.0), (var(b, k), -1.0)])
                rhs.append(gap)
                rows.append([(var(a, k), -1.0), (var(b, k), 1.0)])
                rhs.append(gap)
    for g in groups:
        for k in range(k_eff):
            rows.append([(w_var(g, k), 1.0), (y_var(g, k), -1.0)])
            rhs.append(0.0)
    return rows, rhs, 2 * n_y, y_var, w_var, comp


def bb84_numeric_bounds(obs: ObservableSet, stats, cutoff: int = 3) -> Bb84BoundSet:
    """BB84 bound set from six decomposed LPs (per-basis yield minima for
    k = 0, 1 and Y-basis error-product maxima)."""
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    mu = obs.intensities[SIGNAL]

    rows, rhs, n, y_var, _, comp = _bb84_block(obs, stats, X_BASIS, cutoff)
    vals_x = _solve_block(
        rows, rhs, n, [(y_var(SIGNAL, 0), "min"), (y_var(SIGNAL, 1), "min")]
    )
    rows, rhs, n, y_var, w_var, comp = _bb84_block(obs, stats, Y_BASIS, cutoff)
    vals_y = _solve_block(
        rows,
        rhs,
        n,
        [
            (y_var(SIGNAL, 0), "min"),
            (y_var(SIGNAL, 1), "min"),
            (w_var(SIGNAL, 0), "max"),
            (w_var(SIGNAL, 1), "max"),
        ],
    )

    f0 = stats.basis_fidelity("bb84", mu, 0)
    f1 = stats.basis_fidelity("bb84", mu, 1)
    if any(v is None for v in vals_x + vals_y):
        return _finish_bb84(0.0, 0.0, 0.5, 0.0, 0.0, 0.5, f0, f1, False, None)

    shift = comp[SIGNAL]
    lower = lambda v: min(1.0, max(0.0, v - shift))
    upper = lambda v: min(0.5, max(0.0, v + shift))
    return _finish_bb84(
        lower(vals_x[0]),
        lower(vals_y[0]),
        upper(vals_y[2]),
        lower(vals_x[1]),
        lower(vals_y[1]),
        upper(vals_y[3]),
        f0,
        f1,
        True,
        None,
    )


def _mdi_block(obs: ObservableSet, stats, basis: int, cutoff: int):
    """Constraint rows of the per-basis MDI LP over double-indexed components."""
    ints = obs.intensities
    eps = np.array(
        [[stats.epsilon(ints[i], ints[j]) for j in range(3)] for i in range(3)]
    )
    root, comp = _intensity_groups(eps)
    pairs = list(itertools.product(range(3), range(3)))
    group_pairs = sorted({(root[a], root[b]) for a, b in pairs})
    gp_idx = {gp: i for i, gp in enumerate(group_pairs)}
    pvecs = [stats.pmf_vector(a, cutoff) for a in ints]
    k_eff = len(pvecs[0])
    cell = k_eff * k_eff
    n_y = len(group_pairs) * cell

    def y_var(p, k, l):
        return gp_idx[(root[p[0]], root[p[1]])] * cell + k * k_eff + l

    def w_var(p, k, l):
        return n_y + gp_idx[(root[p[0]], root[p[1]])] * cell + k * k_eff + l

    rows, rhs = [], []
    for p in pairs:
        a, b = p
        joint = np.outer(pvecs[a], pvecs[b])
        cells = [
            (k, l)
            for k in range(k_eff)
            for l in range(k_eff)
            if joint[k, l] >= _COEF_FLOOR
        ]
        tail = max(0.0, 1.0 - float(sum(joint[k, l] for k, l in cells)))
        slack = comp[a] + comp[b]
        q = obs.gain[basis, a, b]
        qe = obs.error_product[basis, a, b]
        rows.append([(y_var(p, k, l), joint[k, l]) for k, l in cells])
        rhs.append(q + slack)
        rows.append([(y_var(p, k, l), -joint[k, l]) for k, l in cells])
        rhs.append(tail + slack - q)
        rows.append([(w_var(p, k, l), joint[k, l]) for k, l in cells])
        rhs.append(qe + slack)
        rows.append([(w_var(p, k, l), -joint[k, l]) for k, l in cells])
        rhs.append(tail + slack - qe)
    for gp1, gp2 in itertools.combinations(group_pairs, 2):
        gap = float(eps[gp1[0], gp2[0]] + eps[gp1[1], gp2[1]])
        if gap >= 1.0:
            continue
        p1, p2 = tuple(gp1), tuple(gp2)
        for k in range(k_eff):
            for l in range(k_eff):
                for var in (y_var, w_var):
                    rows.append([(var(p1, k, l), 1.0), (var(p2, k, l), -1.0)])
                    rhs.append(gap)
                    rows.append([(var(p1, k, l), -1.0), (var(p2, k, l), 1.0)])
                    rhs.append(gap)
    for gp in group_pairs:
        p = tuple(gp)
        for k in range(k_eff):
            for l in range(k_eff):
                rows.append([(w_var(p, k, l), 1.0), (y_var(p, k, l), -1.0)])
                rhs.append(0.0)
    return rows, rhs, 2 * n_y, y_var, w_var, comp


def mdi_numeric_bounds(obs: ObservableSet, stats, cutoff: int = 7) -> MdiBoundSet:
    """MDI bound set from decomposed LPs over the signal-signal intensity pair."""
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    mu = obs.intensities[SIGNAL]
    sig = (SIGNAL, SIGNAL)

    rows, rhs, n, y_var, _, comp = _mdi_block(obs, stats, X_BASIS, cutoff)
    vals_x = _solve_block(
        rows, rhs, n, [(y_var(sig, 0, 0), "min"), (y_var(sig, 1, 1), "min")]
    )
    rows, rhs, n, y_var, w_var, comp = _mdi_block(obs, stats, Y_BASIS, cutoff)
    vals_y = _solve_block(
        rows,
        rhs,
        n,
        [
            (y_var(sig, 0, 0), "min"),
            (y_var(sig, 1, 1), "min"),
            (w_var(sig, 0, 0), "max"),
            (w_var(sig, 1, 1), "max"),
        ],
    )

    f0 = stats.basis_fidelity("mdi", mu, 0)
    f1 = stats.basis_fidelity("mdi", mu, 1)
    if any(v is None for v in vals_x + vals_y):
        return _finish_mdi(0.0, 0.0, 0.5, 0.0, 0.0, 0.5, f0, f1, False)

    shift = 2.0 * comp[SIGNAL]
    lower = lambda v: min(1.0, max(0.0, v - shift))
    upper = lambda v: min(0.5, max(0.0, v + shift))
    return _finish_mdi(
        lower(vals_x[0]),
        lower(vals_y[0]),
        upper(vals_y[2]),
        lower(vals_x[1]),
        lower(vals_y[1]),
        upper(vals_y[3]),
        f0,
        f1,
        True,
    )

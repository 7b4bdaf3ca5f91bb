"""Independent oracles and synthetic-table generators used across the tests.

Everything here deliberately avoids the library's computational paths: series
are summed with explicit factorials, fidelities come from dense truncated
Fock-space density matrices, LP optima from vertex enumeration, and bound
soundness from randomized ground-truth tables that satisfy the constraint
set by construction.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from dprqkd import ObservableSet


# ---------------------------------------------------------------------------
# direct series sums (plain Python, explicit factorials)


def direct_wrapped_series(x: float, n_phases: int, k: int, terms: int = 60) -> float:
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    total = 0.0
    for m in range(terms):
        n = m * n_phases + k
        total += math.exp(n * math.log(x) - math.lgamma(n + 1))
    return total


def direct_pmf(intensity: float, n_phases: int, k: int) -> float:
    return math.exp(-intensity) * direct_wrapped_series(intensity, n_phases, k)


def direct_intensity_fidelity(a1: float, a2: float, n_phases: int) -> float:
    num = direct_wrapped_series(math.sqrt(a1 * a2), n_phases, 0)
    den = math.sqrt(
        direct_wrapped_series(a1, n_phases, 0) * direct_wrapped_series(a2, n_phases, 0)
    )
    return num / den


# ---------------------------------------------------------------------------
# truncated-Fock-space basis-fidelity oracle


def _coherent_vector(amplitude: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    log_fact = np.cumsum(np.log(np.maximum(n, 1)))
    vec = np.exp(-0.5 * abs(amplitude) ** 2) * amplitude**n / np.exp(0.5 * log_fact)
    return vec.astype(complex)


def fock_basis_fidelity(
    n_phases: int, arm_intensity: float, k: int, protocol: str = "bb84", cutoff: int = 40
) -> float:
    """Uhlmann fidelity of the X/Y encoder mixtures via dense Fock matrices.

    Builds the two-mode kets explicitly (cutoff photons per mode), forms the
    full density matrices, and computes tr sqrt(sqrt(rho_x) rho_y sqrt(rho_x))
    by eigendecomposition of the full matrices.
    """
    amp = math.sqrt(arm_intensity)
    shifts = {"x0": 0.0, "x1": math.pi, "y0": math.pi / 2, "y1": 3 * math.pi / 2}

    def ket(shift: float) -> np.ndarray:
        dim = (cutoff + 1) ** 2
        v = np.zeros(dim, dtype=complex)
        for j in range(n_phases):
            theta = 2 * math.pi * j / n_phases
            weight = np.exp(-2j * math.pi * k * j / n_phases)
            ref = _coherent_vector(amp * np.exp(1j * theta), cutoff)
            sig = _coherent_vector(amp * np.exp(1j * (theta + shift)), cutoff)
            v += weight * np.kron(ref, sig)
        return v

    def density(labels) -> np.ndarray:
        dim = (cutoff + 1) ** 2
        rho = np.zeros((dim, dim), dtype=complex)
        for lab in labels:
            v = ket(shifts[lab])
            norm = np.vdot(v, v).real
            rho += np.outer(v, v.conj()) / norm
        return rho / len(labels)

    rho_x = density(["x0", "x1"])
    rho_y = density(["y0", "y1"])
    if protocol == "mdi":
        rho_x = np.kron(rho_x, rho_x)
        rho_y = np.kron(rho_y, rho_y)
    evals, evecs = np.linalg.eigh(rho_x)
    evals = np.clip(evals, 0.0, None)
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    inner = root @ rho_y @ root
    lam = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(lam)))


# ---------------------------------------------------------------------------
# vertex-enumeration LP oracle


def vertex_enumeration_optimum(problem) -> float | None:
    """Optimal objective by enumerating basic feasible points.

    Collects all constraint facets (inequality rows, equality rows, variable
    bounds), solves every n x n active subset, and keeps feasible points.
    Only suitable for a handful of variables.
    """
    c = np.asarray(problem.objective, dtype=float)
    n = c.size
    rows = []
    rhs = []
    eq_rows = []
    eq_rhs = []
    if problem.a_ub is not None:
        a = np.asarray(problem.a_ub, dtype=float)
        for i in range(a.shape[0]):
            rows.append(a[i])
            rhs.append(float(problem.b_ub[i]))
    if problem.a_eq is not None:
        a = np.asarray(problem.a_eq, dtype=float)
        for i in range(a.shape[0]):
            eq_rows.append(a[i])
            eq_rhs.append(float(problem.b_eq[i]))
    for i, (lo, hi) in enumerate(problem.bounds):
        e = np.zeros(n)
        e[i] = 1.0
        rows.append(-e)
        rhs.append(-lo)
        rows.append(e.copy())
        rhs.append(hi)

    m_eq = len(eq_rows)
    candidates = []
    idx = range(len(rows))
    for combo in itertools.combinations(idx, n - m_eq):
        mat = np.array(eq_rows + [rows[i] for i in combo])
        vec = np.array(eq_rhs + [rhs[i] for i in combo])
        if abs(np.linalg.det(mat)) < 1e-12:
            continue
        x = np.linalg.solve(mat, vec)
        ok = all(float(r @ x) <= b + 1e-9 for r, b in zip(rows, rhs)) and all(
            abs(float(r @ x) - b) <= 1e-9 for r, b in zip(eq_rows, eq_rhs)
        )
        if ok:
            candidates.append(float(c @ x))
    if not candidates:
        return None
    return min(candidates) if problem.sense == "min" else max(candidates)


# ---------------------------------------------------------------------------
# synthetic ground-truth tables


def _sample_chain(rng, anchors, radii, lo, hi):
    """Draw a value inside every |v - anchor| <= radius band and [lo, hi].

    Feasibility of the intersection follows from the subadditivity of the
    radii (they are fidelity-based distances), which callers guarantee.
    """
    low = max([lo] + [a - r for a, r in zip(anchors, radii)])
    high = min([hi] + [a + r for a, r in zip(anchors, radii)])
    if high < low:
        raise AssertionError("synthetic-table interval empty; generator bug")
    return low + (high - low) * rng.random()


def synthetic_bb84_tables(rng, stats, intensities, n_components, y_max=1.0):
    """Ground-truth yields/error products satisfying the difference bounds.

    Returns (yields, errors) arrays of shape (2, n_components, 3) indexed
    [basis, k, intensity].  Intensity order follows ``intensities``; values
    are generated signal-first so every pairwise epsilon constraint holds.
    """
    eps = np.array(
        [[stats.epsilon(a, b) for b in intensities] for a in intensities]
    )
    order = (2, 1, 0)
    yields = np.zeros((2, n_components, 3))
    errors = np.zeros((2, n_components, 3))
    for basis in range(2):
        for k in range(n_components):
            placed = []
            for pos, a in enumerate(order):
                anchors = [yields[basis, k, b] for b in placed]
                radii = [eps[a, b] for b in placed]
                yields[basis, k, a] = _sample_chain(rng, anchors, radii, 0.0, y_max)
                placed.append(a)
            placed = []
            for a in order:
                anchors = [errors[basis, k, b] for b in placed]
                radii = [eps[a, b] for b in placed]
                cap = 0.5 * yields[basis, k, a]
                errors[basis, k, a] = _sample_chain(rng, anchors, radii, 0.0, cap)
                placed.append(a)
    return yields, errors


def bb84_observables_from_tables(stats, intensities, yields, errors) -> ObservableSet:
    n_components = yields.shape[1]
    gain = np.zeros((2, 3))
    err = np.zeros((2, 3))
    for i, alpha in enumerate(intensities):
        p = stats.pmf_vector(alpha, n_components)
        gain[:, i] = yields[:, :, i] @ p
        err[:, i] = errors[:, :, i] @ p
    return ObservableSet("bb84", tuple(intensities), gain, err)


def synthetic_mdi_tables(rng, stats, intensities, n_components, y_max=1.0):
    """Ground-truth double-indexed tables for the relay protocol.

    Returns (yields, errors) of shape (2, n, n, 3, 3) indexed
    [basis, k, l, intensity_a, intensity_b]; every pair-of-pairs difference
    constraint |v_P1 - v_P2| <= eps_a1a2 + eps_b1b2 holds by construction.
    """
    eps = np.array(
        [[stats.epsilon(a, b) for b in intensities] for a in intensities]
    )
    pair_order = [(2, 2)] + [p for p in itertools.product(range(3), range(3)) if p != (2, 2)]
    yields = np.zeros((2, n_components, n_components, 3, 3))
    errors = np.zeros((2, n_components, n_components, 3, 3))
    for basis in range(2):
        for k in range(n_components):
            for l in range(n_components):
                placed = []
                for a, b in pair_order:
                    anchors = [yields[basis, k, l, a2, b2] for a2, b2 in placed]
                    radii = [eps[a, a2] + eps[b, b2] for a2, b2 in placed]
                    yields[basis, k, l, a, b] = _sample_chain(rng, anchors, radii, 0.0, y_max)
                    placed.append((a, b))
                placed = []
                for a, b in pair_order:
                    anchors = [errors[basis, k, l, a2, b2] for a2, b2 in placed]
                    radii = [eps[a, a2] + eps[b, b2] for a2, b2 in placed]
                    cap = 0.5 * yields[basis, k, l, a, b]
                    errors[basis, k, l, a, b] = _sample_chain(rng, anchors, radii, 0.0, cap)
                    placed.append((a, b))
    return yields, errors


def mdi_observables_from_tables(stats, intensities, yields, errors) -> ObservableSet:
    n_components = yields.shape[1]
    gain = np.zeros((2, 3, 3))
    err = np.zeros((2, 3, 3))
    pv = [stats.pmf_vector(a, n_components) for a in intensities]
    for a in range(3):
        for b in range(3):
            joint = np.outer(pv[a], pv[b])
            gain[:, a, b] = np.tensordot(yields[:, :, :, a, b], joint, axes=([1, 2], [0, 1]))
            err[:, a, b] = np.tensordot(errors[:, :, :, a, b], joint, axes=([1, 2], [0, 1]))
    return ObservableSet("mdi", tuple(intensities), gain, err)


# ---------------------------------------------------------------------------
# full-support LP oracle for the BB84 single-component yield bound


def brute_force_y1_minimum(obs, stats, n_components: int, basis: int = 0):
    """Minimum feasible Y1 at the signal intensity over the full component set.

    Builds the complete constraint system (exact two-sided mixing with a
    vanishing tail, every pairwise difference row, the error-product block
    with W <= Y) and minimizes the signal-intensity Y1 directly.  Independent
    of the production LP construction.
    """
    from dprqkd.lp import LpProblem, lp_solve

    ints = obs.intensities
    pv = [stats.pmf_vector(a, n_components) for a in ints]
    n_y = 3 * n_components
    y = lambda a, k: a * n_components + k
    w = lambda a, k: n_y + a * n_components + k
    rows, rhs = [], []
    for a in range(3):
        tail = max(0.0, 1.0 - float(pv[a].sum()))
        for arr, target in ((y, obs.gain[basis, a]), (w, obs.error_product[basis, a])):
            rows.append([(arr(a, k), pv[a][k]) for k in range(n_components)])
            rhs.append(target)
            rows.append([(arr(a, k), -pv[a][k]) for k in range(n_components)])
            rhs.append(tail - target)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        eps = stats.epsilon(ints[a], ints[b])
        for k in range(n_components):
            for arr in (y, w):
                rows.append([(arr(a, k), 1.0), (arr(b, k), -1.0)])
                rhs.append(eps)
                rows.append([(arr(a, k), -1.0), (arr(b, k), 1.0)])
                rhs.append(eps)
    for a in range(3):
        for k in range(n_components):
            rows.append([(w(a, k), 1.0), (y(a, k), -1.0)])
            rhs.append(0.0)
    a_ub = np.zeros((len(rows), 2 * n_y))
    for r, row in enumerate(rows):
        for cidx, v in row:
            a_ub[r, cidx] = v
    c = np.zeros(2 * n_y)
    c[y(2, 1)] = 1.0
    sol = lp_solve(
        LpProblem(c, a_ub=a_ub, b_ub=np.array(rhs), bounds=[(0.0, 1.0)] * (2 * n_y))
    )
    return sol.objective if sol.optimal else None

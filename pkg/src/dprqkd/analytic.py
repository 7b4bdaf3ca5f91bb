"""Closed-form yield/error bounds and key-rate formulas.

Given the observable gains and error products of the vacuum+weak-decoy
protocol, these functions bound the yields and bit-error products of the
k = 0 and k = 1 source components from below/above, translate the Y-basis
bit errors into X-basis phase-error caps through the basis-dependence
parameter, and assemble the secret-key-rate lower bound.  Everything here is
a pure function of its inputs.

The bounds are conservative by construction: every lower bound is <= and
every upper bound is >= the corresponding ground-truth value for any yield
assignment consistent with the observables and the intensity-fidelity
constraints.  The test suite checks this against randomized synthetic tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import DECOY, SIGNAL, VACUUM, X_BASIS, Y_BASIS, ChannelParams, ObservableSet

__all__ = [
    "Bb84BoundSet",
    "MdiBoundSet",
    "binary_entropy",
    "basis_dependence_delta",
    "phase_error_upper",
    "bb84_a_coefficient",
    "bb84_analytic_bounds",
    "bb84_key_rate",
    "mdi_analytic_bounds",
    "mdi_key_rate",
]

_MONOTONE_TOL = 1e-12


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy with h(0) = h(1) = 0."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def basis_dependence_delta(fidelity: float, yield_lower: float) -> float:
    """Basis-dependence parameter min(1, (1 - F) / (2 * Y)).

    Returns 1 when the yield lower bound vanishes: with no detections to
    attribute, the basis dependence is maximally damaging.
    """
    if yield_lower < 0.0:
        raise ValueError("yield_lower must be non-negative")
    if yield_lower == 0.0:
        return 1.0
    return min(1.0, (1.0 - fidelity) / (2.0 * yield_lower))


def phase_error_upper(bit_err: float, delta: float) -> float:
    """Cap on the X-basis phase error given the Y-basis bit error and delta.

    Capped at 0.5; a delta of 0.5 or more carries no information.
    """
    if not 0.0 <= bit_err <= 0.5:
        raise ValueError("bit_err must lie in [0, 0.5]")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if delta >= 0.5:
        return 0.5
    e = bit_err
    val = (
        e
        + 4.0 * delta * (1.0 - delta) * (1.0 - 2.0 * e)
        + 4.0 * (1.0 - 2.0 * delta) * math.sqrt(delta * (1.0 - delta) * e * (1.0 - e))
    )
    return min(0.5, val)


@dataclass(frozen=True)
class Bb84BoundSet:
    """Bounds feeding the BB84 rate: per-basis yield lower bounds for k = 0, 1,
    Y-basis error-product upper bounds, and the derived bit/phase error caps."""

    y0_lower_x: float
    y0_lower_y: float
    w0_upper_y: float
    y1_lower_x: float
    y1_lower_y: float
    w1_upper_y: float
    bit_err0_upper: float
    bit_err1_upper: float
    delta0: float
    delta1: float
    phase_err0_upper: float
    phase_err1_upper: float
    feasible: bool
    a_coeff: float | None = None


@dataclass(frozen=True)
class MdiBoundSet:
    """Bounds feeding the MDI rate for the (0,0) and (1,1) component pairs."""

    y00_lower_x: float
    y00_lower_y: float
    w00_upper_y: float
    y11_lower_x: float
    y11_lower_y: float
    w11_upper_y: float
    bit_err00_upper: float
    bit_err11_upper: float
    delta00: float
    delta11: float
    phase_err00_upper: float
    phase_err11_upper: float
    feasible: bool
    t1_x: float | None = None
    t1_y: float | None = None
    ts_x: float | None = None
    ts_y: float | None = None
    t2_y: float | None = None
    coeff_a: float | None = None
    coeff_b: float | None = None
    coeff_c: float | None = None
    coeff_g: float | None = None
    eps_sbar: float | None = None
    eps_s: float | None = None
    eps_ts: float | None = None


def bb84_a_coefficient(stats, a1: float, a2: float, mu: float) -> float:
    """Worst-case multiphoton ratio max_{k>=2} (e^a1 p_k^a1 - e^a2 p_k^a2) / (e^mu p_k^mu).

    The ratio is monotone decreasing in k for a1 > a2, so the maximum sits at
    k = 2; monotonicity is verified at k = 3 rather than trusted, since series
    truncation could perturb tiny ratios.
    """
    if a1 == a2:
        return 0.0
    support = stats.support
    if support is not None and support <= 2:
        # no k >= 2 component exists for a 2-slice source
        return 0.0

    def ratio(k: int) -> float:
        return (stats.raw_series(a1, k) - stats.raw_series(a2, k)) / stats.raw_series(mu, k)

    value = ratio(2)
    if support is None or support > 3:
        if ratio(3) > value + _MONOTONE_TOL:
            raise ArithmeticError(
                "multiphoton ratio not decreasing between k=2 and k=3; "
                "series truncation tolerance too loose"
            )
    return value


def _clip(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


def _finish_bb84(
    y0l_x: float,
    y0l_y: float,
    w0u_y: float,
    y1l_x: float,
    y1l_y: float,
    w1u_y: float,
    f0: float,
    f1: float,
    feasible: bool,
    a_coeff: float | None,
) -> Bb84BoundSet:
    """Shared tail of the BB84 pipeline: bit-error caps, delta, phase-error caps."""
    eb0 = _clip(w0u_y / y0l_y, 0.0, 0.5) if y0l_y > 0.0 else 0.5
    eb1 = _clip(w1u_y / y1l_y, 0.0, 0.5) if y1l_y > 0.0 else 0.5
    d0 = basis_dependence_delta(f0, y0l_x)
    d1 = basis_dependence_delta(f1, y1l_x)
    return Bb84BoundSet(
        y0_lower_x=y0l_x,
        y0_lower_y=y0l_y,
        w0_upper_y=w0u_y,
        y1_lower_x=y1l_x,
        y1_lower_y=y1l_y,
        w1_upper_y=w1u_y,
        bit_err0_upper=eb0,
        bit_err1_upper=eb1,
        delta0=d0,
        delta1=d1,
        phase_err0_upper=phase_error_upper(eb0, d0),
        phase_err1_upper=phase_error_upper(eb1, d1),
        feasible=feasible,
        a_coeff=a_coeff,
    )


def bb84_analytic_bounds(
    obs: ObservableSet, stats, pair: tuple[int, int] = (DECOY, VACUUM)
) -> Bb84BoundSet:
    """Closed-form BB84 bound set from the decoy-intensity pair (default (nu, 0)).

    If a denominator fails to be positive the affected k component is flagged
    infeasible (yield bound 0), never raised.
    """
    i1, i2 = pair
    ints = obs.intensities
    a1, a2, mu = ints[i1], ints[i2], ints[SIGNAL]
    if a1 <= a2:
        raise ValueError("decoy pair must satisfy a1 > a2")

    eps_mu0 = stats.epsilon(mu, 0.0)
    eps_a1_0 = stats.epsilon(a1, 0.0)
    eps_a2_0 = stats.epsilon(a2, 0.0)
    eps_mu_a1 = stats.epsilon(mu, a1)
    eps_mu_a2 = stats.epsilon(mu, a2)

    q0 = obs.gain[:, VACUUM]
    w0 = obs.error_product[:, VACUUM]
    y0l_x = max(q0[X_BASIS] - eps_mu0, 0.0)
    y0l_y = max(q0[Y_BASIS] - eps_mu0, 0.0)
    w0u_y = min(w0[Y_BASIS] + eps_mu0, 0.5)

    a_coeff = bb84_a_coefficient(stats, a1, a2, mu)
    s0_1, s0_2, s0_mu = (stats.raw_series(a, 0) for a in (a1, a2, mu))
    s1_1, s1_2, s1_mu = (stats.raw_series(a, 1) for a in (a1, a2, mu))
    e1, e2, emu = math.exp(a1), math.exp(a2), math.exp(mu)

    feasible = True
    denom_y1 = s1_1 - s1_2 - a_coeff * s1_mu
    denom_w1 = s1_1 - s1_2

    def y1_lower(basis: int) -> float:
        q_a1 = obs.gain[basis, i1]
        q_a2 = obs.gain[basis, i2]
        q_vac = obs.gain[basis, VACUUM]
        q_mu = obs.gain[basis, SIGNAL]
        num = (
            e1 * q_a1
            - e2 * q_a2
            - (s0_1 - s0_2 - a_coeff * s0_mu) * q_vac
            - a_coeff * emu * q_mu
            - a_coeff * s0_mu * eps_mu0
            - s0_1 * eps_a1_0
            - s0_2 * eps_a2_0
            - (e1 - s0_1) * eps_mu_a1
            - (e2 - s0_2) * eps_mu_a2
        )
        return _clip(num / denom_y1, 0.0, 1.0)

    if denom_y1 > 0.0:
        y1l_x = y1_lower(X_BASIS)
        y1l_y = y1_lower(Y_BASIS)
    else:
        y1l_x = y1l_y = 0.0
        feasible = False

    if denom_w1 > 0.0:
        w_a1 = obs.error_product[Y_BASIS, i1]
        w_a2 = obs.error_product[Y_BASIS, i2]
        w_vac = obs.error_product[Y_BASIS, VACUUM]
        num_w = (
            e1 * w_a1
            - e2 * w_a2
            - (s0_1 - s0_2) * w_vac
            + s0_1 * eps_a1_0
            + s0_2 * eps_a2_0
            + s1_1 * eps_mu_a1
            + s1_2 * eps_mu_a2
        )
        w1u_y = _clip(num_w / denom_w1, 0.0, 0.5)
    else:
        w1u_y = 0.5
        feasible = False

    f0 = stats.basis_fidelity("bb84", mu, 0)
    f1 = stats.basis_fidelity("bb84", mu, 1)
    return _finish_bb84(
        y0l_x, y0l_y, w0u_y, y1l_x, y1l_y, w1u_y, f0, f1, feasible, a_coeff
    )


def bb84_key_rate(
    bounds: Bb84BoundSet, obs: ObservableSet, stats, params: ChannelParams
) -> float:
    """Secret-key-rate lower bound per emitted signal pulse, floored at 0."""
    mu = obs.intensities[SIGNAL]
    q_mu = obs.gain[X_BASIS, SIGNAL]
    qe_mu = obs.error_product[X_BASIS, SIGNAL]
    qber = qe_mu / q_mu if q_mu > 0.0 else 0.0
    secret = stats.pmf(mu, 0) * bounds.y0_lower_x * (
        1.0 - binary_entropy(bounds.phase_err0_upper)
    ) + stats.pmf(mu, 1) * bounds.y1_lower_x * (
        1.0 - binary_entropy(bounds.phase_err1_upper)
    )
    leak = params.ec_inefficiency * q_mu * binary_entropy(qber)
    return max(0.0, secret - leak)


def _finish_mdi(
    y00l_x: float,
    y00l_y: float,
    w00u_y: float,
    y11l_x: float,
    y11l_y: float,
    w11u_y: float,
    f0: float,
    f1: float,
    feasible: bool,
    **diagnostics,
) -> MdiBoundSet:
    eb00 = _clip(w00u_y / y00l_y, 0.0, 0.5) if y00l_y > 0.0 else 0.5
    eb11 = _clip(w11u_y / y11l_y, 0.0, 0.5) if y11l_y > 0.0 else 0.5
    d00 = basis_dependence_delta(f0, y00l_x)
    d11 = basis_dependence_delta(f1, y11l_x)
    return MdiBoundSet(
        y00_lower_x=y00l_x,
        y00_lower_y=y00l_y,
        w00_upper_y=w00u_y,
        y11_lower_x=y11l_x,
        y11_lower_y=y11l_y,
        w11_upper_y=w11u_y,
        bit_err00_upper=eb00,
        bit_err11_upper=eb11,
        delta00=d00,
        delta11=d11,
        phase_err00_upper=phase_error_upper(eb00, d00),
        phase_err11_upper=phase_error_upper(eb11, d11),
        feasible=feasible,
        **diagnostics,
    )


def mdi_analytic_bounds(
    obs: ObservableSet, stats, pair: tuple[int, int] = (DECOY, DECOY)
) -> MdiBoundSet:
    """Closed-form MDI bound set from the sender intensity pair (default (nu, nu)).

    The (1,1) bound exists only while e^{a+b} p1^a p1^b > G (e^mu p1^mu)^2;
    choosing both intensities equal to the signal violates it and the bound
    set comes back flagged infeasible with zero yields.
    """
    ia, ib = pair
    ints = obs.intensities
    alpha, beta, mu = ints[ia], ints[ib], ints[SIGNAL]

    eps_mu0 = stats.epsilon(mu, 0.0)
    eps_a0 = stats.epsilon(alpha, 0.0)
    eps_b0 = stats.epsilon(beta, 0.0)
    eps_am = stats.epsilon(alpha, mu)
    eps_bm = stats.epsilon(beta, mu)

    q00 = obs.gain[:, VACUUM, VACUUM]
    w00 = obs.error_product[:, VACUUM, VACUUM]
    y00l_x = max(q00[X_BASIS] - 2.0 * eps_mu0, 0.0)
    y00l_y = max(q00[Y_BASIS] - 2.0 * eps_mu0, 0.0)
    w00u_y = min(w00[Y_BASIS] + 2.0 * eps_mu0, 0.5)

    s0_a, s1_a = stats.raw_series(alpha, 0), stats.raw_series(alpha, 1)
    s0_b, s1_b = stats.raw_series(beta, 0), stats.raw_series(beta, 1)
    s0_m, s1_m = stats.raw_series(mu, 0), stats.raw_series(mu, 1)
    e_a, e_b, e_m = math.exp(alpha), math.exp(beta), math.exp(mu)

    def tail_ratio(ka: int, kb: int) -> float:
        return (stats.raw_series(alpha, ka) * stats.raw_series(beta, kb)) / (
            stats.raw_series(mu, ka) * stats.raw_series(mu, kb)
        )

    support = stats.support
    if support is not None and support <= 2:
        coeff_a = coeff_b = coeff_c = 0.0
    else:
        coeff_a = tail_ratio(2, 1)
        coeff_b = tail_ratio(1, 2)
        coeff_c = tail_ratio(2, 2)
        if support is None or support > 3:
            for name, here, there in (
                ("A", coeff_a, tail_ratio(3, 1)),
                ("B", coeff_b, tail_ratio(1, 3)),
                ("C", coeff_c, tail_ratio(3, 3)),
            ):
                if there > here + _MONOTONE_TOL:
                    raise ArithmeticError(
                        f"tail coefficient {name} not decreasing past k=2; "
                        "series truncation tolerance too loose"
                    )
    g = max(coeff_a, coeff_b, coeff_c)

    eps_sbar = (
        (s0_a * e_b + s0_a * s0_b) * eps_a0
        + (s0_b * e_a + s0_a * s0_b) * eps_b0
        + s1_a * s1_b * (eps_am + eps_bm)
    )
    # sum_{k=2}^{D-1} e^alpha p_k^alpha in closed form (the full support sums to e^alpha)
    rest_a = max(e_a - s0_a - s1_a, 0.0)
    rest_b = max(e_b - s0_b - s1_b, 0.0)
    eps_s = (eps_am + eps_bm) * (rest_a * s1_b + s1_a * rest_b + rest_a * rest_b)
    eps_ts = (s0_m * e_m + s0_m * s0_m) * eps_mu0

    def t1(basis: int) -> float:
        return (
            s0_a * e_b * obs.gain[basis, VACUUM, ib]
            + s0_b * e_a * obs.gain[basis, ia, VACUUM]
            - s0_a * s0_b * obs.gain[basis, VACUUM, VACUUM]
        )

    def ts(basis: int) -> float:
        return (
            e_m * e_m * obs.gain[basis, SIGNAL, SIGNAL]
            - s0_m * e_m
            * (obs.gain[basis, VACUUM, SIGNAL] + obs.gain[basis, SIGNAL, VACUUM])
            + s0_m * s0_m * obs.gain[basis, VACUUM, VACUUM]
        )

    t1_x, t1_y = t1(X_BASIS), t1(Y_BASIS)
    ts_x, ts_y = ts(X_BASIS), ts(Y_BASIS)

    denom_y11 = s1_a * s1_b - g * s1_m * s1_m
    feasible = denom_y11 > 0.0

    def y11_lower(basis: int, t1_val: float, ts_val: float) -> float:
        num = (
            e_a * e_b * obs.gain[basis, ia, ib]
            - t1_val
            - g * ts_val
            - eps_sbar
            - 2.0 * g * eps_ts
            - eps_s
        )
        return _clip(num / denom_y11, 0.0, 1.0)

    if feasible:
        y11l_x = y11_lower(X_BASIS, t1_x, ts_x)
        y11l_y = y11_lower(Y_BASIS, t1_y, ts_y)
    else:
        y11l_x = y11l_y = 0.0

    t2_y = (
        s0_a * e_b * obs.error_product[Y_BASIS, VACUUM, ib]
        + s0_b * e_a * obs.error_product[Y_BASIS, ia, VACUUM]
        - s0_a * s0_b * obs.error_product[Y_BASIS, VACUUM, VACUUM]
    )
    denom_w11 = s1_a * s1_b
    if denom_w11 > 0.0:
        num_w = e_a * e_b * obs.error_product[Y_BASIS, ia, ib] - t2_y + eps_sbar
        w11u_y = _clip(num_w / denom_w11, 0.0, 0.5)
    else:
        w11u_y = 0.5
        feasible = False

    f0 = stats.basis_fidelity("mdi", mu, 0)
    f1 = stats.basis_fidelity("mdi", mu, 1)
    return _finish_mdi(
        y00l_x,
        y00l_y,
        w00u_y,
        y11l_x,
        y11l_y,
        w11u_y,
        f0,
        f1,
        feasible,
        t1_x=t1_x,
        t1_y=t1_y,
        ts_x=ts_x,
        ts_y=ts_y,
        t2_y=t2_y,
        coeff_a=coeff_a,
        coeff_b=coeff_b,
        coeff_c=coeff_c,
        coeff_g=g,
        eps_sbar=eps_sbar,
        eps_s=eps_s,
        eps_ts=eps_ts,
    )


def mdi_key_rate(
    bounds: MdiBoundSet, obs: ObservableSet, stats, params: ChannelParams
) -> float:
    """MDI secret-key-rate lower bound per emitted pulse pair, floored at 0."""
    mu = obs.intensities[SIGNAL]
    q_mu = obs.gain[X_BASIS, SIGNAL, SIGNAL]
    qe_mu = obs.error_product[X_BASIS, SIGNAL, SIGNAL]
    qber = qe_mu / q_mu if q_mu > 0.0 else 0.0
    p0, p1 = stats.pmf(mu, 0), stats.pmf(mu, 1)
    secret = p0 * p0 * bounds.y00_lower_x * (
        1.0 - binary_entropy(bounds.phase_err00_upper)
    ) + p1 * p1 * bounds.y11_lower_x * (
        1.0 - binary_entropy(bounds.phase_err11_upper)
    )
    leak = params.ec_inefficiency * q_mu * binary_entropy(qber)
    return max(0.0, secret - leak)

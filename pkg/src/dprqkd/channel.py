"""Simulated gains and error products for the no-eavesdropper fiber channel.

Standard threshold-detector model: dark counts, misalignment, and exponential
fiber loss.  Both measurement bases see identical statistics, since the model
has no basis-dependent term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "ObservableSet",
    "X_BASIS",
    "Y_BASIS",
    "VACUUM",
    "DECOY",
    "SIGNAL",
    "transmittance",
    "bb84_gain_error",
    "mdi_gain_error",
    "simulate_bb84",
    "simulate_mdi",
]

X_BASIS, Y_BASIS = 0, 1
VACUUM, DECOY, SIGNAL = 0, 1, 2


@dataclass(frozen=True)
class ChannelParams:
    """Detector and fiber parameters.  Defaults are the simulation values
    used throughout (GYS-style telecom system)."""

    det_efficiency: float = 0.045
    dark_count: float = 1.7e-6
    misalignment: float = 0.033
    vacuum_error: float = 0.5
    loss_db_per_km: float = 0.21
    ec_inefficiency: float = 1.16

    def __post_init__(self):
        for name in ("det_efficiency", "dark_count", "misalignment", "vacuum_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.loss_db_per_km <= 0.0:
            raise ValueError("loss_db_per_km must be positive")
        if self.ec_inefficiency < 1.0:
            raise ValueError("ec_inefficiency must be >= 1")

    @property
    def vacuum_yield(self) -> float:
        """Detection probability with no photons present (both dark-count paths)."""
        return 2.0 * self.dark_count


def transmittance(params: ChannelParams, distance_km: float, protocol: str) -> float:
    """Per-arm transmittance at the given total Alice-Bob distance.

    BB84 spans the full distance; MDI places the relay at the midpoint, so
    each arm covers half of it.
    """
    if distance_km < 0.0:
        raise ValueError("distance must be non-negative")
    if protocol == "bb84":
        span = distance_km
    elif protocol == "mdi":
        span = 0.5 * distance_km
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    return params.det_efficiency * 10.0 ** (-params.loss_db_per_km * span / 10.0)


def bb84_gain_error(params: ChannelParams, intensity: float, eta: float):
    """(gain, gain*QBER) of a BB84 pulse of the given intensity.

    Q = Y0 + 1 - exp(-eta*alpha); the error product mixes the 50% vacuum
    error with the misalignment error of true detections.
    """
    y0 = params.vacuum_yield
    click = 1.0 - math.exp(-eta * intensity)
    gain = y0 + click
    err = params.vacuum_error * gain - (
        params.vacuum_error - params.misalignment
    ) * click * (1.0 - params.dark_count)
    return gain, err


def mdi_gain_error(params: ChannelParams, alpha: float, beta: float, eta: float):
    """(gain, gain*QBER) of an MDI coincidence when the two senders use
    intensities alpha and beta; eta is the per-arm transmittance."""
    y00 = params.vacuum_yield
    click_a = 1.0 - math.exp(-eta * alpha)
    click_b = 1.0 - math.exp(-eta * beta)
    gain = (y00 + click_a) * (y00 + click_b)
    err = y00 * (y00 + click_a + click_b) / 2.0 + params.misalignment * click_a * click_b
    return gain, err


@dataclass(frozen=True)
class ObservableSet:
    """Per-basis gains Q and error products Q*E over the intensity triple.

    ``gain`` and ``error_product`` are indexed [basis, intensity] for BB84 and
    [basis, intensity_a, intensity_b] for MDI, with intensity indices
    VACUUM/DECOY/SIGNAL into ``intensities``.
    """

    protocol: str
    intensities: tuple[float, float, float]
    gain: np.ndarray
    error_product: np.ndarray

    def __post_init__(self):
        expected = (2, 3) if self.protocol == "bb84" else (2, 3, 3)
        if self.protocol not in ("bb84", "mdi"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.gain.shape != expected or self.error_product.shape != expected:
            raise ValueError(f"observable arrays must have shape {expected}")
        if np.any(self.error_product < -1e-15) or np.any(
            self.error_product > self.gain + 1e-15
        ):
            raise ValueError("error products must satisfy 0 <= QE <= Q")
        if np.any(self.gain > 1.0 + 1e-15):
            raise ValueError("gains must not exceed 1")


def simulate_bb84(
    params: ChannelParams, nu: float, mu: float, distance_km: float
) -> ObservableSet:
    """Observables of the vacuum+weak-decoy BB84 link at one distance."""
    eta = transmittance(params, distance_km, "bb84")
    triple = (0.0, nu, mu)
    gain = np.empty((2, 3))
    err = np.empty((2, 3))
    for i, alpha in enumerate(triple):
        q, qe = bb84_gain_error(params, alpha, eta)
        gain[:, i] = q
        err[:, i] = qe
    return ObservableSet("bb84", triple, gain, err)


def simulate_mdi(
    params: ChannelParams, nu: float, mu: float, distance_km: float
) -> ObservableSet:
    """Observables of the vacuum+weak-decoy MDI link at one distance."""
    eta = transmittance(params, distance_km, "mdi")
    triple = (0.0, nu, mu)
    gain = np.empty((2, 3, 3))
    err = np.empty((2, 3, 3))
    for i, alpha in enumerate(triple):
        for j, beta in enumerate(triple):
            q, qe = mdi_gain_error(params, alpha, beta, eta)
            gain[:, i, j] = q
            err[:, i, j] = qe
    return ObservableSet("mdi", triple, gain, err)

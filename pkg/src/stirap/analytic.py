"""Closed-form amplitudes for the separable sech pulse pair.

With ``sinh(eta) = 1/(2 AT)`` and the action ``I(t) = AT cosh(eta) arctan(exp(t/T))``
the counterintuitive and intuitive orderings are solved exactly. Amplitudes
are returned as complex arrays whose last axis holds ``(b1, b2, b3)``; a scalar
time gives shape ``(3,)``.

Infinite times are handled by exact limit branches rather than by evaluating
the trajectory at large ``t``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DegenerateResonance, InvalidParameter
from .pulses import PulseParams, arctan_exp


@dataclass(frozen=True)
class EtaParams:
    at: float
    eta: float

    @property
    def sinh(self) -> float:
        return 1.0 / (2.0 * self.at)

    @property
    def cosh(self) -> float:
        return math.sqrt(1.0 + self.sinh ** 2)

    @property
    def tanh(self) -> float:
        return self.sinh / self.cosh

    @property
    def sech(self) -> float:
        return 1.0 / self.cosh


def _check_at(at) -> float:
    if not isinstance(at, (int, float, np.floating, np.integer)) or not math.isfinite(at) or at <= 0:
        raise InvalidParameter(f"at must be finite and > 0, got {at!r}")
    return float(at)


def eta_of(at: float) -> EtaParams:
    at = _check_at(at)
    return EtaParams(at=at, eta=math.asinh(1.0 / (2.0 * at)))


def action_I(t, params: PulseParams):
    e = eta_of(params.at)
    val = params.at * e.cosh * arctan_exp(np.asarray(t, dtype=float) / params.T)
    return float(val) if np.ndim(val) == 0 else val


def _mixing(t, T, sign):
    # sin/cos of arctan(exp(sign*t/T)) in a form that is exact at +-inf
    x = sign * np.asarray(t, dtype=float) / T
    return np.sqrt(expit(2.0 * x)), np.sqrt(expit(-2.0 * x))


def _final_phase(e: EtaParams) -> float:
    return math.pi * e.at * e.cosh


def counterintuitive_final(at: float) -> np.ndarray:
    e = eta_of(at)
    theta = _final_phase(e)
    return np.array([
        e.tanh * math.sin(theta),
        -1j * (2.0 * e.tanh / e.cosh) * math.sin(0.5 * theta) ** 2,
        -1.0 + (e.sinh ** 2) * (1.0 - math.cos(theta)) / e.cosh ** 2,
    ], dtype=complex)


def counterintuitive_amplitudes(t, params: PulseParams) -> np.ndarray:
    e = eta_of(params.at)
    t = np.asarray(t, dtype=float)
    sin_phi, cos_phi = _mixing(t, params.T, +1)
    two_i = 2.0 * np.asarray(action_I(t, params))
    mix = e.sech ** 2 + e.tanh ** 2 * np.cos(two_i)
    b1 = e.tanh * sin_phi * np.sin(two_i) + cos_phi * mix
    b2 = -2j * e.tanh * e.sech * np.sin(0.5 * two_i) ** 2
    b3 = e.tanh * cos_phi * np.sin(two_i) - sin_phi * mix
    out = np.stack(np.broadcast_arrays(b1 + 0j, b2, b3 + 0j), axis=-1)
    out[t == np.inf] = counterintuitive_final(params.at)
    out[t == -np.inf] = (1.0, 0.0, 0.0)
    return out


def intuitive_final(at: float) -> np.ndarray:
    e = eta_of(at)
    theta = _final_phase(e)
    return np.array([
        e.tanh * math.sin(theta),
        -1j * e.sech * math.sin(theta),
        math.cos(theta),
    ], dtype=complex)


def intuitive_amplitudes(t, params: PulseParams) -> np.ndarray:
    e = eta_of(params.at)
    t = np.asarray(t, dtype=float)
    # intuitive ordering: phi runs from pi/2 down to 0
    sin_phi, cos_phi = _mixing(t, params.T, -1)
    two_i = 2.0 * np.asarray(action_I(t, params))
    b1 = sin_phi * np.cos(two_i) + cos_phi * e.tanh * np.sin(two_i)
    b2 = -1j * e.sech * np.sin(two_i)
    b3 = cos_phi * np.cos(two_i) - sin_phi * e.tanh * np.sin(two_i)
    out = np.stack(np.broadcast_arrays(b1 + 0j, b2, b3 + 0j), axis=-1)
    out[t == np.inf] = intuitive_final(params.at)
    out[t == -np.inf] = (1.0, 0.0, 0.0)
    return out


def exponential_final(at: float) -> float:
    """Level-3 amplitude after the exponential pulse pair: ``-1 + sech(pi AT)**2``."""
    if not math.isfinite(at) or at < 0:
        raise InvalidParameter(f"at must be finite and >= 0, got {at!r}")
    # -1 + sech^2 == -tanh^2, which keeps full relative precision near 0
    return -math.tanh(math.pi * at) ** 2


class Resonance(enum.Enum):
    CI_COMPLETE = "ci-complete"
    IN_COMPLETE = "in-complete"
    IN_NULL = "in-null"


def resonance_product(kind, n: int) -> float:
    """Pulse-area product ``AT`` at which the chosen final population is 0 or 1.

    ``CI_COMPLETE``: (4n)^2 - (2AT)^2 = 1, ``IN_COMPLETE``: (2n)^2 - (2AT)^2 = 1,
    ``IN_NULL``: (2n - 1)^2 - (2AT)^2 = 1.
    """
    kind = Resonance(kind)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n!r}")
    n = int(n)
    m = {Resonance.CI_COMPLETE: 4 * n,
         Resonance.IN_COMPLETE: 2 * n,
         Resonance.IN_NULL: 2 * n - 1}[kind]
    if m * m - 1 <= 0:
        raise DegenerateResonance(f"{kind.value} with n={n} gives AT = 0")
    return math.sqrt(m * m - 1) / 2.0

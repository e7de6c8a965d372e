"""Pulse families and their adiabatic-frame quantities.

Every pulse pair is written as ``lambda1 = f1 * g`` and ``lambda2 = f2 * g`` with
``f1**2 + f2**2 == 1``, so the effective Rabi magnitude depends on ``g`` alone
and the mixing-angle rate on ``(f1, f2)`` alone.

All evaluation functions accept scalar or array time arguments. Scalars come
back as Python floats, arrays as ``numpy`` arrays of the same shape.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate
from scipy.special import expit

from .errors import (AngleUndefined, AreaNotConverged, InvalidParameter,
                     SchemeInvariantViolation)

SEPARABILITY_TOL = 1e-12
# Beyond this many widths the built-in couplings underflow; phi takes its limit.
ASYMPTOTIC_WIDTHS = 700.0


class Scheme(enum.Enum):
    COUNTERINTUITIVE_SECH = "ci-sech"
    INTUITIVE_SECH = "in-sech"
    EXPONENTIAL_PAIR = "exp-pair"

    @property
    def token(self) -> str:
        return self.value


@dataclass(frozen=True)
class PulseParams:
    """Coupling amplitude ``A`` (rad/time) and width ``T`` (time)."""

    A: float
    T: float = 1.0

    def __post_init__(self):
        for name in ("A", "T"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer))
                    and math.isfinite(value) and value > 0):
                raise InvalidParameter(f"{name} must be finite and > 0, got {value!r}")

    @property
    def at(self) -> float:
        return float(self.A * self.T)

    @classmethod
    def from_at(cls, at: float, T: float = 1.0) -> "PulseParams":
        if not (math.isfinite(T) and T > 0):
            raise InvalidParameter(f"T must be finite and > 0, got {T!r}")
        return cls(A=at / T, T=T)


@dataclass(frozen=True)
class CustomSeparable:
    """User pulse pair ``lambda_i(t) = f_i(t) g(t)``.

    ``f1``, ``f2`` and ``g`` must accept numpy arrays. If both derivatives
    ``df1``/``df2`` are given the mixing-angle rate uses the analytic quotient
    ``(df1 f2 - f1 df2) / (f1**2 + f2**2)``; otherwise a central difference of
    ``phi`` with step ``fd_step`` (default ``1e-6 * T``).
    """

    f1: Callable
    f2: Callable
    g: Callable
    df1: Optional[Callable] = None
    df2: Optional[Callable] = None
    fd_step: Optional[float] = None

    token = "custom"

    def unit_pair(self, t):
        f1 = np.asarray(self.f1(t), dtype=float)
        f2 = np.asarray(self.f2(t), dtype=float)
        dev = np.abs(f1 * f1 + f2 * f2 - 1.0)
        if np.any(dev > SEPARABILITY_TOL):
            raise SchemeInvariantViolation(
                f"f1^2 + f2^2 deviates from 1 by {float(np.max(dev)):.3e}")
        return f1, f2


SchemeLike = Union[Scheme, str, CustomSeparable]


def resolve_scheme(scheme: SchemeLike) -> Union[Scheme, CustomSeparable]:
    if isinstance(scheme, (Scheme, CustomSeparable)):
        return scheme
    if isinstance(scheme, str):
        try:
            return Scheme(scheme.strip().lower())
        except ValueError:
            pass
        if scheme.strip().lower() == "custom":
            raise InvalidParameter("the 'custom' scheme needs a CustomSeparable instance")
    raise InvalidParameter(f"unknown pulse scheme {scheme!r}")


def scheme_token(scheme: SchemeLike) -> str:
    return resolve_scheme(scheme).token


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def sech(x):
    """Overflow-free hyperbolic secant, exact 0 at +-inf."""
    ax = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def arctan_exp(x):
    """``arctan(exp(x))`` without overflow; limits 0 and pi/2 are exact."""
    x = np.asarray(x, dtype=float)
    small = np.arctan(np.exp(-np.abs(x)))
    return np.where(x > 0, 0.5 * np.pi - small, small)


def eval_couplings(scheme: SchemeLike, params: PulseParams, t):
    """Return ``(lambda1, lambda2)`` at time(s) ``t``.

    ``lambda1`` couples levels 1-2, ``lambda2`` couples 2-3.
    """
    s = resolve_scheme(scheme)
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)):
        raise InvalidParameter("time must not be NaN")
    x = t / params.T
    if s is Scheme.EXPONENTIAL_PAIR:
        l1 = params.A * np.sqrt(expit(x))
        l2 = params.A * np.sqrt(expit(-x))
    elif s in (Scheme.COUNTERINTUITIVE_SECH, Scheme.INTUITIVE_SECH):
        # (1 +- tanh x)/2 == expit(+-2x)
        envelope = params.A * sech(x)
        late = np.sqrt(expit(2.0 * x)) * envelope
        early = np.sqrt(expit(-2.0 * x)) * envelope
        l1, l2 = (late, early) if s is Scheme.COUNTERINTUITIVE_SECH else (early, late)
    else:
        f1, f2 = s.unit_pair(t)
        g = np.asarray(s.g(t), dtype=float)
        l1, l2 = f1 * g, f2 * g
    return _out(l1), _out(l2)


@dataclass(frozen=True)
class AdiabaticFrame:
    r2: object
    phi: object
    phi_dot: object


def _custom_phi(s: CustomSeparable, t):
    f1, f2 = s.unit_pair(t)
    g = np.asarray(s.g(t), dtype=float)
    l1, l2 = f1 * g, f2 * g
    if np.any((l1 == 0.0) & (l2 == 0.0)):
        raise AngleUndefined("couplings vanish together; mixing angle undefined")
    return np.arctan2(l1, l2)


def adiabatic_frame(scheme: SchemeLike, params: PulseParams, t) -> AdiabaticFrame:
    s = resolve_scheme(scheme)
    t = np.asarray(t, dtype=float)
    x = t / params.T
    l1, l2 = eval_couplings(s, params, t)
    r2 = np.hypot(l1, l2)
    if s is Scheme.COUNTERINTUITIVE_SECH:
        phi = arctan_exp(x)
        phi_dot = sech(x) / (2.0 * params.T)
    elif s is Scheme.INTUITIVE_SECH:
        phi = arctan_exp(-x)
        phi_dot = -sech(x) / (2.0 * params.T)
    elif s is Scheme.EXPONENTIAL_PAIR:
        # tan(phi) = exp(x/2)
        phi = arctan_exp(0.5 * x)
        phi_dot = sech(0.5 * x) / (4.0 * params.T)
    else:
        phi = _custom_phi(s, t)
        if s.df1 is not None and s.df2 is not None:
            f1, f2 = s.unit_pair(t)
            df1 = np.asarray(s.df1(t), dtype=float)
            df2 = np.asarray(s.df2(t), dtype=float)
            phi_dot = (df1 * f2 - f1 * df2) / (f1 * f1 + f2 * f2)
        else:
            h = s.fd_step if s.fd_step is not None else 1e-6 * params.T
            if not h > 0:
                raise InvalidParameter("fd_step must be > 0")
            phi_dot = (_custom_phi(s, t + h) - _custom_phi(s, t - h)) / (2.0 * h)
    return AdiabaticFrame(r2=_out(r2), phi=_out(phi), phi_dot=_out(phi_dot))


def pulse_area(scheme: SchemeLike, params: PulseParams) -> float:
    """Time integral of the effective Rabi magnitude; ``math.inf`` when unbounded."""
    s = resolve_scheme(scheme)
    if s in (Scheme.COUNTERINTUITIVE_SECH, Scheme.INTUITIVE_SECH):
        return math.pi * params.A * params.T
    if s is Scheme.EXPONENTIAL_PAIR:
        return math.inf

    def integrand(t):
        l1, l2 = eval_couplings(s, params, t)
        return math.hypot(l1, l2)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(integrand, -np.inf, np.inf, limit=500)
        except integrate.IntegrationWarning as exc:
            raise AreaNotConverged(str(exc).splitlines()[0]) from exc
    if not math.isfinite(value) or abserr > 1e-6 * max(1.0, abs(value)):
        raise AreaNotConverged(f"quadrature estimate {value!r} +- {abserr!r}")
    return value


@dataclass(frozen=True)
class Pulse:
    """A pulse pair placed at ``center`` on the time axis."""

    scheme: SchemeLike
    params: PulseParams
    center: float = 0.0

    def couplings(self, t):
        return eval_couplings(self.scheme, self.params, np.asarray(t, dtype=float) - self.center)

    def frame(self, t) -> AdiabaticFrame:
        return adiabatic_frame(self.scheme, self.params, np.asarray(t, dtype=float) - self.center)


@dataclass(frozen=True)
class PulseSequence:
    """Several pulse pairs whose couplings add."""

    pulses: Sequence[Pulse]

    def couplings(self, t):
        t = np.asarray(t, dtype=float)
        l1 = np.zeros_like(t)
        l2 = np.zeros_like(t)
        for p in self.pulses:
            a, b = p.couplings(t)
            l1 = l1 + a
            l2 = l2 + b
        return _out(l1), _out(l2)

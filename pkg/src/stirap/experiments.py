"""Composite runs: closed form vs. integrator, parameter sweeps, double STIRAP,
the four-level Hadamard embedding and the real/imaginary separation."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import analytic
from .errors import InvalidParameter, InvalidRange, WindowOverlap
from .propagate import IntegratorConfig, LevelKind, LevelModel, integrate, final_populations
from .pulses import Pulse, PulseParams, PulseSequence, Scheme, resolve_scheme

THREADS_ENV = "STIRAP_THREADS"
MIN_SEPARATION = 10.0  # in units of T

_ALIASES = {"ci": Scheme.COUNTERINTUITIVE_SECH, "in": Scheme.INTUITIVE_SECH,
            "exp": Scheme.EXPONENTIAL_PAIR}


def builtin_scheme(scheme) -> Scheme:
    if isinstance(scheme, str) and scheme.lower() in _ALIASES:
        return _ALIASES[scheme.lower()]
    s = resolve_scheme(scheme)
    if not isinstance(s, Scheme):
        raise InvalidParameter("only built-in schemes have closed forms")
    return s


def analytic_final(scheme, at: float) -> np.ndarray:
    """Closed-form final amplitudes; for the exponential pair only b3 is known (others NaN)."""
    s = builtin_scheme(scheme)
    if s is Scheme.COUNTERINTUITIVE_SECH:
        return analytic.counterintuitive_final(at)
    if s is Scheme.INTUITIVE_SECH:
        return analytic.intuitive_final(at)
    return np.array([np.nan, np.nan, analytic.exponential_final(at)], dtype=complex)


def _three_level(scheme, at, T):
    params = PulseParams.from_at(at, T)
    return LevelModel.of(LevelKind.THREE_LEVEL, scheme, params), params


@dataclass(frozen=True)
class VerificationReport:
    scheme: str
    at: float
    max_error: float
    endpoint: complex
    expected_endpoint: complex
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol


def verify_analytic(scheme, at: float, tol: float = 1e-5, T: float = 1.0,
                    dt_factor: float = 1e-3) -> VerificationReport:
    """Integrate the three-level problem and compare with the closed form.

    Sech pulses are compared at every sample (Euclidean norm of the amplitude
    difference); the exponential pair only at the final b3.
    """
    s = builtin_scheme(scheme)
    model, params = _three_level(s, at, T)
    series = integrate(model, model.ground_state(), IntegratorConfig.default(s, params, dt_factor))
    endpoint = complex(series.final[2])
    if s is Scheme.EXPONENTIAL_PAIR:
        expected = complex(analytic.exponential_final(at))
        err = abs(endpoint - expected)
    else:
        closed = (analytic.counterintuitive_amplitudes if s is Scheme.COUNTERINTUITIVE_SECH
                  else analytic.intuitive_amplitudes)(series.times, params)
        err = float(np.max(np.linalg.norm(series.states - closed, axis=1)))
        expected = complex(closed[-1, 2])
    return VerificationReport(s.token, float(at), float(err), endpoint, expected, tol)


@dataclass(frozen=True)
class SweepRow:
    at: float
    analytic: float
    numeric: float
    abs_error: float


@dataclass(frozen=True)
class SweepTable:
    scheme: str
    rows: tuple


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


def sweep(scheme, at_min: float, at_max: float, samples: int, numeric: bool = True,
          T: float = 1.0, dt_factor: float = 1e-3, threads: Optional[int] = None) -> SweepTable:
    """Final level-3 population over evenly spaced ``AT``.

    With ``numeric=False`` only the closed form is evaluated and the numeric
    and error columns are NaN. Rows are computed independently (optionally on
    ``threads`` workers, default from ``STIRAP_THREADS``) and kept in order.
    """
    s = builtin_scheme(scheme)
    if not (math.isfinite(at_min) and math.isfinite(at_max)) or not 0 < at_min < at_max:
        raise InvalidRange("need 0 < at_min < at_max")
    if int(samples) != samples or samples < 2:
        raise InvalidRange("need at least two samples")
    ats = np.linspace(at_min, at_max, int(samples))

    def row(at):
        ana = float(abs(analytic_final(s, at)[2]) ** 2)
        if not numeric:
            return SweepRow(float(at), ana, math.nan, math.nan)
        model, params = _three_level(s, at, T)
        pops, _ = final_populations(model, IntegratorConfig.default(s, params, dt_factor))
        return SweepRow(float(at), ana, float(pops[2]), abs(ana - float(pops[2])))

    n = _threads(threads)
    if n == 1 or not numeric:
        rows = [row(a) for a in ats]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(row, ats))
    return SweepTable(s.token, tuple(rows))


@dataclass(frozen=True)
class DoubleStirapReport:
    at: float
    delay: float
    final: np.ndarray
    return_population: float
    b1_phase: float


def double_stirap(at: float, delay: float, T: float = 1.0, dt_factor: float = 1e-3,
                  min_separation: float = MIN_SEPARATION) -> DoubleStirapReport:
    """Counterintuitive pair centred at 0, then the intuitive pair centred at ``delay``.

    ``at = 0`` runs the same window with every coupling off.
    """
    if not (math.isfinite(delay) and delay >= 0):
        raise InvalidParameter("delay must be >= 0")
    if delay < min_separation * T:
        raise WindowOverlap(f"delay {delay} is below the minimum separation {min_separation * T}")
    if not math.isfinite(at) or at < 0:
        raise InvalidParameter("at must be >= 0")
    if at == 0:
        drive = None
    else:
        params = PulseParams.from_at(at, T)
        drive = PulseSequence((Pulse(Scheme.COUNTERINTUITIVE_SECH, params, 0.0),
                               Pulse(Scheme.INTUITIVE_SECH, params, delay)))
    model = LevelModel(LevelKind.THREE_LEVEL, drive)
    cfg = IntegratorConfig(-15.0 * T, delay + 15.0 * T, dt_factor * T)
    final = integrate(model, model.ground_state(), cfg).final
    b1 = complex(final[0])
    return DoubleStirapReport(float(at), float(delay), final, abs(b1) ** 2,
                              math.atan2(b1.imag, b1.real))


def phase_vs_delay(at: float, delays: Sequence[float], **kw):
    """The measured ``arg(b1)`` curve over several delays."""
    return [double_stirap(at, d, **kw) for d in delays]


@dataclass(frozen=True)
class HadamardReport:
    c10: float
    c11: float
    at: float
    max_deviation: float
    final: np.ndarray

    @property
    def final_b3_population(self) -> float:
        return float(abs(self.final[3]) ** 2)


def hadamard_check(c10: float, c11: float, at: float, scheme="ci-sech", T: float = 1.0,
                   dt_factor: float = 1e-3) -> HadamardReport:
    """Largest ``|b10 - c10 b1|`` or ``|b11 - c11 b1|`` along the trajectory."""
    s = builtin_scheme(scheme)
    params = PulseParams.from_at(at, T)
    four = LevelModel.of(LevelKind.HADAMARD, s, params, c10=c10, c11=c11)
    three = LevelModel.of(LevelKind.THREE_LEVEL, s, params)
    cfg = IntegratorConfig.default(s, params, dt_factor)
    s4 = integrate(four, four.ground_state(), cfg)
    s3 = integrate(three, three.ground_state(), cfg)
    b1 = s3.states[:, 0]
    dev = max(float(np.max(np.abs(s4.states[:, 0] - c10 * b1))),
              float(np.max(np.abs(s4.states[:, 1] - c11 * b1))))
    return HadamardReport(c10, c11, float(at), dev, s4.final)


class Separation(NamedTuple):
    max_im_b1: float
    max_re_b2: float
    max_im_b3: float


def separation_check(scheme, at: float, T: float = 1.0, dt_factor: float = 1e-3) -> Separation:
    """Components that stay unpopulated when b1 starts real."""
    s = builtin_scheme(scheme)
    model, params = _three_level(s, at, T)
    st = integrate(model, [1, 0, 0], IntegratorConfig.default(s, params, dt_factor)).states
    return Separation(float(np.max(np.abs(st[:, 0].imag))), float(np.max(np.abs(st[:, 1].real))),
                      float(np.max(np.abs(st[:, 2].imag))))


def superposition_check(scheme, at: float, phase: float = math.pi / 4, T: float = 1.0,
                        dt_factor: float = 1e-3) -> float:
    """Start from ``b1 = exp(i phase)`` and compare with the sum of the separately
    propagated real and imaginary parts. Returns the largest deviation."""
    s = builtin_scheme(scheme)
    model, params = _three_level(s, at, T)
    cfg = IntegratorConfig.default(s, params, dt_factor)
    full = integrate(model, [np.exp(1j * phase), 0, 0], cfg).states
    re_part = integrate(model, [1, 0, 0], cfg).states
    im_part = integrate(model, [1j, 0, 0], cfg).states
    combo = math.cos(phase) * re_part + math.sin(phase) * im_part
    return float(np.max(np.abs(full - combo)))

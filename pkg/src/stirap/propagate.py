"""Direct time integration of the level-space Schrödinger equation.

This module is the numerical oracle for the closed forms in :mod:`stirap.analytic`:
it never uses them. Units are natural (hbar = 1), couplings in rad/time.

Level orderings:

* ``two-level-bare``       (a1, a2) with H = 1/2 sigma . (lambda1, 0, lambda2)
* ``two-level-adiabatic``  (a1, a2) with H = 1/2 sigma . (0, -phi_dot, R2)
* ``three-level``          (b1, b2, b3), lambda1 couples 1-2 and lambda2 couples 2-3
* ``hadamard``             (b10, b11, b2, b3), with lambda10 = c10 lambda1, lambda11 = c11 lambda1
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .errors import (DimensionMismatch, HadamardNormViolation, InvalidParameter,
                     NormDriftExceeded, NormViolation)
from .pulses import (CustomSeparable, Pulse, PulseParams, PulseSequence, Scheme,
                     resolve_scheme)

HADAMARD_TOL = 1e-12
INITIAL_NORM_TOL = 1e-10


class LevelKind(enum.Enum):
    TWO_LEVEL_BARE = "two-level-bare"
    TWO_LEVEL_ADIABATIC = "two-level-adiabatic"
    THREE_LEVEL = "three-level"
    HADAMARD = "hadamard"


_DIMS = {LevelKind.TWO_LEVEL_BARE: 2, LevelKind.TWO_LEVEL_ADIABATIC: 2,
         LevelKind.THREE_LEVEL: 3, LevelKind.HADAMARD: 4}

LABELS = {2: ("a1", "a2"), 3: ("b1", "b2", "b3"), 4: ("b10", "b11", "b2", "b3")}

Drive = Union[Pulse, PulseSequence, None]


@dataclass(frozen=True)
class LevelModel:
    """Which Hamiltonian to integrate and what drives it.

    ``drive=None`` means all couplings vanish identically.
    """

    kind: LevelKind
    drive: Drive
    c10: float = 1.0
    c11: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LevelKind(self.kind))
        if self.kind is LevelKind.HADAMARD:
            dev = abs(self.c10 ** 2 + self.c11 ** 2 - 1.0)
            if not dev <= HADAMARD_TOL:
                raise HadamardNormViolation(
                    f"c10^2 + c11^2 = {self.c10 ** 2 + self.c11 ** 2!r}, must equal 1")
        if self.kind is LevelKind.TWO_LEVEL_ADIABATIC and not (
                self.drive is None or isinstance(self.drive, Pulse)):
            raise InvalidParameter("the adiabatic two-level model needs a single pulse pair")

    @classmethod
    def of(cls, kind, scheme, params: PulseParams, *, center: float = 0.0,
           c10: float = 1.0, c11: float = 0.0) -> "LevelModel":
        return cls(LevelKind(kind), Pulse(resolve_scheme(scheme), params, center), c10, c11)

    @property
    def dim(self) -> int:
        return _DIMS[self.kind]

    @property
    def labels(self):
        return LABELS[self.dim]

    def ground_state(self) -> np.ndarray:
        """Default initial state: all population in level 1."""
        psi = np.zeros(self.dim, dtype=complex)
        if self.kind is LevelKind.HADAMARD:
            psi[0], psi[1] = self.c10, self.c11
        else:
            psi[0] = 1.0
        return psi


def hamiltonian_samples(model: LevelModel, times) -> np.ndarray:
    """Hamiltonians at each of ``times`` as a complex ``(len(times), n, n)`` array."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    n = model.dim
    H = np.zeros((times.size, n, n), dtype=complex)
    if model.drive is None:
        return H
    kind = model.kind
    if kind is LevelKind.TWO_LEVEL_ADIABATIC:
        fr = model.drive.frame(times)
        r2 = np.asarray(fr.r2)
        pd = np.asarray(fr.phi_dot)
        H[:, 0, 0] = 0.5 * r2
        H[:, 1, 1] = -0.5 * r2
        H[:, 0, 1] = 0.5j * pd
        H[:, 1, 0] = -0.5j * pd
        return H
    l1, l2 = model.drive.couplings(times)
    if kind is LevelKind.TWO_LEVEL_BARE:
        H[:, 0, 0] = 0.5 * l2
        H[:, 1, 1] = -0.5 * l2
        H[:, 0, 1] = H[:, 1, 0] = 0.5 * l1
    elif kind is LevelKind.THREE_LEVEL:
        H[:, 0, 1] = H[:, 1, 0] = l1
        H[:, 1, 2] = H[:, 2, 1] = l2
    else:
        H[:, 0, 2] = H[:, 2, 0] = model.c10 * l1
        H[:, 1, 2] = H[:, 2, 1] = model.c11 * l1
        H[:, 2, 3] = H[:, 3, 2] = l2
    return H


def build_hamiltonian(model: LevelModel, t: float) -> np.ndarray:
    """Hamiltonian at a single time; real dtype unless the model is the adiabatic one."""
    H = hamiltonian_samples(model, [t])[0]
    if model.kind is LevelKind.TWO_LEVEL_ADIABATIC:
        return H
    return H.real.copy()


def default_window(scheme, params: PulseParams):
    s = resolve_scheme(scheme)
    if s is Scheme.EXPONENTIAL_PAIR:
        return -25.0 * params.T, 45.0 * params.T
    return -15.0 * params.T, 15.0 * params.T


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    The window is split into ``round((t_max - t_min) / dt)`` equal steps, so the
    step actually used (:attr:`step`) may differ from ``dt`` in the last digits.
    ``stride`` thins the stored samples; the final time is always kept.
    """

    t_min: float
    t_max: float
    dt: float
    method: str = "rk4"
    norm_tolerance: float = 1e-9
    stride: int = 1

    def __post_init__(self):
        vals = (self.t_min, self.t_max, self.dt, self.norm_tolerance)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParameter("integrator settings must be finite")
        if not self.t_min < self.t_max:
            raise InvalidParameter("t_min must be < t_max")
        if not self.dt > 0:
            raise InvalidParameter("dt must be > 0")
        if self.dt > (self.t_max - self.t_min) / 100.0 * (1 + 1e-12):
            raise InvalidParameter("dt must be at most 1/100 of the window")
        if self.method.lower() != "rk4":
            raise InvalidParameter(f"unsupported method {self.method!r}")
        if self.norm_tolerance <= 0:
            raise InvalidParameter("norm_tolerance must be > 0")
        if int(self.stride) != self.stride or self.stride < 1:
            raise InvalidParameter("stride must be a positive integer")

    @classmethod
    def default(cls, scheme, params: PulseParams, dt_factor: float = 1e-3, **kw):
        t0, t1 = default_window(scheme, params)
        return cls(t0, t1, dt_factor * params.T, **kw)

    @property
    def steps(self) -> int:
        return max(1, int(round((self.t_max - self.t_min) / self.dt)))

    @property
    def step(self) -> float:
        return (self.t_max - self.t_min) / self.steps


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    states: np.ndarray
    norm_drift: float
    labels: tuple = field(default=())

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        states = np.array(self.states, dtype=complex)
        if states.ndim != 2 or states.shape[0] != times.shape[0]:
            raise DimensionMismatch("need exactly one state per time sample")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise InvalidParameter("times must be strictly increasing")
        times.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        if not self.labels:
            object.__setattr__(self, "labels", LABELS.get(states.shape[1],
                               tuple(f"c{i + 1}" for i in range(states.shape[1]))))

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norms(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1].copy()


def _check_initial(initial, dim):
    psi = np.asarray(initial, dtype=complex).ravel()
    if psi.shape[0] != dim:
        raise DimensionMismatch(f"initial state has {psi.shape[0]} entries, model needs {dim}")
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > INITIAL_NORM_TOL:
        raise NormViolation(f"initial norm {norm!r} differs from 1")
    return psi


def integrate(model: LevelModel, initial, config: IntegratorConfig) -> TimeSeries:
    """Solve ``i dpsi/dt = H(t) psi`` with fixed-step RK4.

    The norm is monitored, never corrected; a drift above
    ``config.norm_tolerance`` raises :class:`NormDriftExceeded`.
    """
    psi0 = _check_initial(initial, model.dim)
    N = config.steps
    half_grid = np.linspace(config.t_min, config.t_max, 2 * N + 1)
    H = hamiltonian_samples(model, half_grid)
    states = kernels.rk4_propagate(H, psi0, config.step)
    times = half_grid[::2]
    drift = float(np.max(np.abs(1.0 - np.sum(np.abs(states) ** 2, axis=1))))
    if not drift <= config.norm_tolerance:
        raise NormDriftExceeded(
            f"norm drift {drift:.3e} exceeds tolerance {config.norm_tolerance:.3e}; reduce dt")
    if config.stride > 1:
        keep = np.arange(0, N + 1, config.stride)
        if keep[-1] != N:
            keep = np.append(keep, N)
        times, states = times[keep], states[keep]
    return TimeSeries(times, states, drift, LABELS[model.dim])


def su2_to_so3_map(a1, a2, phi) -> np.ndarray:
    """Map two-level amplitudes and the mixing angle to three-level amplitudes.

    b1 = -sin(phi) X + cos(phi) D,  b2 = -(a1 a2* - a1* a2),  b3 = -cos(phi) X - sin(phi) D
    with X = a1 a2* + a1* a2 and D = |a1|^2 - |a2|^2.
    """
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    phi = np.asarray(phi, dtype=float)
    norm = np.abs(a1) ** 2 + np.abs(a2) ** 2
    if np.any(np.abs(norm - 1.0) > INITIAL_NORM_TOL):
        raise NormViolation("two-level amplitudes must have unit norm")
    cross = a1 * np.conj(a2)
    x = 2.0 * cross.real
    d = np.abs(a1) ** 2 - np.abs(a2) ** 2
    s, c = np.sin(phi), np.cos(phi)
    b1 = -s * x + c * d
    b2 = -2j * cross.imag
    b3 = -c * x - s * d
    return np.stack(np.broadcast_arrays(b1 + 0j, b2, b3 + 0j), axis=-1)


def adiabatic_initial_state(phi0: float) -> np.ndarray:
    """Two-level state that :func:`su2_to_so3_map` sends to (1, 0, 0) at angle ``phi0``."""
    return np.array([math.cos(0.5 * phi0), -math.sin(0.5 * phi0)], dtype=complex)


def map_adiabatic_series(series: TimeSeries, pulse: Pulse) -> TimeSeries:
    """Three-level trajectory from a two-level adiabatic one."""
    phi = np.asarray(pulse.frame(series.times).phi)
    b = su2_to_so3_map(series.states[:, 0], series.states[:, 1], phi)
    drift = float(np.max(np.abs(1.0 - np.sum(np.abs(b) ** 2, axis=1))))
    return TimeSeries(series.times, b, drift, LABELS[3])


def default_initial(model: LevelModel, config: IntegratorConfig) -> np.ndarray:
    if model.kind is LevelKind.TWO_LEVEL_ADIABATIC and model.drive is not None:
        return adiabatic_initial_state(float(model.drive.frame(config.t_min).phi))
    return model.ground_state()


def final_populations(model: LevelModel, config: IntegratorConfig, initial=None):
    """Return ``(populations, final_state)`` at ``config.t_max``."""
    if initial is None:
        initial = default_initial(model, config)
    series = integrate(model, initial, config)
    final = series.final
    return np.abs(final) ** 2, final

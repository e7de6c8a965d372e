"""Three-channel split-operator propagation on a periodic 1-D grid.

One step is the symmetric product

    exp(-i (V + L) dt / 2 hbar)  exp(-i T dt / hbar)  exp(-i (V + L) dt / 2 hbar)

where ``V`` is diagonal in the channels, ``L`` holds the STIRAP couplings
(lambda1 between channels 1-2, lambda2 between 2-3) and ``T = p^2 / 2 m_c`` is
applied in the Fourier domain. The outer factors exponentiate the full 3x3
block ``V(x) + L`` at every grid point; couplings are evaluated at the step
midpoint. Channel indices are 0-based in this API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import (InvalidParameter, NormDriftExceeded, NormViolation, PacketClipped,
                     PhaseIllDefined)
from .pulses import Pulse, PulseParams, resolve_scheme

NCH = 3
EDGE_FRACTION = 1.0 / 32.0
CONSTRUCT_CLIP = 1e-10
CONSTRUCT_NORM_TOL = 1e-12
EVOLVE_CLIP = 1e-8
EVOLVE_NORM_TOL = 1e-10
PHASE_OVERLAP_FLOOR = 0.5


@dataclass(frozen=True)
class Grid1D:
    """``n`` periodic samples ``x_min + j dx`` with ``dx = (x_max - x_min) / n``.

    Wavenumbers follow ``numpy.fft.fftfreq``: zero first, then positive, then
    negative; for even ``n`` the Nyquist sample is stored as negative.
    """

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise InvalidParameter("grid needs finite x_min < x_max")
        if int(self.n) != self.n or self.n < 16:
            raise InvalidParameter("grid needs at least 16 points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)


def _per_channel(value, name):
    arr = np.broadcast_to(np.asarray(value, dtype=float), (NCH,)).copy()
    if not np.all(np.isfinite(arr)):
        raise InvalidParameter(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class ChannelPotentials:
    masses: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        m = _per_channel(self.masses, "masses")
        if np.any(m <= 0):
            raise InvalidParameter("masses must be > 0")
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != NCH:
            raise InvalidParameter("potential values must have shape (3, n)")
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("potentials must be finite on the grid")
        m.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "values", v)

    @classmethod
    def harmonic(cls, grid: Grid1D, mass=1.0, omega=1.0, center=0.0) -> "ChannelPotentials":
        """``V_c = m_c omega_c^2 (x - x0_c)^2 / 2``; arguments are scalars or per-channel triples."""
        m = _per_channel(mass, "mass")
        w = _per_channel(omega, "omega")
        c = _per_channel(center, "center")
        x = grid.x
        values = 0.5 * (m * w * w)[:, None] * (x[None, :] - c[:, None]) ** 2
        return cls(m, values)

    @classmethod
    def free(cls, grid: Grid1D, mass=1.0) -> "ChannelPotentials":
        return cls(_per_channel(mass, "mass"), np.zeros((NCH, grid.n)))

    @property
    def identical(self) -> bool:
        return bool(np.array_equal(self.values[0], self.values[1])
                    and np.array_equal(self.values[0], self.values[2]))


@dataclass(frozen=True)
class Wavepacket:
    """Three channel amplitudes on a grid, normalised to 1 (within 1e-12).

    ``check=False`` skips the norm test; propagation uses it for intermediate
    states, whose drift is monitored separately.
    """

    grid: Grid1D
    channels: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        ch = np.array(self.channels, dtype=complex)
        if ch.shape != (NCH, self.grid.n):
            raise InvalidParameter(f"channels must have shape (3, {self.grid.n})")
        if not np.all(np.isfinite(ch)):
            raise InvalidParameter("wavepacket samples must be finite")
        if self.check:
            total = float(np.sum(np.abs(ch) ** 2) * self.grid.dx)
            if abs(total - 1.0) > CONSTRUCT_NORM_TOL:
                raise NormViolation(f"wavepacket norm {total!r} differs from 1")
        ch.flags.writeable = False
        object.__setattr__(self, "channels", ch)

    @property
    def channel_norms(self) -> np.ndarray:
        return np.sum(np.abs(self.channels) ** 2, axis=1) * self.grid.dx

    @property
    def total_norm(self) -> float:
        return float(np.sum(self.channel_norms))

    def boundary_density(self) -> float:
        """Probability held in the outer ``EDGE_FRACTION`` of the grid on either side."""
        e = max(1, int(self.grid.n * EDGE_FRACTION))
        rho = np.abs(self.channels) ** 2
        return float((np.sum(rho[:, :e]) + np.sum(rho[:, -e:])) * self.grid.dx)

    def observables(self, hbar: float = 1.0) -> dict:
        """Per-channel norm, <x>, <p>, position width and momentum width."""
        x = self.grid.x
        k = self.grid.k
        rho = np.abs(self.channels) ** 2
        norm = np.sum(rho, axis=1) * self.grid.dx
        rho_k = np.abs(np.fft.fft(self.channels, axis=1)) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.sum(rho, axis=1)
            mx = np.sum(rho * x, axis=1) / w
            vx = np.sum(rho * (x[None, :] - mx[:, None]) ** 2, axis=1) / w
            wk = np.sum(rho_k, axis=1)
            mp = hbar * np.sum(rho_k * k, axis=1) / wk
            vp = hbar ** 2 * np.sum(rho_k * k * k, axis=1) / wk - mp ** 2
        empty = norm <= 1e-300
        for arr in (mx, vx, mp, vp):
            arr[empty] = np.nan
        return {"norm": norm, "mean_x": mx, "width_x": np.sqrt(vx),
                "mean_p": mp, "width_p": np.sqrt(np.maximum(vp, 0.0))}


def make_gaussian(grid: Grid1D, x_mean: float, p_mean: float, dx_width: float,
                  hbar: float = 1.0, channel: int = 0) -> Wavepacket:
    """Minimum-uncertainty packet

        (2 pi dx_width^2)^(-1/4) exp(-(x - x_mean)^2 / (4 dx_width^2) + i p_mean x / hbar)

    placed in one channel and renormalised on the grid.
    """
    if not (dx_width > 0 and math.isfinite(dx_width)):
        raise InvalidParameter("packet width must be > 0")
    if dx_width < 2.0 * grid.dx:
        raise InvalidParameter("packet width must span at least two grid spacings")
    if not (grid.x_min + 4 * dx_width <= x_mean <= grid.x_max - 4 * dx_width):
        raise InvalidParameter("packet centre must sit at least 4 widths inside the grid")
    if channel not in range(NCH):
        raise InvalidParameter("channel must be 0, 1 or 2")
    x = grid.x
    amp = (2.0 * np.pi * dx_width ** 2) ** -0.25 * np.exp(
        -((x - x_mean) ** 2) / (4.0 * dx_width ** 2) + 1j * p_mean * x / hbar)
    amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * grid.dx)
    ch = np.zeros((NCH, grid.n), dtype=complex)
    ch[channel] = amp
    wp = Wavepacket(grid, ch)
    clipped = wp.boundary_density()
    if clipped > CONSTRUCT_CLIP:
        raise PacketClipped(f"{clipped:.2e} of the packet lies at the grid boundary")
    return wp


@dataclass(frozen=True)
class SplitOpConfig:
    """Step size, action scale and the pulse pair (``scheme=None`` turns couplings off).

    The pulse is evaluated at ``t - pulse_center``.
    """

    dt: float
    hbar: float = 1.0
    scheme: object = None
    params: Optional[PulseParams] = None
    pulse_center: float = 0.0

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidParameter("dt must be > 0")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise InvalidParameter("hbar must be > 0")
        if (self.scheme is None) != (self.params is None):
            raise InvalidParameter("give both scheme and params, or neither")
        if self.scheme is not None:
            object.__setattr__(self, "scheme", resolve_scheme(self.scheme))

    @property
    def drive(self) -> Optional[Pulse]:
        if self.scheme is None:
            return None
        return Pulse(self.scheme, self.params, self.pulse_center)

    def couplings(self, t: float):
        if self.scheme is None:
            return 0.0, 0.0
        return self.drive.couplings(t)

    def with_dt(self, dt: float) -> "SplitOpConfig":
        return SplitOpConfig(dt, self.hbar, self.scheme, self.params, self.pulse_center)


def coupling_propagator(l1: float, l2: float, tau: float) -> np.ndarray:
    """``exp(-1j * tau * L)`` for the coupling block ``L``.

    ``L`` has eigenvalues ``0, +-r`` with ``r = hypot(l1, l2)``, hence
    ``exp(-i tau L) = 1 - i sin(r tau) L / r + (cos(r tau) - 1) L^2 / r^2``.
    """
    L = np.array([[0.0, l1, 0.0], [l1, 0.0, l2], [0.0, l2, 0.0]])
    r = math.hypot(l1, l2)
    if r == 0.0:
        return np.eye(3, dtype=complex)
    return np.eye(3) - 1j * math.sin(r * tau) / r * L + (math.cos(r * tau) - 1.0) / (r * r) * (L @ L)


class _Stepper:
    """Caches the kinetic factors so repeated steps avoid recomputing them."""

    def __init__(self, grid: Grid1D, config: SplitOpConfig, potentials: ChannelPotentials, dt: float):
        if potentials.values.shape[1] != grid.n:
            raise InvalidParameter("potentials were sampled on a different grid")
        self.config = config
        self.dt = dt
        self.tau = dt / (2.0 * config.hbar)
        k2 = grid.k ** 2
        self.kinetic = np.exp(-1j * config.hbar * dt * k2[None, :] / (2.0 * potentials.masses[:, None]))
        self.values = potentials.values
        self.identical = potentials.identical
        if self.identical:
            self.phase = np.exp(-1j * self.tau * potentials.values[0])

    def step(self, psi: np.ndarray, t: float) -> np.ndarray:
        l1, l2 = self.config.couplings(t + 0.5 * self.dt)
        if self.identical:
            # V is a multiple of the identity at each x, so it commutes with L
            W = coupling_propagator(float(l1), float(l2), self.tau)
            psi = self.phase * (W @ psi)
            psi = np.fft.ifft(self.kinetic * np.fft.fft(psi, axis=1), axis=1)
            return self.phase * (W @ psi)
        U = kernels.half_step_unitaries(self.values, float(l1), float(l2), self.tau)
        psi = np.ascontiguousarray(psi, dtype=complex)
        kernels.apply_channel_unitaries(U, psi)
        psi = np.ascontiguousarray(np.fft.ifft(self.kinetic * np.fft.fft(psi, axis=1), axis=1))
        kernels.apply_channel_unitaries(U, psi)
        return psi


def split_step(state: Wavepacket, t: float, config: SplitOpConfig,
               potentials: ChannelPotentials) -> Wavepacket:
    """Advance ``state`` from ``t`` to ``t + config.dt``."""
    stepper = _Stepper(state.grid, config, potentials, config.dt)
    return Wavepacket(state.grid, stepper.step(np.array(state.channels), t), check=False)


@dataclass(frozen=True)
class ObservableTrace:
    """Sampled observables; per-channel arrays have shape ``(samples, 3)``."""

    times: np.ndarray
    norms: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    width_x: np.ndarray

    @property
    def total_norm(self) -> np.ndarray:
        return np.sum(self.norms, axis=1)


def evolve(state: Wavepacket, t0: float, t1: float, config: SplitOpConfig,
           potentials: ChannelPotentials, stride: int = 1):
    """Propagate from ``t0`` to ``t1``; returns ``(final_state, trace)``.

    The window is cut into ``round((t1 - t0) / dt)`` equal steps. Observables are
    recorded every ``stride`` steps and at the end. Raises
    :class:`PacketClipped` if probability reaches the grid edge and
    :class:`NormDriftExceeded` if the total norm leaves ``1 +- 1e-10``.
    """
    if not t1 > t0:
        raise InvalidParameter("t1 must be > t0")
    if int(stride) != stride or stride < 1:
        raise InvalidParameter("stride must be a positive integer")
    nsteps = max(1, int(round((t1 - t0) / config.dt)))
    dt = (t1 - t0) / nsteps
    grid = state.grid
    stepper = _Stepper(grid, config, potentials, dt)
    psi = np.array(state.channels)
    rows = []

    def record(t, psi):
        wp = Wavepacket(grid, psi, check=False)
        obs = wp.observables(config.hbar)
        total = float(np.sum(obs["norm"]))
        if abs(total - 1.0) > EVOLVE_NORM_TOL:
            raise NormDriftExceeded(f"total norm {total!r} at t={t:.6g}")
        edge = wp.boundary_density()
        if edge > EVOLVE_CLIP:
            raise PacketClipped(f"boundary density {edge:.2e} at t={t:.6g}; enlarge the grid")
        rows.append((t, obs["norm"], obs["mean_x"], obs["mean_p"], obs["width_x"]))

    record(t0, psi)
    for j in range(nsteps):
        psi = stepper.step(psi, t0 + j * dt)
        if (j + 1) % stride == 0 or j + 1 == nsteps:
            record(t0 + (j + 1) * dt, psi)
    cols = list(zip(*rows))
    trace = ObservableTrace(np.array(cols[0]), *(np.array(c) for c in cols[1:]))
    return Wavepacket(grid, psi, check=False), trace


def overlap(reference: np.ndarray, state: Wavepacket, channel: int) -> complex:
    """``<ref|psi_channel> / ||ref||`` on the grid."""
    ref = np.asarray(reference, dtype=complex)
    if ref.shape != (state.grid.n,):
        raise InvalidParameter("reference must be one channel sampled on the same grid")
    dx = state.grid.dx
    rn = math.sqrt(float(np.sum(np.abs(ref) ** 2)) * dx)
    if rn == 0.0:
        raise PhaseIllDefined("reference has zero norm")
    return complex(np.sum(ref.conj() * state.channels[channel]) * dx / rn)


def channel_phase(state: Wavepacket, channel: int, reference: np.ndarray) -> float:
    """``arg <ref|psi_channel>`` in ``(-pi, pi]``; needs overlap magnitude >= 0.5."""
    ov = overlap(reference, state, channel)
    if abs(ov) < PHASE_OVERLAP_FLOOR:
        raise PhaseIllDefined(f"overlap {abs(ov):.3f} is below {PHASE_OVERLAP_FLOOR}")
    ph = math.atan2(ov.imag, ov.real)
    return math.pi if ph == -math.pi else ph

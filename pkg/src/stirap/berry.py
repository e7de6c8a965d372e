"""Berry curvature, loop phases and monopole flux for ``H = 1/2 sigma . R``.

The degeneracy at ``R = 0`` acts as a monopole of strength 1/2: the upper
(``plus``) band sees the field ``+R_hat / (2 R^2)``, the lower one the opposite,
and a closed loop picks up ``gamma = -/+ solid_angle / 2``.

Loop phases use the gauge-invariant overlap product, never an explicit
connection, so any per-point phase choice of the eigenvectors cancels.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (AmbiguousProjection, DegeneratePoint, InvalidParameter,
                     OverlapVanished)

SIGMA = np.array([[[0, 1], [1, 0]],
                  [[0, -1j], [1j, 0]],
                  [[1, 0], [0, -1]]], dtype=complex)

OVERLAP_FLOOR = 1e-8


class Band(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Band.PLUS else -1


def as_band(band) -> Band:
    if isinstance(band, Band):
        return band
    if band in (1, "+", "+1"):
        return Band.PLUS
    if band in (-1, "-", "-1"):
        return Band.MINUS
    try:
        return Band(str(band).lower())
    except ValueError:
        raise InvalidParameter(f"band must be 'plus' or 'minus', got {band!r}") from None


def _points(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 3:
        raise InvalidParameter("parameter points must be 3-vectors")
    if not np.all(np.isfinite(r)):
        raise InvalidParameter("parameter points must be finite")
    if np.any(np.linalg.norm(r, axis=-1) == 0.0):
        raise DegeneratePoint("R = 0 is the degeneracy; curvature and eigenvectors are undefined there")
    return r


def hamiltonian(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * np.einsum("...k,kij->...ij", r, SIGMA)


def monopole_field(r, band) -> np.ndarray:
    """Closed-form curvature ``sign * R_hat / (2 R^2)``."""
    r = _points(r)
    R = np.linalg.norm(r, axis=-1, keepdims=True)
    return as_band(band).sign * 0.5 * r / R ** 3


def curvature_numeric(r, band) -> np.ndarray:
    """Sum-over-states curvature from a numerical diagonalisation.

    ``V_m = Im (<m|dH|n> x <n|dH|m>) / (E_m - E_n)^2`` with ``dH = sigma / 2``.
    """
    r = _points(r)
    w, v = np.linalg.eigh(hamiltonian(r))
    m = 1 if as_band(band) is Band.PLUS else 0
    um = v[..., :, m]
    un = v[..., :, 1 - m]
    # <m| sigma_k / 2 |n> for k = x, y, z
    elem = 0.5 * np.einsum("...i,kij,...j->...k", um.conj(), SIGMA, un)
    gap = (w[..., m] - w[..., 1 - m])[..., None]
    return np.cross(elem, elem.conj()).imag / gap ** 2


def eigenvectors(r, band) -> np.ndarray:
    """Normalised analytic eigenvectors, first nonvanishing component real positive."""
    r = _points(r)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    R = np.linalg.norm(r, axis=-1)
    if as_band(band) is Band.PLUS:
        north = np.stack([R + z, x + 1j * y], axis=-1)
        south = np.stack([x - 1j * y, R - z], axis=-1)
    else:
        north = np.stack([-(x - 1j * y), R + z], axis=-1)
        south = np.stack([R - z + 0j, -(x + 1j * y)], axis=-1)
    use_north = (z >= 0)[..., None]
    u = np.where(use_north, north, south)
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    lead = np.where(np.abs(u[..., 0]) > 1e-14, u[..., 0], u[..., 1])
    return u * (np.conj(lead) / np.abs(lead))[..., None]


@dataclass(frozen=True)
class ClosedPath:
    """Ordered loop of parameter points; the closing segment is implied.

    ``orientation = -1`` traverses the points in reverse.
    """

    points: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
            raise InvalidParameter("a closed path needs at least 3 points in 3-D")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameter("path points must be finite")
        if np.any(np.linalg.norm(pts, axis=1) == 0.0):
            raise AmbiguousProjection("path touches the origin")
        steps = np.roll(pts, -1, axis=0) - pts
        if np.any(np.all(steps == 0.0, axis=1)):
            raise InvalidParameter("consecutive path points must differ")
        if self.orientation not in (1, -1):
            raise InvalidParameter("orientation must be +1 or -1")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def ordered(self) -> np.ndarray:
        return self.points if self.orientation == 1 else self.points[::-1]

    def reversed(self) -> "ClosedPath":
        return ClosedPath(self.points, -self.orientation)


@dataclass(frozen=True)
class BerryResult:
    """Outcome of a loop or sphere calculation.

    ``flux`` is the total monopole flux implied by the measurement and
    ``charge = flux / (4 pi)``. For a loop this is ``-4 pi gamma / solid_angle``
    (NaN for a loop of vanishing solid angle).
    """

    band: Band
    loop_phase: float
    solid_angle: float
    flux: float
    charge: float


def wrap_phase(x):
    """Map angles into ``(-pi, pi]``."""
    w = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return float(w) if np.ndim(w) == 0 else w


def discrete_berry_phase(vectors) -> float:
    """``-arg prod_k <u_k | u_(k+1)>`` around the closed chain of ``vectors``."""
    u = np.asarray(vectors, dtype=complex)
    ov = np.sum(u.conj() * np.roll(u, -1, axis=0), axis=-1)
    mag = np.abs(ov)
    if np.any(mag < OVERLAP_FLOOR):
        k = int(np.argmin(mag))
        raise OverlapVanished(f"eigenvectors {k} and {k + 1} are orthogonal; refine the path")
    return wrap_phase(-np.angle(np.prod(ov / mag)))


def solid_angle(path: ClosedPath, apex=None) -> float:
    """Signed solid angle of the path's radial projection.

    Sums the spherical triangles (apex, p_k, p_k+1). The default apex is +z,
    moved to another axis if a point sits at its antipode. Counterclockwise
    loops seen from outside the sphere are positive.
    """
    p = path.ordered()
    u = p / np.linalg.norm(p, axis=1, keepdims=True)
    if apex is None:
        for cand in ((0, 0, 1), (1, 0, 0), (0, 1, 0), (0, 0, -1), (-1, 0, 0), (0, -1, 0)):
            a = np.array(cand, dtype=float)
            if np.min(u @ a) > -1.0 + 1e-9:
                break
        else:
            raise AmbiguousProjection("no usable reference apex for this path")
    else:
        a = np.asarray(apex, dtype=float)
        a = a / np.linalg.norm(a)
    b = u
    c = np.roll(u, -1, axis=0)
    num = np.einsum("k,ik->i", a, np.cross(b, c))
    den = 1.0 + b @ a + np.sum(b * c, axis=1) + c @ a
    return float(np.sum(2.0 * np.arctan2(num, den)))


def loop_phase(path: ClosedPath, band) -> BerryResult:
    band = as_band(band)
    gamma = discrete_berry_phase(eigenvectors(path.ordered(), band))
    omega = solid_angle(path)
    flux = -4.0 * math.pi * gamma / omega if abs(omega) > 1e-12 else math.nan
    return BerryResult(band, gamma, omega, flux, flux / (4.0 * math.pi))


def _mesh(mesh):
    n_theta, n_phi = (int(m) for m in mesh)
    if n_theta < 8 or n_phi < 16:
        raise InvalidParameter("sphere mesh needs n_theta >= 8 and n_phi >= 16")
    return n_theta, n_phi


def sphere_flux(radius: float, mesh=(100, 200), band="plus") -> float:
    """Midpoint-rule flux of the numerical curvature through a sphere about the origin."""
    if radius == 0:
        raise DegeneratePoint("sphere of zero radius sits on the degeneracy")
    if not (math.isfinite(radius) and radius > 0):
        raise InvalidParameter(f"radius must be finite and > 0, got {radius!r}")
    n_theta, n_phi = _mesh(mesh)
    d_theta = math.pi / n_theta
    d_phi = 2.0 * math.pi / n_phi
    theta = (np.arange(n_theta) + 0.5) * d_theta
    phi = (np.arange(n_phi) + 0.5) * d_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    normal = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    V = curvature_numeric(radius * normal, band)
    density = np.sum(V * normal, axis=-1) * radius ** 2 * np.sin(th)
    # row sums then total: fixed pairwise order, reproducible
    return float(np.sum(np.sum(density, axis=1)) * d_theta * d_phi)


def sphere_result(radius: float, mesh=(100, 200), band="plus") -> BerryResult:
    band = as_band(band)
    flux = sphere_flux(radius, mesh, band)
    return BerryResult(band, wrap_phase(-flux), 4.0 * math.pi, flux, flux / (4.0 * math.pi))


def latitude(theta: float, n: int = 2000, radius: float = 1.0) -> ClosedPath:
    """Counterclockwise circle at polar angle ``theta``."""
    if not 0 < theta < math.pi:
        raise InvalidParameter("latitude angle must lie strictly between 0 and pi")
    ph = 2.0 * np.pi * np.arange(n) / n
    pts = radius * np.stack([math.sin(theta) * np.cos(ph), math.sin(theta) * np.sin(ph),
                             np.full(n, math.cos(theta))], axis=1)
    return ClosedPath(pts)


def equator(n: int = 2000, radius: float = 1.0) -> ClosedPath:
    return latitude(0.5 * math.pi, n, radius)


def read_path_csv(path) -> ClosedPath:
    """Read ``x,y,z`` rows (header required) into a :class:`ClosedPath`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [h.strip().lower() for h in rows[0]]
    if header[:3] != ["x", "y", "z"]:
        raise InvalidParameter("path CSV header must start with x,y,z")
    pts = [[float(v) for v in row[:3]] for row in rows[1:] if row]
    return ClosedPath(np.array(pts))


def parse_path(text: str, n: int = 2000, radius: float = 1.0) -> ClosedPath:
    """``equator``, ``latitude:<theta>`` or a CSV file name."""
    text = text.strip()
    if text == "equator":
        return equator(n, radius)
    if text.startswith("latitude:"):
        try:
            theta = float(text.split(":", 1)[1])
        except ValueError:
            raise InvalidParameter(f"bad latitude angle in {text!r}") from None
        return latitude(theta, n, radius)
    return read_path_csv(text)


def parse_sphere(text: str) -> float:
    if not text.startswith("sphere:"):
        raise InvalidParameter(f"expected 'sphere:<radius>', got {text!r}")
    try:
        return float(text.split(":", 1)[1])
    except ValueError:
        raise InvalidParameter(f"bad sphere radius in {text!r}") from None

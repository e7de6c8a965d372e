import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stirap.berry import (BerryResult, ClosedPath, Band, curvature_numeric, discrete_berry_phase,
                          eigenvectors, equator, hamiltonian, latitude, loop_phase,
                          monopole_field, parse_path, parse_sphere, read_path_csv, solid_angle,
                          sphere_flux, sphere_result, wrap_phase)
from stirap.errors import (AmbiguousProjection, DegeneratePoint, InvalidParameter,
                           OverlapVanished)

TWO_PI = 2 * math.pi


@pytest.mark.parametrize("r,band,expected", [((0, 0, 1), "plus", (0, 0, 0.5)),
                                             ((0, 0, 2), "plus", (0, 0, 0.125)),
                                             ((0, 0, 1), "minus", (0, 0, -0.5))])
def test_curvature_examples(r, band, expected):
    np.testing.assert_allclose(curvature_numeric(r, band), expected, atol=1e-15)


def test_curvature_matches_monopole_on_random_points():
    rng = np.random.default_rng(7)
    d = rng.normal(size=(1000, 3))
    R = rng.uniform(0.1, 10, 1000)
    r = d / np.linalg.norm(d, axis=1, keepdims=True) * R[:, None]
    for band in ("plus", "minus"):
        err = np.linalg.norm(curvature_numeric(r, band) - monopole_field(r, band), axis=1)
        assert np.all(err <= 1e-10 * 0.5 / R ** 2)


def test_curvature_degenerate_point():
    with pytest.raises(DegeneratePoint):
        curvature_numeric((0, 0, 0), "plus")


def test_eigenvectors_diagonalise():
    rng = np.random.default_rng(3)
    r = rng.normal(size=(200, 3))
    R = np.linalg.norm(r, axis=1)
    H = hamiltonian(r)
    for band, sign in (("plus", 1), ("minus", -1)):
        u = eigenvectors(r, band)
        Hu = np.einsum("kij,kj->ki", H, u)
        np.testing.assert_allclose(Hu, sign * 0.5 * R[:, None] * u, atol=1e-13)
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1, atol=1e-14)


@pytest.mark.parametrize("radius,band,sign", [(1.0, "plus", 1), (3.0, "plus", 1),
                                              (1.0, "minus", -1)])
def test_sphere_flux(radius, band, sign):
    flux = sphere_flux(radius, (100, 200), band)
    assert flux == pytest.approx(sign * TWO_PI, rel=1e-3)
    assert flux / (4 * math.pi) == pytest.approx(sign * 0.5, abs=1e-3)


def test_sphere_flux_radius_independent():
    a, b = sphere_flux(1.0), sphere_flux(3.0)
    assert abs(a - b) <= 1e-3 * abs(a)


def test_sphere_mesh_convergence():
    e1 = abs(sphere_flux(1.0, (50, 100)) - TWO_PI)
    e2 = abs(sphere_flux(1.0, (100, 200)) - TWO_PI)
    assert e1 / e2 >= 3


def test_sphere_errors():
    with pytest.raises(DegeneratePoint):
        sphere_flux(0.0)
    with pytest.raises(InvalidParameter):
        sphere_flux(1.0, (4, 8))
    res = sphere_result(2.0)
    assert res.charge == pytest.approx(res.flux / (4 * math.pi), rel=1e-15)


def test_equator_minus_band():
    res = loop_phase(equator(1000), "minus")
    assert abs(wrap_phase(res.loop_phase - math.pi)) <= 1e-3
    assert res.solid_angle == pytest.approx(TWO_PI, abs=1e-9)


def test_latitude_pi_over_three():
    res = loop_phase(latitude(math.pi / 3, 2000), "minus")
    assert res.loop_phase == pytest.approx(math.pi / 2, abs=1e-3)
    assert res.solid_angle == pytest.approx(polygon_solid_angle(math.pi / 3, 2000), abs=1e-12)
    assert res.solid_angle == pytest.approx(math.pi, abs=1e-5)
    assert res.charge == pytest.approx(-0.5, abs=1e-3)


def test_orientation_flips_sign():
    path = latitude(1.0, 2000)
    fwd = loop_phase(path, "plus")
    rev = loop_phase(path.reversed(), "plus")
    assert rev.loop_phase == pytest.approx(-fwd.loop_phase, abs=1e-12)
    assert rev.solid_angle == pytest.approx(-fwd.solid_angle, abs=1e-12)


def test_degenerate_path_forward_then_back():
    pts = [(1, 0, 0), (0.9, 0.1, 0.1), (0.8, 0.1, 0.2)]
    loop = ClosedPath(pts + pts[::-1][1:-1])
    assert loop_phase(loop, "plus").loop_phase == pytest.approx(0.0, abs=1e-14)
    assert solid_angle(loop) == pytest.approx(0.0, abs=1e-14)


def test_tiny_loop_has_vanishing_solid_angle():
    ph = np.linspace(0, TWO_PI, 50, endpoint=False)
    pts = np.stack([1e-9 * np.cos(ph), 1e-9 * np.sin(ph), np.full_like(ph, 1.0)], axis=1)
    assert abs(solid_angle(ClosedPath(pts))) < 1e-15


def test_path_validation():
    with pytest.raises(AmbiguousProjection):
        ClosedPath([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    with pytest.raises(InvalidParameter):
        ClosedPath([(1, 0, 0), (1, 0, 0), (0, 1, 0)])
    with pytest.raises(InvalidParameter):
        ClosedPath([(1, 0, 0), (0, 1, 0)])


def test_overlap_vanishes_on_coarse_antipodal_step():
    u = eigenvectors([(0, 0, 1), (0, 0, -1), (1, 0, 0)], "plus")
    with pytest.raises(OverlapVanished):
        discrete_berry_phase(u)


def test_gauge_invariance():
    path = latitude(0.8, 500)
    u = eigenvectors(path.points, "minus")
    rng = np.random.default_rng(11)
    rephased = u * np.exp(1j * rng.uniform(0, TWO_PI, len(u)))[:, None]
    assert discrete_berry_phase(rephased) == pytest.approx(discrete_berry_phase(u), abs=1e-12)


def _random_loop(rng):
    """Smooth loop: a latitude circle about a random axis with a wobble, on a random sphere."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    e1 = np.cross(axis, rng.normal(size=3))
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    s = np.linspace(0, TWO_PI, 2000, endpoint=False)
    theta = rng.uniform(0.2, 2.9) + 0.15 * np.sin(rng.integers(1, 4) * s + rng.uniform(0, 6))
    d = (np.cos(theta)[:, None] * axis + np.sin(theta)[:, None]
         * (np.cos(s)[:, None] * e1 + np.sin(s)[:, None] * e2))
    return ClosedPath(rng.uniform(0.1, 10) * d)


def test_phase_solid_angle_law():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        path = _random_loop(rng)
        for band, sign in (("plus", 1), ("minus", -1)):
            res = loop_phase(path, band)
            assert abs(wrap_phase(res.loop_phase + sign * 0.5 * res.solid_angle)) <= 1e-3


def polygon_solid_angle(theta, n):
    """Regular geodesic n-gon inscribed in the latitude circle at polar angle theta."""
    return TWO_PI - 2 * n * math.atan(math.cos(theta) * math.tan(math.pi / n))


@given(theta=st.floats(0.05, math.pi - 0.05), n=st.integers(16, 2000))
@settings(max_examples=40, deadline=None)
def test_latitude_solid_angle(theta, n):
    got = solid_angle(latitude(theta, n))
    assert got == pytest.approx(polygon_solid_angle(theta, n), abs=1e-12)
    # chord error against the smooth cap is second order in the step
    assert abs(got - TWO_PI * (1 - math.cos(theta))) <= 4 * (TWO_PI / n) ** 2


def test_parse_helpers(tmp_path):
    f = tmp_path / "loop.csv"
    pts = latitude(1.0, 100).points
    f.write_text("x,y,z\n" + "\n".join(",".join(repr(float(v)) for v in p) for p in pts) + "\n")
    np.testing.assert_array_equal(read_path_csv(f).points, pts)
    np.testing.assert_array_equal(parse_path(str(f)).points, pts)
    assert len(parse_path("equator", 64).points) == 64
    assert parse_sphere("sphere:2.5") == 2.5
    with pytest.raises(InvalidParameter):
        parse_sphere("ball:1")
    with pytest.raises(InvalidParameter):
        parse_path("latitude:x")


def test_band_aliases():
    from stirap.berry import as_band
    assert as_band("+") is Band.PLUS and as_band(-1) is Band.MINUS
    with pytest.raises(InvalidParameter):
        as_band("up")


def test_result_fields():
    res = loop_phase(latitude(math.pi / 3, 2000), "plus")
    assert isinstance(res, BerryResult) and res.band is Band.PLUS
    assert res.charge == pytest.approx(res.flux / (4 * math.pi), rel=1e-15)

import io
import json
import math

import numpy as np
import pytest

from stirap import serialize
from stirap.errors import InvalidParameter
from stirap.experiments import double_stirap, sweep
from stirap.propagate import IntegratorConfig, LevelKind, LevelModel, integrate
from stirap.pulses import PulseParams
from stirap.splitop import ChannelPotentials, Grid1D, SplitOpConfig, evolve, make_gaussian


@pytest.fixture(scope="module")
def series():
    model = LevelModel.of(LevelKind.THREE_LEVEL, "ci-sech", PulseParams(1.3, 1.0))
    return integrate(model, model.ground_state(), IntegratorConfig(-15, 15, 1e-2, stride=10))


@pytest.fixture(scope="module")
def evolved():
    g = Grid1D(-10, 10, 64)
    cfg = SplitOpConfig(0.01, scheme="ci-sech", params=PulseParams(2.0), pulse_center=1.0)
    return evolve(make_gaussian(g, 0.5, 0.2, 0.7), 0.0, 2.0, cfg, ChannelPotentials.harmonic(g),
                  stride=20)


def test_float_format_round_trips():
    for x in (math.pi, 1e-300, -2.5e-17, 1 / 3):
        assert float(serialize.fmt(x)) == x


def test_timeseries_csv_round_trip(series):
    buf = io.StringIO()
    serialize.write_timeseries_csv(series, buf)
    head = buf.getvalue().splitlines()[0].split(",")
    assert head[0] == "t" and head[-1] == "norm" and "pop_b3" in head
    back = serialize.read_timeseries_csv(io.StringIO(buf.getvalue()))
    np.testing.assert_array_equal(back.times, series.times)
    np.testing.assert_array_equal(back.states, series.states)
    assert back.labels == series.labels


def test_timeseries_json_round_trip(series):
    doc = json.loads(serialize.dumps(serialize.timeseries_json(series)))
    back = serialize.timeseries_from_json(doc)
    np.testing.assert_array_equal(back.states, series.states)
    assert back.norm_drift == series.norm_drift


def test_trace_round_trip(evolved):
    _, trace = evolved
    buf = io.StringIO()
    serialize.write_trace_csv(trace, buf)
    back = serialize.read_trace_csv(io.StringIO(buf.getvalue()))
    for name in ("times", "norms", "mean_x", "mean_p", "width_x"):
        np.testing.assert_array_equal(getattr(back, name), getattr(trace, name))
    doc = json.loads(serialize.dumps(serialize.trace_json(trace)))
    assert doc["norm"][0] == [1.0, 0.0, 0.0]


def test_snapshot_round_trips(tmp_path, evolved):
    wp, _ = evolved
    path = tmp_path / "snap.bin"
    serialize.write_snapshot(wp, path)
    blob = path.read_bytes()
    assert len(blob) == serialize.SNAPSHOT_HEADER.size + 3 * 64 * 16
    back = serialize.read_snapshot(path)
    np.testing.assert_array_equal(back.channels, wp.channels)
    assert back.grid == wp.grid
    doc = json.loads(serialize.dumps(serialize.snapshot_json(wp)))
    np.testing.assert_array_equal(serialize.snapshot_from_json(doc).channels, wp.channels)


def test_snapshot_truncated(tmp_path, evolved):
    wp, _ = evolved
    buf = io.BytesIO()
    serialize.write_snapshot(wp, buf)
    with pytest.raises(InvalidParameter):
        serialize.read_snapshot(io.BytesIO(buf.getvalue()[:-8]))


def test_sweep_round_trips():
    table = sweep("in", 0.5, 1.5, 3, dt_factor=1e-2)
    buf = io.StringIO()
    serialize.write_sweep_csv(table, buf)
    assert serialize.read_sweep_csv(io.StringIO(buf.getvalue())) == table
    assert serialize.sweep_from_json(json.loads(serialize.dumps(serialize.sweep_json(table)))) == table


def test_analytic_only_sweep_json_uses_null():
    table = sweep("ci", 0.5, 1.5, 2, numeric=False)
    doc = json.loads(serialize.dumps(serialize.sweep_json(table)))
    assert doc["rows"][0][2] is None
    back = serialize.sweep_from_json(doc)
    assert math.isnan(back.rows[0].numeric)


def test_sweep_reader_rejects_other_schema():
    with pytest.raises(InvalidParameter):
        serialize.read_sweep_csv(io.StringIO("# schema=other version=1\na,b\n1,2\n"))


def test_double_round_trip():
    reps = [double_stirap(1.0, 12.0, dt_factor=1e-2)]
    buf = io.StringIO()
    serialize.write_double_csv(reps, buf)
    back = serialize.read_double_csv(io.StringIO(buf.getvalue()))
    np.testing.assert_array_equal(back[0].final, reps[0].final)
    assert back[0].b1_phase == reps[0].b1_phase
    with pytest.raises(InvalidParameter):
        serialize.read_double_csv(io.StringIO("a\n1\n"))

"""CSV, JSON and binary formats for the package's result types.

CSV files always carry a header row and write floats with 17 significant
digits, so values survive a round trip bit for bit. Tables that belong to a
versioned schema start with a ``# schema=<name> version=<n>`` comment line.

Wavepacket snapshots use a little-endian binary layout::

    int64   n            number of grid points
    float64 x_min
    float64 x_max
    int64   channels     always 3
    float64 body[channels][n][2]   (re, im) interleaved, channel-major
"""
from __future__ import annotations

import csv
import io
import json
import math
import struct
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameter

SIG = ".17g"
SNAPSHOT_HEADER = struct.Struct("<qddq")


def fmt(x) -> str:
    return format(float(x), SIG)


def _open_text(target, mode):
    if hasattr(target, "write") or hasattr(target, "read"):
        return target, False
    return open(target, mode, newline=""), True


def write_csv(target, header: Sequence[str], rows: Iterable[Sequence], schema=None):
    fh, owned = _open_text(target, "w")
    try:
        if schema is not None:
            name, version = schema
            fh.write(f"# schema={name} version={version}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    finally:
        if owned:
            fh.close()


def read_csv(source):
    """Return ``(schema, header, rows)``; ``schema`` is ``None`` or ``(name, version)``."""
    fh, owned = _open_text(source, "r")
    try:
        text = fh.read()
    finally:
        if owned:
            fh.close()
    lines = text.splitlines()
    schema = None
    if lines and lines[0].startswith("#"):
        fields = dict(part.split("=", 1) for part in lines[0][1:].split() if "=" in part)
        schema = (fields.get("schema"), int(fields.get("version", 0)))
        lines = lines[1:]
    reader = csv.reader(lines)
    header = next(reader)
    return schema, header, [row for row in reader if row]


def _json_num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _num(x):
    return math.nan if x is None else float(x)


# --- level-space trajectories -------------------------------------------------

def timeseries_rows(series):
    labels = series.labels
    header = ["t"]
    header += [f"re_{l}" for l in labels] + [f"im_{l}" for l in labels]
    header += [f"pop_{l}" for l in labels] + ["norm"]
    pops = series.populations
    data = np.column_stack([series.times, series.states.real, series.states.imag,
                            pops, pops.sum(axis=1)])
    return header, data


def write_timeseries_csv(series, target):
    header, data = timeseries_rows(series)
    write_csv(target, header, data)


def read_timeseries_csv(source):
    from .propagate import TimeSeries

    _, header, rows = read_csv(source)
    labels = tuple(h[3:] for h in header if h.startswith("re_"))
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    col = {h: i for i, h in enumerate(header)}
    states = np.column_stack([data[:, col[f"re_{l}"]] + 1j * data[:, col[f"im_{l}"]] for l in labels])
    drift = float(np.max(np.abs(1.0 - np.sum(np.abs(states) ** 2, axis=1))))
    return TimeSeries(data[:, col["t"]], states, drift, labels)


def timeseries_json(series) -> dict:
    return {
        "schema": "stirap.timeseries", "version": 1,
        "labels": list(series.labels),
        "norm_drift": series.norm_drift,
        "t": [float(t) for t in series.times],
        "re": series.states.real.tolist(),
        "im": series.states.imag.tolist(),
    }


def timeseries_from_json(doc: dict):
    from .propagate import TimeSeries

    states = np.array(doc["re"]) + 1j * np.array(doc["im"])
    return TimeSeries(np.array(doc["t"]), states, doc["norm_drift"], tuple(doc["labels"]))


# --- split-operator observables ------------------------------------------------

TRACE_GROUPS = (("norm", "norms"), ("x", "mean_x"), ("p", "mean_p"), ("width", "width_x"))


def write_trace_csv(trace, target):
    header = ["t"] + [f"{g}_{c}" for g, _ in TRACE_GROUPS for c in (1, 2, 3)] + ["total_norm"]
    data = np.column_stack([trace.times] + [getattr(trace, a) for _, a in TRACE_GROUPS]
                           + [trace.total_norm])
    write_csv(target, header, data)


def read_trace_csv(source):
    from .splitop import ObservableTrace

    _, header, rows = read_csv(source)
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    col = {h: i for i, h in enumerate(header)}
    parts = {a: data[:, [col[f"{g}_{c}"] for c in (1, 2, 3)]] for g, a in TRACE_GROUPS}
    return ObservableTrace(data[:, col["t"]], parts["norms"], parts["mean_x"],
                           parts["mean_p"], parts["width_x"])


def trace_json(trace) -> dict:
    doc = {"schema": "stirap.trace", "version": 1, "t": trace.times.tolist()}
    for g, a in TRACE_GROUPS:
        doc[g] = [[_json_num(v) for v in row] for row in getattr(trace, a)]
    return doc


# --- wavepacket snapshots -----------------------------------------------------

def write_snapshot(wavepacket, target):
    g = wavepacket.grid
    body = np.empty((wavepacket.channels.shape[0], g.n, 2), dtype="<f8")
    body[..., 0] = wavepacket.channels.real
    body[..., 1] = wavepacket.channels.imag
    blob = SNAPSHOT_HEADER.pack(g.n, g.x_min, g.x_max, wavepacket.channels.shape[0]) + body.tobytes()
    if hasattr(target, "write"):
        target.write(blob)
    else:
        with open(target, "wb") as fh:
            fh.write(blob)


def read_snapshot(source):
    from .splitop import Grid1D, Wavepacket

    if hasattr(source, "read"):
        blob = source.read()
    else:
        with open(source, "rb") as fh:
            blob = fh.read()
    n, x_min, x_max, nch = SNAPSHOT_HEADER.unpack_from(blob)
    body = np.frombuffer(blob, dtype="<f8", offset=SNAPSHOT_HEADER.size)
    if body.size != nch * n * 2:
        raise InvalidParameter("snapshot body length does not match its header")
    body = body.reshape(nch, n, 2)
    return Wavepacket(Grid1D(x_min, x_max, n), body[..., 0] + 1j * body[..., 1], check=False)


def snapshot_json(wavepacket) -> dict:
    g = wavepacket.grid
    return {"schema": "stirap.snapshot", "version": 1, "n": g.n, "x_min": g.x_min,
            "x_max": g.x_max, "channels": wavepacket.channels.shape[0],
            "re": wavepacket.channels.real.tolist(), "im": wavepacket.channels.imag.tolist()}


def snapshot_from_json(doc: dict):
    from .splitop import Grid1D, Wavepacket

    return Wavepacket(Grid1D(doc["x_min"], doc["x_max"], doc["n"]),
                      np.array(doc["re"]) + 1j * np.array(doc["im"]), check=False)


# --- experiment tables --------------------------------------------------------

SWEEP_SCHEMA = ("stirap.sweep", 1)
SWEEP_HEADER = ["at", "pop3_analytic", "pop3_numeric", "abs_error"]


def write_sweep_csv(table, target):
    rows = [(r.at, r.analytic, r.numeric, r.abs_error) for r in table.rows]
    fh, owned = _open_text(target, "w")
    try:
        fh.write(f"# schema={SWEEP_SCHEMA[0]} version={SWEEP_SCHEMA[1]} scheme={table.scheme}\n")
        write_csv(fh, SWEEP_HEADER, rows)
    finally:
        if owned:
            fh.close()


def read_sweep_csv(source):
    from .experiments import SweepRow, SweepTable

    fh, owned = _open_text(source, "r")
    try:
        text = fh.read()
    finally:
        if owned:
            fh.close()
    first = text.splitlines()[0]
    fields = dict(p.split("=", 1) for p in first[1:].split() if "=" in p)
    if (fields.get("schema"), int(fields.get("version", 0))) != SWEEP_SCHEMA:
        raise InvalidParameter(f"not a {SWEEP_SCHEMA[0]} v{SWEEP_SCHEMA[1]} table")
    _, header, rows = read_csv(io.StringIO(text))
    return SweepTable(fields["scheme"], tuple(SweepRow(*map(float, r)) for r in rows))


def sweep_json(table) -> dict:
    return {"schema": SWEEP_SCHEMA[0], "version": SWEEP_SCHEMA[1], "scheme": table.scheme,
            "columns": SWEEP_HEADER,
            "rows": [[_json_num(v) for v in (r.at, r.analytic, r.numeric, r.abs_error)]
                     for r in table.rows]}


def sweep_from_json(doc: dict):
    from .experiments import SweepRow, SweepTable

    if (doc.get("schema"), doc.get("version")) != SWEEP_SCHEMA:
        raise InvalidParameter("not a sweep document")
    return SweepTable(doc["scheme"], tuple(SweepRow(*map(_num, r)) for r in doc["rows"]))


DOUBLE_SCHEMA = ("stirap.double-stirap", 1)
DOUBLE_HEADER = ["at", "delay", "re_b1", "im_b1", "re_b2", "im_b2", "re_b3", "im_b3",
                 "return_population", "b1_phase"]


def _double_row(r):
    f = r.final
    return (r.at, r.delay, f[0].real, f[0].imag, f[1].real, f[1].imag, f[2].real, f[2].imag,
            r.return_population, r.b1_phase)


def write_double_csv(reports, target):
    write_csv(target, DOUBLE_HEADER, [_double_row(r) for r in reports], schema=DOUBLE_SCHEMA)


def read_double_csv(source):
    from .experiments import DoubleStirapReport

    schema, header, rows = read_csv(source)
    if schema != DOUBLE_SCHEMA:
        raise InvalidParameter("not a double-STIRAP table")
    out = []
    for row in rows:
        v = [float(x) for x in row]
        final = np.array([v[2] + 1j * v[3], v[4] + 1j * v[5], v[6] + 1j * v[7]])
        out.append(DoubleStirapReport(v[0], v[1], final, v[8], v[9]))
    return out


def double_json(reports) -> dict:
    return {"schema": DOUBLE_SCHEMA[0], "version": DOUBLE_SCHEMA[1], "columns": DOUBLE_HEADER,
            "rows": [[_json_num(v) for v in _double_row(r)] for r in reports]}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"

"""Command-line front end.

Every subcommand validates its arguments before computing anything. With
``--out`` the artifact goes to that file and a short summary to stdout;
without it the artifact itself is printed. Failures print one JSON line on
stderr and exit with 1 (invalid input), 2 (numerical failure) or 3 (I/O).

``--config FILE`` reads ``key = value`` lines (``#`` starts a comment); keys
are the long option names with or without leading dashes, and ``command``
may name the subcommand. Multi-value options take space-separated values and
boolean switches take true/false. Flags given on the command line win over
file values.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import berry, experiments, serialize, splitop
from .errors import InvalidParameter, NumericalError, StirapError, ValidationError
from .propagate import (IntegratorConfig, LevelKind, LevelModel, default_initial,
                        default_window, integrate, map_adiabatic_series)
from .pulses import PulseParams, adiabatic_frame, eval_couplings, resolve_scheme

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidParameter(message)


def _floats(text, count=None, name="value"):
    try:
        vals = [float(v) for v in str(text).replace("x", ",").split(",") if v.strip()]
    except ValueError:
        raise InvalidParameter(f"cannot parse {name} {text!r}") from None
    if count is not None and len(vals) != count:
        raise InvalidParameter(f"{name} needs {count} comma-separated numbers, got {text!r}")
    return vals


def _triple(vals, name):
    if len(vals) not in (1, 3):
        raise InvalidParameter(f"{name} takes one value or three comma-separated values")
    return vals[0] if len(vals) == 1 else vals


def _params(args) -> PulseParams:
    if args.at is not None and args.A is not None:
        raise InvalidParameter("give either --at or --A, not both")
    if args.at is not None:
        if not args.at > 0:
            raise InvalidParameter(f"at must be > 0, got {args.at!r}")
        return PulseParams.from_at(args.at, args.T)
    if args.A is None:
        raise InvalidParameter("one of --at or --A is required")
    return PulseParams(args.A, args.T)


def _add_pulse_opts(p, scheme=True):
    if scheme:
        p.add_argument("--scheme", default="ci-sech", help="ci-sech, in-sech or exp-pair")
    p.add_argument("--at", type=float, help="dimensionless pulse area product A*T")
    p.add_argument("--A", type=float, help="coupling amplitude (alternative to --at)")
    p.add_argument("--T", type=float, default=1.0, help="pulse width")


def _add_output_opts(p):
    p.add_argument("--out", help="artifact path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stirap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("pulses", help="tabulate couplings and the adiabatic frame")
    _add_pulse_opts(p)
    p.add_argument("--t-min", type=float, default=-10.0)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=201)
    _add_output_opts(p)

    p = sub.add_parser("simulate", help="integrate a level model with RK4")
    p.add_argument("--model", default="three-level", choices=[k.value for k in LevelKind])
    _add_pulse_opts(p)
    p.add_argument("--dt", type=float, help="time step (default 1e-3 * T)")
    p.add_argument("--window", nargs=2, type=float, metavar=("T_MIN", "T_MAX"),
                   help="integration window (default depends on the scheme)")
    p.add_argument("--c10", type=float, default=1.0)
    p.add_argument("--c11", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--norm-tolerance", type=float, default=1e-9)
    p.add_argument("--map-to-three-level", action="store_true",
                   help="for two-level-adiabatic: output the mapped three-level amplitudes")
    _add_output_opts(p)

    p = sub.add_parser("sweep", help="final level-3 population over a range of AT")
    p.add_argument("--scheme", default="ci-sech")
    p.add_argument("--at-min", type=float, required=True)
    p.add_argument("--at-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--analytic-only", action="store_true")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt-factor", type=float, default=1e-3)
    _add_output_opts(p)

    p = sub.add_parser("berry", help="monopole flux or loop phase")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--flux", help="sphere:<radius>")
    g.add_argument("--loop", help="equator, latitude:<theta> or an x,y,z CSV file")
    p.add_argument("--mesh", default="100x200", help="n_theta x n_phi")
    p.add_argument("--points", type=int, default=2000, help="points on a named loop")
    p.add_argument("--radius", type=float, default=1.0, help="radius of a named loop")
    p.add_argument("--band", default="plus", choices=("plus", "minus"))
    p.add_argument("--reverse", action="store_true", help="traverse the loop backwards")
    _add_output_opts(p)

    p = sub.add_parser("wavepacket", help="split-operator propagation of a three-channel packet")
    p.add_argument("--grid", nargs=3, type=float, default=[-10.0, 10.0, 128],
                   metavar=("X_MIN", "X_MAX", "N"))
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--width", type=float, default=math.sqrt(0.5))
    p.add_argument("--mass", nargs="+", type=float, default=[1.0], help="one value or three")
    p.add_argument("--omega", nargs="+", type=float, default=[1.0], help="one value or three")
    p.add_argument("--center", nargs="+", type=float, default=[0.0],
                   help="potential minima, one value or three")
    p.add_argument("--scheme", default="ci-sech", help="pulse scheme, or 'none'")
    p.add_argument("--at", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--pulse-center", type=float, default=15.0)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=30.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--snapshot", help="write the final field (.json or little-endian binary)")
    _add_output_opts(p)

    p = sub.add_parser("verify", help="compare the integrator with the closed form")
    p.add_argument("--scheme", default="ci", help="ci, in or exp")
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt-factor", type=float, default=1e-3)
    _add_output_opts(p)

    p = sub.add_parser("double-stirap", help="counterintuitive then intuitive transfer")
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--delay", default="20", help="one delay or a comma list")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt-factor", type=float, default=1e-3)
    _add_output_opts(p)
    return ap


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameter(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-")] = value
    return out


def _parse(argv):
    ap = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if known.config is None:
        args = ap.parse_args(rest)
    else:
        settings = read_config(known.config)
        command = settings.pop("command", None)
        if not rest or rest[0].startswith("-"):
            if command is None:
                raise InvalidParameter("no subcommand on the command line or in the config file")
            rest = [command] + rest
        file_args = []
        for key, value in settings.items():
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "yes", "on"):
                file_args.append(flag)
            elif value.lower() in ("false", "no", "off"):
                continue
            else:
                # whitespace separates the values of multi-value options
                file_args += [flag] + value.split()
        # file values first so later command-line flags override them
        args = ap.parse_args([rest[0]] + file_args + rest[1:])
    if args.command is None:
        raise InvalidParameter("missing subcommand")
    return args


def _emit(args, csv_writer, json_doc, summary, out):
    if args.format == "json":
        text = serialize.dumps(json_doc())
    else:
        buf = io.StringIO()
        csv_writer(buf)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        out.write(summary + "\n")
    else:
        out.write(text)


def _g6(x):
    return format(float(x), ".6g")


def cmd_pulses(args, out):
    params = _params(args)
    scheme = resolve_scheme(args.scheme)
    if args.samples < 2 or not args.t_min < args.t_max:
        raise InvalidParameter("need --samples >= 2 and --t-min < --t-max")
    t = np.linspace(args.t_min, args.t_max, args.samples)
    l1, l2 = eval_couplings(scheme, params, t)
    fr = adiabatic_frame(scheme, params, t)
    header = ["t", "lambda1", "lambda2", "r2", "phi", "phi_dot"]
    data = np.column_stack([t, l1, l2, fr.r2, fr.phi, fr.phi_dot])
    _emit(args, lambda fh: serialize.write_csv(fh, header, data),
          lambda: {"schema": "stirap.pulses", "version": 1, "scheme": scheme.token,
                   "columns": header, "rows": data.tolist()},
          f"scheme={scheme.token} samples={args.samples}", out)


def cmd_simulate(args, out):
    params = _params(args)
    scheme = resolve_scheme(args.scheme)
    kind = LevelKind(args.model)
    model = LevelModel.of(kind, scheme, params, c10=args.c10, c11=args.c11)
    t0, t1 = args.window if args.window else default_window(scheme, params)
    dt = args.dt if args.dt is not None else 1e-3 * params.T
    cfg = IntegratorConfig(t0, t1, dt, norm_tolerance=args.norm_tolerance, stride=args.stride)
    series = integrate(model, default_initial(model, cfg), cfg)
    if args.map_to_three_level:
        if kind is not LevelKind.TWO_LEVEL_ADIABATIC:
            raise InvalidParameter("--map-to-three-level needs --model two-level-adiabatic")
        series = map_adiabatic_series(series, model.drive)
    pops = series.populations[-1]
    summary = " ".join(f"pop_{l}={_g6(p)}" for l, p in zip(series.labels, pops))
    _emit(args, lambda fh: serialize.write_timeseries_csv(series, fh),
          lambda: serialize.timeseries_json(series),
          f"{summary} norm_drift={series.norm_drift:.3g}", out)


def cmd_sweep(args, out):
    table = experiments.sweep(args.scheme, args.at_min, args.at_max, args.samples,
                              numeric=not args.analytic_only, T=args.T, dt_factor=args.dt_factor)
    worst = max((r.abs_error for r in table.rows), default=math.nan)
    _emit(args, lambda fh: serialize.write_sweep_csv(table, fh),
          lambda: serialize.sweep_json(table),
          f"rows={len(table.rows)} max_abs_error={_g6(worst)}", out)


def cmd_berry(args, out):
    mesh = tuple(int(v) for v in _floats(args.mesh, 2, "mesh"))
    if args.loop:
        path = berry.parse_path(args.loop, args.points, args.radius)
        if args.reverse:
            path = path.reversed()
        res = berry.loop_phase(path, args.band)
    else:
        res = berry.sphere_result(berry.parse_sphere(args.flux or "sphere:1"), mesh, args.band)
    header = ["band", "loop_phase", "solid_angle", "flux", "charge"]
    row = [res.band.value, res.loop_phase, res.solid_angle, res.flux, res.charge]
    _emit(args, lambda fh: serialize.write_csv(fh, header, [row]),
          lambda: {"schema": "stirap.berry", "version": 1, "band": res.band.value,
                   "loop_phase": serialize._json_num(res.loop_phase),
                   "solid_angle": res.solid_angle, "flux": serialize._json_num(res.flux),
                   "charge": serialize._json_num(res.charge)},
          f"flux={_g6(res.flux)} charge={_g6(res.charge)} loop_phase={_g6(res.loop_phase)} "
          f"solid_angle={_g6(res.solid_angle)}", out)


def cmd_wavepacket(args, out):
    lo, hi, n = args.grid
    if n != int(n):
        raise InvalidParameter("grid point count must be an integer")
    grid = splitop.Grid1D(lo, hi, int(n))
    pots = splitop.ChannelPotentials.harmonic(grid, _triple(args.mass, "mass"),
                                              _triple(args.omega, "omega"),
                                              _triple(args.center, "center"))
    if args.scheme.lower() == "none":
        cfg = splitop.SplitOpConfig(args.dt, args.hbar)
    else:
        cfg = splitop.SplitOpConfig(args.dt, args.hbar, resolve_scheme(args.scheme), _params(args),
                                    args.pulse_center)
    if not args.t1 > args.t0:
        raise InvalidParameter("--t1 must be greater than --t0")
    wp = splitop.make_gaussian(grid, args.x0, args.p0, args.width, args.hbar)
    final, trace = splitop.evolve(wp, args.t0, args.t1, cfg, pots, stride=args.stride)
    if args.snapshot:
        if args.snapshot.endswith(".json"):
            with open(args.snapshot, "w") as fh:
                fh.write(serialize.dumps(serialize.snapshot_json(final)))
        else:
            serialize.write_snapshot(final, args.snapshot)
    norms = trace.norms[-1]
    _emit(args, lambda fh: serialize.write_trace_csv(trace, fh),
          lambda: serialize.trace_json(trace),
          " ".join(f"norm_{c + 1}={_g6(v)}" for c, v in enumerate(norms)), out)


def cmd_verify(args, out):
    rep = experiments.verify_analytic(args.scheme, args.at, args.tol, args.T, args.dt_factor)
    header = ["scheme", "at", "max_error", "tol", "passed", "re_b3_end", "re_b3_expected"]
    row = [rep.scheme, rep.at, rep.max_error, rep.tol, str(rep.passed).lower(),
           rep.endpoint.real, rep.expected_endpoint.real]
    _emit(args, lambda fh: serialize.write_csv(fh, header, [row]),
          lambda: {"schema": "stirap.verify", "version": 1, "scheme": rep.scheme, "at": rep.at,
                   "max_error": rep.max_error, "tol": rep.tol, "passed": rep.passed,
                   "b3_end": [rep.endpoint.real, rep.endpoint.imag],
                   "b3_expected": [rep.expected_endpoint.real, rep.expected_endpoint.imag]},
          f"{'PASS' if rep.passed else 'FAIL'} max_error={_g6(rep.max_error)}", out)
    return EXIT_OK if rep.passed else EXIT_NUMERIC


def cmd_double(args, out):
    delays = _floats(args.delay, name="delay")
    reps = experiments.phase_vs_delay(args.at, delays, T=args.T, dt_factor=args.dt_factor)
    _emit(args, lambda fh: serialize.write_double_csv(reps, fh),
          lambda: serialize.double_json(reps),
          " ".join(f"delay={_g6(r.delay)}:pop1={_g6(r.return_population)},phase={_g6(r.b1_phase)}"
                   for r in reps), out)


COMMANDS = {"pulses": cmd_pulses, "simulate": cmd_simulate, "sweep": cmd_sweep,
            "berry": cmd_berry, "wavepacket": cmd_wavepacket, "verify": cmd_verify,
            "double-stirap": cmd_double}


def _fail(kind, code, message, err):
    err.write(json.dumps({"error": kind, "code": code, "message": message}) + "\n")
    return code


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv in ([], ["-h"], ["--help"]):
        build_parser().print_help(out)
        return EXIT_OK
    try:
        args = _parse(argv)
        code = COMMANDS[args.command](args, out)
        return EXIT_OK if code is None else code
    except ValidationError as exc:
        return _fail(type(exc).__name__, EXIT_INVALID, str(exc), err)
    except NumericalError as exc:
        return _fail(type(exc).__name__, EXIT_NUMERIC, str(exc), err)
    except StirapError as exc:
        return _fail(type(exc).__name__, EXIT_INVALID, str(exc), err)
    except OSError as exc:
        return _fail(type(exc).__name__, EXIT_IO, str(exc), err)
    except SystemExit as exc:  # argparse --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

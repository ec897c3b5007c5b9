"""Command-line entry point: ``kerrwg {amplitudes,position,oracle,selftest}``.

Frequencies are in units of gamma and positions in units of 1/gamma.  Grids
use ``min:max:count``.  A flat JSON file passed with ``--config`` supplies
values for any long option (keys use the option name with dashes turned into
underscores); explicit command-line options win over the file.

Exit codes: 0 success, 1 usage or configuration error, 2 tolerance or
diagnostic failure.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import (
    DetuningGrid,
    KerrWGError,
    ParameterError,
    StepSizeError,
    TransientError,
    TwoPhotonPacket,
    make_params,
    relative_l2,
    validate_grid,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

DEFAULTS = {
    "amplitudes": {"channel": "rr", "delta1": 0.0, "delta2": 0.0, "u": 10.0, "eps": 0.05,
                   "gamma": 1.0, "grid": "-3:3:401", "out": None, "format": "csv",
                   "figure": None},
    "position": {"channel": "rr", "delta1": 0.0, "delta2": 0.0, "u": 10.0, "eps": 0.0,
                 "gamma": 1.0, "x": "-12:12:961", "scan_e": None, "scan_u": None,
                 "out": None, "format": "csv", "figure": None},
    "oracle": {"delta1": 0.0, "delta2": 0.0, "u": 10.0, "eps": 0.1, "gamma": 1.0,
               "grid": "-20:20:801", "dt": 0.005, "t_max": 100.0, "window": 10.0,
               "subgrid": 3.0, "tol": 0.05, "out": None},
    "selftest": {"quick": False},
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved options of one command, with the values actually used."""

    command: str
    options: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(self.options, sort_keys=True)

    @classmethod
    def from_json(cls, command, text):
        return cls(command, json.loads(text))

    @property
    def params(self):
        return make_params(self.options["gamma"], self.options["u"])

    @property
    def packet(self):
        o = self.options
        return TwoPhotonPacket(o["delta1"], o["delta2"], o["eps"])


def threads():
    """Worker cap from KERRWG_THREADS (default: available cores)."""
    raw = os.environ.get("KERRWG_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"KERRWG_THREADS must be an integer, got {raw!r}")
    return os.cpu_count() or 1


def _float_grid(text):
    g = DetuningGrid.parse(text)
    return g.points


def _write_csv(path, columns, rows, meta):
    lines = ["# " + json.dumps(meta, sort_keys=True)]
    lines.append(",".join(columns))
    fmt = ",".join(["%.17g"] * len(columns))
    body = [fmt % tuple(r) for r in rows]
    text = "\n".join(lines + body) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _meta(cfg: RunConfig, argv, extra=None):
    meta = {"tool": "kerrwg", "version": __version__, "command": cfg.command,
            "argv": "kerrwg " + shlex.join(argv), "options": cfg.options}
    if extra:
        meta.update(extra)
    return meta


def _check_writable(path):
    if path is None:
        return
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(folder) or not os.access(folder, os.W_OK):
        raise UsageError(f"cannot write to {path}")


# commands

def cmd_amplitudes(cfg: RunConfig, argv):
    from .freq_amplitudes import CHANNELS, channel_amplitudes
    o = cfg.options
    if o["channel"] not in CHANNELS:
        raise UsageError(f"invalid channel {o['channel']!r}; choose from {', '.join(CHANNELS)}")
    _check_writable(o["out"])
    grid = DetuningGrid.parse(o["grid"])
    params, packet = cfg.params, cfg.packet
    ch = channel_amplitudes(grid, grid, packet, params)
    amp = ch.channel(o["channel"])
    inten = ch.intensity(o["channel"])
    sv = np.linalg.svd(inten, compute_uv=False)
    extra = {"rank1": bool(sv[1] <= 1e-10 * sv[0]),
             "grid_flags": validate_grid(grid, params, packet.epsilon).flags}
    if o["format"] == "json":
        _write_json(o["out"], {"meta": _meta(cfg, argv, extra), "delta": grid.points.tolist(),
                               "re": amp.real.tolist(), "im": amp.imag.tolist(),
                               "intensity": inten.tolist()})
    else:
        p = grid.points
        P, Q = np.meshgrid(p, p, indexing="ij")
        rows = np.column_stack([P.ravel(), Q.ravel(), amp.real.ravel(), amp.imag.ravel(),
                                inten.ravel()])
        _write_csv(o["out"], ["delta_p", "delta_q", "re", "im", "intensity"], rows,
                   _meta(cfg, argv, extra))
    if o["figure"]:
        from . import plotting
        plotting.amplitude_map(o["figure"], grid, inten,
                               f"|gamma C_{o['channel']}|^2, U={params.u:g}")
    return EXIT_OK


def cmd_position(cfg: RunConfig, argv):
    from .position_space import kerr_scan, relative_wavefunction, resonance_scan
    o = cfg.options
    if o["channel"] not in ("rr", "ll"):
        raise UsageError("position channel must be rr or ll")
    if o["scan_e"] and o["scan_u"]:
        raise UsageError("--scan-E and --scan-U are exclusive")
    _check_writable(o["out"])
    params, packet = cfg.params, cfg.packet
    x = _float_grid(o["x"])
    meta = _meta(cfg, argv)
    if o["scan_u"]:
        u_vals = _float_grid(o["scan_u"])
        n = threads()
        chunks = np.array_split(u_vals, n)
        with ThreadPoolExecutor(n) as pool:
            parts = list(pool.map(lambda uu: kerr_scan(uu, packet, params, o["channel"]), chunks))
        vals = np.concatenate(parts)
        _write_csv(o["out"], ["u_over_gamma", "intensity_at_0"],
                   np.column_stack([u_vals / params.gamma, vals]), meta)
        if o["figure"]:
            from . import plotting
            plotting.profile(o["figure"], u_vals, vals, r"$U/\gamma$", r"$|\phi(0)|^2$")
        return EXIT_OK
    if o["scan_e"]:
        if packet.delta_rel != 0:
            raise UsageError("--scan-E needs delta1 == delta2")
        e_vals = _float_grid(o["scan_e"])
        scan = resonance_scan(e_vals, packet, params, x)
        data = getattr(scan, o["channel"])
        E, X = np.meshgrid(e_vals, x, indexing="ij")
        meta["most_localized_E"] = scan.most_localized(o["channel"])
        _write_csv(o["out"], ["e_over_gamma", "gamma_x", "intensity"],
                   np.column_stack([E.ravel(), X.ravel(), data.ravel()]), meta)
        if o["figure"]:
            from . import plotting
            plotting.scan_map(o["figure"], e_vals, x, data, f"|phi_{o['channel']}|^2")
        return EXIT_OK
    wf = relative_wavefunction(o["channel"], x, packet, params)
    rows = np.column_stack([x * params.gamma, wf.intensity, wf.samples.real, wf.samples.imag])
    _write_csv(o["out"], ["gamma_x", "intensity", "re", "im"], rows, meta)
    if o["figure"]:
        from . import plotting
        plotting.profile(o["figure"], x, wf.intensity, r"$\gamma x$", r"$|\phi(x)|^2$")
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, argv):
    from .freq_amplitudes import channel_amplitudes
    from .ode_oracle import OracleConfig, extract_longtime, integrate_two, subgrid_mask
    o = cfg.options
    _check_writable(o["out"])
    grid = DetuningGrid.parse(o["grid"])
    params, packet = cfg.params, cfg.packet
    ocfg = OracleConfig(grid, o["dt"], o["t_max"], window=o["window"])
    report = {"relative_l2": None, "norm_drift": None, "stationarity_std": None,
              "grid": {"range": str(grid), **validate_grid(grid, params, packet.epsilon).to_dict(),
                       "oracle_issues": ocfg.issues(params, packet.epsilon)},
              "params": {**params.to_dict(), **packet.to_dict(), **ocfg.to_dict(),
                         "tol": o["tol"], "subgrid": o["subgrid"]},
              "timings": {}}
    tic = time.perf_counter()
    status = EXIT_OK
    try:
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            run = integrate_two(packet, ocfg, params)
        report["norm_drift"] = run.norm_drift
        report["timings"]["integrate_s"] = run.timings["integrate_s"]
        lt = extract_longtime(run, tol=np.inf)
        report["stationarity_std"] = lt.stationarity_std
        target = channel_amplitudes(grid, grid, packet, params).even_output()
        mask = subgrid_mask(grid, o["subgrid"])
        rel = relative_l2(lt.c[mask], target[mask])
        report["relative_l2"] = rel
        if not rel <= o["tol"]:
            report["diagnostic"] = f"relative L2 {rel:.3g} above tolerance {o['tol']:g}"
            status = EXIT_FAIL
        elif lt.stationarity_std > 1e-2:
            report["diagnostic"] = f"non-stationary window ({lt.stationarity_std:.3g})"
            status = EXIT_FAIL
    except (StepSizeError, TransientError) as exc:
        report["diagnostic"] = f"{type(exc).__name__}: {exc}"
        if isinstance(exc, StepSizeError) and exc.suggested_dt:
            report["suggested_dt"] = exc.suggested_dt
        status = EXIT_FAIL
    report["timings"]["total_s"] = time.perf_counter() - tic
    report["meta"] = _meta(cfg, argv)
    _write_json(o["out"], report)
    if status != EXIT_OK:
        print(f"kerrwg oracle: {report['diagnostic']}", file=sys.stderr)
    return status


def cmd_selftest(cfg: RunConfig, argv):
    from .selftest import format_table, run_suite
    rows = run_suite(quick=cfg.options["quick"])
    print(format_table(rows))
    return EXIT_OK if all(r[1] for r in rows) else EXIT_FAIL


COMMANDS = {"amplitudes": cmd_amplitudes, "position": cmd_position,
            "oracle": cmd_oracle, "selftest": cmd_selftest}


def build_parser():
    ap = argparse.ArgumentParser(prog="kerrwg", description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"kerrwg {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_channel=True):
        p.add_argument("--config", help="flat JSON file of option values")
        if with_channel:
            p.add_argument("--channel")
        p.add_argument("--delta1", type=float)
        p.add_argument("--delta2", type=float)
        p.add_argument("--u", type=float, help="Kerr strength U/gamma")
        p.add_argument("--eps", type=float, help="packet width epsilon/gamma")
        p.add_argument("--gamma", type=float)
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("amplitudes", help="two-photon output amplitudes on a detuning grid")
    common(p)
    p.add_argument("--grid", help="detuning grid min:max:count")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--figure", help="also render a PNG map here")

    p = sub.add_parser("position", help="relative wavefunctions and scans")
    common(p)
    p.add_argument("--x", help="relative-coordinate grid min:max:count")
    p.add_argument("--scan-E", dest="scan_e", help="total detuning scan min:max:count")
    p.add_argument("--scan-U", dest="scan_u", help="Kerr strength scan min:max:count")
    p.add_argument("--format", choices=["csv"])
    p.add_argument("--figure", help="also render a PNG here")

    p = sub.add_parser("oracle", help="integrate the two-photon equations and compare")
    common(p, with_channel=False)
    p.add_argument("--grid")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--window", type=float)
    p.add_argument("--subgrid", type=float, help="compare on |Delta| <= this")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--config")
    p.add_argument("--quick", action="store_true", default=None,
                   help="analytic checks only")
    return ap


def resolve(args) -> RunConfig:
    """Merge defaults, the JSON config file and explicit options."""
    command = args.command
    opts = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                fileopts = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        unknown = set(fileopts) - set(opts)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(fileopts)
    for key in opts:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return RunConfig(command, opts)


_RANGE_OPTIONS = ("--grid", "--x", "--scan-E", "--scan-U")


def _attach_ranges(argv):
    """Glue ``--grid -3:3:31`` into ``--grid=-3:3:31``.

    argparse would otherwise read a range with a negative start as an option.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and ":" in argv[i + 1]:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_ranges(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = resolve(args)
        return COMMANDS[cfg.command](cfg, argv)
    except (UsageError, ParameterError, ValueError) as exc:
        print(f"kerrwg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KerrWGError as exc:
        print(f"kerrwg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Invariant suite behind ``kerrwg selftest``.

Each check returns (passed, detail).  The quick suite is analytic only; the
full suite adds the integral-equation quadrature and both oracles.
"""

from __future__ import annotations

import time
import warnings

import numpy as np

from .core import DetuningGrid, PhotonPacket, TwoPhotonPacket, make_params, relative_l2
from .freq_amplitudes import (
    channel_amplitudes,
    correlation_term,
    initial_two_photon,
    output_norm,
    single_coeffs,
)
from .laplace_chain import c_tilde_residue, integral_equation_residual
from .position_space import envelope, phi_ll, phi_rr

__all__ = ["run_suite", "format_table"]


def _unitarity_single():
    d = np.random.default_rng(1).uniform(-100, 100, 2000)
    sc = single_coeffs(d, make_params(1.0, 0.0))
    e1 = np.max(np.abs(np.abs(sc.t) ** 2 + np.abs(sc.r) ** 2 - 1))
    e2 = np.max(np.abs(np.abs(sc.t_bar) - 1))
    return max(e1, e2) < 1e-12, f"max dev {max(e1, e2):.2e}"


def _t_plus_r():
    d = np.random.default_rng(2).uniform(-100, 100, 2000)
    sc = single_coeffs(d, make_params(1.0, 0.0))
    err = np.max(np.abs(sc.t + sc.r - sc.t_bar))
    return err < 1e-12, f"max dev {err:.2e}"


def _channel_sum():
    grid = DetuningGrid(-3, 3, 121)
    ch = channel_amplitudes(grid, grid, TwoPhotonPacket(0.3, -0.2, 0.05), make_params(1, 10))
    total = ch.c_rr + ch.c_ll + ch.c_rl + ch.c_lr
    err = np.max(np.abs(total - ch.even_output())) / np.max(np.abs(total))
    return err < 1e-12, f"max rel dev {err:.2e}"


def _b_symmetry():
    rng = np.random.default_rng(3)
    p, q = rng.uniform(-5, 5, (2, 500))
    pk, par = TwoPhotonPacket(0.7, -1.1, 0.05), make_params(1, 4)
    b1, b2 = correlation_term(p, q, pk, par), correlation_term(q, p, pk, par)
    err = np.max(np.abs(b1 - b2) / np.abs(b1))
    return err < 1e-12, f"max rel dev {err:.2e}"


def _evenness():
    x = np.linspace(0, 10, 201)
    worst = 0.0
    for pk in (TwoPhotonPacket(0.4, -0.3, 0.0), TwoPhotonPacket(5, 5, 0.05)):
        par = make_params(1, 10)
        for fn in (phi_rr, phi_ll):
            worst = max(worst, float(np.max(np.abs(fn(x, pk, par) - fn(-x, pk, par)))))
    return worst < 1e-12, f"max dev {worst:.2e}"


def _causality():
    pk, par = TwoPhotonPacket(0, 0, 0.05), make_params(1, 10)
    t = 7.0
    xc = np.linspace(t + 1e-9, t + 20, 50)
    tr = np.max(np.abs(envelope(xc, t, pk, par, "transmitted")))
    rf = np.max(np.abs(envelope(-xc, t, pk, par, "reflected")))
    edge = abs(envelope(t, t, pk, par, "transmitted"))
    ok = tr == 0 and rf == 0 and edge > 0
    return ok, f"outside |env| = {max(tr, rf):.1e}, at x_c = t {edge:.3g}"


def _output_norm():
    grid = DetuningGrid(-20, 20, 1601)
    worst = 0.0
    for u in (0.0, 10.0):
        for d in (0.0, u / 2):
            ch = channel_amplitudes(grid, grid, TwoPhotonPacket(d, d, 0.05), make_params(1, u))
            worst = max(worst, abs(output_norm(ch) - 1))
    return worst < 1e-3, f"max |norm - 1| {worst:.2e}"


def _residue_identity():
    rng = np.random.default_rng(4)
    pk, par = TwoPhotonPacket(0, 0, 0.05), make_params(1, 10)
    p, q = rng.uniform(-5, 5, (2, 100))
    sp, sq = single_coeffs(p, par), single_coeffs(q, par)
    target = sp.t_bar * sq.t_bar * initial_two_photon(p, q, pk) + correlation_term(p, q, pk, par)
    err = np.max(np.abs(c_tilde_residue(p, q, pk, par) - target) / np.abs(target))
    return err < 1e-8, f"max rel dev {err:.2e}"


def _integral_equation():
    pk, par = TwoPhotonPacket(0, 0, 0.05), make_params(1, 10)
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(3):
        s = 1.0 + 1j * rng.uniform(-3, 3)
        worst = max(worst, integral_equation_residual(s, rng.uniform(-3, 3), pk, par))
    return worst < 1e-4, f"max residual {worst:.2e}"


def _single_oracle():
    from .ode_oracle import OracleConfig, integrate_single
    grid = DetuningGrid(-40, 40, 1601)
    par = make_params(1, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        run = integrate_single(PhotonPacket(0, 0.1), OracleConfig(grid, 0.004, 100.0), par)
    err = relative_l2(run.phase_stripped(), single_coeffs(grid.points, par).t_bar * run.beta0)
    return err < 1e-2, f"rel L2 {err:.2e}"


def _two_oracle():
    from .ode_oracle import DEFAULT_ORACLE, extract_longtime, integrate_two, subgrid_mask
    par = make_params(1, 10)
    pk = TwoPhotonPacket(0, 0, 0.1)
    grid = DEFAULT_ORACLE.grid
    run = integrate_two(pk, DEFAULT_ORACLE, par)
    lt = extract_longtime(run)
    target = channel_amplitudes(grid, grid, pk, par).even_output()
    m = subgrid_mask(grid, 3.0)
    err = relative_l2(lt.c[m], target[m])
    return err < 5e-2, f"rel L2 {err:.2e}"


QUICK = [
    ("|t|^2+|r|^2=1, |t_bar|=1", _unitarity_single),
    ("t+r=t_bar", _t_plus_r),
    ("channel-sum identity", _channel_sum),
    ("B_pq symmetry", _b_symmetry),
    ("phi evenness", _evenness),
    ("theta causality", _causality),
    ("residue identity", _residue_identity),
]
FULL = [
    ("output norm", _output_norm),
    ("integral-equation residual", _integral_equation),
    ("single-photon oracle", _single_oracle),
    ("two-photon oracle", _two_oracle),
]


def run_suite(quick=True):
    """Run the checks; returns a list of (name, passed, detail, seconds)."""
    rows = []
    for name, fn in QUICK + ([] if quick else FULL):
        tic = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:   # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append((name, bool(ok), detail, time.perf_counter() - tic))
    return rows


def format_table(rows):
    width = max(len(r[0]) for r in rows)
    lines = [f"{'check':<{width}}  result  detail"]
    for name, ok, detail, sec in rows:
        lines.append(f"{name:<{width}}  {'PASS' if ok else 'FAIL':<6}  {detail} ({sec:.2f} s)")
    return "\n".join(lines)

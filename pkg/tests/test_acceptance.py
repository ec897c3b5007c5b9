"""Acceptance gate: one printed PASS/FAIL line per criterion, pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are written
straight to the terminal.  A criterion that fails here fails honestly; the
thresholds are not tuned to the measured values.
"""

import time
import warnings

import numpy as np
import pytest

from kerrwg.core import (
    DetuningGrid,
    PhotonPacket,
    TwoPhotonPacket,
    ValidityWarning,
    make_params,
    relative_l2,
)
from kerrwg.freq_amplitudes import (
    channel_amplitudes,
    correlation_term,
    initial_two_photon,
    marginal_widths,
    output_norm,
    single_coeffs,
)
from kerrwg.laplace_chain import c_tilde_residue, integral_equation_residual
from kerrwg.ode_oracle import (
    DEFAULT_ORACLE,
    OracleConfig,
    extract_longtime,
    fourier_check,
    integrate_single,
    subgrid_mask,
)
from kerrwg.position_space import (
    bound_state_term,
    correlation_field,
    envelope,
    kerr_scan,
    peak_spacing,
    phi_ll,
    phi_rr,
    resonance_scan,
)
from kerrwg.selftest import run_suite

KERR = make_params(1.0, 10.0)
LINEAR = make_params(1.0, 0.0)


@pytest.fixture
def verdict(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_c01_single_photon_oracle(verdict):
    grid = DetuningGrid(-40, 40, 1601)
    tic = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        run = integrate_single(PhotonPacket(0.0, 0.1), OracleConfig(grid, 0.004, 30.0), LINEAR)
    sec = time.perf_counter() - tic
    err = relative_l2(run.phase_stripped(), single_coeffs(grid.points, LINEAR).t_bar * run.beta0)
    verdict(1, err < 1e-2 and sec < 10,
            f"single-photon rel L2 {err:.3g} (< 1e-2) at t_max 30, {sec:.1f} s (< 10 s)")


@pytest.mark.slow
@pytest.mark.parametrize("u, tol", [(10.0, 5e-2), (0.0, 2e-2)])
def test_c02_two_photon_oracle(verdict, oracle_runs, u, tol):
    run = oracle_runs(u)
    grid = DEFAULT_ORACLE.grid
    lt = extract_longtime(run)
    pk = TwoPhotonPacket(0.0, 0.0, 0.1)
    target = channel_amplitudes(grid, grid, pk, make_params(1.0, u)).even_output()
    m = subgrid_mask(grid, 3.0)
    err = relative_l2(lt.c[m], target[m])
    sec = run.timings["integrate_s"]
    verdict(2, err < tol and sec < 600,
            f"two-photon U={u:g} rel L2 {err:.3g} (< {tol:g}), {sec:.0f} s (< 600 s), "
            f"drift {run.norm_drift:.1e}, stationarity {lt.stationarity_std:.1e}")


def test_c03_unitarity(verdict):
    grid = DetuningGrid(-20, 20, 1601)
    devs = []
    for d in (0.0, 5.0):
        ch = channel_amplitudes(grid, grid, TwoPhotonPacket(d, d, 0.05), KERR)
        devs.append(abs(output_norm(ch) - 1))
    verdict(3, max(devs) < 1e-3, f"|norm - 1| = {devs[0]:.2e}, {devs[1]:.2e} (< 1e-3)")


@pytest.mark.parametrize("channel, d", [("rr", 0.0), ("ll", 5.0)])
def test_c04_antidiagonal_concentration(verdict, channel, d):
    grid = DetuningGrid(-20, 20, 1601)
    eps = 0.05
    ch = channel_amplitudes(grid, grid, TwoPhotonPacket(d, d, eps), KERR)
    w_sum, w_dif = marginal_widths(ch.intensity(channel), grid)
    verdict(4, w_sum <= 3 * eps and w_dif >= 0.5,
            f"|gamma c_{channel}|^2 at delta={d:g}: sum width {w_sum / eps:.3f} eps (<= 3), "
            f"difference width {w_dif:.3f} gamma (>= 0.5)")


def test_c05_contact_values(verdict):
    u = np.array([0.0, 0.3, 1.0, 3.0, 10.0, 30.0])
    mono = TwoPhotonPacket(0.0, 0.0, 0.0)
    rr = np.array([abs(phi_rr(0.0, mono, make_params(1.0, x))) ** 2 for x in u])
    ll = np.array([abs(phi_ll(0.0, mono, make_params(1.0, x))) ** 2 for x in u])
    err = max(np.max(np.abs(rr - u**2 / (u**2 + 1))), np.max(np.abs(ll - 1 / (u**2 + 1))))
    fine = np.linspace(0, 100, 1001)
    srr = kerr_scan(fine, mono, LINEAR, "rr")
    sll = kerr_scan(fine, mono, LINEAR, "ll")
    mono_ok = np.all(np.diff(srr) > 0) and np.all(np.diff(sll) < 0)
    sat_ok = srr[-1] > 0.999 and sll[-1] < 1e-3
    verdict(5, err < 1e-10 and mono_ok and sat_ok,
            f"max deviation {err:.1e} (< 1e-10), monotone {mono_ok}, saturating {sat_ok}")


def test_c06_bound_state_slope(verdict):
    x = np.linspace(1e-3, 10, 1001)
    logb = np.log(np.abs(bound_state_term(x, TwoPhotonPacket(0.0, 0.0, 0.0), KERR)))
    (slope, icpt), = [np.polyfit(x, logb, 1)]
    resid = np.max(np.abs(logb - (slope * x + icpt)))
    verdict(6, abs(slope + 0.5) < 1e-8 and resid < 1e-8,
            f"slope {slope:.12f} gamma (target -0.5), max fit residual {resid:.1e} (< 1e-8)")


def test_c07_two_photon_resonance(verdict):
    e = np.linspace(0, 20, 81)
    scan = resonance_scan(e, TwoPhotonPacket(0.0, 0.0, 0.0), KERR)
    e_min = scan.most_localized("ll")
    loc_ok = abs(e_min - 10.0) <= e[1] - e[0]
    x = np.linspace(-12, 12, 4801)
    worst = 0.0
    for ev in (2.0, 4.0, 6.0, 14.0, 16.0, 18.0):
        y = np.abs(phi_ll(x, TwoPhotonPacket.from_total(ev, 0.0, 0.0), KERR)) ** 2
        k_meas = 2 * np.pi / peak_spacing(x, y)
        k_pred = abs(ev - 10.0) / 2
        worst = max(worst, abs(k_meas - k_pred) / k_pred)
    verdict(7, loc_ok and worst < 0.1,
            f"most localized at E = {e_min:g} (U = 10, step {e[1] - e[0]:g}); "
            f"fringe frequency vs |E-U|/2 worst rel dev {worst:.2f} (< 0.1)")


def test_c08_laplace_chain(verdict):
    tic = time.perf_counter()
    pk = TwoPhotonPacket(0.0, 0.0, 0.05)
    rng = np.random.default_rng(8)
    p, q = rng.uniform(-5, 5, (2, 100))
    sp, sq = single_coeffs(p, KERR), single_coeffs(q, KERR)
    target = sp.t_bar * sq.t_bar * initial_two_photon(p, q, pk) + correlation_term(p, q, pk, KERR)
    res_err = float(np.max(np.abs(c_tilde_residue(p, q, pk, KERR) - target) / np.abs(target)))
    matrix = [(s, k) for s in (0.5, 1.0 + 1j, 2.0 - 3j, 0.2 + 10j, 5.0) for k in (-2.0, 0.7)]
    ie = max(integral_equation_residual(s, k, pk, KERR) for s, k in matrix)
    sec = time.perf_counter() - tic
    verdict(8, res_err < 1e-8 and ie < 1e-4 and sec < 60,
            f"residue identity {res_err:.1e} (< 1e-8), integral equation {ie:.1e} (< 1e-4), "
            f"{sec:.1f} s (< 60 s)")


def test_c09_fourier_oracle(verdict):
    pk = TwoPhotonPacket(0.0, 0.0, 0.05)
    grid = DetuningGrid(-40, 40, 1601)
    ch = channel_amplitudes(grid, grid, pk, KERR)
    x = np.linspace(-10, 10, 81)
    t, xc = 30.0, 10.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        corr = fourier_check(ch, t, x, xc, part="correlation")
        ref_c = 2 * correlation_field(xc + x / 2, xc - x / 2, t, pk, KERR)
        full = fourier_check(ch, t, x, xc)
        ref_f = envelope(xc, t, pk, KERR) * phi_rr(x, pk, KERR)
    e1 = float(np.max(np.abs(corr - ref_c)) / np.max(np.abs(ref_c)))
    e2 = float(np.max(np.abs(full - ref_f)) / np.max(np.abs(ref_f)))
    verdict(9, e1 < 1e-2 and e2 < 1e-2,
            f"correlation part {e1:.2e}, full c_rr {e2:.2e} relative L-inf (< 1e-2)")


def test_c10_quick_selftest(verdict):
    tic = time.perf_counter()
    rows = run_suite(quick=True)
    sec = time.perf_counter() - tic
    failed = [r[0] for r in rows if not r[1]]
    verdict(10, not failed and sec < 5,
            f"{len(rows) - len(failed)}/{len(rows)} checks pass, {sec:.2f} s (< 5 s)")

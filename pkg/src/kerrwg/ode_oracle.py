"""Brute-force checks of the closed forms.

Direct RK4 integration of the amplitude equations on a uniform mode grid,
long-time extraction of the outgoing amplitude, and a 2-D quadrature Fourier
transform of frequency-domain amplitudes into position space.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (
    DetuningGrid,
    PhotonPacket,
    ResolutionError,
    StepSizeError,
    SystemParams,
    TransientError,
    TwoPhotonPacket,
    ValidityWarning,
)
from .freq_amplitudes import (
    ChannelAmplitudes,
    channel_amplitudes,
    initial_two_photon,
    lorentzian_amplitude,
)
from .position_space import M_NORM

__all__ = [
    "OracleConfig",
    "DEFAULT_ORACLE",
    "TwoExcitationState",
    "SingleRun",
    "TwoPhotonRun",
    "LongTimeAmplitude",
    "integrate_single",
    "integrate_two",
    "extract_longtime",
    "fourier_check",
    "fourier_transform_slice",
    "subgrid_mask",
]

RK4_STABILITY = 2.5  # |lambda dt| below the RK4 imaginary-axis limit 2.83
DRIFT_LIMIT = 1e-5


@dataclass(frozen=True)
class OracleConfig:
    """Time-stepping set-up.

    ``window`` is the length of the final stretch of the run over which the
    phase-stripped amplitude is averaged; ``n_snapshots`` samples it.
    """

    grid: DetuningGrid
    dt: float
    t_max: float
    integrator_order: int = 4
    window: float = 10.0
    n_snapshots: int = 11

    def __post_init__(self):
        if self.integrator_order != 4:
            raise ValueError("only the classical 4th-order scheme is implemented")
        if not (self.dt > 0 and self.t_max > 0):
            raise ValueError("dt and t_max must be positive")

    @property
    def max_detuning(self):
        return max(abs(self.grid.d_min), abs(self.grid.d_max))

    def issues(self, params: SystemParams, epsilon=None):
        """Soft invariant violations (resolution of rotation and decay)."""
        out = []
        if self.dt > 0.2 / self.max_detuning:
            out.append(f"dt {self.dt:g} > 0.2/max|Delta| = {0.2 / self.max_detuning:.3g}")
        if self.t_max < 20 / params.gamma:
            out.append(f"t_max {self.t_max:g} < 20/gamma")
        if epsilon and self.t_max < 10 / epsilon:
            out.append(f"t_max {self.t_max:g} < 10/epsilon = {10 / epsilon:g}")
        revival = 2 * math.pi / self.grid.spacing
        if self.t_max >= revival:
            out.append(f"t_max {self.t_max:g} >= mode-grid revival time {revival:.4g}")
        return out

    def to_dict(self):
        return {"grid": str(self.grid), "dt": self.dt, "t_max": self.t_max,
                "integrator_order": self.integrator_order, "window": self.window,
                "n_snapshots": self.n_snapshots}


# +-20 gamma at spacing eps/2 for eps = 0.1; t_max covers 10/eps and stays
# below the grid revival time 2 pi/spacing ~ 126
DEFAULT_ORACLE = OracleConfig(DetuningGrid(-20.0, 20.0, 801), dt=0.005, t_max=100.0)


def _check_step(cfg, max_rate):
    if cfg.dt * max_rate > RK4_STABILITY:
        raise StepSizeError(
            f"dt = {cfg.dt:g} with fastest rotation {max_rate:g} gives |lambda dt| = "
            f"{cfg.dt * max_rate:.3g}, outside RK4 stability",
            suggested_dt=0.2 / max_rate)


def _warn_issues(cfg, params, eps):
    for msg in cfg.issues(params, eps):
        warnings.warn(msg, ValidityWarning, stacklevel=3)


@dataclass
class SingleRun:
    alpha: complex
    beta: np.ndarray
    t: float
    grid: DetuningGrid
    norm_drift: float
    beta0: np.ndarray

    def phase_stripped(self):
        return self.beta * np.exp(1j * self.grid.points * self.t)


def _steps(span, dt):
    n = int(round(span / dt))
    if abs(n * dt - span) > 1e-9 * max(1.0, span):
        raise ValueError(f"time span {span:g} is not a multiple of dt {dt:g}")
    return n


def integrate_single(packet: PhotonPacket, cfg: OracleConfig, params: SystemParams,
                     coupling=None, t_end=None):
    """Integrate the one-excitation equations from a Lorentzian packet.

    Parameters
    ----------
    coupling : float, optional
        override of the even-mode coupling g (0 gives free evolution).
    t_end : float, optional
        stop time; defaults to ``cfg.t_max``.

    Raises
    ------
    StepSizeError
        when the step is outside RK4 stability or the norm drifts by more
        than 1e-5.
    """
    grid = cfg.grid
    d = grid.points
    g = params.g if coupling is None else float(coupling)
    t_end = cfg.t_max if t_end is None else float(t_end)
    _check_step(cfg, cfg.max_detuning)
    _warn_issues(cfg, params, packet.epsilon)
    w = grid.spacing
    beta0 = lorentzian_amplitude(d, packet).astype(np.complex128)
    beta = beta0.copy()
    alpha = np.zeros(1, np.complex128)
    n0 = w * np.sum(np.abs(beta) ** 2)
    _kernels.rk4_single(alpha, beta, d.astype(float), g, w, cfg.dt, _steps(t_end, cfg.dt))
    n1 = abs(alpha[0]) ** 2 + w * np.sum(np.abs(beta) ** 2)
    drift = abs(n1 - n0) / n0
    if drift > DRIFT_LIMIT or not np.isfinite(drift):
        raise StepSizeError(f"norm drift {drift:.3g} exceeds {DRIFT_LIMIT:g}",
                            suggested_dt=cfg.dt / 2)
    return SingleRun(complex(alpha[0]), beta, t_end, grid, float(drift), beta0)


@dataclass
class TwoExcitationState:
    a: complex
    b: np.ndarray
    c: np.ndarray
    t: float
    grid: DetuningGrid

    def norm(self):
        """|A|^2 + w sum|B|^2 + (1/2) w^2 sum|C|^2 (ordered pairs)."""
        w = self.grid.spacing
        return (abs(self.a) ** 2 + w * np.sum(np.abs(self.b) ** 2)
                + 0.5 * w * w * np.sum(np.abs(self.c) ** 2))

    def asymmetry(self):
        return float(np.max(np.abs(self.c - self.c.T)))


@dataclass
class TwoPhotonRun:
    state: TwoExcitationState
    snapshot_times: np.ndarray
    snapshots: np.ndarray        # phase-stripped C at snapshot_times
    norm_drift: float
    max_asymmetry: float
    c0: np.ndarray
    timings: dict = field(default_factory=dict)


def integrate_two(packet: TwoPhotonPacket, cfg: OracleConfig, params: SystemParams):
    """Integrate the two-excitation equations from C(0) = symmetrized packet.

    Phase-stripped snapshots C_pq(t) exp(i(Dp + Dq) t) are recorded on the
    final ``cfg.window`` of the run.
    """
    grid = cfg.grid
    d = grid.points.astype(float)
    _check_step(cfg, 2 * cfg.max_detuning)
    _warn_issues(cfg, params, packet.epsilon)
    w = grid.spacing
    c = np.ascontiguousarray(initial_two_photon(d[:, None], d[None, :], packet),
                             dtype=np.complex128)
    c0 = c.copy()
    b = np.zeros(grid.n, np.complex128)
    a = np.zeros(1, np.complex128)
    state = TwoExcitationState(0j, b, c, 0.0, grid)
    n0 = state.norm()

    total = _steps(cfg.t_max, cfg.dt)
    m = cfg.n_snapshots
    win = min(cfg.window, cfg.t_max)
    marks = [int(round((cfg.t_max - win + j * win / (m - 1)) / cfg.dt)) for j in range(m)]
    snap_marks = sorted(set(min(max(x, 0), total) for x in marks))
    # norm checkpoints let an unstable or over-damped run stop early
    checks = set(range(max(1, total // 20), total, max(1, total // 20))) | {total}
    snaps = np.empty((len(snap_marks), grid.n, grid.n), np.complex128)
    times = np.empty(len(snap_marks))

    tic = time.perf_counter()
    done = 0
    asym = 0.0
    j = 0
    for mark in sorted(set(snap_marks) | checks):
        if mark > done:
            _kernels.rk4_two_fused(a, b, c, d, params.u, params.g, w, cfg.dt, mark - done)
            done = mark
        if mark in checks:
            now = TwoExcitationState(complex(a[0]), b, c, done * cfg.dt, grid)
            drift = abs(now.norm() - n0) / n0
            if drift > DRIFT_LIMIT or not np.isfinite(drift):
                raise StepSizeError(
                    f"norm drift {drift:.3g} exceeds {DRIFT_LIMIT:g} at t = {done * cfg.dt:g}",
                    suggested_dt=min(cfg.dt / 2, 0.2 / (2 * cfg.max_detuning)))
        if j < len(snap_marks) and mark == snap_marks[j]:
            t_now = done * cfg.dt
            ph = np.exp(1j * d * t_now)
            snaps[j] = c * ph[:, None] * ph[None, :]
            times[j] = t_now
            asym = max(asym, float(np.max(np.abs(c - c.T))))
            j += 1
    elapsed = time.perf_counter() - tic

    state = TwoExcitationState(complex(a[0]), b, c, total * cfg.dt, grid)
    drift = abs(state.norm() - n0) / n0
    if drift > DRIFT_LIMIT or not np.isfinite(drift):
        raise StepSizeError(f"norm drift {drift:.3g} exceeds {DRIFT_LIMIT:g}",
                            suggested_dt=cfg.dt / 2)
    asym = max(asym, state.asymmetry())
    return TwoPhotonRun(state, times, snaps, float(drift), asym, c0,
                        {"integrate_s": elapsed})


@dataclass
class LongTimeAmplitude:
    c: np.ndarray
    stationarity_std: float
    window: tuple


def extract_longtime(run: TwoPhotonRun, window=None, threshold=1e-6, tol=1e-2):
    """Time-average of the phase-stripped amplitude over a snapshot window.

    ``stationarity_std`` is the RMS standard deviation across the window
    divided by the RMS mean, over entries whose mean modulus exceeds
    ``threshold`` times the maximum.

    Raises
    ------
    TransientError
        if the window is shorter than 5/gamma or ``stationarity_std > tol``.
    """
    times = run.snapshot_times
    sel = np.ones(times.size, bool) if window is None else \
        (times >= window[0] - 1e-9) & (times <= window[1] + 1e-9)
    if sel.sum() < 2 or times[sel][-1] - times[sel][0] < 5.0 - 1e-9:
        raise TransientError("extraction window must hold snapshots spanning >= 5/gamma")
    stack = run.snapshots[sel]
    mean = stack.mean(axis=0)
    mag = np.abs(mean)
    keep = mag > threshold * mag.max()
    var = np.mean(np.abs(stack[:, keep] - mean[keep]) ** 2, axis=0)
    stat = float(math.sqrt(var.sum() / np.sum(mag[keep] ** 2)))
    win = (float(times[sel][0]), float(times[sel][-1]))
    if stat > tol:
        raise TransientError(f"phase-stripped amplitude not stationary: {stat:.3g} > {tol:g}")
    return LongTimeAmplitude(mean, stat, win)


def subgrid_mask(grid: DetuningGrid, bound=3.0):
    """Boolean mask of grid points with |Delta| <= bound (2-D via outer and)."""
    m = np.abs(grid.points) <= bound + 1e-12
    return m[:, None] & m[None, :]


def fourier_transform_slice(c, grid_p: DetuningGrid, grid_q: DetuningGrid, t_obs, x1, x2,
                            m=M_NORM, symmetrize=True):
    """m * sum_pq w_p w_q c_pq exp(-i(p+q)t) [exp(i p x1 + i q x2) + (x1 <-> x2)].

    Evaluated at paired points (x1[i], x2[i]) by trapezoid quadrature.
    """
    p = grid_p.points
    q = grid_q.points
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)

    def one(xa, xb):
        ep = np.exp(1j * np.outer(p, xa - t_obs)) * grid_p.weights[:, None]
        eq = np.exp(1j * np.outer(q, xb - t_obs)) * grid_q.weights[:, None]
        return np.einsum("px,px->x", ep, c @ eq)

    out = one(x1, x2)
    if symmetrize:
        out = out + one(x2, x1)
    return m * out


def fourier_check(ch: ChannelAmplitudes, t_obs, x, x_c, part="full", channel="rr",
                  check_aliasing=True, tol=1e-2):
    """Position-space field of a channel amplitude along a fixed-x_c slice.

    ``part`` selects the whole amplitude ("full") or its correlation part
    B/4 ("correlation").  The slice is x1 = x_c + x/2, x2 = x_c - x/2.  With
    ``check_aliasing`` the transform is repeated on a grid of twice the span
    at the same spacing.

    Raises
    ------
    ResolutionError
        if the doubled-span result differs by more than ``tol`` relative L-inf.
    """
    x = np.asarray(x, dtype=float)
    x1 = x_c + 0.5 * x
    x2 = x_c - 0.5 * x

    def amp(c):
        return c.b / 4 if part == "correlation" else c.channel(channel)

    field_ = fourier_transform_slice(amp(ch), ch.grid_p, ch.grid_q, t_obs, x1, x2)
    if check_aliasing:
        gp, gq = ch.grid_p.with_span_doubled(), ch.grid_q.with_span_doubled()
        wide = channel_amplitudes(gp, gq, ch.packet, ch.params)
        f2 = fourier_transform_slice(amp(wide), gp, gq, t_obs, x1, x2)
        change = float(np.max(np.abs(f2 - field_)) / np.max(np.abs(f2)))
        if change > tol:
            raise ResolutionError(f"quadrature transform changes by {change:.3g} when the "
                                  "detuning span doubles", diagnostics={"change": change})
    return field_

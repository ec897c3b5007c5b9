"""Parameter model, packets and detuning grids shared by every other module.

Units: gamma is the frequency unit (and inverse time unit), the group
velocity is 1, so positions are measured in 1/gamma.  All frequencies are
detunings from the cavity resonance; ``omega_c`` is kept for bookkeeping
only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KerrWGError",
    "ParameterError",
    "MonochromaticLimitError",
    "ResolutionError",
    "PoleError",
    "QuadratureError",
    "StepSizeError",
    "TransientError",
    "ValidityWarning",
    "SystemParams",
    "PhotonPacket",
    "TwoPhotonPacket",
    "DetuningGrid",
    "GridDiagnostics",
    "make_params",
    "validate_grid",
    "trapezoid_weights",
    "relative_l2",
]


class KerrWGError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(KerrWGError, ValueError):
    pass


class MonochromaticLimitError(KerrWGError, ValueError):
    """Raised when a finite-width formula is asked for epsilon = 0."""


class ResolutionError(KerrWGError):
    """Grid too coarse or too narrow for the requested quantity."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class PoleError(KerrWGError, ValueError):
    pass


class QuadratureError(KerrWGError):
    pass


class StepSizeError(KerrWGError):
    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class TransientError(KerrWGError):
    pass


class ValidityWarning(UserWarning):
    """A closed form is used outside the regime where it was derived."""


@dataclass(frozen=True)
class SystemParams:
    """Cavity/waveguide constants.

    ``u`` is the Kerr shift in the same frequency unit as ``gamma``; with the
    default ``gamma = 1`` it reads directly as U/gamma.
    """

    gamma: float = 1.0
    u: float = 0.0
    g: float = field(default=None)
    j: float = field(default=None)
    omega_c: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ParameterError(f"gamma must be positive and finite, got {self.gamma!r}")
        if not math.isfinite(self.u):
            raise ParameterError(f"u must be finite, got {self.u!r}")
        g = math.sqrt(self.gamma / (2 * math.pi))
        if self.g is None:
            object.__setattr__(self, "g", g)
        elif not math.isclose(self.g, g, rel_tol=1e-12):
            raise ParameterError("g must satisfy gamma = 2 pi g^2")
        if self.j is None:
            object.__setattr__(self, "j", self.g / math.sqrt(2))
        elif not math.isclose(self.j * math.sqrt(2), self.g, rel_tol=1e-12):
            raise ParameterError("j must satisfy g = sqrt(2) j")

    def to_dict(self):
        return {"gamma": self.gamma, "u": self.u, "g": self.g, "j": self.j,
                "omega_c": self.omega_c}


def make_params(gamma=1.0, u=0.0, omega_c=0.0):
    """Build a :class:`SystemParams` from the decay rate and Kerr shift."""
    return SystemParams(gamma=float(gamma), u=float(u), omega_c=float(omega_c))


@dataclass(frozen=True)
class PhotonPacket:
    """Lorentzian single-photon packet G1 / (Delta - delta + i epsilon)."""

    delta: float = 0.0
    epsilon: float = 0.1

    def __post_init__(self):
        if self.epsilon < 0:
            raise ParameterError("epsilon must be non-negative")

    @property
    def g1(self):
        return math.sqrt(self.epsilon / math.pi)

    def to_dict(self):
        return {"delta": self.delta, "epsilon": self.epsilon}


@dataclass(frozen=True)
class TwoPhotonPacket:
    """Symmetrized product of two Lorentzians sharing one width."""

    delta1: float = 0.0
    delta2: float = 0.0
    epsilon: float = 0.05

    def __post_init__(self):
        if self.epsilon < 0:
            raise ParameterError("epsilon must be non-negative")

    @property
    def g2(self):
        eps = self.epsilon
        if eps == 0:
            return 0.0
        overlap = 4 * eps**2 / ((self.delta1 - self.delta2) ** 2 + 4 * eps**2)
        return eps / (math.sqrt(2) * math.pi) / math.sqrt(1 + overlap)

    @property
    def e_total(self):
        return self.delta1 + self.delta2

    @property
    def delta_rel(self):
        return (self.delta1 - self.delta2) / 2

    @classmethod
    def from_total(cls, e_total, delta_rel=0.0, epsilon=0.05):
        return cls(e_total / 2 + delta_rel, e_total / 2 - delta_rel, epsilon)

    def to_dict(self):
        return {"delta1": self.delta1, "delta2": self.delta2, "epsilon": self.epsilon}


@dataclass(frozen=True)
class DetuningGrid:
    """Uniform grid on the detuning axis, in units of gamma."""

    d_min: float
    d_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"grid needs n >= 2 points, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not self.d_max > self.d_min:
            raise ParameterError("grid must be strictly increasing (d_max > d_min)")

    @classmethod
    def symmetric(cls, half_span, n):
        return cls(-half_span, half_span, n)

    @classmethod
    def parse(cls, text):
        """Parse ``min:max:count``."""
        try:
            lo, hi, n = text.split(":")
            return cls(float(lo), float(hi), int(n))
        except ValueError as exc:
            raise ParameterError(f"bad grid {text!r}, expected min:max:count") from exc

    @property
    def spacing(self):
        return (self.d_max - self.d_min) / (self.n - 1)

    @property
    def points(self):
        return np.linspace(self.d_min, self.d_max, self.n)

    @property
    def weights(self):
        return trapezoid_weights(self.n, self.spacing)

    def with_span_doubled(self):
        """Same spacing, twice the span about the grid centre."""
        mid = 0.5 * (self.d_min + self.d_max)
        half = self.d_max - mid
        return DetuningGrid(mid - 2 * half, mid + 2 * half, 2 * self.n - 1)

    def __str__(self):
        return f"{self.d_min:g}:{self.d_max:g}:{self.n}"


@dataclass
class GridDiagnostics:
    spacing: float
    span: tuple
    flags: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.flags

    def to_dict(self):
        return {"spacing": self.spacing, "span": list(self.span), "flags": list(self.flags)}


def validate_grid(grid, params, epsilon=None, min_half_span=20.0):
    """Advisory resolution check for a detuning grid.

    Flags (never raises): span not covering +-20 gamma, spacing coarser than
    epsilon/4 or gamma/20.
    """
    gamma = params.gamma
    diag = GridDiagnostics(spacing=grid.spacing, span=(grid.d_min, grid.d_max))
    if grid.d_min > -min_half_span * gamma or grid.d_max < min_half_span * gamma:
        diag.flags.append(
            f"span [{grid.d_min:g}, {grid.d_max:g}] does not cover +-{min_half_span:g} gamma")
    if epsilon is not None and epsilon > 0 and grid.spacing > epsilon / 4:
        diag.flags.append(f"spacing {grid.spacing:.4g} > epsilon/4 = {epsilon / 4:.4g}")
    if grid.spacing > gamma / 20:
        diag.flags.append(f"spacing {grid.spacing:.4g} > gamma/20 = {gamma / 20:.4g}")
    return diag


def trapezoid_weights(n, h):
    w = np.full(n, float(h))
    w[0] = w[-1] = 0.5 * h
    return w


def relative_l2(a, b):
    """||a - b|| / ||b||."""
    return float(np.linalg.norm(np.ravel(a) - np.ravel(b)) / np.linalg.norm(np.ravel(b)))

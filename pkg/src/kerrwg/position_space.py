"""Two-photon output wavefunctions in position space.

After scattering the rr and ll amplitudes factor into a centre-of-mass
envelope times a relative wavefunction phi(x), x = x1 - x2.  The relative
part is a plane-wave term (cos(delta x) dressed by single-photon
coefficients) minus a bound-state term decaying as exp(-(gamma - 2 eps)|x|/2).
With eps = 0 the formulas reduce to the monochromatic limit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import ParameterError, SystemParams, TwoPhotonPacket, ValidityWarning

__all__ = [
    "M_NORM",
    "RelativeWavefunction",
    "EnvelopeFactor",
    "ResonanceScan",
    "default_x_grid",
    "bound_state_term",
    "phi_rr",
    "phi_ll",
    "relative_wavefunction",
    "envelope",
    "envelope_factor",
    "correlation_field",
    "two_photon_field",
    "resonance_scan",
    "kerr_scan",
    "second_moment",
    "peak_spacing",
]

# plane-wave normalization <x|k> = exp(ikx)/sqrt(2 pi), squared
M_NORM = 1.0 / (2.0 * math.pi)


def default_x_grid(x_max=12.0, n=961):
    return np.linspace(-x_max, x_max, n)


def _check_validity(packet, params):
    if packet.epsilon > params.gamma / 10:
        warnings.warn(
            f"epsilon = {packet.epsilon:g} > gamma/10: the finite-width position forms "
            "drop terms of order exp(gamma (x - t)/2) and assume gamma >> 2 epsilon",
            ValidityWarning, stacklevel=3)


def _t_of(z, gamma):
    return z / (z + 0.5j * gamma)


def _r_of(z, gamma):
    return -0.5j * gamma / (z + 0.5j * gamma)


def bound_state_term(x, packet: TwoPhotonPacket, params: SystemParams):
    """Localized part of phi(x), shared by rr and ll, sign included.

    -U/(E - U - 2i eps + i gamma) * gamma^2/((E + i gamma - 2i eps)^2 - 4 delta^2)
    * exp((iE + 2 eps - gamma)|x|/2)
    """
    x = np.asarray(x, dtype=float)
    gam, u = params.gamma, params.u
    e, d, eps = packet.e_total, packet.delta_rel, packet.epsilon
    ee = e - 2j * eps
    amp = -u / (ee - u + 1j * gam) * gam**2 / ((ee + 1j * gam) ** 2 - 4 * d**2)
    return amp * np.exp((1j * e + 2 * eps - gam) * np.abs(x) / 2)


def _phi(x, packet, params, coeff):
    _check_validity(packet, params)
    x = np.asarray(x, dtype=float)
    gam = params.gamma
    eps = packet.epsilon
    pair = coeff(packet.delta1 - 1j * eps, gam) * coeff(packet.delta2 - 1j * eps, gam)
    return pair * np.cos(packet.delta_rel * x) + bound_state_term(x, packet, params)


def phi_rr(x, packet: TwoPhotonPacket, params: SystemParams):
    """Relative wavefunction of the transmitted pair."""
    return _phi(x, packet, params, _t_of)


def phi_ll(x, packet: TwoPhotonPacket, params: SystemParams):
    """Relative wavefunction of the reflected pair."""
    return _phi(x, packet, params, _r_of)


@dataclass
class RelativeWavefunction:
    channel: str
    e_total: float
    delta_rel: float
    epsilon: float
    x: np.ndarray
    samples: np.ndarray

    @property
    def intensity(self):
        return np.abs(self.samples) ** 2


def relative_wavefunction(channel, x, packet, params) -> RelativeWavefunction:
    funcs = {"rr": phi_rr, "ll": phi_ll}
    if channel not in funcs:
        raise ParameterError(f"position forms exist for rr and ll only, not {channel!r}")
    x = np.asarray(x, dtype=float)
    return RelativeWavefunction(channel, packet.e_total, packet.delta_rel, packet.epsilon,
                                x, funcs[channel](x, packet, params))


def envelope(x_c, t, packet: TwoPhotonPacket, params: SystemParams,
             direction="transmitted", m=M_NORM):
    """Centre-of-mass factor multiplying phi(x), step function included.

    theta(0) is taken as 1.
    """
    if not t > 0:
        raise ParameterError("envelope needs t > 0")
    x_c = np.asarray(x_c, dtype=float)
    k = 1j * packet.e_total + 2 * packet.epsilon
    pref = -16 * math.pi**2 * m * packet.g2
    if direction == "transmitted":
        return np.where(t - x_c >= 0, pref * np.exp(k * (x_c - t)), 0.0)
    if direction == "reflected":
        return np.where(t + x_c >= 0, pref * np.exp(-k * (x_c + t)), 0.0)
    raise ParameterError(f"direction must be transmitted or reflected, got {direction!r}")


@dataclass(frozen=True)
class EnvelopeFactor:
    e_total: float
    epsilon: float
    x_c: float
    t: float
    direction: str
    value: complex


def envelope_factor(x_c, t, packet, params, direction="transmitted", m=M_NORM):
    val = complex(envelope(float(x_c), t, packet, params, direction, m))
    return EnvelopeFactor(packet.e_total, packet.epsilon, float(x_c), float(t), direction, val)


def correlation_field(x1, x2, t, packet: TwoPhotonPacket, params: SystemParams, m=M_NORM):
    """Closed-form position transform of B_pq/4 for the transmitted pair.

    One ordering of the two photon coordinates only; the symmetrized field
    adds the same expression with x1 and x2 exchanged, which is identical.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    gam, u = params.gamma, params.u
    e, d, eps = packet.e_total, packet.delta_rel, packet.epsilon
    xc = 0.5 * (x1 + x2)
    x = x1 - x2
    ee = e - 2j * eps
    amp = 8 * math.pi**2 * m * packet.g2 * u / (ee - u + 1j * gam) \
        * gam**2 / ((ee + 1j * gam) ** 2 - 4 * d**2)
    k = 1j * e + 2 * eps
    val = amp * np.exp(k * (xc - t)) * np.exp((k - gam) * np.abs(x) / 2)
    return np.where(t - xc >= 0, val, 0.0)


def two_photon_field(x1, x2, t, packet, params, channel="rr", m=M_NORM):
    """envelope(x_c, t) * phi(x1 - x2) for the rr or ll pair."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    xc = 0.5 * (x1 + x2)
    x = x1 - x2
    if channel == "rr":
        return envelope(xc, t, packet, params, "transmitted", m) * phi_rr(x, packet, params)
    if channel == "ll":
        return envelope(xc, t, packet, params, "reflected", m) * phi_ll(x, packet, params)
    raise ParameterError(f"unknown channel {channel!r}")


def second_moment(x, intensity, x_max=10.0):
    """<x^2> of a profile restricted to |x| <= x_max."""
    x = np.asarray(x, dtype=float)
    sel = np.abs(x) <= x_max
    xs, w = x[sel], np.asarray(intensity)[sel]
    return float(np.trapezoid(xs**2 * w, xs) / np.trapezoid(w, xs))


def peak_spacing(x, intensity, x_min=0.0):
    """Mean distance between successive local maxima at x >= x_min.

    Returns nan when fewer than two maxima are found.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(intensity, dtype=float)
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    xs = x[1:-1][inner]
    xs = xs[xs >= x_min]
    if xs.size < 2:
        return float("nan")
    return float(np.mean(np.diff(xs)))


@dataclass
class ResonanceScan:
    e_values: np.ndarray
    x: np.ndarray
    ll: np.ndarray   # |phi_ll|^2, shape (n_E, n_x)
    rr: np.ndarray

    def second_moments(self, channel="ll", x_max=10.0):
        data = getattr(self, channel)
        return np.array([second_moment(self.x, row, x_max) for row in data])

    def most_localized(self, channel="ll", x_max=10.0):
        return float(self.e_values[np.argmin(self.second_moments(channel, x_max))])


def resonance_scan(e_values, packet: TwoPhotonPacket, params: SystemParams, x=None):
    """|phi_ll|^2 and |phi_rr|^2 profiles across total detunings E.

    ``packet`` supplies the width; its relative detuning must be zero.
    """
    if packet.delta_rel != 0:
        raise ParameterError("resonance scan needs delta1 == delta2")
    x = default_x_grid() if x is None else np.asarray(x, dtype=float)
    e_values = np.asarray(e_values, dtype=float)
    ll = np.empty((e_values.size, x.size))
    rr = np.empty_like(ll)
    for i, e in enumerate(e_values):
        pk = TwoPhotonPacket.from_total(e, 0.0, packet.epsilon)
        ll[i] = np.abs(phi_ll(x, pk, params)) ** 2
        rr[i] = np.abs(phi_rr(x, pk, params)) ** 2
    return ResonanceScan(e_values, x, ll, rr)


def kerr_scan(u_values, packet: TwoPhotonPacket, params: SystemParams, channel="rr", x=0.0):
    """|phi(x)|^2 at fixed x as a function of the Kerr strength."""
    out = np.empty(len(u_values))
    for i, u in enumerate(u_values):
        p = SystemParams(gamma=params.gamma, u=float(u), omega_c=params.omega_c)
        fn = phi_rr if channel == "rr" else phi_ll
        out[i] = abs(complex(fn(x, packet, p))) ** 2
    return out

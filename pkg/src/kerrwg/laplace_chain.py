"""Laplace-domain solutions and checks of their internal consistency.

Evaluators for the single-photon transforms alpha(s), beta_k(s), the
two-photon cavity/waveguide transform B_k(s) with its correction factor
F_k(s), and the waveguide-pair transform C_pq(s).  Long-time amplitudes are
read off as residues at s = -i(Delta_p + Delta_q) by substitution into the
regular cofactor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    PhotonPacket,
    PoleError,
    QuadratureError,
    SystemParams,
    TwoPhotonPacket,
    ValidityWarning,
)

__all__ = [
    "LaplacePoint",
    "POLE_TOL",
    "alpha_beta_tilde",
    "beta_residue",
    "single_time_domain",
    "exp_divided_difference",
    "p_factor",
    "f_tilde",
    "b_tilde",
    "integral_equation_residual",
    "c_tilde",
    "c_tilde_residue",
    "c_tilde_poles",
]

POLE_TOL = 1e-9
QUAD_CONVERGED = 1e-6   # residual change treated as converged when the bound doubles


@dataclass(frozen=True)
class LaplacePoint:
    s: complex
    value: complex
    kind: str   # alpha, beta_k, b_k, f_k, c_pq


def _guard(s, poles, what):
    s = np.asarray(s, dtype=complex)
    for pole in poles:
        if np.any(np.abs(s - np.asarray(pole)) < POLE_TOL):
            raise PoleError(f"{what}: s within {POLE_TOL:g} of pole {complex(np.ravel(pole)[0])}")


# single photon

def alpha_beta_tilde(s, delta_k, packet: PhotonPacket, params: SystemParams):
    """Laplace transforms of the cavity and waveguide amplitudes.

    Returns
    -------
    (alpha, beta_k) evaluated at complex ``s``.
    """
    gam, g = params.gamma, params.g
    d, eps, g1 = packet.delta, packet.epsilon, packet.g1
    dk = np.asarray(delta_k, dtype=float)
    _guard(s, [-gam / 2, -eps - 1j * d, -1j * dk], "alpha/beta")
    s = np.asarray(s, dtype=complex)
    cav = 1.0 / ((s + gam / 2) * (s + eps + 1j * d))
    alpha = -2 * math.pi * g * g1 * cav
    beta = g1 / (s + 1j * dk) * (1.0 / (dk - d + 1j * eps) + 1j * gam * cav)
    return alpha, beta


def beta_residue(delta_k, packet: PhotonPacket, params: SystemParams):
    """Residue of beta_k(s) at s = -i Delta_k."""
    gam = params.gamma
    d, eps, g1 = packet.delta, packet.epsilon, packet.g1
    dk = np.asarray(delta_k, dtype=float)
    s = -1j * dk
    return g1 * (1.0 / (dk - d + 1j * eps) + 1j * gam / ((s + gam / 2) * (s + eps + 1j * d)))


def _dd1(x, y, t):
    """(exp(x t) - exp(y t)) / (x - y), confluent limit t exp(x t)."""
    x, y = np.broadcast_arrays(np.asarray(x, complex), np.asarray(y, complex))
    diff = x - y
    near = np.abs(diff) < POLE_TOL
    safe = np.where(near, 1.0, diff)
    far = np.exp(y * t) * np.expm1(diff * t) / safe
    conf = t * np.exp(0.5 * (x + y) * t)
    return np.where(near, conf, far)


def exp_divided_difference(t, x, y, z):
    """Second divided difference of exp(. t) over the nodes x, y, z.

    This is the inverse Laplace transform of 1/((s-x)(s-y)(s-z)); coincident
    nodes (within 1e-9) fall back to the confluent forms.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(v, complex) for v in (x, y, z)))
    dxz, dxy, dyz = np.abs(x - z), np.abs(x - y), np.abs(y - z)
    # symmetric in its nodes: put the most separated pair on the outside
    xy_max = (dxy >= dxz) & (dxy >= dyz)
    yz_max = ~xy_max & (dyz > dxz)
    lo = np.where(yz_max, y, x)
    hi = np.where(xy_max, y, z)
    mid = np.where(xy_max, z, np.where(yz_max, x, y))
    all_near = np.abs(lo - hi) < POLE_TOL
    safe = np.where(all_near, 1.0, lo - hi)
    gen = (_dd1(lo, mid, t) - _dd1(mid, hi, t)) / safe
    conf = 0.5 * t**2 * np.exp((x + y + z) / 3 * t)
    return np.where(all_near, conf, gen)


def single_time_domain(t, delta_k, packet: PhotonPacket, params: SystemParams):
    """Cavity and waveguide amplitudes at time ``t`` by partial fractions.

    alpha has simple poles at -gamma/2 and -eps - i delta; beta_k adds the
    free-propagation pole -i Delta_k.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    gam, g = params.gamma, params.g
    d, eps, g1 = packet.delta, packet.epsilon, packet.g1
    dk = np.asarray(delta_k, dtype=float)
    a = -gam / 2
    b = -eps - 1j * d
    c = -1j * dk
    alpha = -2 * math.pi * g * g1 * _dd1(a, b, t)
    beta0 = g1 / (dk - d + 1j * eps)
    beta = beta0 * np.exp(c * t) + 1j * gam * g1 * exp_divided_difference(t, c, a, b)
    return alpha, beta


# two photons

def p_factor(s, delta_k, packet: TwoPhotonPacket):
    """Symmetrized Lorentzian bracket appearing in the source of B_k(s)."""
    d1, d2, eps = packet.delta1, packet.delta2, packet.epsilon
    k = np.asarray(delta_k, dtype=float)
    s = np.asarray(s, dtype=complex)
    return (1.0 / (k + d1 - 1j * (s + eps)) / (k - d2 + 1j * eps)
            + 1.0 / (k + d2 - 1j * (s + eps)) / (k - d1 + 1j * eps))


def f_tilde(s, delta_k, packet: TwoPhotonPacket, params: SystemParams):
    """Correction factor F_k(s) with B_k = (bare source term) * (1 + F_k)."""
    gam, u = params.gamma, params.u
    d1, d2, eps = packet.delta1, packet.delta2, packet.epsilon
    k = np.asarray(delta_k, dtype=float)
    s = np.asarray(s, dtype=complex)
    pair = 1.0 / (d1 + d2 - 1j * (s + 2 * eps))
    x1 = pair / (d1 - 1j * (s + eps + gam / 2))
    x2 = pair / (d2 - 1j * (s + eps + gam / 2))
    kerr = 2.0 / (u - 1j * s - 1j * gam)
    inner = ((kerr + 1.0 / (d2 + k - 1j * (s + eps))) * x2
             + (kerr + 1.0 / (d1 + k - 1j * (s + eps))) * x1)
    return -1j * gam * inner / p_factor(s, k, packet)


def _b_poles(delta_k, packet, params):
    gam, u = params.gamma, params.u
    d1, d2, eps = packet.delta1, packet.delta2, packet.epsilon
    k = np.asarray(delta_k, dtype=float)
    return [-gam / 2 - 1j * k, -eps - 1j * (k + d1), -eps - 1j * (k + d2),
            -gam - 1j * u, -2 * eps - 1j * (d1 + d2),
            -eps - gam / 2 - 1j * d1, -eps - gam / 2 - 1j * d2]


def b_tilde(s, delta_k, packet: TwoPhotonPacket, params: SystemParams):
    """Laplace transform of the one-cavity-photon amplitude B_k(s)."""
    _guard(s, _b_poles(delta_k, packet, params), "b_tilde")
    g = params.g
    k = np.asarray(delta_k, dtype=float)
    s = np.asarray(s, dtype=complex)
    lead = 2 * math.pi * g * packet.g2 / (k - 1j * (s + params.gamma / 2))
    return lead * p_factor(s, k, packet) * (1.0 + f_tilde(s, k, packet, params))


def _kernel_integral(s, k, packet, params, bound, n):
    p = np.linspace(-bound, bound, n)
    h = p[1] - p[0]
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    bp = b_tilde(s, p, packet, params)
    g2c = params.g**2
    const = 2 * g2c / (params.u - 1j * s) * np.dot(w, bp)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    cross = (g2c / (p[None, :] + k[:, None] - 1j * s) * bp[None, :]) @ w
    return const + cross


def integral_equation_residual(s, delta_k, packet: TwoPhotonPacket, params: SystemParams,
                               quad_bound=200.0, quad_n=20001, extrapolate=True,
                               details=False):
    """Relative residual of the integral equation satisfied by B_k(s).

    The equation reads

        [Delta_k - i(s + gamma/2)] B_k = int dp K(p, k; s) B_p + 2 pi g G2 P_k(s),
        K = 2 g^2/(U - i s) + g^2/(Delta_p + Delta_k - i s).

    The p-integral is a trapezoid rule on [-L, L] with ``quad_n`` points.
    B_p decays as 1/p^2 so truncation leaves an O(1/L) error; with
    ``extrapolate`` the integral is also taken on [-2L, 2L] at the same
    spacing and combined as 2 I(2L) - I(L), which cancels that term.

    Raises
    ------
    QuadratureError
        if the raw residual grows by more than 1e-6 when the bound doubles.
        Smaller changes mean the truncation error is already below the
        spacing-limited floor.
    """
    if np.real(s) <= 0:
        raise ValueError("the quadrature needs Re s > 0")
    k = np.atleast_1d(np.asarray(delta_k, dtype=float))
    lhs = (k - 1j * (s + params.gamma / 2)) * b_tilde(s, k, packet, params)
    source = 2 * math.pi * params.g * packet.g2 * p_factor(s, k, packet)
    i1 = _kernel_integral(s, k, packet, params, quad_bound, quad_n)
    i2 = _kernel_integral(s, k, packet, params, 2 * quad_bound, 2 * quad_n - 1)
    scale = np.abs(lhs)
    raw1 = np.abs(lhs - i1 - source) / scale
    raw2 = np.abs(lhs - i2 - source) / scale
    if np.any(raw2 - raw1 > QUAD_CONVERGED):
        raise QuadratureError(
            f"integral-equation residual not decreasing with bound: {raw1.max():.3g} -> {raw2.max():.3g}")
    if extrapolate:
        res = np.abs(lhs - (2 * i2 - i1) - source) / scale
    else:
        res = raw1
    value = float(np.max(res))
    if details:
        return {"residual": value, "raw_residual_L": float(raw1.max()),
                "raw_residual_2L": float(raw2.max()), "extrapolated": bool(extrapolate)}
    return value


def _c_bracket(s, p, q, packet, params):
    gam, u = params.gamma, params.u
    d1, d2, eps = packet.delta1, packet.delta2, packet.epsilon

    def lor(x, d):
        return 1.0 / (x - d + 1j * eps)

    def single(x):
        return 1j * gam / (s + gam / 2 + 1j * x) * (
            lor(x, d2) / (s + eps + 1j * (x + d1)) + lor(x, d1) / (s + eps + 1j * (x + d2)))

    pair = 1.0 / (s + 2 * eps + 1j * (d1 + d2))
    cav1 = 1.0 / (s + eps + gam / 2 + 1j * d1)
    cav2 = 1.0 / (s + eps + gam / 2 + 1j * d2)
    ep = 1.0 / (s + gam / 2 + 1j * p)
    eq = 1.0 / (s + gam / 2 + 1j * q)
    kerr = -2 * gam**2 / (s + gam + 1j * u) * pair * (cav1 + cav2) * (ep + eq)
    mixed = -gam**2 * pair * (
        cav1 * (ep / (s + eps + 1j * (d1 + p)) + eq / (s + eps + 1j * (d1 + q)))
        + cav2 * (ep / (s + eps + 1j * (d2 + p)) + eq / (s + eps + 1j * (d2 + q))))
    free = lor(p, d1) * lor(q, d2) + lor(q, d1) * lor(p, d2)
    return single(p) + single(q) + kerr + mixed + free


def c_tilde_poles(p, q, packet: TwoPhotonPacket, params: SystemParams):
    """All poles of C_pq(s) as a 1-D complex array (scalar p, q)."""
    gam, u = params.gamma, params.u
    d1, d2, eps = packet.delta1, packet.delta2, packet.epsilon
    out = [-1j * (p + q), -gam - 1j * u, -2 * eps - 1j * (d1 + d2),
           -eps - gam / 2 - 1j * d1, -eps - gam / 2 - 1j * d2]
    for x in (p, q):
        out += [-gam / 2 - 1j * x, -eps - 1j * (x + d1), -eps - 1j * (x + d2)]
    return np.array(out, dtype=complex)


def c_tilde(s, p, q, packet: TwoPhotonPacket, params: SystemParams):
    """Laplace transform of the waveguide-pair amplitude C_pq(s)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=complex)
    if p.ndim == 0 and q.ndim == 0:
        _guard(s, c_tilde_poles(float(p), float(q), packet, params), "c_tilde")
    return packet.g2 / (s + 1j * (p + q)) * _c_bracket(s, p, q, packet, params)


def c_tilde_residue(p, q, packet: TwoPhotonPacket, params: SystemParams):
    """Coefficient of exp(-i(Delta_p + Delta_q) t) in C_pq(t) as t -> infinity.

    Obtained by evaluating the regular cofactor at the free pole.  If that pole
    meets another one (possible only at eps = 0), the evaluation point is
    moved by 1e-12 gamma and a warning is issued.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    s = -1j * (p + q)
    if p.ndim == 0 and q.ndim == 0:
        others = c_tilde_poles(float(p), float(q), packet, params)[1:]
        if np.min(np.abs(others - s)) < 1e-12 * params.gamma:
            warnings.warn("residue pole collision; shifting by 1e-12 gamma", ValidityWarning,
                          stacklevel=2)
            s = s + 1e-12 * params.gamma
    return packet.g2 * _c_bracket(s, p, q, packet, params)

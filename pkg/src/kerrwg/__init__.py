"""Correlated two-photon transport through a waveguide side-coupled to a Kerr cavity.

Closed-form amplitudes in frequency and position space, Laplace-domain
consistency checks, and brute-force numerical oracles.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DetuningGrid,
    PhotonPacket,
    SystemParams,
    TwoPhotonPacket,
    make_params,
    validate_grid,
)
from .freq_amplitudes import (  # noqa: E402
    channel_amplitudes,
    correlation_term,
    initial_two_photon,
    lorentzian_amplitude,
    output_norm,
    single_coeffs,
)
from .position_space import envelope, phi_ll, phi_rr, resonance_scan  # noqa: E402

__all__ = [
    "DetuningGrid", "PhotonPacket", "SystemParams", "TwoPhotonPacket", "make_params",
    "validate_grid", "channel_amplitudes", "correlation_term", "initial_two_photon",
    "lorentzian_amplitude", "output_norm", "single_coeffs", "envelope", "phi_ll", "phi_rr",
    "resonance_scan",
]

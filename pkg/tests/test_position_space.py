import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrwg.core import ParameterError, TwoPhotonPacket, ValidityWarning, make_params
from kerrwg.position_space import (
    bound_state_term,
    correlation_field,
    envelope,
    envelope_factor,
    kerr_scan,
    peak_spacing,
    phi_ll,
    phi_rr,
    relative_wavefunction,
    resonance_scan,
    second_moment,
    two_photon_field,
)

MONO = TwoPhotonPacket(0.0, 0.0, 0.0)


class TestContactValues:
    @pytest.mark.parametrize("u", [0.0, 0.5, 1.0, 3.0, 10.0, 100.0])
    def test_transmitted_bunching(self, u):
        par = make_params(1.0, u)
        assert abs(phi_rr(0.0, MONO, par)) ** 2 == pytest.approx(u**2 / (u**2 + 1), abs=1e-10)

    @pytest.mark.parametrize("u", [0.0, 0.5, 1.0, 3.0, 10.0, 100.0])
    def test_reflected_antibunching(self, u):
        par = make_params(1.0, u)
        assert abs(phi_ll(0.0, MONO, par)) ** 2 == pytest.approx(1 / (u**2 + 1), abs=1e-10)

    def test_kerr_scan_monotone_and_saturating(self):
        u = np.linspace(0, 50, 201)
        rr = kerr_scan(u, MONO, make_params(1, 0), "rr")
        ll = kerr_scan(u, MONO, make_params(1, 0), "ll")
        assert np.all(np.diff(rr) > 0) and np.all(np.diff(ll) < 0)
        assert rr[-1] > 0.999 and ll[-1] < 1e-3

    def test_far_from_contact_uncorrelated(self):
        # bound term has decayed; |phi_rr| -> |t t| = 0 on resonance, |phi_ll| -> 1
        par = make_params(1.0, 10.0)
        assert abs(phi_rr(60.0, MONO, par)) < 1e-12
        assert abs(phi_ll(60.0, MONO, par)) == pytest.approx(1.0, abs=1e-12)


class TestFiniteWidth:
    # 30-digit mpmath evaluations of the finite-width closed forms
    PK = TwoPhotonPacket(0.4, -0.2, 0.03)
    PAR = make_params(1.0, 4.0)

    def test_reference_rr(self):
        assert phi_rr(1.3, self.PK, self.PAR) == pytest.approx(
            -0.122017163850389418 - 0.187392876131887326j, rel=1e-13)

    def test_reference_ll(self):
        assert phi_ll(1.3, self.PK, self.PAR) == pytest.approx(
            0.356797231843542593 - 0.0562559574343608030j, rel=1e-13)

    def test_continuous_as_width_vanishes(self):
        x = np.linspace(-5, 5, 41)
        pk0 = TwoPhotonPacket(0.3, 0.1, 0.0)
        ref = phi_rr(x, pk0, self.PAR)
        errs = [np.max(np.abs(phi_rr(x, TwoPhotonPacket(0.3, 0.1, e), self.PAR) - ref))
                for e in (1e-3, 1e-4, 1e-5)]
        assert errs[2] < 1e-4
        np.testing.assert_allclose(np.array(errs[:2]) / np.array(errs[1:]), 10, rtol=0.1)

    def test_wide_packet_warns(self):
        with pytest.warns(ValidityWarning):
            phi_ll(0.0, TwoPhotonPacket(0, 0, 0.2), self.PAR)

    @settings(max_examples=50)
    @given(st.floats(0, 30), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 0.1))
    def test_even_in_separation(self, x, d1, d2, eps):
        pk = TwoPhotonPacket(d1, d2, eps)
        for fn in (phi_rr, phi_ll):
            assert fn(x, pk, self.PAR) == fn(-x, pk, self.PAR)


class TestBoundState:
    def test_slope(self):
        x = np.linspace(0.01, 10, 500)
        b = bound_state_term(x, MONO, make_params(1.0, 10.0))
        slope, _ = np.polyfit(x, np.log(np.abs(b)), 1)
        assert abs(slope + 0.5) < 1e-8

    def test_width_scales_with_gamma(self):
        x = np.linspace(0.01, 10, 500)
        b = bound_state_term(x, MONO, make_params(3.0, 10.0))
        slope, _ = np.polyfit(x, np.log(np.abs(b)), 1)
        assert slope == pytest.approx(-1.5, abs=1e-8)

    def test_finite_width_slows_decay(self):
        x = np.linspace(0.01, 10, 500)
        b = bound_state_term(x, TwoPhotonPacket(0, 0, 0.05), make_params(1.0, 10.0))
        slope, _ = np.polyfit(x, np.log(np.abs(b)), 1)
        assert slope == pytest.approx(-0.45, abs=1e-8)

    def test_absent_without_kerr(self):
        assert np.all(bound_state_term(np.linspace(-3, 3, 7), MONO, make_params(1, 0)) == 0)


class TestEnvelope:
    PK = TwoPhotonPacket(0.2, 0.2, 0.05)
    PAR = make_params(1.0, 10.0)

    def test_causal(self):
        t = 5.0
        assert envelope(t + 1e-9, t, self.PK, self.PAR) == 0
        assert envelope(-t - 1e-9, t, self.PK, self.PAR, "reflected") == 0
        assert envelope(t, t, self.PK, self.PAR) != 0   # step taken as 1 at the front

    def test_growth_towards_front(self):
        t = 8.0
        xc = np.array([2.0, 3.0])
        r = envelope(xc[1], t, self.PK, self.PAR) / envelope(xc[0], t, self.PK, self.PAR)
        assert r == pytest.approx(np.exp(1j * 0.4 + 0.1), rel=1e-14)

    def test_reflected_mirrors_transmitted(self):
        xc = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(envelope(-xc, 4.0, self.PK, self.PAR, "reflected"),
                                   envelope(xc, 4.0, self.PK, self.PAR), rtol=1e-14)

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            envelope(0.0, 0.0, self.PK, self.PAR)
        with pytest.raises(ParameterError):
            envelope(0.0, 1.0, self.PK, self.PAR, "sideways")

    def test_factor_record(self):
        f = envelope_factor(1.0, 3.0, self.PK, self.PAR)
        assert f.value == envelope(1.0, 3.0, self.PK, self.PAR)
        assert f.e_total == pytest.approx(0.4)


class TestFields:
    PK = TwoPhotonPacket(0.0, 0.0, 0.05)
    PAR = make_params(1.0, 10.0)

    def test_correlation_field_is_bound_part(self):
        # the rr field minus its factorized part is twice the one-ordering closed form
        x1 = np.linspace(-4, 4, 9)
        x2 = 0.7 - x1
        t = 10.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            full = two_photon_field(x1, x2, t, self.PK, self.PAR)
            env = envelope(0.5 * (x1 + x2), t, self.PK, self.PAR)
            bound = env * bound_state_term(x1 - x2, self.PK, self.PAR)
        np.testing.assert_allclose(2 * correlation_field(x1, x2, t, self.PK, self.PAR), bound,
                                   rtol=1e-13)
        assert np.all(np.abs(full - bound) > 0)

    def test_correlation_field_exchange_symmetric(self, rng):
        x1, x2 = rng.uniform(-5, 5, (2, 30))
        np.testing.assert_allclose(correlation_field(x1, x2, 12.0, self.PK, self.PAR),
                                   correlation_field(x2, x1, 12.0, self.PK, self.PAR), rtol=1e-14)

    def test_unknown_channel(self):
        with pytest.raises(ParameterError):
            two_photon_field(0.0, 0.0, 1.0, self.PK, self.PAR, "rl")
        with pytest.raises(ParameterError):
            relative_wavefunction("lr", [0.0], self.PK, self.PAR)


class TestResonance:
    PAR = make_params(1.0, 10.0)

    def test_most_localized_at_kerr_energy(self):
        e = np.linspace(0, 20, 81)
        scan = resonance_scan(e, MONO, self.PAR)
        assert abs(scan.most_localized() - 10.0) <= e[1] - e[0]

    @pytest.mark.parametrize("e", [4.0, 6.0, 14.0, 16.0, 18.0])
    def test_fringe_spacing(self, e):
        # |phi_ll|^2 beats a constant against exp(iE|x|/2): period 4 pi / E
        x = np.linspace(-12, 12, 4801)
        y = np.abs(phi_ll(x, TwoPhotonPacket.from_total(e, 0.0, 0.0), self.PAR)) ** 2
        assert peak_spacing(x, y) == pytest.approx(4 * np.pi / e, rel=0.02)

    def test_needs_equal_detunings(self):
        with pytest.raises(ParameterError):
            resonance_scan([0.0, 1.0], TwoPhotonPacket(0.1, 0.3, 0.0), self.PAR)


class TestProfileMeasures:
    def test_second_moment_of_exponential(self):
        x = np.linspace(-40, 40, 16001)
        # <x^2> of exp(-|x|) is 2
        assert second_moment(x, np.exp(-np.abs(x)), x_max=40) == pytest.approx(2.0, rel=1e-5)  # O(h^2) trapezoid

    def test_peak_spacing_cosine(self):
        x = np.linspace(0, 20, 4001)
        assert peak_spacing(x, np.cos(3 * x) ** 2) == pytest.approx(np.pi / 3, rel=1e-3)

    def test_peak_spacing_needs_two_peaks(self):
        x = np.linspace(-1, 1, 101)
        assert np.isnan(peak_spacing(x, -x**2))

import math
import warnings

import numpy as np
import pytest
from scipy import fft, special

from histoq.continuum import (
    GaussianPacket,
    RegimeWarning,
    TwoSlitGeometry,
    centre_at,
    free_particle_joint_probability,
    fresnel_j,
    localization_decoherence,
    localization_probability,
    min_lp_binwidth,
    packet_for_centre,
    propagated_interval,
    restricted_wavefunction,
    spacetime_decoherence,
    spacetime_remain_probability,
    two_slit_bin_probability,
    two_slit_bin_table,
    two_slit_densities,
    two_slit_total_probability,
    uniform_bins,
)
from histoq.quadrature import QuadratureError, QuadratureSpec

FIG2 = TwoSlitGeometry.from_dimensionless(60.0, 60.0)


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield


class TestTwoSlit:
    def test_densities_on_the_axis(self):
        g = TwoSlitGeometry(2.0, 50.0, 3.0, a=0.5)
        wu, wl, wt = two_slit_densities(0.0, g)
        s2 = 1.0 + 50.0**2
        assert wu == pytest.approx(0.25 * 2 / s2)
        assert wl == pytest.approx(wu)
        assert wt == pytest.approx(4 * 0.25 / s2)

    def test_pointwise_sum_identity(self):
        y = np.linspace(-200, 200, 4001)
        wu, wl, wt = two_slit_densities(y, FIG2)
        assert np.max(np.abs(wu + wl - wt)) <= 1e-12 * np.max(wt)

    def test_total_density_is_squared_amplitude(self):
        y = np.linspace(-100, 100, 801)
        pu, pl = FIG2.amplitudes(y)
        np.testing.assert_allclose(two_slit_densities(y, FIG2)[2], np.abs(pu + pl) ** 2, rtol=1e-12)

    def test_far_screen_densities_are_non_negative(self):
        g = TwoSlitGeometry(1.0, 1e4, 60.0)
        y = np.linspace(-500, 500, 20001)
        wu, wl, _ = two_slit_densities(y, g)
        approx = (1 / g.D**2) * (1 + np.cos(g.k * y * g.d / g.D))
        assert wu.min() > -1e-3 * wu.max()
        np.testing.assert_allclose(wu, approx, atol=2e-3 * approx.max())

    @staticmethod
    def _peaks(g, y):
        wt = two_slit_densities(y, g)[2]
        return y[1:-1][(wt[1:-1] > wt[:-2]) & (wt[1:-1] > wt[2:])]

    def test_fringe_spacing_in_the_far_field(self):
        # Ten fringes within 0.05 rad of the axis.
        g = TwoSlitGeometry(100.0, 1e4, 2 * math.pi)
        peaks = self._peaks(g, np.linspace(-500, 500, 200001))
        assert np.mean(np.diff(peaks)) == pytest.approx(g.fringe_spacing, rel=2e-3)

    def test_peaks_sit_on_whole_wavelength_path_differences(self):
        # The screen is at the slit separation, not far away; the maxima follow
        # the exact path difference and are a little wider apart than 2 pi D / kd.
        assert FIG2.fringe_spacing == pytest.approx(2 * math.pi)
        peaks = self._peaks(FIG2, np.linspace(-20, 20, 400001))
        path = np.hypot(FIG2.d / 2 + peaks, FIG2.D) - np.hypot(FIG2.d / 2 - peaks, FIG2.D)
        cycles = FIG2.k * path / (2 * math.pi)
        np.testing.assert_allclose(cycles, np.round(cycles), atol=2e-3)
        assert np.all(np.diff(peaks) > FIG2.fringe_spacing)

    def test_narrow_bin_on_negative_lobe_is_negative(self):
        assert two_slit_bin_probability((-26.33, -25.83), "U", FIG2) < 0

    def test_wide_bin_is_positive_and_interference_averages_out(self):
        g = FIG2
        lo, hi = -10 * g.fringe_spacing, 10 * g.fringe_spacing
        pu = two_slit_bin_probability((lo, hi), "U", g)
        from histoq.quadrature import gauss_kronrod

        direct = gauss_kronrod(lambda y: 1.0 / (0.25 * g.d**2 - g.d * y + y * y + g.D**2), lo, hi).value
        assert pu > 0
        # The interference part is a few percent of the direct part over ten fringes.
        assert abs(pu - direct) < 0.05 * direct

    def test_total_against_double_resolution(self):
        p = two_slit_total_probability(200.0, FIG2)
        ref = two_slit_total_probability(200.0, FIG2, QuadratureSpec(1e-13, 1e-12))
        assert p > 0 and p == pytest.approx(ref, rel=1e-8)

    def test_one_huge_bin_equals_total(self):
        t = two_slit_bin_table(FIG2, [-200.0, 200.0])
        assert t.sum() == pytest.approx(two_slit_total_probability(200.0, FIG2), rel=1e-9)
        assert (t > 0).all()

    def test_uniform_bins_are_centred(self):
        e = uniform_bins((-10, 10), 3.0)
        assert len(e) == 7 and e[0] == pytest.approx(-9.0) and e[-1] == pytest.approx(9.0)
        with pytest.raises(ValueError):
            uniform_bins((0, 1), 2.0)
        with pytest.raises(ValueError):
            uniform_bins((0, 1), 0.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            TwoSlitGeometry(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            two_slit_bin_probability((0, math.inf), "U", FIG2)
        with pytest.raises(ValueError):
            two_slit_bin_probability((0, 1), "X", FIG2)


class TestBinWidth:
    def test_figure_parameters(self):
        r = min_lp_binwidth(FIG2, (-60, 60), [12, 10, 8, 7, 6, 5, 4])
        assert r.width is not None and r.width < r.fringe_spacing
        assert r.width == 5.0
        assert 4.0 in r.failing and r.min_probability[4.0] < 0

    def test_far_screen_allows_much_narrower_bins(self):
        g = TwoSlitGeometry.from_dimensionless(60.0, 6000.0)
        widths = [g.fringe_spacing / n for n in (2, 4, 8, 16, 32)]
        r = min_lp_binwidth(g, (-3 * g.fringe_spacing, 3 * g.fringe_spacing), widths)
        assert r.width == pytest.approx(g.fringe_spacing / 32)
        assert r.failing == ()

    def test_width_list_validation(self):
        with pytest.raises(ValueError):
            min_lp_binwidth(FIG2, (-60, 60), [])
        with pytest.raises(ValueError):
            min_lp_binwidth(FIG2, (-60, 60), [4, 5])


class TestPacket:
    def test_evolved_is_normalized_and_matches_fft(self):
        p = GaussianPacket(sigma=0.8, M=1.3, X0=0.4, K0=2.0)
        x = np.linspace(-40, 40, 8192, endpoint=False)
        dx = x[1] - x[0]
        t = 0.9
        k = 2 * np.pi * fft.fftfreq(x.size, dx)
        ref = fft.ifft(fft.fft(p.initial(x)) * np.exp(-1j * k**2 * t / (2 * p.M)))
        got = p.evolved(x, t)
        assert np.sum(np.abs(got) ** 2) * dx == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(got - ref)) < 1e-10

    def test_time_scales(self):
        p = GaussianPacket(sigma=2.0, M=3.0)
        assert p.spreading_time == 24.0
        assert p.wavelength(p.time_for_wavelength(0.7)) == pytest.approx(0.7)

    def test_propagated_full_line_is_evolved_packet(self):
        p = GaussianPacket(K0=1.5, X0=-0.3)
        x = np.linspace(-6, 6, 101)
        got = propagated_interval(p, x, 0.4, -60.0, 60.0)
        np.testing.assert_allclose(got, p.evolved(x, 0.4), atol=1e-14)

    def test_propagated_interval_against_quadrature(self):
        from histoq.quadrature import gauss_kronrod

        p = GaussianPacket(K0=0.7)
        tau, m = 0.05, 1.0 / (2 * 0.05)
        pref = math.sqrt(m / math.pi) * complex(math.cos(-math.pi / 4), math.sin(-math.pi / 4))
        for x in (-0.3, 0.2, 1.4):
            f = lambda x1: pref * np.exp(1j * m * (x - x1) ** 2) * p.initial(x1)
            ref = gauss_kronrod(f, -0.5, 1.0, QuadratureSpec(1e-13, 1e-12), max_width=0.02).value
            assert abs(propagated_interval(p, x, tau, -0.5, 1.0) - ref) < 1e-11

    def test_validation(self):
        with pytest.raises(ValueError):
            GaussianPacket(sigma=0.0)
        with pytest.raises(ValueError):
            propagated_interval(GaussianPacket(), 0.0, 0.0, -1, 1)


class TestFreeParticle:
    def test_whole_line_is_one(self):
        p = GaussianPacket()
        line = (-math.inf, math.inf)
        assert free_particle_joint_probability(line, line, p, 0.3) == pytest.approx(1.0, abs=1e-9)

    def test_partition_sums_to_one(self):
        p = GaussianPacket(K0=0.5)
        cells = [(-math.inf, -0.5), (-0.5, 0.7), (0.7, math.inf)]
        total = sum(free_particle_joint_probability(a, b, p, 0.2) for a in cells for b in cells)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_exact_and_short_forms_agree_at_short_times(self):
        p = GaussianPacket()
        tau = 0.01 * p.spreading_time
        a = free_particle_joint_probability((-1, 1), (-0.5, 2), p, tau)
        b = free_particle_joint_probability((-1, 1), (-0.5, 2), p, tau, form="short")
        assert abs(a - b) < 1e-4

    def test_short_form_normalization_defect(self):
        # Without spreading the whole-line value is Re sqrt(1 / (1 + i eps / 2)), eps = tau / spreading time.
        p = GaussianPacket()
        eps = 0.01
        line = (-math.inf, math.inf)
        got = free_particle_joint_probability(line, line, p, eps * p.spreading_time, form="short")
        assert got == pytest.approx(((1 / (1 + 0.5j * eps)) ** 0.5).real, abs=1e-10)
        assert 1 - got == pytest.approx(3 * eps**2 / 32, rel=1e-2)

    def test_empty_interval_and_bad_input(self):
        p = GaussianPacket()
        assert free_particle_joint_probability((0, 0), (-1, 1), p, 0.1) == 0.0
        with pytest.raises(ValueError):
            free_particle_joint_probability((0, 1), (0, 1), p, 0.0)
        with pytest.raises(ValueError):
            free_particle_joint_probability((0, 1), (0, 1), p, 0.1, form="other")

    def test_short_form_warns_outside_regime(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeWarning)
            with pytest.raises(RegimeWarning):
                free_particle_joint_probability((0, 1), (0, 1), GaussianPacket(), 1.0, form="short")


class TestLocalization:
    def test_fresnel_j_limits(self):
        assert fresnel_j(0.0, 0.1) == 0.0
        # Fresnel integrals approach their limit like 1/x.
        assert fresnel_j(50.0, 0.1) == pytest.approx(1.0, abs=1e-3)
        assert fresnel_j(5000.0, 0.1) == pytest.approx(1.0, abs=1e-5)
        z = np.linspace(0.01, 3, 50)
        ref = 2 * (special.fresnel(2 * z / 0.3)[1] + special.fresnel(2 * z / 0.3)[0]) / 2
        np.testing.assert_allclose(fresnel_j(z, 0.3), ref, atol=1e-12)

    @pytest.mark.parametrize("lam", [0.5, 0.2, 0.05])
    def test_descent_and_direct_methods_agree(self, lam):
        p = GaussianPacket()
        for h in (0.1, 0.7, 2.0):
            a = localization_probability(h, p, lam)
            b = localization_probability(h, p, lam, method="x")
            assert a == pytest.approx(b, abs=1e-12)

    @pytest.mark.parametrize("lam, tol", [(0.2, 5e-6), (0.05, 1e-7)])
    def test_matches_exact_two_time_probability(self, lam, tol):
        # The approximation error falls off like (lam/sigma)^3.
        p = GaussianPacket()
        tau = p.time_for_wavelength(lam)
        for h in (0.5, 1.0, 2.0):
            exact = free_particle_joint_probability((-h, h), (-h, h), p, tau)
            assert localization_probability(h, p, lam) == pytest.approx(exact, abs=tol)

    def test_limits(self):
        p = GaussianPacket()
        assert localization_probability(0.0, p, 0.01) == 0.0
        assert localization_probability(12.0, p, 0.01) == pytest.approx(1.0, abs=1e-12)
        assert 0 < localization_probability(1.0, p, 0.01) < 1

    def test_sweep_range(self):
        p = GaussianPacket()
        vals = [localization_probability(h, p, 0.01) for h in np.linspace(0, 10, 100)]
        assert min(vals) >= 0.0 and max(vals) <= 1.0 + 1e-12
        assert vals[-1] > 0.999

    def test_validation(self):
        with pytest.raises(ValueError):
            localization_probability(1.0, GaussianPacket(X0=1.0), 0.1)
        with pytest.raises(ValueError):
            localization_probability(-1.0, GaussianPacket(), 0.1)
        with pytest.raises(ValueError):
            localization_probability(1.0, GaussianPacket(), 0.0)
        with pytest.raises(ValueError):
            localization_probability(1.0, GaussianPacket(), 0.01, method="other")


class TestLocalizationDecoherence:
    def test_zero_width(self):
        assert localization_decoherence(0.0, GaussianPacket(), 0.01) == 0

    def test_wide_interval_negligible(self):
        p = GaussianPacket()
        assert abs(localization_decoherence(10.0, p, p.time_for_wavelength(0.3))) < 1e-6

    @pytest.mark.parametrize("h", [0.05, 0.1, 0.2])
    def test_narrow_interval_of_order_width(self, h):
        # With the propagator wavelength a few times the interval, |D| is a
        # fixed fraction of the interval width in units of sigma.
        p = GaussianPacket()
        d = localization_decoherence(h, p, p.time_for_wavelength(3 * h))
        ratio = abs(d) / (2 * h / p.sigma)
        assert 0.05 < ratio < 1.0

    def test_identity_with_joint_probability(self):
        # D(L, not L) + ||C_L Psi||^2 = <Psi|C_L^dagger|Psi>, whose real part is p(L, L).
        from histoq.quadrature import gauss_kronrod

        p = GaussianPacket()
        tau, h = 0.05, 0.6
        d = localization_decoherence(h, p, tau)
        pll = free_particle_joint_probability((-h, h), (-h, h), p, tau)
        norm = gauss_kronrod(lambda x: np.abs(propagated_interval(p, x, tau, -h, h)) ** 2, -h, h, max_width=0.05)
        assert d.real + norm.value == pytest.approx(pll, abs=1e-10)

    def test_against_fft_grid_evolution(self):
        p = GaussianPacket()
        tau, h = 0.05, 0.6
        x = np.linspace(-40, 40, 2**16, endpoint=False)
        dx = x[1] - x[0]
        k = 2 * np.pi * fft.fftfreq(x.size, dx)
        evolve = lambda f: fft.ifft(fft.fft(f) * np.exp(-1j * k**2 * tau / 2))
        inside = np.abs(x) <= h
        i_in = evolve(p.initial(x) * inside)
        ref = np.sum(np.conj(i_in) * (evolve(p.initial(x)) - i_in) * inside) * dx
        assert abs(localization_decoherence(h, p, tau) - ref) < 5e-5

    def test_fine_fringes_exhaust_the_panel_budget(self):
        p = GaussianPacket()
        with pytest.raises(QuadratureError):
            localization_decoherence(3.0, p, p.time_for_wavelength(0.01))


def _hard_wall_oracle(packet, T, L=40.0, N=4096, odd=False):
    """Sine-series evolution on [0, L] with Dirichlet walls.

    The start is the packet cut to x > 0, or with ``odd`` its odd extension,
    which is what the image formula evolves.
    """
    x = L * np.arange(1, N + 1) / (N + 1)
    psi0 = packet.initial(x)
    if odd:
        psi0 = psi0 - packet.initial(-x)
    n = np.arange(1, N + 1)
    energy = (n * np.pi / L) ** 2 / (2 * packet.M)
    coef = fft.dst(psi0, type=1)
    out = fft.idst(coef * np.exp(-1j * energy * T), type=1)
    return x, out


class TestImages:
    def test_barrier_condition(self):
        p = GaussianPacket(X0=6.0, K0=-5.0)
        assert abs(restricted_wavefunction(0.0, 0.3, p)) == 0.0
        assert abs(restricted_wavefunction(1e-6, 0.3, p)) < 1e-5

    def test_far_packet_is_unaffected(self):
        p = GaussianPacket(X0=20.0, K0=1.0)
        x = np.linspace(15, 25, 21)
        np.testing.assert_allclose(restricted_wavefunction(x, 0.3, p), p.evolved(x, 0.3), atol=1e-12)

    @pytest.mark.parametrize("odd, tol", [(True, 1e-12), (False, 1e-3)])
    @pytest.mark.parametrize("T", [0.1, 0.4])
    def test_against_hard_wall_grid_evolution(self, odd, tol, T):
        p = GaussianPacket(X0=6.0, K0=-5.0)
        x, ref = _hard_wall_oracle(p, T, odd=odd)
        sel = x < 12.0
        got = restricted_wavefunction(x[sel], T, p)
        assert np.max(np.abs(got - ref[sel])) < tol

    def test_rigid_packet_error_grows_linearly(self):
        p = GaussianPacket(X0=6.0, K0=-5.0)
        errs = []
        for T in (0.05, 0.1):
            x, ref = _hard_wall_oracle(p, T, odd=True)
            sel = x < 12.0
            errs.append(np.max(np.abs(restricted_wavefunction(x[sel], T, p, spreading=False) - ref[sel])))
        assert errs[0] < 0.01
        assert errs[1] / errs[0] == pytest.approx(2.0, rel=0.05)

    def test_rejects_negative_positions(self):
        with pytest.raises(ValueError):
            restricted_wavefunction(np.array([-1.0]), 0.1, GaussianPacket(X0=5.0))

    def test_regime_warning(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeWarning)
            with pytest.raises(RegimeWarning):
                restricted_wavefunction(1.0, 0.1, GaussianPacket(X0=1.0))


def _closed_forms(X, K0, sigma=1.0):
    g = math.exp(-X * X / (2 * sigma**2) - 2 * K0 * K0 * sigma**2)
    p_r = 0.5 * math.erfc(-X / (math.sqrt(2) * sigma)) - 0.5 * g
    re_d = 0.5 * g - 0.5 * math.erfc(X / (math.sqrt(2) * sigma))
    return p_r, re_d


class TestSpacetime:
    def test_packet_for_centre(self):
        p, T = packet_for_centre(1.5, -20.0)
        assert centre_at(p, T) == pytest.approx(1.5)
        assert T == pytest.approx(0.25)

    @pytest.mark.parametrize("X", [-2.0, -0.7, 0.0, 0.4, 2.5, 6.0])
    @pytest.mark.parametrize("K0", [-20.0, -1.0])
    def test_against_closed_forms(self, X, K0):
        p, T = packet_for_centre(X, K0)
        pr = spacetime_remain_probability(p, T, check_regime=False)
        d = spacetime_decoherence(p, T, check_regime=False)
        ref_p, ref_d = _closed_forms(X, K0)
        assert pr.value == pytest.approx(ref_p, abs=1e-12)
        assert d.value.real == pytest.approx(ref_d, abs=1e-12)

    def test_limits(self):
        p, T = packet_for_centre(6.0, -20.0)
        assert spacetime_remain_probability(p, T).value == pytest.approx(1.0, abs=1e-3)
        assert abs(spacetime_decoherence(p, T).value) < 1e-6
        p, T = packet_for_centre(-6.0, -20.0)
        d = spacetime_decoherence(p, T, check_regime=False)
        assert d.value.real < -0.99 and not d.in_validated_range

    def test_origin_regression_anchor(self):
        p, T = packet_for_centre(0.0, -20.0)
        a = spacetime_remain_probability(p, T, check_regime=False).value
        b = spacetime_remain_probability(p, T, QuadratureSpec(1e-13, 1e-12), check_regime=False).value
        assert a == pytest.approx(b, abs=1e-12)
        assert a == pytest.approx(0.5, abs=1e-12)

    def test_lp_without_md(self):
        found = False
        for X in np.linspace(-2, 6, 50):
            p, T = packet_for_centre(X, -20.0)
            pr = spacetime_remain_probability(p, T, check_regime=False).value
            d = spacetime_decoherence(p, T, check_regime=False).value
            found |= 0 <= pr <= 1 and abs(d.real) > 0.05
        assert found

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellsplit.wavepacket import (
    EmptyWindow,
    GaussianPacket,
    OverlapAlpha,
    TabulatedPacket,
    alpha_finite_window,
    alpha_infinite_window,
    read_packet_csv,
    simpson_weights,
    temporal_distinguishability,
)

# Frozen overlap values for identical unit-width Gaussians delayed by dt,
# computed with a 2^20-point trapezoid oracle over a 24-sigma span; they match
# the analytic decay exp(-dt^2) to 14 digits.
FROZEN_GAUSSIAN_OVERLAPS = {
    0.3: 0.9139311852712282,
    0.7: 0.6126263941844161,
    1.5: 0.10539922456186433,
}


def tabulated_gaussian(center=0.0, width=1.0, delay=0.0, n=801, span=8.0):
    grid = np.linspace(center - span * width, center + span * width, n)
    amp = GaussianPacket(center, width, delay).amplitude(grid)
    return TabulatedPacket.normalized(grid, amp)[0]


class TestSimpsonWeights:
    def test_uniform_matches_classic_pattern(self):
        x = np.linspace(0.0, 1.0, 5)
        w = simpson_weights(x)
        h = 0.25
        assert np.allclose(w, h / 3.0 * np.array([1, 4, 2, 4, 1]))

    def test_integrates_cubics_exactly(self):
        x = np.array([0.0, 0.3, 0.55, 1.1, 1.4])  # non-uniform, even interval count
        w = simpson_weights(x)
        for k in range(3):
            assert np.sum(w * x**k) == pytest.approx(1.4 ** (k + 1) / (k + 1), abs=1e-12)

    def test_odd_interval_count_converges(self):
        x = np.linspace(0.0, np.pi, 1002)  # odd number of intervals
        assert np.sum(simpson_weights(x) * np.sin(x)) == pytest.approx(2.0, abs=1e-6)


class TestPackets:
    def test_gaussian_requires_positive_width(self):
        with pytest.raises(ValueError):
            GaussianPacket(0.0, -1.0)

    def test_gaussian_unit_norm(self):
        p = GaussianPacket(2.0, 0.5, delay=1.0)
        grid = np.linspace(*p.support(), 4001)
        norm = np.sum(simpson_weights(grid) * np.abs(p.amplitude(grid)) ** 2)
        assert norm == pytest.approx(1.0, abs=1e-10)

    def test_time_amplitude_matches_numeric_transform(self):
        # Truncating the transform at the 8-sigma support cuts an amplitude
        # tail of order exp(-16); the comparison tolerance reflects that.
        p = GaussianPacket(3.0, 1.2, delay=0.4)
        grid = np.linspace(*p.support(), 20001)
        w = simpson_weights(grid)
        for t in (-0.5, 0.0, 0.4, 1.3):
            numeric = np.sum(w * p.amplitude(grid) * np.exp(1j * grid * t))
            assert abs(p.time_amplitude(t) - numeric) <= 1e-6

    def test_tabulated_rejects_unnormalized(self):
        grid = np.linspace(-4, 4, 101)
        with pytest.raises(ValueError):
            TabulatedPacket(grid, np.exp(-(grid**2)))

    def test_tabulated_rejects_decreasing_grid(self):
        with pytest.raises(ValueError):
            TabulatedPacket(np.array([0.0, 1.0, 0.5]), np.array([1.0, 1.0, 1.0]))

    def test_tabulated_normalized_factor(self):
        grid = np.linspace(-5, 5, 201)
        raw = np.exp(-(grid**2) / 2.0) * (1 + 0j)
        packet, factor = TabulatedPacket.normalized(grid, raw)
        norm = np.sum(simpson_weights(grid) * np.abs(packet.amp) ** 2)
        assert norm == pytest.approx(1.0, abs=1e-12)
        raw_norm = np.sum(simpson_weights(grid) * np.abs(raw) ** 2)
        assert factor == pytest.approx(1.0 / np.sqrt(raw_norm), abs=1e-12)

    def test_tabulated_zero_outside_support(self):
        p = tabulated_gaussian()
        assert p.amplitude(np.array([100.0]))[0] == 0.0


class TestAlphaInfinite:
    def test_self_overlap_is_one(self):
        p = GaussianPacket(1.0, 0.7, delay=0.2)
        a = alpha_infinite_window(p, p)
        assert abs(a.alpha - 1.0) <= 1e-12
        assert a.alpha_sq == pytest.approx(1.0, abs=1e-10)

    def test_self_overlap_tabulated(self):
        p = tabulated_gaussian(n=1201)
        assert alpha_infinite_window(p, p).alpha_sq == pytest.approx(1.0, abs=1e-10)

    def test_disjoint_supports_give_zero(self):
        p1 = tabulated_gaussian(center=-30.0, n=401)
        p2 = tabulated_gaussian(center=30.0, n=401)
        assert alpha_infinite_window(p1, p2).alpha == 0.0

    @pytest.mark.parametrize("dt", sorted(FROZEN_GAUSSIAN_OVERLAPS))
    def test_delayed_gaussian_frozen_values(self, dt):
        psi = GaussianPacket(0.0, 1.0, delay=0.0)
        phi = GaussianPacket(0.0, 1.0, delay=dt)
        a = alpha_infinite_window(psi, phi)
        assert a.alpha_sq == pytest.approx(FROZEN_GAUSSIAN_OVERLAPS[dt], abs=1e-10)

    def test_against_dense_quadrature_oracle(self):
        # Independent oracle: plain trapezoid at ten times the span resolution.
        psi = GaussianPacket(0.5, 1.3, delay=-0.2)
        phi = GaussianPacket(-0.1, 0.8, delay=0.5)
        lo = min(psi.support()[0], phi.support()[0])
        hi = max(psi.support()[1], phi.support()[1])
        grid = np.linspace(lo, hi, 2**18 + 1)
        oracle = np.trapezoid(phi.amplitude(grid) * np.conj(psi.amplitude(grid)), grid)
        a = alpha_infinite_window(psi, phi)
        assert abs(a.alpha - oracle) <= 1e-9

    def test_monotone_decay_in_delay(self):
        psi = GaussianPacket(0.0, 1.0)
        values = [
            alpha_infinite_window(psi, GaussianPacket(0.0, 1.0, delay=dt)).alpha_sq
            for dt in np.linspace(0.0, 3.0, 16)
        ]
        assert values[0] == pytest.approx(1.0, abs=1e-10)
        assert all(a > b - 1e-12 for a, b in zip(values, values[1:]))

    def test_exchange_conjugation(self):
        psi = GaussianPacket(0.4, 1.0, delay=0.1)
        phi = GaussianPacket(-0.3, 1.5, delay=0.6)
        ab = alpha_infinite_window(psi, phi).alpha
        ba = alpha_infinite_window(phi, psi).alpha
        assert abs(ab - np.conj(ba)) <= 1e-10

    def test_mixed_kind_pair(self):
        # Piecewise-linear tabulation limits the agreement to the h^2 scale of
        # its own grid; 12001 points over 16 widths put that below 1e-6.
        g = GaussianPacket(0.0, 1.0)
        t = tabulated_gaussian(delay=0.7, n=12001)
        a = alpha_infinite_window(g, t)
        assert a.alpha_sq == pytest.approx(np.exp(-0.49), abs=1e-6)

    @given(st.floats(min_value=-np.pi, max_value=np.pi))
    @settings(max_examples=20, deadline=None)
    def test_global_phase_invariance(self, phase):
        grid = np.linspace(-8.0, 8.0, 1001)
        base = GaussianPacket(0.0, 1.0).amplitude(grid)
        p1 = TabulatedPacket.normalized(grid, base)[0]
        p2 = TabulatedPacket.normalized(grid, base * np.exp(1j * phase))[0]
        ref = GaussianPacket(0.0, 1.0, delay=0.4)
        a1 = alpha_infinite_window(ref, p1).alpha_sq
        a2 = alpha_infinite_window(ref, p2).alpha_sq
        assert a1 == pytest.approx(a2, abs=1e-12)


def nested_window_oracle(psi, phi, t, tau, n_t=129, n_w=1500):
    """Coarse triple-quadrature of the raw windowed double-time integrals."""

    def transform(packet, ts):
        lo, hi = packet.support()
        grid = np.linspace(lo, hi, n_w)
        amps = packet.amplitude(grid)
        out = np.empty(ts.size, dtype=complex)
        for i, tv in enumerate(ts):
            out[i] = np.trapezoid(amps * np.exp(1j * grid * tv), grid)
        return out

    ts = np.linspace(t - tau / 2.0, t + tau / 2.0, n_t)
    f_phi = transform(phi, ts)
    f_psi = transform(psi, ts)
    num = np.trapezoid(f_phi * np.conj(f_psi), ts)
    d_phi = np.trapezoid(np.abs(f_phi) ** 2, ts)
    d_psi = np.trapezoid(np.abs(f_psi) ** 2, ts)
    return num / np.sqrt(d_phi * d_psi)


class TestAlphaFiniteWindow:
    def test_identical_packets_any_window(self):
        p = GaussianPacket(2.0, 1.0, delay=0.3)
        for tau in (0.01, 1.0, 40.0):
            a = alpha_finite_window(p, p, t=0.3, tau=tau)
            assert a.alpha_sq == pytest.approx(1.0, abs=1e-12)

    def test_requires_positive_tau(self):
        p = GaussianPacket(0.0, 1.0)
        with pytest.raises(ValueError):
            alpha_finite_window(p, p, 0.0, 0.0)

    def test_wide_window_matches_infinite(self):
        psi = GaussianPacket(0.0, 1.0, delay=-0.25)
        phi = GaussianPacket(0.0, 1.0, delay=0.25)
        finite = alpha_finite_window(psi, phi, t=0.0, tau=50.0)
        infinite = alpha_infinite_window(psi, phi)
        assert abs(finite.alpha - infinite.alpha) <= 1e-6
        assert finite.alpha_sq == pytest.approx(infinite.alpha_sq, abs=1e-6)

    def test_ultrashort_window_erases_distinguishability(self):
        psi = GaussianPacket(0.0, 1.0, delay=-0.5)
        phi = GaussianPacket(0.0, 1.0, delay=0.5)
        a = alpha_finite_window(psi, phi, t=0.0, tau=1e-3)
        assert a.alpha_sq >= 1.0 - 1e-4

    def test_against_nested_oracle(self):
        psi = GaussianPacket(0.6, 1.0, delay=-0.3)
        phi = GaussianPacket(-0.4, 1.2, delay=0.5)
        a = alpha_finite_window(psi, phi, t=0.1, tau=3.0)
        oracle = nested_window_oracle(psi, phi, t=0.1, tau=3.0)
        assert abs(a.alpha - oracle) <= 1e-5

    def test_against_nested_oracle_tabulated(self):
        psi = tabulated_gaussian(n=901)
        phi = GaussianPacket(0.0, 1.0, delay=0.8)
        a = alpha_finite_window(psi, phi, t=0.4, tau=2.0)
        oracle = nested_window_oracle(psi, phi, t=0.4, tau=2.0)
        assert abs(a.alpha - oracle) <= 1e-5

    def test_monotone_in_delay_for_symmetric_window(self):
        values = []
        for dt in np.linspace(0.0, 2.0, 9):
            psi = GaussianPacket(0.0, 1.0, delay=-dt / 2.0)
            phi = GaussianPacket(0.0, 1.0, delay=dt / 2.0)
            values.append(alpha_finite_window(psi, phi, t=0.0, tau=8.0).alpha_sq)
        assert all(a > b - 1e-10 for a, b in zip(values, values[1:]))

    def test_exchange_conjugation_finite(self):
        psi = GaussianPacket(0.2, 1.0, delay=-0.3)
        phi = GaussianPacket(-0.1, 1.4, delay=0.4)
        ab = alpha_finite_window(psi, phi, t=0.0, tau=3.0).alpha
        ba = alpha_finite_window(phi, psi, t=0.0, tau=3.0).alpha
        assert abs(ab - np.conj(ba)) <= 1e-10

    def test_empty_window(self):
        psi = GaussianPacket(0.0, 1.0, delay=0.0)
        phi = GaussianPacket(0.0, 1.0, delay=0.1)
        with pytest.raises(EmptyWindow):
            alpha_finite_window(psi, phi, t=500.0, tau=1.0)

    def test_one_sided_support_is_empty(self):
        psi = GaussianPacket(0.0, 1.0, delay=0.0)
        phi = GaussianPacket(0.0, 1.0, delay=60.0)
        with pytest.raises(EmptyWindow):
            alpha_finite_window(psi, phi, t=60.0, tau=2.0)


class TestOverlapAlpha:
    def test_bounds_enforced(self):
        with pytest.raises(ValueError):
            OverlapAlpha(1.1)
        with pytest.raises(ValueError):
            OverlapAlpha.from_alpha_sq(1.5)

    def test_clamps_rounding_overshoot(self):
        a = OverlapAlpha(1.0 + 4e-11)
        assert a.alpha_sq == 1.0

    def test_distinguishability(self):
        assert temporal_distinguishability(OverlapAlpha(1.0)) == 0.0
        assert temporal_distinguishability(OverlapAlpha(0.0)) == 1.0
        assert temporal_distinguishability(0.5) == pytest.approx(0.5)


class TestCsvReader:
    def test_round_trip(self, tmp_path):
        grid = np.linspace(-6, 6, 301)
        amp = np.exp(-(grid**2) / 4.0) * np.exp(0.3j * grid)
        path = tmp_path / "packet.csv"
        lines = ["omega,re,im"] + [f"{w},{a.real},{a.imag}" for w, a in zip(grid, amp)]
        path.write_text("\n".join(lines) + "\n")
        packet, factor = read_packet_csv(path)
        assert factor > 0.0
        norm = np.sum(simpson_weights(packet.omega) * np.abs(packet.amp) ** 2)
        assert norm == pytest.approx(1.0, abs=1e-12)

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1.0,0.0\n1.0,1.0,0.0\n")
        with pytest.raises(ValueError):
            read_packet_csv(path)

    def test_short_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("omega,re,im\n0.0,1.0\n")
        with pytest.raises(ValueError):
            read_packet_csv(path)

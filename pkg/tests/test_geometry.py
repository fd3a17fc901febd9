import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from active_ris.errors import DimensionError
from active_ris.geometry import (
    AngleSet,
    PhaseConfig,
    aligned_phases,
    angle_gains,
    f_scalar,
    f_scalar_batch,
    geometry_phase,
    quantize_phases,
    steering_vector,
)

TWO_PI = 2 * np.pi


class TestSteeringVector:
    def test_single_element(self):
        assert steering_vector(1, 0.3, 1.2) == pytest.approx(np.array([1.0 + 0j]))

    def test_four_elements_broadside_azimuth(self):
        # az = el = pi/2: sin*sin = 1, cos = 0 -> exp(j*pi*x)
        v = steering_vector(4, np.pi / 2, np.pi / 2)
        assert np.allclose(v, [1, 1, -1, -1])

    def test_four_elements_zero_elevation(self):
        # el = 0: sin term vanishes, cos = 1 -> exp(j*pi*y)
        v = steering_vector(4, 0.7, 0.0)
        assert np.allclose(v, [1, -1, 1, -1])

    def test_first_entry_is_exactly_one(self):
        v = steering_vector(9, 1.1, 0.4)
        assert v[0] == 1.0 + 0.0j

    def test_index_map_x_outer_y_inner(self):
        # entry(x, y) must sit at n = 3x + y for a 9-element array
        az, el = 0.9, 0.5
        v = steering_vector(9, az, el)
        s, c = np.sin(az) * np.sin(el), np.cos(el)
        for x in range(3):
            for y in range(3):
                expected = np.exp(1j * np.pi * (x * s + y * c))
                assert v[3 * x + y] == pytest.approx(expected)

    @pytest.mark.parametrize("X", [2, 3, 8, 12, 0, -4])
    def test_rejects_non_square_sizes(self, X):
        with pytest.raises(DimensionError):
            steering_vector(X, 0.0, 0.0)

    @given(X=st.sampled_from([1, 4, 9, 16, 25]),
           az=st.floats(0, TWO_PI), el=st.floats(0, TWO_PI))
    @settings(max_examples=60, deadline=None)
    def test_unit_modulus(self, X, az, el):
        v = steering_vector(X, az, el)
        assert np.all(np.abs(np.abs(v) - 1.0) < 1e-12)


class TestFScalar:
    def test_all_aligned_at_zero_geometry(self):
        phases = PhaseConfig(np.zeros(16))
        assert f_scalar(phases, 0.0, 0.0) == pytest.approx(16 + 0j)

    def test_exact_cancellation_reaches_bound(self):
        k, q = 0.37, -0.81
        phases = aligned_phases(k, q, 25, bits=0)
        assert abs(f_scalar(phases, k, q)) == pytest.approx(25.0, abs=1e-9)

    def test_matches_term_by_term_hand_sum(self):
        # independent four-term oracle, summed explicitly
        rng = np.random.default_rng(1234)
        k, q = rng.uniform(-1, 1, size=2)
        thetas = rng.uniform(0, TWO_PI, size=4)
        acc = 0.0 + 0.0j
        for x in (0, 1):
            for y in (0, 1):
                n = 2 * x + y
                acc += complex(np.exp(1j * (np.pi * (x * k + y * q) + thetas[n])))
        got = f_scalar(PhaseConfig(thetas), k, q)
        assert got == pytest.approx(acc, rel=1e-12)

    @given(seed=st.integers(0, 2**32 - 1),
           k=st.floats(-2, 2), q=st.floats(-2, 2))
    @settings(max_examples=60, deadline=None)
    def test_bound(self, seed, k, q):
        thetas = np.random.default_rng(seed).uniform(0, TWO_PI, size=9)
        assert abs(f_scalar(PhaseConfig(thetas), k, q)) <= 9 + 1e-9

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_conjugate_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        k, q = rng.uniform(-1, 1, size=2)
        thetas = rng.uniform(0, TWO_PI, size=16)
        f_pos = f_scalar(PhaseConfig(thetas), k, q)
        f_neg = f_scalar_batch(-thetas[None, :], -k, -q)[0]
        assert f_neg == pytest.approx(np.conj(f_pos), rel=1e-12, abs=1e-12)

    def test_rejects_non_square_length(self):
        with pytest.raises(DimensionError):
            f_scalar(PhaseConfig(np.zeros(8)), 0.0, 0.0)


class TestAngleGains:
    def test_all_zero_angles(self):
        a = AngleSet(**{f: 0.0 for f in AngleSet.__dataclass_fields__})
        assert angle_gains(a, "up") == (0.0, 0.0)
        assert angle_gains(a, "down") == (0.0, 0.0)

    def test_identical_arrival_departure(self):
        a = AngleSet(up_user_ris_az=0.7, up_user_ris_el=1.1,
                     up_ris_bs_az=0.7, up_ris_bs_el=1.1)
        k, q = angle_gains(a, "up")
        assert k == pytest.approx(0.0) and q == pytest.approx(0.0)

    def test_quarter_turn_sign_convention(self):
        a = AngleSet(up_user_ris_az=np.pi / 2, up_user_ris_el=np.pi / 2,
                     up_ris_bs_az=0.0, up_ris_bs_el=0.0)
        k, q = angle_gains(a, "up")
        assert k == pytest.approx(1.0)
        assert q == pytest.approx(-1.0)  # cos(pi/2) - cos(0)

    def test_downlink_uses_ris_user_departure(self):
        a = AngleSet()
        k, q = angle_gains(a, "down")
        expect_k = (np.sin(a.down_bs_ris_az) * np.sin(a.down_bs_ris_el)
                    - np.sin(a.down_ris_user_az) * np.sin(a.down_ris_user_el))
        expect_q = np.cos(a.down_bs_ris_el) - np.cos(a.down_ris_user_el)
        assert (k, q) == pytest.approx((expect_k, expect_q))

    def test_bad_link_rejected(self):
        with pytest.raises(ValueError):
            angle_gains(AngleSet(), "sideways")

    def test_angles_normalized_to_principal_range(self):
        a = AngleSet(up_bs_az=-np.pi / 2)
        assert 0.0 <= a.up_bs_az < TWO_PI
        assert a.up_bs_az == pytest.approx(3 * np.pi / 2)


class TestAlignedPhases:
    def test_zero_geometry_gives_zero_phases(self):
        for bits in (0, 1, 3):
            pc = aligned_phases(0.0, 0.0, 9, bits)
            assert np.all(pc.thetas == 0.0)

    def test_continuous_alignment_is_exact(self):
        pc = aligned_phases(0.61, 0.13, 16, 0)
        assert abs(f_scalar(pc, 0.61, 0.13)) == pytest.approx(16.0, abs=1e-9)

    def test_one_bit_hand_enumeration(self):
        # targets are [0, 0, 3*pi/2, 3*pi/2]; the 3*pi/2 midpoint tie
        # between grid points pi and 2*pi resolves to the smaller index.
        pc = aligned_phases(0.5, 0.0, 4, 1)
        assert np.allclose(pc.thetas, [0.0, 0.0, np.pi, np.pi])
        assert pc.bits == 1

    @given(bits=st.integers(1, 6), seed=st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_quantized_output_on_grid(self, bits, seed):
        rng = np.random.default_rng(seed)
        k, q = rng.uniform(-1.5, 1.5, size=2)
        pc = aligned_phases(k, q, 16, bits)
        step = TWO_PI / (1 << bits)
        idx = pc.thetas / step
        assert np.allclose(idx, np.round(idx), atol=1e-9)
        assert np.all(pc.thetas < TWO_PI) and np.all(pc.thetas >= 0.0)

    @pytest.mark.parametrize("k,q,N", [(0.37, 0.21, 16), (0.179, 0.207, 25),
                                       (-0.6, 0.9, 9)])
    def test_gain_improves_with_resolution(self, k, q, N):
        gains = [abs(f_scalar(aligned_phases(k, q, N, b), k, q))
                 for b in (1, 2, 3, 8)]
        assert all(g2 >= g1 - 1e-12 for g1, g2 in zip(gains, gains[1:]))
        assert gains[-1] == pytest.approx(N, rel=1e-3)


class TestQuantization:
    def test_midpoint_rounds_to_smaller_index(self):
        # 1-bit grid {0, pi}: pi/2 is the 0/pi midpoint -> 0,
        # 3*pi/2 is the pi/2pi midpoint -> pi
        out = quantize_phases(np.array([np.pi / 2, 3 * np.pi / 2]), 1)
        assert np.allclose(out, [0.0, np.pi])

    def test_wraps_into_principal_range(self):
        out = quantize_phases(np.array([TWO_PI - 1e-3]), 2)
        assert out[0] == 0.0

    def test_bits_zero_passthrough_mod_2pi(self):
        out = quantize_phases(np.array([-0.5, 7.0]), 0)
        assert np.allclose(out, [TWO_PI - 0.5, 7.0 - TWO_PI])


class TestPhaseConfig:
    def test_off_grid_phases_rejected(self):
        with pytest.raises(ValueError):
            PhaseConfig(np.array([0.1, 0.0, 0.0, 0.0]), bits=1)

    def test_grid_phases_accepted(self):
        pc = PhaseConfig(np.array([0.0, np.pi, 0.0, np.pi]), bits=1)
        assert len(pc) == 4

    def test_continuous_sentinel_accepts_anything(self):
        PhaseConfig(np.array([0.123, 5.4, 2.2, 0.9]), bits=0)

    def test_non_square_length_rejected(self):
        with pytest.raises(DimensionError):
            PhaseConfig(np.zeros(5), bits=0)


def test_geometry_phase_matches_steering_conjugate_product():
    # f built from geometry_phase must agree with the explicit
    # departure-conjugate times arrival steering products
    N = 16
    az_r, el_r, az_t, el_t = 0.9, 0.7, 0.3, 1.4
    k = np.sin(az_r) * np.sin(el_r) - np.sin(az_t) * np.sin(el_t)
    q = np.cos(el_r) - np.cos(el_t)
    rng = np.random.default_rng(5)
    thetas = rng.uniform(0, TWO_PI, N)
    direct = f_scalar(PhaseConfig(thetas), k, q)
    a_r = steering_vector(N, az_r, el_r)
    a_t = steering_vector(N, az_t, el_t)
    brute = np.sum(a_t.conj() * np.exp(1j * thetas) * a_r)
    assert direct == pytest.approx(brute, rel=1e-10)

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpps import chaos
from mpps.chaos import MapKind, SubKey
from mpps.errors import ParameterError

states = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
params = st.floats(min_value=0.0, max_value=4.0, allow_nan=False)
kinds = st.sampled_from(list(MapKind))


def _mp_cls(x, mu):
    x, mu = mpmath.mpf(x), mpmath.mpf(mu)
    return (mu * x * (1 - x) + (4 - mu) / 4 * mpmath.sin(mpmath.pi * x)) % 1


def _mp_clt(x, mu):
    x, mu = mpmath.mpf(x), mpmath.mpf(mu)
    tent = x if x < 0.5 else 1 - x
    return (mu * x * (1 - x) + (4 - mu) / 2 * tent) % 1


class TestMaps:
    def test_cls_matches_extended_precision(self):
        with mpmath.workdps(50):
            ref = _mp_cls(0.11, 3.91)
        assert chaos.iterate_cls(0.11, 3.91) == pytest.approx(float(ref), abs=1e-15)
        assert chaos.iterate_cls(0.11, 3.91) == pytest.approx(0.390410603205519, abs=1e-15)

    def test_clt_matches_extended_precision(self):
        with mpmath.workdps(50):
            ref = _mp_clt(0.13, 3.93)
        assert chaos.iterate_clt(0.13, 3.93) == pytest.approx(float(ref), abs=1e-15)
        assert chaos.iterate_clt(0.13, 3.93) == pytest.approx(0.449033, abs=1e-15)

    @given(st.floats(0.0, 1.0), params)
    @settings(max_examples=200)
    def test_double_tracks_mpmath(self, x, mu):
        with mpmath.workdps(40):
            ref_s, ref_t = float(_mp_cls(x, mu)), float(_mp_clt(x, mu))
        # compare on the circle: a result of 1 - eps and one of 0 are neighbours
        for got, ref in ((chaos.iterate_cls(x, mu), ref_s), (chaos.iterate_clt(x, mu), ref_t)):
            d = abs(got - ref)
            assert min(d, 1 - d) < 1e-12

    @pytest.mark.parametrize("mu", [0.0, 1.5, 3.7, 4.0])
    def test_fixed_points(self, mu):
        assert chaos.iterate_cls(0.0, mu) == 0.0
        assert chaos.iterate_cls(1.0, mu) == 0.0
        assert chaos.iterate_clt(0.0, mu) == 0.0
        assert chaos.iterate_clt(1.0, mu) == 0.0

    @pytest.mark.parametrize("mu", [3.5, 3.9, 4.0])
    def test_clt_half_wraps_to_zero(self, mu):
        # mu/4 + (4 - mu)/4 = 1, which reduces to 0
        assert chaos.iterate_clt(0.5, mu) == 0.0

    @given(kinds, states, params)
    def test_closure(self, kind, x, mu):
        y = chaos.iterate(kind, x, mu)
        assert 0.0 <= y < 1.0

    @given(kinds, states, params)
    def test_mirror_symmetry(self, kind, x, mu):
        d = abs(chaos.iterate(kind, x, mu) - chaos.iterate(kind, 1.0 - x, mu))
        assert min(d, 1.0 - d) <= 1e-9

    @pytest.mark.parametrize("x, mu", [(-0.1, 3.9), (1.5, 3.9), (0.3, -1.0), (0.3, 4.01)])
    def test_domain_errors(self, x, mu):
        with pytest.raises(ParameterError):
            chaos.iterate_cls(x, mu)
        with pytest.raises(ParameterError):
            chaos.iterate_clt(x, mu)


class TestOrbit:
    def test_transient_zero_starts_at_seed(self):
        orbit = chaos.generate_orbit(MapKind.CLS, SubKey(0.3, 3.8, 0), 2)
        assert orbit[0] == 0.3
        assert orbit[1] == chaos.iterate_cls(0.3, 3.8)

    def test_first_state_is_after_transient_steps(self):
        x = 0.3
        for _ in range(2):
            x = chaos.iterate_clt(x, 3.8)
        assert chaos.generate_orbit(MapKind.CLT, SubKey(0.3, 3.8, 2), 1)[0] == x

    def test_worked_s2(self):
        orbit = chaos.generate_orbit(MapKind.CLT, SubKey(0.12, 3.92, 500), 6)
        assert chaos.quantize_orbit(orbit, 8).tolist() == [4, 5, 5, 1, 7, 6]

    def test_worked_s1(self):
        orbit = chaos.generate_orbit(MapKind.CLS, SubKey(0.11, 3.91, 500), 12)
        assert chaos.sort_index(orbit).tolist() == [9, 1, 10, 2, 11, 5, 7, 3, 12, 6, 4, 8]

    @pytest.mark.parametrize(
        "pair, expected",
        [
            ((0.14, 3.94), [99, 172, 189, 130]),
            ((0.15, 3.95), [155, 45, 47, 189]),
            ((0.16, 3.96), [193, 122, 164, 238]),
        ],
    )
    def test_worked_byte_streams(self, pair, expected):
        orbit = chaos.generate_orbit(MapKind.CLS, SubKey(*pair, 500), 4)
        assert chaos.quantize_orbit(orbit, 256).tolist() == expected

    def test_worked_s3_parity(self):
        orbit = chaos.generate_orbit(MapKind.CLT, SubKey(0.13, 3.93, 500), 16)
        assert chaos.binarize_orbit(orbit, "parity").tolist() == [0, 0, 1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0]

    def test_threshold_binarization_differs_for_worked_key(self):
        orbit = chaos.generate_orbit(MapKind.CLT, SubKey(0.13, 3.93, 500), 16)
        assert chaos.binarize_orbit(orbit, "threshold").tolist() == (orbit > 0.5).astype(int).tolist()

    @given(kinds, st.floats(0.0, 1.0), st.floats(3.5, 4.0), st.integers(0, 50), st.integers(1, 40))
    @settings(max_examples=50)
    def test_deterministic_and_closed(self, kind, y0, mu, t, n):
        key = SubKey(y0, mu, t)
        a = chaos.generate_orbit(kind, key, n)
        assert a.shape == (n,)
        assert np.array_equal(a, chaos.generate_orbit(kind, key, n))
        assert np.all((a >= 0) & (a < 1))

    def test_rejects_bad_count_and_key(self):
        with pytest.raises(ParameterError):
            chaos.generate_orbit(MapKind.CLS, SubKey(0.2, 3.9), 0)
        with pytest.raises(ParameterError):
            SubKey(0.2, 3.9, -1)
        with pytest.raises(ParameterError):
            SubKey(1.2, 3.9)


class TestQuantizers:
    def test_sort_index_examples(self):
        assert chaos.sort_index([0.3, 0.1, 0.2]).tolist() == [2, 3, 1]
        assert chaos.sort_index([0.1, 0.2, 0.3]).tolist() == [1, 2, 3]
        # ties: the smaller index comes first
        assert chaos.sort_index([0.5, 0.2, 0.5]).tolist() == [2, 1, 3]

    @given(st.lists(st.floats(0.0, 0.999999), min_size=1, max_size=50))
    def test_sort_index_is_ascending_permutation(self, xs):
        s = chaos.sort_index(xs)
        assert sorted(s.tolist()) == list(range(1, len(xs) + 1))
        picked = np.asarray(xs)[s - 1]
        assert np.all(np.diff(picked) >= 0)

    def test_quantize_examples(self):
        assert chaos.quantize_mod(0.0, 8) == 0
        # 99999999999999 = 390624999999 * 256 + 255
        assert 99999999999999 % 256 == 255
        assert chaos.quantize_mod(0.99999999999999, 256) == 255

    @given(st.floats(0.0, 1.0, exclude_max=True), st.sampled_from([2, 8, 256]))
    def test_vector_and_scalar_quantizers_agree(self, x, m):
        assert chaos.quantize_orbit([x], m)[0] == chaos.quantize_mod(x, m)
        assert chaos.quantize_mod(x, m) == math.floor(x * 1e14) % m

    def test_quantize_domain(self):
        with pytest.raises(ParameterError):
            chaos.quantize_mod(1.0, 8)
        with pytest.raises(ParameterError):
            chaos.quantize_orbit([0.2, -0.1], 8)

    def test_binarize_boundary(self):
        assert chaos.binarize(0.2) == 0
        assert chaos.binarize(0.5) == 0
        assert chaos.binarize(0.5000001) == 1
        assert chaos.binarize_orbit([0.2, 0.5, 0.7], "threshold").tolist() == [0, 0, 1]

    def test_binarize_unknown_method(self):
        with pytest.raises(ParameterError):
            chaos.binarize_orbit([0.2], "sign")

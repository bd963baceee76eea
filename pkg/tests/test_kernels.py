import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonic_capacity.errors import DomainError
from bosonic_capacity.kernels import SMALL_X, DetectionKind, g, g_inverse, shannon_term

mpmath.mp.dps = 60


def g_mp(x):
    # the two terms cancel to ~log2(x); carry enough digits to survive x=1e100
    with mpmath.workdps(250):
        x = mpmath.mpf(x)
        if x == 0:
            return mpmath.mpf(0)
        return (x + 1) * mpmath.log(x + 1, 2) - x * mpmath.log(x, 2)


class TestG:
    def test_zero(self):
        assert g(0.0) == 0.0

    def test_one(self):
        assert g(1.0) == pytest.approx(2.0, rel=1e-15)

    def test_three_against_high_precision(self):
        expected = float(g_mp(3))
        assert expected == pytest.approx(3.2451124978365313, rel=1e-15)
        assert g(3.0) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("x", [1e-300, 1e-20, 1e-9, 9.999e-9, 1e-8, 1.0001e-8, 1e-6, 1e-3,
                                   0.1, 0.5, 7.0, 123.4, 1e5, 1e10, 1e15, 1e100])
    def test_relative_accuracy(self, x):
        assert g(x) == pytest.approx(float(g_mp(x)), rel=1e-13)

    def test_continuous_across_branch(self):
        below = g(np.nextafter(SMALL_X, 0.0))
        above = g(SMALL_X)
        assert abs(above - below) <= 1e-13 * above

    def test_array_input(self):
        xs = np.array([[0.0, 1.0], [3.0, 1e-10]])
        out = g(xs)
        assert out.shape == xs.shape
        assert out[0, 1] == pytest.approx(2.0)

    @pytest.mark.parametrize("bad", [-1e-12, -1.0, math.inf, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            g(bad)

    def test_large_x_ratio_to_log(self):
        ratio = g(1e6) / math.log2(1e6)
        assert 1.0 <= ratio <= 1.01

    @pytest.mark.parametrize("x", [1e6, 1e12, 1e50])
    def test_large_x_offset_from_log(self, x):
        # g(x) - log2(x) -> log2(e); the ratio to log2(x) converges only logarithmically
        offset = g(x) - math.log2(x)
        assert offset == pytest.approx(math.log2(math.e), rel=1e-6)

    @given(st.floats(1e-9, 1e9), st.floats(1e-9, 1e9))
    def test_increasing_and_concave(self, a, b):
        a, b = min(a, b), max(a, b)
        if b <= a * (1 + 1e-6):
            return
        assert g(a) < g(b)
        assert g(0.5 * (a + b)) > 0.5 * (g(a) + g(b))

    def test_dominates_heterodyne_kernel(self):
        xs = np.geomspace(1e-6, 1e6, 2001)
        assert np.all(g(xs) >= np.log2(1 + xs))


class TestShannonTerm:
    def test_zero(self):
        assert shannon_term(0.0, 1.0) == 0.0

    def test_heterodyne_unit(self):
        assert shannon_term(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_homodyne(self):
        assert shannon_term(0.75, 0.5) == pytest.approx(1.0, rel=1e-15)

    def test_negative(self):
        with pytest.raises(DomainError):
            shannon_term(-1.0, 1.0)

    def test_bad_xi(self):
        with pytest.raises(DomainError):
            shannon_term(1.0, 0.7)


class TestGInverse:
    def test_zero(self):
        assert g_inverse(0.0) == 0.0

    def test_two(self):
        assert g_inverse(2.0) == pytest.approx(1.0, rel=1e-12)

    def test_one_by_forward_evaluation(self):
        x = g_inverse(1.0)
        assert g(x) == pytest.approx(1.0, rel=1e-10)
        assert 0 < x < 1

    @settings(max_examples=200)
    @given(st.floats(1e-3, 30.0))
    def test_round_trip(self, c):
        assert g(g_inverse(c)) == pytest.approx(c, rel=1e-9)

    @pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan, 2000.0])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            g_inverse(bad)


class TestDetectionKind:
    def test_xi(self):
        assert DetectionKind.HETERODYNE.xi == 1.0
        assert DetectionKind.HOMODYNE.xi == 0.5
        assert DetectionKind.HOLEVO.xi is None

    @pytest.mark.parametrize("text,kind", [
        ("holevo", DetectionKind.HOLEVO), ("het", DetectionKind.HETERODYNE),
        ("Homodyne", DetectionKind.HOMODYNE), (" hom ", DetectionKind.HOMODYNE),
    ])
    def test_parse(self, text, kind):
        assert DetectionKind.parse(text) is kind

    def test_parse_unknown(self):
        with pytest.raises(DomainError):
            DetectionKind.parse("photon-counting")

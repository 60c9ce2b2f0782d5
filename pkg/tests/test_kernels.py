import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import airy, erfc

from srvm.errors import CapacityError, InvalidInputError
from srvm.kernels import (
    KernelSpec,
    data_bounds,
    design_matrix,
    eval_kernel,
    expand_multinomial,
    multinomial_features,
    sample_anchors,
)

RADIAL = [
    KernelSpec.gaussian(1.3),
    KernelSpec.exponential(0.7),
    KernelSpec.erfc(1.1),
    KernelSpec.airy(0.9),
    KernelSpec.fermi(2.0),
]

vec3 = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)


class TestEvalKernel:
    def test_gaussian_zero_distance(self):
        x = np.array([0.3, -1.2])
        assert eval_kernel(KernelSpec.gaussian(0.5), x, x) == 1.0

    @pytest.mark.parametrize("q", [0.1, 1.0, 7.0])
    def test_fermi_zero_distance(self, q):
        x = np.array([1.0, 2.0])
        assert eval_kernel(KernelSpec.fermi(q), x, x) == 0.5

    def test_exponential_unit(self):
        assert eval_kernel(KernelSpec.exponential(1.0), np.array([0.0]), np.array([1.0])) == pytest.approx(
            0.36787944, abs=1e-8
        )

    def test_formulas(self):
        x, chi = np.array([0.2, 0.5, -1.0]), np.array([1.0, -0.5, 0.0])
        r = np.linalg.norm(x - chi)
        assert eval_kernel(KernelSpec.gaussian(2.0), x, chi) == pytest.approx(math.exp(-r * r / 8))
        assert eval_kernel(KernelSpec.exponential(2.0), x, chi) == pytest.approx(math.exp(-r / 2))
        assert eval_kernel(KernelSpec.erfc(2.0), x, chi) == pytest.approx(erfc(r / 2))
        assert eval_kernel(KernelSpec.airy(2.0), x, chi) == pytest.approx(airy(2 * r)[0], abs=1e-10)
        assert eval_kernel(KernelSpec.fermi(2.0), x, chi) == pytest.approx(1 / (1 + math.exp(2 * r)))

    def test_default_gaussian_width(self):
        x, chi = np.zeros(4), np.ones(4)
        # sigma = sqrt(4) = 2, |x - chi|^2 = 4
        assert eval_kernel(KernelSpec.gaussian(), x, chi) == pytest.approx(math.exp(-0.5))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            eval_kernel(KernelSpec.gaussian(1.0), np.zeros(2), np.zeros(3))

    def test_multinomial_rejected(self):
        with pytest.raises(InvalidInputError):
            eval_kernel(KernelSpec.multinomial([1]), np.zeros(1), np.zeros(1))

    @settings(max_examples=100, deadline=None)
    @given(vec3, vec3)
    def test_symmetry(self, x, chi):
        for spec in RADIAL:
            assert eval_kernel(spec, x, chi) == eval_kernel(spec, chi, x)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 4), st.floats(1e-3, 4))
    def test_monotone_decreasing(self, r, dr):
        for spec in RADIAL[:3] + RADIAL[4:]:
            near = eval_kernel(spec, np.array([0.0]), np.array([r]))
            far = eval_kernel(spec, np.array([0.0]), np.array([r + dr]))
            # strict in exact arithmetic; both may underflow to 0 far out
            assert far < near or near == 0.0

    @settings(max_examples=100, deadline=None)
    @given(vec3, vec3)
    def test_ranges(self, x, chi):
        for spec in RADIAL[:3]:
            val = eval_kernel(spec, x, chi)
            assert 0 <= val <= 1
        f = eval_kernel(KernelSpec.fermi(1.0), x, chi)
        assert 0 < f <= 0.5

    def test_ranges_strictly_positive_nearby(self):
        for spec in RADIAL[:3]:
            assert eval_kernel(spec, np.zeros(2), np.array([0.5, 0.5])) > 0


class TestSpecValidation:
    @pytest.mark.parametrize("width", [0.0, -1.0, float("inf"), float("nan")])
    def test_bad_width(self, width):
        with pytest.raises(InvalidInputError):
            KernelSpec.gaussian(width)

    def test_bad_degrees(self):
        with pytest.raises(InvalidInputError):
            KernelSpec.multinomial([-1, 2])

    def test_per_feature_needs_radial(self):
        with pytest.raises(InvalidInputError):
            KernelSpec.per_feature(KernelSpec.multinomial([1]))

    def test_unknown_family(self):
        with pytest.raises(InvalidInputError):
            KernelSpec("pade", 1.0)

    @pytest.mark.parametrize(
        "spec",
        RADIAL + [KernelSpec.gaussian(), KernelSpec.multinomial([2, 3]), KernelSpec.per_feature(KernelSpec.erfc(0.5))],
    )
    def test_dict_roundtrip(self, spec):
        assert KernelSpec.from_dict(spec.to_dict()) == spec


class TestMultinomial:
    def test_constant(self):
        np.testing.assert_array_equal(expand_multinomial([0, 0], [3.0, 4.0]), [1.0])

    def test_powers(self):
        np.testing.assert_array_equal(expand_multinomial([3], [2.0]), [1, 2, 4, 8])

    def test_mixed_radix_order(self):
        np.testing.assert_array_equal(expand_multinomial([1, 1], [2.0, 3.0]), [1, 3, 2, 6])

    def test_cap(self):
        with pytest.raises(CapacityError) as err:
            expand_multinomial([10] * 5, np.ones(5))
        assert err.value.required == 11 ** 5
        assert "161051" in str(err.value)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 4), min_size=1, max_size=4))
    def test_column_count_and_brute_force(self, degrees):
        rng = np.random.default_rng(len(degrees))
        x = rng.uniform(-1, 1, len(degrees))
        got = expand_multinomial(degrees, x)
        assert got.size == int(np.prod([n + 1 for n in degrees]))
        # brute force in the same mixed-radix order
        import itertools

        ref = [np.prod(x ** np.array(m)) for m in itertools.product(*[range(n + 1) for n in degrees])]
        np.testing.assert_allclose(got, ref)


class TestAnchors:
    def test_degenerate_bounds(self):
        a = sample_anchors(3, 5, np.zeros((2, 2)))
        np.testing.assert_array_equal(a.anchors, np.zeros((5, 2)))

    def test_deterministic(self):
        b = np.array([[0, 1], [-2, 2.0]])
        np.testing.assert_array_equal(sample_anchors(42, 7, b).anchors, sample_anchors(42, 7, b).anchors)

    def test_uniform_mean(self):
        a = sample_anchors(0, 10_000, np.array([[0, 1.0]] * 3))
        np.testing.assert_allclose(a.anchors.mean(axis=0), 0.5, atol=0.02)

    def test_within_bounds(self):
        b = np.array([[-1, 3.0], [2, 2.5]])
        a = sample_anchors(9, 500, b)
        assert np.all(a.anchors >= b[:, 0]) and np.all(a.anchors <= b[:, 1])

    def test_nested_prefix(self):
        b = np.array([[0, 1.0]] * 4)
        small, big = sample_anchors(5, 10, b), sample_anchors(5, 30, b)
        np.testing.assert_array_equal(big.anchors[:10], small.anchors)

    def test_zero_anchors(self):
        with pytest.raises(InvalidInputError):
            sample_anchors(0, 0, np.array([[0, 1.0]]))

    def test_inverted_bounds(self):
        with pytest.raises(InvalidInputError):
            sample_anchors(0, 3, np.array([[1, 0.0]]))

    def test_data_bounds(self):
        np.testing.assert_array_equal(data_bounds(np.array([[1, 5.0], [3, 2.0]])), [[1, 3], [2, 5]])


class TestDesignMatrix:
    def test_matches_eval_kernel(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(3, 2))
        anchors = sample_anchors(1, 2, data_bounds(X))
        for spec in RADIAL:
            K = design_matrix(spec, X, anchors)
            assert K.shape == (3, 2)
            for i in range(3):
                for j in range(2):
                    assert K[i, j] == pytest.approx(eval_kernel(spec, X[i], anchors.anchors[j]), rel=1e-12, abs=1e-15)

    def test_row_at_anchor_is_exactly_one(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(4, 3))
        anchors = sample_anchors(2, 3, data_bounds(X))
        X[2] = anchors.anchors[1]
        assert design_matrix(KernelSpec.gaussian(0.8), X, anchors)[2, 1] == 1.0

    def test_multinomial_rows(self):
        X = np.array([[2.0, 3.0], [-1.0, 0.5]])
        K = design_matrix(KernelSpec.multinomial([1, 1]), X)
        assert K.shape == (2, 4)
        for i in range(2):
            np.testing.assert_array_equal(K[i], expand_multinomial([1, 1], X[i]))

    def test_multinomial_single_degree_broadcasts(self):
        X = np.array([[2.0, 3.0]])
        np.testing.assert_array_equal(design_matrix(KernelSpec.multinomial([1]), X), multinomial_features([1, 1], X))

    def test_per_feature_blocks(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(5, 3))
        anchors = sample_anchors(3, 4, data_bounds(X))
        inner = KernelSpec.gaussian(0.6)
        K = design_matrix(KernelSpec.per_feature(inner), X, anchors)
        assert K.shape == (5, 12)
        for l in range(3):
            for j in range(4):
                expected = np.exp(-((X[:, l] - anchors.anchors[j, l]) ** 2) / (2 * 0.36))
                np.testing.assert_allclose(K[:, l * 4 + j], expected)

    def test_radial_needs_anchors(self):
        with pytest.raises(InvalidInputError):
            design_matrix(KernelSpec.gaussian(1.0), np.zeros((2, 2)))

    def test_dimension_mismatch(self):
        anchors = sample_anchors(0, 2, np.array([[0, 1.0]] * 3))
        with pytest.raises(InvalidInputError):
            design_matrix(KernelSpec.gaussian(1.0), np.zeros((2, 2)), anchors)

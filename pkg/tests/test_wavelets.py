import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from haarsde.wavelets import (
    DimensionError,
    DyadicIndex,
    FaberCoefficients,
    HaarExpansion,
    faber_coefficients_from_samples,
    faber_eval,
    faber_sum_eval,
    haar_coefficients_from_samples,
    haar_eval,
    haar_sum_eval,
    interleave,
    n_coefficients,
    n_samples,
    refine_expansion,
)

from oracles import grid, naive_haar_sum


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def sample_arrays(max_level=6):
    return st.integers(0, max_level).flatmap(
        lambda lv: st.tuples(st.just(lv), arrays(float, n_samples(lv), elements=finite))
    )


class TestDyadicIndex:
    def test_valid(self):
        assert DyadicIndex(3, 7).flat == 14

    @pytest.mark.parametrize("j,m", [(-1, 0), (2, 4), (0, -1)])
    def test_invalid(self, j, m):
        with pytest.raises(ValueError):
            DyadicIndex(j, m)


class TestHaarEval:
    def test_first_branch(self):
        assert haar_eval(DyadicIndex(0, 0), 0.25) == 1.0

    def test_second_branch(self):
        assert haar_eval(DyadicIndex(0, 0), 0.75) == -1.0

    def test_outside_support(self):
        assert haar_eval(DyadicIndex(3, 5), 0.99) == 0.0

    def test_half_open_endpoints(self):
        idx = DyadicIndex(2, 1)
        assert haar_eval(idx, 0.25) == 1.0
        assert haar_eval(idx, 0.375) == -1.0
        assert haar_eval(idx, 0.5) == 0.0
        assert haar_eval(DyadicIndex(0, 0), 1.0) == 0.0


class TestFaberEval:
    def test_peak(self):
        assert faber_eval(DyadicIndex(0, 0), 0.5) == 1.0

    def test_left_endpoint(self):
        assert faber_eval(DyadicIndex(2, 1), 0.25) == 0.0

    def test_rising_edge(self):
        assert faber_eval(DyadicIndex(1, 0), 0.125) == 0.5


class TestCoefficients:
    def test_linear_input(self):
        exp = haar_coefficients_from_samples(grid(3), 3)
        assert exp.mu0 == 1.0
        assert np.all(exp.coeffs == 0.0)

    def test_square_level_one(self):
        exp = haar_coefficients_from_samples(grid(1) ** 2, 1)
        assert exp[0, 0] == -0.5
        assert exp.mu0 == 1.0

    def test_constant(self):
        exp = haar_coefficients_from_samples(np.full(n_samples(4), 3.7), 4)
        assert exp.mu0 == 0.0
        assert np.all(exp.coeffs == 0.0)

    def test_index_set(self):
        exp = haar_coefficients_from_samples(np.zeros(n_samples(5)), 5)
        keys = [(i.j, i.m) for i, _ in exp.items()]
        assert keys == [(j, m) for j in range(6) for m in range(2**j)]

    def test_wrong_length(self):
        with pytest.raises(DimensionError, match="needs 9 samples, got 8"):
            haar_coefficients_from_samples(np.zeros(8), 2)
        with pytest.raises(DimensionError):
            faber_coefficients_from_samples(np.zeros(10), 2)

    def test_faber_linear(self):
        fc = faber_coefficients_from_samples(grid(2), 2)
        assert (fc.mu0bar, fc.mu1bar) == (0.0, 1.0)
        assert np.all(fc.coeffs == 0.0)

    def test_faber_square(self):
        fc = faber_coefficients_from_samples(grid(1) ** 2, 1)
        assert fc[0, 0] == -0.25

    def test_matches_formula_directly(self):
        # evaluate the second-difference formula point by point
        rng = np.random.default_rng(3)
        level = 4
        g = rng.normal(size=n_samples(level))
        values = dict(zip(grid(level), g))
        exp = haar_coefficients_from_samples(g, level)
        for idx, c in exp.items():
            s = 2.0**idx.j
            expected = -s * (
                values[(idx.m + 1) / s] - 2 * values[(idx.m + 0.5) / s] + values[idx.m / s]
            )
            assert c == pytest.approx(expected, rel=1e-14, abs=1e-14)

    @given(sample_arrays())
    def test_haar_faber_link_exact(self, data):
        level, g = data
        exp = haar_coefficients_from_samples(g, level)
        fc = faber_coefficients_from_samples(g, level)
        assert exp.mu0 == fc.mu1bar - fc.mu0bar
        for j in range(level + 1):
            assert np.array_equal(exp.level_coeffs(j), 2.0 ** (j + 1) * fc.level_coeffs(j))

    @given(st.integers(0, 7), finite, finite)
    def test_linear_kill(self, level, a, b):
        g = a + b * grid(level)
        assert np.allclose(haar_coefficients_from_samples(g, level).coeffs, 0.0, atol=1e-9)

    def test_linear_kill_exact_on_dyadic_slopes(self):
        for level in range(8):
            g = 3.0 - 0.5 * grid(level)
            assert np.all(haar_coefficients_from_samples(g, level).coeffs == 0.0)


class TestHaarSum:
    def test_constant_only(self):
        exp = HaarExpansion(0, 2.5, [0.0])
        assert haar_sum_eval(exp, 0.5) == 2.5

    def test_outside(self):
        exp = HaarExpansion(2, 1.0, np.arange(1.0, 8.0))
        assert haar_sum_eval(exp, -1.0) == 0.0
        assert haar_sum_eval(exp, 1.0) == 0.0
        assert haar_sum_eval(exp, 0.0) == exp.coeffs[[0, 1, 3]].sum()

    def test_matches_naive_at_point(self):
        rng = np.random.default_rng(11)
        exp = HaarExpansion(5, rng.normal(), rng.normal(size=n_coefficients(5)))
        assert haar_sum_eval(exp, 0.3) == pytest.approx(naive_haar_sum(exp, 0.3), abs=1e-12)

    def test_vectorised(self):
        rng = np.random.default_rng(12)
        exp = HaarExpansion(4, 1.0, rng.normal(size=n_coefficients(4)))
        xs = rng.uniform(-0.5, 1.5, 50)
        out = haar_sum_eval(exp, xs)
        assert out.shape == (50,)
        assert np.allclose(out, [naive_haar_sum(exp, x) for x in xs], atol=1e-12)


class TestFaberSum:
    def test_interpolates_samples(self):
        rng = np.random.default_rng(5)
        level = 6
        g = rng.normal(size=n_samples(level))
        fc = faber_coefficients_from_samples(g, level)
        assert np.max(np.abs(faber_sum_eval(fc, grid(level)) - g)) <= 1e-12

    def test_single_terms(self):
        only0 = FaberCoefficients(0, 1.0, 0.0, [0.0])
        only1 = FaberCoefficients(0, 0.0, 1.0, [0.0])
        assert faber_sum_eval(only0, 0.0) == 1.0
        assert faber_sum_eval(only1, 0.5) == 0.5

    def test_domain(self):
        fc = FaberCoefficients(0, 0.0, 1.0, [0.0])
        with pytest.raises(ValueError):
            faber_sum_eval(fc, 1.5)
        with pytest.raises(ValueError):
            faber_sum_eval(fc, -0.1)

    def test_piecewise_linear_between_nodes(self):
        rng = np.random.default_rng(6)
        level = 3
        g = rng.normal(size=n_samples(level))
        fc = faber_coefficients_from_samples(g, level)
        xs = rng.uniform(0, 1, 200)
        assert np.allclose(faber_sum_eval(fc, xs), np.interp(xs, grid(level), g), atol=1e-12)

    def test_faber_series_against_basis_functions(self):
        rng = np.random.default_rng(7)
        fc = FaberCoefficients(2, 0.3, -0.7, rng.normal(size=7))
        for x in rng.uniform(0, 1, 30):
            naive = 0.3 * (1 - x) - 0.7 * x + sum(
                fc[j, m] * faber_eval(DyadicIndex(j, m), x) for j in range(3) for m in range(2**j)
            )
            assert faber_sum_eval(fc, x) == pytest.approx(naive, abs=1e-12)


class TestRefine:
    def test_matches_rebuild(self):
        rng = np.random.default_rng(8)
        level = 4
        old = rng.normal(size=n_samples(level))
        mids = rng.normal(size=n_samples(level) - 1)
        refined = refine_expansion(haar_coefficients_from_samples(old, level), mids, old)
        assert refined == haar_coefficients_from_samples(interleave(old, mids), level + 1)

    def test_keeps_old_coefficients(self):
        rng = np.random.default_rng(9)
        old = rng.normal(size=n_samples(3))
        exp = haar_coefficients_from_samples(old, 3)
        refined = refine_expansion(exp, rng.normal(size=16), old)
        assert refined.mu0 == exp.mu0
        assert np.array_equal(refined.coeffs[: exp.coeffs.size], exp.coeffs)

    def test_chord_midpoints_give_zero(self):
        # small even integers keep every chord midpoint exactly representable
        rng = np.random.default_rng(10)
        old = 2.0 * rng.integers(-50, 50, size=n_samples(3))
        mids = 0.5 * (old[:-1] + old[1:])
        refined = refine_expansion(haar_coefficients_from_samples(old, 3), mids, old)
        assert np.all(refined.level_coeffs(4) == 0.0)

    def test_square(self):
        x_old = grid(1)
        x_new = (np.arange(4) + 0.5) / 4
        refined = refine_expansion(haar_coefficients_from_samples(x_old**2, 1), x_new**2, x_old**2)
        assert np.array_equal(refined.level_coeffs(2), np.full(4, -1 / 8))

    def test_length_mismatch(self):
        old = np.zeros(n_samples(2))
        exp = haar_coefficients_from_samples(old, 2)
        with pytest.raises(DimensionError):
            refine_expansion(exp, np.zeros(7), old)
        with pytest.raises(DimensionError):
            refine_expansion(exp, np.zeros(8), np.zeros(5))

    @settings(max_examples=30)
    @given(sample_arrays(max_level=5), st.randoms(use_true_random=False))
    def test_refinement_idempotence(self, data, rnd):
        level, g = data
        mids = np.array([rnd.uniform(-10, 10) for _ in range(g.size - 1)])
        refined = refine_expansion(haar_coefficients_from_samples(g, level), mids, g)
        assert refined == haar_coefficients_from_samples(interleave(g, mids), level + 1)


def test_expansion_is_immutable():
    exp = HaarExpansion.zeros(2)
    with pytest.raises(ValueError):
        exp.coeffs[0] = 1.0


def test_expansion_addition():
    a = HaarExpansion(1, 1.0, [1.0, 2.0, 3.0])
    b = HaarExpansion(1, 0.5, [0.0, -2.0, 1.0])
    assert a + b == HaarExpansion(1, 1.5, [1.0, 0.0, 4.0])

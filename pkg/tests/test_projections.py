import numpy as np
import pytest
import scipy.linalg
from scipy.integrate import trapezoid
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fcpd.core import DegenerateCovarianceError, FunctionalSeries, Source, uniform_grid
from fcpd.projections import (
    empirical_covariance,
    fpc1_projection,
    leading_eigenfunction,
    trapezoid_weights,
    tvn_projection,
)


def series(rows, grid=None):
    return FunctionalSeries.from_array(np.asarray(rows, dtype=float), grid)


@pytest.mark.parametrize("row, expected", [
    ([5, 5, 5, 5], 0.0),
    ([0, 1, 0, 1], 3.0),
    ([0, 0.2, 0.7, 1.0], 1.0),
])
def test_tvn_examples(row, expected):
    proj = tvn_projection(series([row] * 3))
    assert proj.source is Source.TVN
    np.testing.assert_allclose(proj.values, expected, atol=1e-15)


curves = arrays(np.float64, st.tuples(st.integers(3, 6), st.integers(2, 8)),
                elements=st.floats(-100, 100, allow_nan=False))


@settings(max_examples=50, deadline=None)
@given(curves, st.floats(-50, 50), st.floats(0.01, 20))
def test_tvn_shift_invariant_and_homogeneous(values, shift, scale):
    base = tvn_projection(series(values)).values
    np.testing.assert_allclose(tvn_projection(series(values + shift)).values, base, atol=1e-9)
    np.testing.assert_allclose(tvn_projection(series(values * scale)).values, base * scale,
                               rtol=1e-12, atol=1e-9)


def test_covariance_examples():
    np.testing.assert_array_equal(empirical_covariance(series([[1, 2]] * 3)), np.zeros((2, 2)))
    # rows (0,0), (2,2) and, to satisfy n >= 3, the formula applied by hand to
    # (0,0), (2,2), (1,1): mean 1, deviations -1, 1, 0 -> sum of squares 2 / (n-1) = 1
    np.testing.assert_allclose(empirical_covariance(series([[0, 0], [2, 2], [1, 1]])), np.ones((2, 2)))
    rng = np.random.default_rng(0)
    c = empirical_covariance(series(rng.normal(size=(10, 4))))
    np.testing.assert_array_equal(c, c.T)


def test_covariance_two_rows_by_hand():
    # (1/(2-1)) * ((0-1)(0-1) + (2-1)(2-1)) = 2 in every entry
    np.testing.assert_allclose(empirical_covariance(np.array([[0.0, 0.0], [2.0, 2.0]])),
                               2 * np.ones((2, 2)))


def test_covariance_matches_numpy():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 6))
    np.testing.assert_allclose(empirical_covariance(series(x)), np.cov(x, rowvar=False), atol=1e-12)


def test_eigenfunction_diagonal_and_rank_one():
    grid = uniform_grid(2)
    eig = leading_eigenfunction(np.diag([2.0, 1.0]), grid)
    assert abs(eig.values[1]) < 1e-12 and eig.values[0] > 0
    w = trapezoid_weights(grid)
    assert eig.eigenvalue == pytest.approx(2.0 * w[0])

    v = np.array([1.0, -2.0, 0.5, 3.0])
    grid = uniform_grid(4)
    eig = leading_eigenfunction(np.outer(v, v), grid)
    cos = abs(eig.values @ v) / (np.linalg.norm(eig.values) * np.linalg.norm(v))
    assert cos == pytest.approx(1.0, abs=1e-12)


def _oracle_eig(cov, grid):
    """General (non-symmetric) eigensolver on C W, normalized with scipy's trapezoid."""
    w = trapezoid_weights(grid)
    evals, evecs = scipy.linalg.eig(cov * w[None, :])
    i = np.argmax(evals.real)
    phi = evecs[:, i].real
    phi /= np.sqrt(trapezoid(phi**2, grid))
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    return phi, evals[i].real


def test_eigenfunction_matches_dense_oracle():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(5, 5))
    cov = a @ a.T + 0.1 * np.eye(5)
    grid = np.sort(rng.uniform(0.01, 0.99, 5))
    eig = leading_eigenfunction(cov, grid)
    phi, lam = _oracle_eig(cov, grid)
    np.testing.assert_allclose(eig.values, phi, atol=1e-8)
    assert eig.eigenvalue == pytest.approx(lam, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(4, 12), st.integers(2, 7)),
              elements=st.floats(-10, 10, allow_nan=False)))
def test_eigenfunction_residual_and_norm(values):
    s = series(values)
    cov = empirical_covariance(s)
    try:
        eig = leading_eigenfunction(cov, s.grid)
    except DegenerateCovarianceError:
        return
    w = trapezoid_weights(s.grid)
    resid = np.linalg.norm(cov @ (w * eig.values) - eig.eigenvalue * eig.values)
    assert resid <= 1e-8 * eig.eigenvalue + 1e-12
    assert np.sum(w * eig.values**2) == pytest.approx(1.0, abs=1e-10)
    assert eig.values[np.argmax(np.abs(eig.values))] > 0


def test_degenerate_covariance():
    with pytest.raises(DegenerateCovarianceError, match="degenerate covariance"):
        leading_eigenfunction(np.zeros((3, 3)), uniform_grid(3))
    with pytest.raises(DegenerateCovarianceError):
        fpc1_projection(series([[1, 2, 3]] * 4))


def test_fpc1_antisymmetric_pair():
    proj = fpc1_projection(series([[1, 1], [-1, -1], [1, 1], [-1, -1]]))
    assert proj.source is Source.FPC1
    np.testing.assert_allclose(proj.values[0], -proj.values[1], atol=1e-14)
    assert abs(proj.values[0]) > 0


def test_fpc1_matches_full_fpca_oracle():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(20, 10)) + np.sin(np.linspace(0, 3, 10))
    grid = np.linspace(0.05, 0.95, 10)
    s = series(x, grid)
    cov = np.cov(x, rowvar=False)
    phi, _ = _oracle_eig(cov, grid)
    centered = x - x.mean(axis=0)
    expected = np.array([trapezoid(row * phi, grid) for row in centered])
    np.testing.assert_allclose(fpc1_projection(s).values, expected, atol=1e-8)


def test_fpc1_row_permutation():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(15, 6))
    perm = rng.permutation(15)
    base = fpc1_projection(series(x)).values
    permuted = fpc1_projection(series(x[perm])).values
    restored = np.empty_like(permuted)
    restored[perm] = permuted
    sign = np.sign(base @ restored)
    np.testing.assert_allclose(restored * sign, base, atol=1e-10)

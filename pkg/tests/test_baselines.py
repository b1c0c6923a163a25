import numpy as np
import pytest
from sklearn.base import clone

from psvm.baselines import (
    DirectionalRegression,
    SlicedAverageVariance,
    SlicedInverseRegression,
    fit_dr,
    fit_save,
    fit_sir,
    slice_stats,
)
from psvm.dataset import Dataset
from psvm.exceptions import EmptySlice
from psvm.metrics import subspace_distance
from psvm.simulate import ModelSpec, generate

FITTERS = [fit_sir, fit_save, fit_dr]


def test_sir_closed_form():
    # two slices with whitened means +-1 along the first axis
    z = np.array([[-1.0, 1], [-1, -1], [1, 1], [1, -1]])
    s = slice_stats(z, np.arange(4.0), 2)
    np.testing.assert_allclose(s.means, [[-1, 0], [1, 0]])
    np.testing.assert_allclose(s.covs[0], [[0, 0], [0, 1]])
    f = fit_sir(Dataset(z, np.arange(4.0)), h=2)
    np.testing.assert_allclose(np.abs(f.directions[:, 0]), [1, 0], atol=1e-12)


def test_save_vanishes_when_slice_covariances_are_identity():
    # each slice is a whitened +-1 cross, so V_h = I and M = 0
    cross = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]]) * np.sqrt(2)
    x = np.vstack([cross, cross])
    f = fit_save(Dataset(x, np.repeat([0.0, 1.0], 4)), h=2)
    np.testing.assert_allclose(f.m_hat, 0.0, atol=1e-12)


@pytest.mark.parametrize("fitter", FITTERS)
def test_null_model_eigenvalues_small(fitter):
    rng = np.random.default_rng(0)
    n, p = 2000, 5
    f = fitter(Dataset(rng.standard_normal((n, p)), rng.standard_normal(n)), dim=1)
    assert f.eigvals.sum() < p * 5 / np.sqrt(n)
    assert f.eigvals.min() >= -1e-10


@pytest.mark.parametrize("fitter", FITTERS)
def test_candidate_matrix_psd_and_directions_orthonormal(fitter):
    d, _ = generate(ModelSpec("II", 6, 200), 5)
    f = fitter(d, dim=2)
    np.testing.assert_allclose(f.m_hat, f.m_hat.T, atol=1e-12)
    assert np.linalg.eigvalsh(f.m_hat).min() > -1e-10
    np.testing.assert_allclose(f.directions.T @ f.directions, np.eye(2), atol=1e-10)


@pytest.mark.parametrize("fitter", FITTERS)
def test_affine_equivariance(fitter):
    rng = np.random.default_rng(1)
    d, _ = generate(ModelSpec("III", 5, 300), 2)
    base = fitter(d, dim=2)
    for _ in range(5):
        A = rng.standard_normal((5, 5)) + 3 * np.eye(5)
        moved = fitter(Dataset(d.x @ A.T + rng.standard_normal(5), d.y), dim=2)
        assert subspace_distance(A.T @ moved.directions, base.directions) < 1e-3


def test_save_finds_symmetric_signal_sir_misses():
    d, truth = generate(ModelSpec("III", 6, 400), 3)
    assert subspace_distance(fit_save(d, dim=2).directions, truth.basis) < 0.6
    assert subspace_distance(fit_sir(d, dim=2).directions, truth.basis) > 1.0


def test_slice_errors():
    with pytest.raises(EmptySlice):
        fit_save(Dataset(np.random.default_rng(0).standard_normal((5, 2)), np.arange(5.0)), h=4)
    with pytest.raises(ValueError):
        fit_sir(Dataset(np.random.default_rng(0).standard_normal((20, 2)), np.arange(20.0)), dim=3)


@pytest.mark.parametrize("cls", [SlicedInverseRegression, SlicedAverageVariance, DirectionalRegression])
def test_estimators(cls):
    d, _ = generate(ModelSpec("I", 5, 150), 4)
    est = cls(n_components=2)
    u = est.fit_transform(d.x, d.y)
    assert u.shape == (150, 2) and est.components_.shape == (2, 5)
    assert clone(est).get_params() == est.get_params()


def test_categorical_uses_levels():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((90, 3))
    y = np.repeat([0.0, 1.0, 2.0], 30)
    x[:, 0] += y
    est = SlicedInverseRegression(categorical=True).fit(x, y)
    assert abs(est.directions_[0, 0]) > 0.9
    assert est.fit_.h == 3

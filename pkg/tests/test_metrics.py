import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psvm.exceptions import ConstantInput, DimensionMismatch, RankDeficientBasis, SingularDesignWarning
from psvm.metrics import principal_angles, quadratic_recovery_score, spearman_abs, subspace_distance

E = np.eye(3)


class TestSubspaceDistance:
    def test_closed_forms(self):
        assert subspace_distance(E[:, :2], E[:, :2] @ [[2, 1], [0, 3]]) == pytest.approx(0.0, abs=1e-12)
        assert subspace_distance(E[:, 0], E[:, 1]) == pytest.approx(np.sqrt(2))
        assert subspace_distance(E[:, [0, 1]], E[:, [0, 2]]) == pytest.approx(np.sqrt(2))

    def test_errors(self):
        with pytest.raises(RankDeficientBasis):
            subspace_distance(np.c_[E[:, 0], 2 * E[:, 0]], E[:, :2])
        with pytest.raises(DimensionMismatch):
            subspace_distance(np.eye(4)[:, :1], E[:, :1])

    def test_angles(self):
        np.testing.assert_allclose(principal_angles(E[:, 0], E[:, 1]), [np.pi / 2])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d1=st.integers(1, 3), d2=st.integers(1, 3), d3=st.integers(1, 3))
def test_pseudometric(seed, d1, d2, d3):
    rng = np.random.default_rng(seed)
    A, B, C = (rng.standard_normal((6, k)) for k in (d1, d2, d3))
    ab, ba = subspace_distance(A, B), subspace_distance(B, A)
    assert ab == pytest.approx(ba, abs=1e-12)
    assert ab <= subspace_distance(A, C) + subspace_distance(C, B) + 1e-10
    assert 0 <= ab <= np.sqrt(d1 + d2) + 1e-12
    assert subspace_distance(A, A @ rng.standard_normal((d1, d1))) < 1e-8


class TestSpearman:
    def test_cases(self):
        u = np.random.default_rng(0).standard_normal(20)
        assert spearman_abs(u, u) == pytest.approx(1.0)
        assert spearman_abs(u, np.exp(u)) == pytest.approx(1.0)
        assert spearman_abs([1, 2, 3], [3, 2, 1]) == pytest.approx(1.0)

    def test_ties_use_average_ranks(self):
        # ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4)
        assert spearman_abs([1, 2, 2, 3], [1, 2, 3, 4]) == pytest.approx(0.9486832980505138)

    def test_errors(self):
        with pytest.raises(ConstantInput):
            spearman_abs([1, 1, 1], [1, 2, 3])
        with pytest.raises(ValueError):
            spearman_abs([1, 2], [1, 2])
        with pytest.raises(DimensionMismatch):
            spearman_abs([1, 2, 3], [1, 2, 3, 4])

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_monotone_invariance(self, seed):
        rng = np.random.default_rng(seed)
        u, v = rng.standard_normal((2, 30))
        assert spearman_abs(u, v) == pytest.approx(spearman_abs(np.arctan(u) * 5 + 1, -(v**3)), abs=1e-12)


class TestQuadraticScore:
    def test_exact_recovery(self):
        x = np.random.default_rng(1).standard_normal((200, 2))
        t = x[:, 0] ** 2 + x[:, 1] ** 2
        assert quadratic_recovery_score(x[:, 0], x[:, 1], t) == pytest.approx(1.0, abs=1e-10)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((200, 2))
        t = x[:, 0] ** 2 + x[:, 1] ** 2
        for _ in range(10):
            th = rng.uniform(0, 2 * np.pi)
            u = x @ np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
            assert quadratic_recovery_score(u[:, 0], u[:, 1], t) == pytest.approx(1.0, abs=1e-10)

    def test_noise_scores_low(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((500, 2))
        u1, u2 = rng.standard_normal((2, 500))
        assert quadratic_recovery_score(u1, u2, x[:, 0] ** 2 + x[:, 1] ** 2) < 0.2

    def test_singular_design_warns(self):
        x = np.random.default_rng(4).standard_normal(50)
        with pytest.warns(SingularDesignWarning):
            s = quadratic_recovery_score(x, x, x**2)
        assert s == pytest.approx(1.0)

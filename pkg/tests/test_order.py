import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from psvm.dataset import Dataset
from psvm.exceptions import DegenerateSplit
from psvm.order import BicConfig, bic_criterion, bic_select, cvbic, default_a_grid, write_misclassification_csv
from psvm.simulate import ModelSpec, generate

spectra = arrays(np.float64, st.integers(1, 8), elements=st.floats(0, 100, allow_nan=False)).map(
    lambda e: np.sort(e)[::-1]
)


class TestBic:
    def test_no_signal(self):
        assert bic_select(np.zeros(5), 100, 1.0) == 0

    def test_single_spike(self):
        ev = np.array([10.0, 0, 0, 0])
        # penalty per step 10 log(100) / 10 = 4.605
        np.testing.assert_allclose(bic_criterion(ev, 100, 1.0)[:2], [0.0, 10 - 10 * np.log(100) / 10])
        assert bic_select(ev, 100, 1.0) == 1

    def test_tie_goes_to_smaller_k(self):
        # a chosen so that k=1 and k=2 score exactly the same
        ev = np.array([4.0, 2.0, 0.0])
        a = 2.0 / (4.0 * np.log(16) / 4)
        assert bic_select(ev, 16, a) == 1

    def test_config(self):
        assert len(default_a_grid()) == 20
        assert default_a_grid()[0] == pytest.approx(0.01) and default_a_grid()[-1] == pytest.approx(10)
        assert BicConfig(a_grid=(3.0, 1.0)).a_grid == (1.0, 3.0)
        for bad in ((), (0.0,), (-1.0, 2.0)):
            with pytest.raises(ValueError):
                BicConfig(a_grid=bad)
        with pytest.raises(ValueError):
            BicConfig(train_fraction=1.0)


@settings(max_examples=80, deadline=None)
@given(ev=spectra, n=st.integers(2, 5000), s=st.floats(1e-3, 1e3), a=st.floats(1e-2, 10))
def test_bic_properties(ev, n, s, a):
    k = bic_select(ev, n, a)
    assert 0 <= k <= ev.size
    assert bic_select(ev * s, n, a) == k
    assert bic_select(np.concatenate([ev, np.zeros(3)]), n, a) == k
    assert bic_select(ev, n, 2 * a) <= k


def test_huge_gap_selects_one_for_every_a():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((200, 4))
    d = Dataset(x, x[:, 0] * 5)
    assert cvbic(d, seed=1).d == 1
    ev = np.array([1e6, 1e-3, 1e-4, 0.0])
    # a log(n) / sqrt(n) must stay below 1 at a = 10, which needs n near 10^4
    assert all(bic_select(ev, 10_000, a) == 1 for a in default_a_grid())
    assert bic_select(ev, 200, 10.0) == 0


def test_result_and_csv(tmp_path):
    d, _ = generate(ModelSpec("IV", 5, 120), 3)
    res = cvbic(d, seed=4, bic=BicConfig(a_grid=(0.1, 1.0, 5.0)))
    again = cvbic(d, seed=4, bic=BicConfig(a_grid=(0.1, 1.0, 5.0)))
    assert res.d == again.d and res.table == again.table
    assert res.a in (0.1, 1.0, 5.0)
    best = min(r["errors"] for r in res.table)
    assert res.a == min(r["a"] for r in res.table if r["errors"] == best)
    assert 0 <= res.d <= d.p
    path = tmp_path / "mis.csv"
    write_misclassification_csv(res, path)
    rows = list(csv.DictReader(open(path)))
    assert [float(r["a"]) for r in rows] == [0.1, 1.0, 5.0]
    assert sum(int(r["chosen"]) for r in rows) == 1


def test_baseline_methods_run():
    d, _ = generate(ModelSpec("V", 4, 150), 6)
    for m in ("sir", "save", "dr"):
        assert 0 <= cvbic(d, method=m, seed=0, h=5).d <= 4


def test_resubstitution_option_and_errors():
    d, _ = generate(ModelSpec("IV", 4, 80), 1)
    assert 0 <= cvbic(d, seed=0, validation="resubstitution").d <= 4
    with pytest.raises(ValueError):
        cvbic(d, validation="loo")
    with pytest.raises(ValueError):
        cvbic(d, method="pca")
    with pytest.raises(DegenerateSplit):
        cvbic(Dataset(np.arange(6.0).reshape(3, 2), np.arange(3.0)), bic=BicConfig(train_fraction=0.5))


def test_model_iv_mostly_correct():
    hits = [cvbic(generate(ModelSpec("IV", 6, 200), 11, r)[0], seed=r).d == 1 for r in range(10)]
    assert np.mean(hits) >= 0.6

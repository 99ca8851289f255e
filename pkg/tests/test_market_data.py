import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hqportfolio.market_data import (
    DataError, MomentEstimator, PriceTable, ProblemInstance, ReturnTable, compute_returns,
    estimate_moments, load_instance, load_prices, sample_instance, save_instance,
)

from .conftest import write_csv


def _table(prices, tickers=("A",)):
    prices = np.asarray(prices, dtype=float).reshape(len(prices), -1)
    dates = tuple(np.datetime64("2024-01-01") + np.arange(len(prices)))
    dates = tuple(d.astype(object) for d in dates)
    return PriceTable(dates, tuple(tickers), prices)


class TestLoadPrices:
    def test_two_rows_one_ticker(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,A\n2024-01-02,100\n2024-01-03,105\n")
        table = load_prices(p)
        assert table.prices.shape == (2, 1)
        assert table.tickers == ("A",)
        np.testing.assert_array_equal(table.prices[:, 0], [100.0, 105.0])
        assert table.dropped_rows == 0

    def test_blank_cell_drops_row(self, tmp_path):
        p = write_csv(tmp_path / "p.csv",
                      "date,A,B\n2024-01-02,100,10\n2024-01-03,101,\n2024-01-04,102,11\n")
        table = load_prices(p)
        assert table.dropped_rows == 1
        assert [d.isoformat() for d in table.dates] == ["2024-01-02", "2024-01-04"]

    def test_blank_cell_outside_selection_is_kept(self, tmp_path):
        p = write_csv(tmp_path / "p.csv",
                      "date,A,B\n2024-01-02,100,10\n2024-01-03,101,\n2024-01-04,102,11\n")
        table = load_prices(p, tickers=["A"])
        assert table.dropped_rows == 0
        assert table.prices.shape == (3, 1)

    @pytest.mark.parametrize("cell", ["-3.0", "0"])
    def test_non_positive_price(self, tmp_path, cell):
        p = write_csv(tmp_path / "p.csv", f"date,A\n2024-01-02,100\n2024-01-03,{cell}\n")
        with pytest.raises(DataError, match="non-positive price"):
            load_prices(p)

    def test_non_numeric_price(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,A\n2024-01-02,100\n2024-01-03,abc\n")
        with pytest.raises(DataError, match="non-numeric"):
            load_prices(p)

    @pytest.mark.parametrize("header", ["day,A", "date", "date,A,A", "date,,B"])
    def test_malformed_header(self, tmp_path, header):
        p = write_csv(tmp_path / "p.csv", f"{header}\n2024-01-02,1,2\n")
        with pytest.raises(DataError, match="header"):
            load_prices(p)

    def test_too_few_dates(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,A,B\n2024-01-02,100,1\n2024-01-03,,2\n")
        with pytest.raises(DataError, match="fewer than 2"):
            load_prices(p)

    def test_dates_must_increase(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,A\n2024-01-03,100\n2024-01-02,101\n")
        with pytest.raises(DataError, match="increasing"):
            load_prices(p)

    def test_bundled_sample(self, sample_prices_path):
        table = load_prices(sample_prices_path)
        assert len(table.tickers) == 20
        assert table.prices.shape[0] == len(table.dates) >= 250


class TestReturns:
    @pytest.mark.parametrize("prices,expected", [
        ([100, 105], [0.05]),
        ([100, 110, 99], [0.10, -0.10]),
        ([50, 50, 50], [0.0, 0.0]),
    ])
    def test_examples(self, prices, expected):
        r = compute_returns(_table(prices)).returns[:, 0]
        np.testing.assert_allclose(r, expected, rtol=0, atol=1e-15)

    def test_identity_is_bit_exact(self, sample_prices_path):
        table = load_prices(sample_prices_path)
        r = compute_returns(table).returns
        p = table.prices
        for t in range(0, r.shape[0], 37):
            for i in range(p.shape[1]):
                assert r[t, i] == p[t + 1, i] / p[t, i] - 1

    def test_single_row_rejected(self):
        with pytest.raises(DataError):
            compute_returns(_table([100.0]))

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 4)),
                  elements=st.floats(0.01, 1e4)))
    def test_prices_reconstruct_from_returns(self, prices):
        table = _table(prices, tickers=[f"T{i}" for i in range(prices.shape[1])])
        r = compute_returns(table).returns
        rebuilt = prices[0] * np.vstack([np.ones(prices.shape[1]), np.cumprod(1 + r, axis=0)])
        np.testing.assert_allclose(rebuilt, prices, rtol=1e-10)


class TestMoments:
    def test_two_point_variance(self):
        mu, sigma = estimate_moments(ReturnTable((), ("A",), np.array([[0.10], [-0.10]])))
        assert mu[0] == pytest.approx(0.0, abs=1e-18)
        assert sigma[0, 0] == pytest.approx(0.02, rel=1e-14)

    def test_identical_columns(self, rng):
        col = rng.normal(size=50)
        _, sigma = estimate_moments(ReturnTable((), ("A", "B"), np.column_stack([col, col])))
        assert sigma[0, 1] == pytest.approx(sigma[0, 0], rel=1e-14)

    def test_single_row_rejected(self):
        with pytest.raises(DataError):
            estimate_moments(ReturnTable((), ("A",), np.array([[0.1]])))

    def test_matches_independent_recomputation(self, sample_prices_path, oracle):
        mu, sigma = estimate_moments(compute_returns(load_prices(sample_prices_path)))
        ref = oracle["sample_prices"]
        np.testing.assert_allclose(mu, ref["mu"], rtol=1e-10, atol=1e-16)
        np.testing.assert_allclose(sigma, ref["sigma"], rtol=1e-10, atol=1e-16)

    def test_symmetric_and_psd(self, universe, rng):
        sigma = universe.sigma
        assert np.max(np.abs(sigma - sigma.T)) == 0.0
        v = rng.normal(size=(100, sigma.shape[0]))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        assert np.all(np.einsum("ki,ij,kj->k", v, sigma, v) >= -1e-9)


class TestSampling:
    def test_forced_subset(self, universe):
        nine = sample_instance(universe, 9, seed=0)
        sub = ProblemInstance(nine.tickers, nine.mu, nine.sigma, 1.0, "nine")
        for seed in (0, 7, 99):
            inst = sample_instance(sub, 9, seed=seed)
            assert inst.tickers == sub.tickers

    def test_deterministic(self, universe):
        assert sample_instance(universe, 9, seed=3) == sample_instance(universe, 9, seed=3)

    def test_submatrices_match_direct_indexing(self, universe):
        labels = set()
        for seed in range(1, 6):
            inst = sample_instance(universe, 9, gamma=0.5, seed=seed)
            idx = [universe.tickers.index(t) for t in inst.tickers]
            assert len(set(inst.tickers)) == 9
            for a, i in enumerate(idx):
                assert inst.mu[a] == universe.mu[i]
                for b, j in enumerate(idx):
                    assert inst.sigma[a, b] == universe.sigma[i, j]
            assert inst.gamma == 0.5
            labels.add(inst.tickers)
        assert len(labels) > 1

    def test_k_too_large(self, universe):
        with pytest.raises(ValueError, match="exceeds"):
            sample_instance(universe, 21, seed=1)

    def test_k_zero(self, universe):
        with pytest.raises(ValueError):
            sample_instance(universe, 0, seed=1)


class TestInstanceFiles:
    def test_round_trip(self, tmp_path, bundled_instances):
        for inst in bundled_instances:
            path = save_instance(inst, tmp_path / f"{inst.label}.json")
            again = load_instance(path)
            assert again == inst
            assert again.mu.tobytes() == inst.mu.tobytes()
            assert again.sigma.tobytes() == inst.sigma.tobytes()

    def _doc(self):
        return {"label": "x", "tickers": ["A", "B"], "mu": [0.1, 0.2],
                "sigma": [[0.04, 0.01], [0.01, 0.09]], "gamma": 1.0}

    def test_asymmetric_sigma(self, tmp_path):
        doc = self._doc()
        doc["sigma"][0][1] = 0.02
        (tmp_path / "i.json").write_text(json.dumps(doc))
        with pytest.raises(DataError, match="symmetric"):
            load_instance(tmp_path / "i.json")

    def test_negative_gamma(self, tmp_path):
        doc = self._doc()
        doc["gamma"] = -1
        (tmp_path / "i.json").write_text(json.dumps(doc))
        with pytest.raises(DataError, match="gamma"):
            load_instance(tmp_path / "i.json")

    def test_schema_mismatch(self, tmp_path):
        doc = self._doc()
        del doc["label"]
        (tmp_path / "i.json").write_text(json.dumps(doc))
        with pytest.raises(DataError, match="schema"):
            load_instance(tmp_path / "i.json")

    def test_not_psd(self):
        with pytest.raises(ValueError, match="semidefinite"):
            ProblemInstance(("A", "B"), [0, 0], [[1.0, 2.0], [2.0, 1.0]])


class TestMomentEstimator:
    def test_fit_matches_functions(self, sample_prices_path):
        table = load_prices(sample_prices_path)
        est = MomentEstimator(gamma=2.0).fit(table)
        mu, sigma = estimate_moments(compute_returns(table))
        np.testing.assert_array_equal(est.mu_, mu)
        np.testing.assert_array_equal(est.sigma_, sigma)
        assert est.transform(table).shape == (len(table.dates) - 1, 20)
        inst = est.sample(9, seed=4)
        assert inst.gamma == 2.0 and inst.n == 9

    def test_get_params(self):
        assert MomentEstimator(gamma=0.3).get_params() == {"gamma": 0.3}

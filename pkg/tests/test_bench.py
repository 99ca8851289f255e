import csv
import json
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqportfolio.bench import io
from hqportfolio.bench.cli import main
from hqportfolio.bench.config import ConfigError, config_from_dict, load_config
from hqportfolio.bench.metrics import RunTrace, aggregate, diversity, evals_to_optimum
from hqportfolio.market_data import DataError, load_instance
from hqportfolio.results import GenerationRecord

from .conftest import DATA, write_csv


def synthetic_trace(best_so_far, pop=3, seed=0, diversity_values=None, algorithm="hqga", instance="toy"):
    k = len(best_so_far)
    b = np.asarray(best_so_far, dtype=float)
    div = np.zeros(k) if diversity_values is None else np.asarray(diversity_values, dtype=float)
    return RunTrace(algorithm, instance, pop, seed, generation=np.arange(k),
                    evaluations=(np.arange(k) + 1) * pop, best=b, mean=b - div, worst=b - 2 * div,
                    diversity=div, best_so_far=b)


class TestDiversity:
    def test_example(self):
        assert diversity([3, 1, 2]) == 1.0

    def test_homogeneous(self):
        assert diversity([0.4, 0.4, 0.4]) == 0.0

    def test_record(self):
        rec = GenerationRecord(0, 3, np.array([3.0, 1.0, 2.0]), np.zeros((3, 2)), 3.0)
        assert diversity(rec) == 1.0 == rec.diversity

    def test_empty(self):
        with pytest.raises(ValueError):
            diversity([])

    @settings(max_examples=200)
    @given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=12))
    def test_matches_recomputation(self, fits):
        d = diversity(fits)
        assert d >= 0
        assert d == pytest.approx(max(fits) - statistics.fmean(fits), abs=1e-12)


class TestEvalsToOptimum:
    def test_generation_two(self):
        assert evals_to_optimum(synthetic_trace([0.1, 0.2, 0.5, 0.5]), 0.5) == 9

    def test_never_reached(self):
        assert evals_to_optimum(synthetic_trace([0.1, 0.2, 0.3]), 0.5) is None

    def test_tolerance(self):
        assert evals_to_optimum(synthetic_trace([0.5 - 5e-13]), 0.5) == 3
        assert evals_to_optimum(synthetic_trace([0.5 - 5e-12]), 0.5) is None

    def test_linear_scan_oracle(self, rng):
        for _ in range(100):
            pop = int(rng.integers(2, 11))
            trace = np.maximum.accumulate(rng.integers(0, 20, int(rng.integers(1, 40))) / 10.0)
            f_star = float(rng.integers(0, 21)) / 10.0
            expected = None
            for g, v in enumerate(trace):
                if v >= f_star - 1e-12:
                    expected = (g + 1) * pop
                    break
            assert evals_to_optimum(synthetic_trace(trace, pop=pop), f_star) == expected


class TestAggregate:
    def test_identical_runs(self):
        s = aggregate([synthetic_trace([1, 2, 3]), synthetic_trace([1, 2, 3], seed=1)], "best")
        np.testing.assert_array_equal(s.std, 0)
        np.testing.assert_array_equal(s.mean, [1, 2, 3])

    def test_single_run(self):
        s = aggregate([synthetic_trace([0.2, 0.7], diversity_values=[0.1, 0.05])], "diversity")
        np.testing.assert_array_equal(s.mean, [0.1, 0.05])
        np.testing.assert_array_equal(s.std, 0)
        assert s.n_runs == 1

    def test_five_runs_hand_checked(self):
        rows = [[1, 2], [2, 4], [3, 6], [4, 8], [5, 10]]
        s = aggregate([synthetic_trace(r, seed=i) for i, r in enumerate(rows)], "best_so_far")
        np.testing.assert_allclose(s.mean, [3, 6])
        np.testing.assert_allclose(s.std, [statistics.pstdev([1, 2, 3, 4, 5]), statistics.pstdev([2, 4, 6, 8, 10])])
        np.testing.assert_array_equal(s.evaluations, [3, 6])

    def test_mismatched_grids(self):
        with pytest.raises(ValueError, match="mismatched"):
            aggregate([synthetic_trace([1, 2]), synthetic_trace([1, 2, 3])], "best")
        with pytest.raises(ValueError):
            aggregate([synthetic_trace([1, 2], pop=3), synthetic_trace([1, 2], pop=5)], "best")

    def test_unknown_statistic(self):
        with pytest.raises(ValueError):
            aggregate([synthetic_trace([1])], "median")

    def test_area(self):
        s = aggregate([synthetic_trace([0, 0, 0], diversity_values=[1, 3, 1])], "diversity")
        assert s.area() == pytest.approx(3 * (1 + 3) / 2 + 3 * (3 + 1) / 2)


class TestIO:
    def test_run_round_trip(self, tmp_path, rng):
        t = synthetic_trace(np.cumsum(rng.random(7)) / 3, diversity_values=rng.random(7) / 7, seed=4)
        back = io.read_run_csv(io.write_run_csv(t, tmp_path / "r.csv"))
        for name in ("generation", "evaluations", "best", "mean", "worst", "diversity", "best_so_far"):
            np.testing.assert_array_equal(getattr(back, name), getattr(t, name))
        assert back.key == t.key

    def test_run_header(self, tmp_path):
        path = io.write_run_csv(synthetic_trace([1.0]), tmp_path / "r.csv")
        assert path.read_text().splitlines()[0] == \
            "algorithm,instance,pop,seed,generation,evaluations,best,mean,worst,diversity,best_so_far"

    def test_schema_mismatch(self, tmp_path):
        p = write_csv(tmp_path / "r.csv", "algorithm,instance\nhqga,x\n")
        with pytest.raises(DataError, match="schema"):
            io.read_run_csv(p)
        with pytest.raises(DataError, match="schema"):
            io.read_brute_csv(p)

    def test_seventeen_digits(self):
        assert io.fmt(0.1) == "0.10000000000000001"
        assert float(io.fmt(1 / 3)) == 1 / 3
        assert io.fmt(np.int64(12)) == "12"


class TestConfig:
    def test_defaults(self):
        cfg = config_from_dict({"instances": "@instances"})
        assert cfg.populations == (3, 5, 10) and cfg.repetitions == 20 and cfg.max_evaluations == 512
        assert [a.type for a in cfg.algorithms] == ["hqga", "ga"]
        assert len(cfg.instances) == 5

    @pytest.mark.parametrize("doc", [
        {"instances": "@instances", "repetitions": 0},
        {"instances": "@instances", "populations": [1]},
        {"instances": "@instances", "algorithms": [{"type": "sa"}]},
        {"instances": "@instances", "algorithms": [{"type": "ga", "params": {"foo": 1}}]},
        {"instances": "@instances", "bogus": 1},
        {},
    ])
    def test_invalid(self, doc):
        with pytest.raises(ConfigError):
            config_from_dict(doc)

    def test_missing_instance_file(self, tmp_path):
        with pytest.raises(DataError):
            config_from_dict({"instances": ["nope.json"]}, tmp_path)

    def test_relative_paths(self, tmp_path):
        (tmp_path / "c.json").write_text(json.dumps({"instances": [str(DATA / "instances" / "subset_seed1.json")],
                                                     "output_dir": "out"}))
        cfg = load_config(tmp_path / "c.json")
        assert cfg.output_dir == tmp_path / "out"


def _run_config(tmp_path, **overrides):
    doc = {"instances": "@instances", "algorithms": ["hqga", "ga"], "populations": [3],
           "repetitions": 2, "max_evaluations": 30}
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


class TestCli:
    def test_prepare_forced_subset(self, tmp_path, sample_prices_path, capsys):
        with sample_prices_path.open() as fh:
            rows = list(csv.reader(fh))
        nine = [[r[0]] + r[1:10] for r in rows]
        prices = tmp_path / "nine.csv"
        with prices.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(nine)
        out = tmp_path / "inst"
        assert main(["prepare", "--prices", str(prices), "--k", "9", "--gamma", "1.0",
                     "--subset-seeds", "7", "--out", str(out)]) == 0
        files = list(out.glob("*.json"))
        assert len(files) == 1
        assert load_instance(files[0]).tickers == tuple(nine[0][1:])

    def test_prepare_reproduces_bundled_instances(self, tmp_path, instance_paths):
        assert main(["prepare", "--subset-seeds", "1,2,3,4,5", "--out", str(tmp_path)]) == 0
        for p in instance_paths:
            assert (tmp_path / p.name).read_bytes() == p.read_bytes()

    def test_run_one_generation(self, tmp_path):
        cfg = _run_config(tmp_path, algorithms=["hqga"], repetitions=1, max_evaluations=3)
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "runs")]) == 0
        runs = sorted((tmp_path / "runs").glob("hqga__*.csv"))
        assert len(runs) == 5
        for r in runs:
            assert len(r.read_text().splitlines()) == 2

    def test_full_pipeline_first_rows(self, tmp_path):
        cfg = _run_config(tmp_path)
        assert main(["brute", "--instances", str(DATA / "instances"), "--out", str(tmp_path / "brute.csv")]) == 0
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "runs"), "--jobs", "3"]) == 0
        assert main(["report", "--runs", str(tmp_path / "runs"), "--brute", str(tmp_path / "brute.csv"),
                     "--out", str(tmp_path / "rep")]) == 0
        runs = [io.read_run_csv(p) for p in sorted((tmp_path / "runs").glob("ga__subset_seed1__*.csv"))]
        with (tmp_path / "rep" / "diversity.csv").open() as fh:
            first = next(r for r in csv.DictReader(fh) if r["algorithm"] == "ga" and r["instance"] == "subset_seed1")
        values = [t.diversity[0] for t in runs]
        assert int(first["evaluations"]) == 3
        assert float(first["stat_mean"]) == pytest.approx(statistics.fmean(values), abs=1e-15)
        assert float(first["stat_std"]) == pytest.approx(statistics.pstdev(values), abs=1e-15)
        with (tmp_path / "rep" / "evals_to_optimum.csv").open() as fh:
            summary = list(csv.DictReader(fh))
        assert len(summary) == 10
        assert all(0.0 <= float(r["success_rate"]) <= 1.0 for r in summary)

    def test_parallel_matches_serial(self, tmp_path):
        cfg = _run_config(tmp_path)
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "4"])
        a = {p.name: p.read_bytes() for p in (tmp_path / "a").iterdir()}
        b = {p.name: p.read_bytes() for p in (tmp_path / "b").iterdir()}
        assert a == b

    @pytest.mark.parametrize("argv", [
        [], ["frobnicate"], ["prepare"], ["prepare", "--out", "x", "--k", "0"],
        ["prepare", "--out", "x", "--subset-seeds", "a,b"], ["run", "--config", "c.json", "--jobs", "0"],
    ])
    def test_usage_errors(self, argv, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(argv) == 1
        assert capsys.readouterr().err.strip()

    def test_invalid_config_value(self, tmp_path, capsys):
        assert main(["run", "--config", str(_run_config(tmp_path, repetitions=0)), "--out", str(tmp_path)]) == 1
        assert len(capsys.readouterr().err.strip().splitlines()) == 1

    def test_data_errors(self, tmp_path, capsys):
        assert main(["prepare", "--prices", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2
        assert main(["brute", "--instances", str(tmp_path / "none"), "--out", str(tmp_path / "b.csv")]) == 2
        assert main(["run", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
        bad = write_csv(tmp_path / "bad.csv", "instance,value\nx,1\n")
        (tmp_path / "runs").mkdir()
        write_csv(tmp_path / "runs" / "r.csv", "algorithm,pop\nx,1\n")
        assert main(["report", "--runs", str(tmp_path / "runs"), "--brute", str(bad), "--out", str(tmp_path)]) == 2
        errs = capsys.readouterr().err.strip().splitlines()
        assert len(errs) == 4 and all(e.startswith("error:") for e in errs)

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from components.data import load_csv, make_toy_split, save_csv
from components.evaluation import auroc, landscape, run_benchmark, save_landscape, spearman, write_report
from components.scoring import build_detector
from constants.constants_enum import Method, ScoreKind, ToyShape
from entities.entity_config import BenchmarkConfig, DatasetRef, DetectorConfig, ScaleConfig
from entities.entity_exception import DataFormatError, InvalidArgumentError, InvalidConfigError, NumericError
from entities.entity_features import FeatureMatrix
from utils.common import read_config_file

TOY_ABLATION = Path(__file__).resolve().parents[1] / "configs" / "bench" / "toy_ablation.json"


def pairwise_auc(scores, labels):
    pos, neg = scores[labels == 1], scores[labels == 0]
    wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


class TestAuroc:
    def test_perfect_and_inverted(self):
        labels = np.array([0, 0, 1, 1])
        assert auroc(np.array([0.1, 0.2, 0.8, 0.9]), labels) == 1.0
        assert auroc(np.array([0.9, 0.8, 0.2, 0.1]), labels) == 0.0

    def test_all_tied_is_one_half(self):
        assert auroc(np.ones(6), np.array([0, 1, 0, 1, 0, 1])) == 0.5

    def test_hand_example_with_a_tie(self):
        # pairs: (0.5>0.1) (0.5=0.5) (0.7>0.1) (0.7>0.5)
        assert auroc(np.array([0.1, 0.5, 0.5, 0.7]), np.array([0, 0, 1, 1])) == 0.875

    def test_matches_pairwise_count(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            labels = rng.integers(0, 2, n)
            labels[:2] = [0, 1]
            scores = np.round(rng.normal(size=n), 1)
            assert auroc(scores, labels) == pytest.approx(pairwise_auc(scores, labels), abs=1e-12)

    def test_invariant_under_monotone_transform(self, rng):
        scores = rng.normal(size=50)
        labels = (np.arange(50) % 3 == 0).astype(int)
        assert auroc(np.exp(3 * scores) + 7, labels) == auroc(scores, labels)

    def test_single_class_is_rejected(self):
        with pytest.raises(InvalidArgumentError):
            auroc(np.arange(3.0), np.zeros(3))

    def test_non_finite_scores(self):
        with pytest.raises(NumericError):
            auroc(np.array([0.0, np.nan]), np.array([0, 1]))

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            auroc(np.zeros(3), np.array([0, 1]))


def test_spearman_ignores_nan():
    a = np.array([1.0, 2.0, np.nan, 4.0])
    b = np.array([10.0, 20.0, 5.0, 40.0])
    assert spearman(a, b) == pytest.approx(1.0)


def presplit(labelled_csvs, method: Method, seeds=(0,), **detector) -> BenchmarkConfig:
    train, test = labelled_csvs
    scale = detector.pop("scale", ScaleConfig(epochs=2, batch_size=32))
    return BenchmarkConfig(dataset=DatasetRef(train=str(train), test=str(test)),
                           detector=DetectorConfig(method=method, scale=scale, **detector), seeds=list(seeds))


def second_scale(labelled_csvs, tmp_path, flip_label: bool = False):
    mixing = np.random.default_rng(3).normal(size=(4, 3))
    paths = []
    for source, has_labels in zip(labelled_csvs, (False, True)):
        matrix = load_csv(str(source), has_label_column=has_labels)
        labels = matrix.labels
        if has_labels and flip_label:
            labels = labels.copy()
            labels[0] = 1 - labels[0]
        target = tmp_path / f"{source.stem}_scale1.csv"
        save_csv(FeatureMatrix(matrix.data @ mixing, labels), str(target))
        paths.append(str(target))
    return paths


class TestBenchmark:
    def test_report_schema(self, labelled_csvs, tmp_path):
        cfg = presplit(labelled_csvs, Method.MAHAAD, seeds=(0, 1))
        cfg.output = str(tmp_path / "out" / "maha.json")
        report = run_benchmark(cfg)
        assert [r.seed for r in report.per_seed] == [0, 1]
        payload = json.loads((tmp_path / "out" / "maha.json").read_text())
        assert set(payload) == {"config", "per_seed", "mean", "std", "wall_time_s", "model_hashes"}
        assert payload["config"]["score"] == "S_maha"
        frame = pd.read_csv(tmp_path / "out" / "maha.csv")
        assert list(frame.columns) == ["seed", "auc", "model_hash"]

    def test_shifted_outliers_are_separated(self, labelled_csvs):
        report = run_benchmark(presplit(labelled_csvs, Method.MAHAAD))
        assert report.mean == 1.0

    def test_repeat_runs_match(self, labelled_csvs):
        cfg = presplit(labelled_csvs, Method.NLINVS, seeds=(0, 1))
        first, second = run_benchmark(cfg), run_benchmark(cfg)
        assert [r.auc for r in first.per_seed] == [r.auc for r in second.per_seed]
        assert [r.model_hash for r in first.per_seed] == [r.model_hash for r in second.per_seed]
        assert first.per_seed[0].model_hash != first.per_seed[1].model_hash

    def test_full_rank_linear_matches_maha(self, labelled_csvs):
        linear = run_benchmark(presplit(labelled_csvs, Method.LINEAR_INVARIANTS, scale=ScaleConfig(k=4)))
        maha = run_benchmark(presplit(labelled_csvs, Method.MAHAAD))
        assert linear.per_seed[0].auc == maha.per_seed[0].auc

    def test_toy_dataset(self):
        cfg = BenchmarkConfig(dataset=DatasetRef(toy=ToyShape.CIRCLE, n=200, n_test=50),
                              detector=DetectorConfig(method=Method.LINEAR_INVARIANTS, scale=ScaleConfig(k=1)),
                              score=ScoreKind.S_2NN, seeds=[0])
        assert run_benchmark(cfg).mean > 0.9

    def test_stage_failure_carries_seed(self, labelled_csvs):
        with pytest.raises(InvalidArgumentError) as info:
            run_benchmark(presplit(labelled_csvs, Method.DN2, seeds=(3,), dn2_k=500))
        assert info.value.context["seed"] == 3
        assert info.value.context["stage"] == "TrainStage"

    def test_write_report_both_formats(self, labelled_csvs, tmp_path):
        report = run_benchmark(presplit(labelled_csvs, Method.DN2, dn2_k=3))
        write_report(report, str(tmp_path / "dn2.json"))
        assert (tmp_path / "dn2.json").is_file() and (tmp_path / "dn2.csv").is_file()

    def test_multi_scale_presplit(self, labelled_csvs, tmp_path):
        train, test = labelled_csvs
        train_1, test_1 = second_scale(labelled_csvs, tmp_path)
        [cfg] = BenchmarkConfig.from_dict({
            "dataset": {"train": [str(train), train_1], "test": [str(test), test_1]},
            "method": "nlinvs", "score": "S_final", "seeds": [0],
            "detector": {"scale": {"epochs": 2, "batch_size": 32}},
        })
        multi = run_benchmark(cfg)
        single = run_benchmark(presplit(labelled_csvs, Method.NLINVS))
        assert multi.per_seed[0].model_hash != single.per_seed[0].model_hash
        assert multi.mean > 0.9
        assert multi.config["dataset"]["train"] == [str(train), train_1]

    def test_scale_files_must_pair_up(self, labelled_csvs):
        train, test = labelled_csvs
        with pytest.raises(InvalidConfigError):
            DatasetRef(train=[str(train), str(train)], test=[str(test)])

    def test_scale_labels_must_agree(self, labelled_csvs, tmp_path):
        train, test = labelled_csvs
        train_1, test_1 = second_scale(labelled_csvs, tmp_path, flip_label=True)
        cfg = BenchmarkConfig(dataset=DatasetRef(train=[str(train), train_1], test=[str(test), test_1]),
                              detector=DetectorConfig(method=Method.MAHAAD), seeds=[0])
        with pytest.raises(DataFormatError):
            run_benchmark(cfg)

    @pytest.mark.slow
    def test_toy_ablation_ordering(self):
        entries = {entry["name"]: dict(entry) for entry in read_config_file(TOY_ABLATION).benchmarks}
        means = {}
        for name in ("circle-final", "circle-inv", "circle-linear"):
            [cfg] = BenchmarkConfig.from_dict({**entries[name], "seeds": [0, 1, 2, 3, 4], "output": None})
            means[name] = run_benchmark(cfg).mean
        assert means["circle-final"] >= means["circle-inv"] - 0.01
        assert means["circle-inv"] >= means["circle-linear"] - 0.01


class TestBenchmarkConfig:
    def test_p_values_expand(self):
        configs = BenchmarkConfig.from_dict({
            "name": "thyroid", "dataset": {"name": "thyroid"}, "method": "nlinvs",
            "p_values": [1, 5], "output": "artifacts/thyroid.json",
        })
        assert [c.detector.scale.p_percent for c in configs] == [1, 5]
        assert [c.name for c in configs] == ["thyroid:p=1", "thyroid:p=5"]
        assert [c.output for c in configs] == ["artifacts/thyroid_p1.json", "artifacts/thyroid_p5.json"]

    def test_default_score_follows_method(self):
        [cfg] = BenchmarkConfig.from_dict({"dataset": {"toy": "circle"}, "method": "dn2"})
        assert cfg.score is ScoreKind.S_DN2

    def test_score_not_defined_for_method(self):
        with pytest.raises(InvalidConfigError):
            BenchmarkConfig.from_dict({"dataset": {"toy": "circle"}, "method": "mahaad", "score": "S_2nn"})

    def test_dataset_needs_one_source(self):
        with pytest.raises(InvalidConfigError):
            BenchmarkConfig.from_dict({"dataset": {"name": "thyroid", "toy": "circle"}})

    @pytest.mark.parametrize("p", [0, 100, 150])
    def test_p_out_of_range(self, p):
        with pytest.raises(InvalidArgumentError):
            ScaleConfig(p_percent=p)


class TestLandscape:
    @pytest.fixture
    def fitted(self, labelled_csvs, fast_config):
        train, test = labelled_csvs
        detector = build_detector(fast_config).fit([load_csv(str(train)).data])
        return detector, load_csv(str(test), has_label_column=True)

    def test_centre_cell_is_the_trained_model(self, fitted):
        detector, test = fitted
        grid = landscape(detector, None, test, grid_n=3, range_r=0.5, seed=1)
        assert grid.xs.tolist() == [-0.5, 0.0, 0.5]
        assert grid.loss[1, 1] == grid.center_loss
        expected = auroc(detector.score([test.data], kinds=[ScoreKind.S_INV])["S_inv"], test.labels)
        assert grid.auc[1, 1] == expected == grid.center_auc

    def test_seeded_directions_repeat(self, fitted):
        detector, test = fitted
        first = landscape(detector, None, test, grid_n=3, seed=4)
        second = landscape(detector, None, test, grid_n=3, seed=4)
        np.testing.assert_array_equal(first.loss, second.loss)

    def test_csv_layout(self, fitted, tmp_path):
        detector, test = fitted
        grid = landscape(detector, None, test, grid_n=3)
        path = save_landscape(grid, str(tmp_path / "grid.csv"), {"grid": 3})
        with open(path) as f:
            assert json.loads(f.readline()[2:]) == {"grid": 3}
        frame = pd.read_csv(path, comment="#")
        assert list(frame.columns) == ["x", "y", "loss", "auc"]
        assert len(frame) == 9

    def test_rejects_small_grid(self, fitted):
        detector, test = fitted
        with pytest.raises(InvalidArgumentError):
            landscape(detector, None, test, grid_n=2)

    def test_rejects_linear_detector(self, labelled_csvs):
        train, test = labelled_csvs
        detector = build_detector(DetectorConfig(method=Method.LINEAR_INVARIANTS, scale=ScaleConfig(k=1)))
        detector.fit([load_csv(str(train)).data])
        with pytest.raises(InvalidArgumentError):
            landscape(detector, None, load_csv(str(test), has_label_column=True), grid_n=3)

    def test_needs_labels(self, fitted):
        detector, test = fitted
        with pytest.raises(InvalidArgumentError):
            landscape(detector, None, FeatureMatrix(test.data), grid_n=3)

    @pytest.mark.slow
    def test_flat_regions_generalise_better(self):
        split = make_toy_split(ToyShape.CIRCLE, seed=0)
        scale = ScaleConfig(k=1, hidden_width=32, epochs=60, lr_start=5e-3, lr_end=5e-4, seed=0)
        config = DetectorConfig(method=Method.NLINVS, scale=scale)
        detector = build_detector(config).fit([split.train.data], kinds=[ScoreKind.S_INV])
        grid = landscape(detector, None, split.test, grid_n=25, range_r=1.0, seed=0)
        assert spearman(grid.loss, grid.auc) < -0.5

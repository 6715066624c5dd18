import functools
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import click
import numpy as np
import pandas as pd
import torch
from rich.console import Console
from rich.table import Table

from components.data import load_features, make_toy_split, save_csv, standardize_inverse
from components.evaluation import auroc, landscape, run_benchmark, save_landscape
from components.scoring import build_detector, load_detector
from components.scoring.preprocessing import apply_preprocessing
from constants.constants_enum import Method, ScoreKind, ToyShape
from entities.entity_config import BenchmarkConfig, DetectorConfig, ScaleConfig
from entities.entity_exception import DataFormatError, InvalidArgumentError, MissingDataError, NlinvError
from entities.entity_features import FeatureMatrix
from logs import configure_logging
from models.vpn import project_invariants
from utils.common import configure_threads, load_training_config, read_config_file

logger = logging.getLogger(__name__)

SCORE_CHOICES = {
    "inv": ScoreKind.S_INV,
    "2nn": ScoreKind.S_2NN,
    "final": ScoreKind.S_FINAL,
    "maha": ScoreKind.S_MAHA,
    "dn2": ScoreKind.S_DN2,
}


def handle_errors(command):
    """Map library errors to exit codes; with --json the error goes to stderr as one object."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except NlinvError as e:
            if ctx.obj and ctx.obj.get("json"):
                click.echo(json.dumps(e.to_dict(), sort_keys=True), err=True)
            else:
                click.echo(f"Error [{e.error_type.name}]: {e.message}", err=True)
            ctx.exit(e.exit_code)
    return wrapper


def write_with_header(frame: pd.DataFrame, path: str, header: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(f"# {json.dumps(header, sort_keys=True)}\n")
        frame.to_csv(f, index=False, float_format="%.17g")


def read_with_header(path: str) -> pd.DataFrame:
    if not Path(path).is_file():
        raise MissingDataError(f"Scores file not found: {path}", path=path)
    return pd.read_csv(path, comment="#")


def load_scales(paths: Sequence[str], has_labels: bool = False) -> List[FeatureMatrix]:
    if not paths:
        raise InvalidArgumentError("At least one --features file is required")
    return [load_features(path, has_labels=has_labels) for path in paths]


def pick(value, default):
    return default if value is None else value


@click.group()
@click.option("--json", "json_errors", is_flag=True, help="Report errors as JSON on stderr.")
@click.option("--log-level", default="INFO", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--log-file", default=None, help="Also log to this file.")
@click.pass_context
def cli(ctx, json_errors, log_level, log_file):
    """Unsupervised OOD detection with learned non-linear invariants."""
    configure_logging(log_level, log_file)
    configure_threads()
    ctx.obj = {"json": json_errors}


@cli.command()
@click.option("--features", "features", multiple=True, required=True, help="Training features, one file per scale.")
@click.option("--p", "p_percent", type=float, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--batch", "batch_size", type=int, default=None)
@click.option("--lr", "lr_start", type=float, default=None)
@click.option("--lr-end", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--blocks", "n_blocks", type=int, default=None, help="Number of (rotation, coupling) blocks.")
@click.option("--hidden", "hidden_width", type=int, default=None, help="Coupling MLP width.")
@click.option("--k", "k", type=int, default=None, help="Force the number of invariants.")
@click.option("--no-standardize", is_flag=True)
@click.option("--unit-norm-last", is_flag=True, help="L2-normalise the rows of the last scale.")
@click.option("--no-bwd-loss", is_flag=True)
@click.option("--linear", is_flag=True, help="PCA (affine) invariants instead of the VPN.")
@click.option("--method", type=click.Choice([m.value for m in Method]), default=None)
@click.option("--dn2-k", type=int, default=None)
@click.option("--out", required=True, help="Detector file to write.")
@handle_errors
def train(features, p_percent, epochs, batch_size, lr_start, lr_end, seed, n_blocks, hidden_width, k,
          no_standardize, unit_norm_last, no_bwd_loss, linear, method, dn2_k, out):
    """Fit a detector on training features and write it to OUT."""
    defaults = load_training_config()
    if method is None:
        method = Method.LINEAR_INVARIANTS if linear else Method.NLINVS_NO_BWD if no_bwd_loss else Method.NLINVS
    else:
        method = Method(method)
    scale = ScaleConfig(
        p_percent=pick(p_percent, defaults.training.p_percent),
        epochs=pick(epochs, defaults.training.epochs),
        batch_size=pick(batch_size, defaults.training.batch_size),
        lr_start=pick(lr_start, defaults.training.lr_start),
        lr_end=pick(lr_end, defaults.training.lr_end),
        seed=pick(seed, defaults.training.seed),
        n_blocks=pick(n_blocks, defaults.training.n_blocks),
        hidden_width=pick(hidden_width, defaults.training.hidden_width),
        k=k,
        backward_loss=not no_bwd_loss,
    )
    config = DetectorConfig(
        method=method,
        scale=scale,
        standardize=defaults.detector.standardize and not no_standardize,
        unit_norm_last=unit_norm_last or defaults.detector.unit_norm_last,
        dn2_k=pick(dn2_k, defaults.detector.dn2_k),
    )
    scales = load_scales(features)
    detector = build_detector(config, progress=False).fit([m.data for m in scales])
    detector.save(out)
    click.echo(f"{method.value} detector with {detector.n_scales} scale(s) written to {out}")


@cli.command()
@click.option("--model", required=True, type=str)
@click.option("--features", "features", multiple=True, required=True, help="Features to score, one file per scale.")
@click.option("--score", "score", type=click.Choice(list(SCORE_CHOICES)), default=None)
@click.option("--has-labels", is_flag=True, help="The feature files end with a 0/1 label column.")
@click.option("--out", required=True)
@handle_errors
def score(model, features, score, has_labels, out):
    """Score features with a trained detector; writes a CSV of scores."""
    detector, digest = load_detector(model)
    kinds = None if score is None else [SCORE_CHOICES[score]]
    scales = load_scales(features, has_labels)
    scores = detector.score([m.data for m in scales], kinds)
    frame = pd.DataFrame({"id": np.arange(scales[0].n_rows)})
    for kind in ScoreKind:
        if kind.value in scores:
            frame[kind.value] = scores[kind.value]
    if has_labels:
        frame["label"] = scales[0].labels.astype(int)
    write_with_header(frame, out, {"config": detector.config.to_dict(), "model_hash": digest})
    click.echo(f"{len(frame)} rows scored to {out}")


@cli.command(name="eval")
@click.option("--scores", "scores_path", required=True)
@click.option("--column", default=None, help="Score column; defaults to S_final, else the first score column.")
@click.option("--labels", "labels_path", default=None, help="CSV whose last column holds 0/1 labels.")
@click.option("--test-with-labels", "test_path", default=None, help="Feature file with a trailing label column.")
@handle_errors
def evaluate(scores_path, column, labels_path, test_path):
    """Print the AUROC of a score column."""
    frame = read_with_header(scores_path)
    score_columns = [kind.value for kind in ScoreKind if kind.value in frame.columns]
    if column is None:
        if not score_columns:
            raise DataFormatError(f"{scores_path} has no score column")
        column = ScoreKind.S_FINAL.value if ScoreKind.S_FINAL.value in score_columns else score_columns[0]
    if column not in frame.columns:
        raise InvalidArgumentError(f"Column {column!r} not in {scores_path}", columns=list(frame.columns))

    if labels_path is not None:
        labels = load_features(labels_path).data[:, -1]
    elif test_path is not None:
        labels = load_features(test_path, has_labels=True).labels
    elif "label" in frame.columns:
        labels = frame["label"].to_numpy()
    else:
        raise InvalidArgumentError("Labels are required: --labels, --test-with-labels or a 'label' column")
    value = auroc(frame[column].to_numpy(), labels)
    click.echo(f"{value:.17g}")


@cli.command()
@click.option("--config", "config_path", required=True, help="Benchmark file (JSON or YAML).")
@click.option("--progress", is_flag=True, help="Show training progress bars.")
@handle_errors
def bench(config_path, progress):
    """Run every benchmark in a JSON file and print mean/std AUC."""
    payload = read_config_file(Path(config_path)).to_dict()
    entries = payload.get("benchmarks", [payload])
    configs = [cfg for entry in entries for cfg in BenchmarkConfig.from_dict(dict(entry))]

    table = Table(title="AUROC")
    for title in ("benchmark", "score", "mean", "std", "seeds"):
        table.add_column(title)
    for cfg in configs:
        report = run_benchmark(cfg, progress=progress)
        table.add_row(cfg.name, cfg.score.value, f"{report.mean:.4f}", f"{report.std:.4f}", str(len(report.per_seed)))
    Console().print(table)


@cli.command()
@click.option("--shape", type=click.Choice([s.value for s in ToyShape]), default=ToyShape.CIRCLE.value)
@click.option("--n", "n_train", type=int, default=None)
@click.option("--n-test", type=int, default=None)
@click.option("--noise", type=float, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@handle_errors
def toy(shape, n_train, n_test, noise, seed, out_dir):
    """Train on a 2-D toy shape; write data, invariant representation, reconstruction and layer trace."""
    profile = load_training_config().toy
    split = make_toy_split(ToyShape(shape), pick(n_train, profile.n_train), pick(n_test, profile.n_test),
                           pick(noise, profile.noise), seed, profile.half_width)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(split.train, str(out / "train.csv"))
    save_csv(split.test, str(out / "test.csv"))

    config = DetectorConfig(method=Method.NLINVS, scale=ScaleConfig(
        k=profile.k, hidden_width=profile.hidden_width, epochs=profile.epochs, batch_size=profile.batch_size,
        lr_start=profile.lr_start, lr_end=profile.lr_end, seed=seed))
    detector = build_detector(config).fit([split.train.data])
    detector.save(str(out / "model.nlinv"))

    ts = detector.detector.scales[0]
    stats = detector.preprocessing.stats[0]
    prepared = apply_preprocessing(detector.preprocessing, [split.train.data])[0]
    with torch.no_grad():
        trace = ts.model.trace(torch.from_numpy(prepared))
        invariants = trace[-1]
        reconstruction = ts.model.inverse(project_invariants(invariants, ts.k)).numpy()
    if stats is not None:
        reconstruction = standardize_inverse(stats, reconstruction)

    header = {"config": config.to_dict(), "shape": shape, "k": ts.k}
    write_with_header(pd.DataFrame(invariants.numpy(), columns=[f"g{i}" for i in range(ts.dim)]),
                      str(out / "invariants.csv"), header)
    write_with_header(pd.DataFrame(reconstruction, columns=list(split.train.columns)),
                      str(out / "reconstruction.csv"), header)
    layers = pd.concat([
        pd.DataFrame({"layer": idx, "id": np.arange(len(values)), "x": values[:, 0].numpy(), "y": values[:, 1].numpy()})
        for idx, values in enumerate(trace)
    ], ignore_index=True)
    write_with_header(layers, str(out / "layers.csv"), header)

    scores = detector.score([split.test.data])
    frame = pd.DataFrame({"id": np.arange(split.test.n_rows)})
    for kind in (ScoreKind.S_INV, ScoreKind.S_2NN, ScoreKind.S_FINAL):
        frame[kind.value] = scores[kind.value]
    frame["label"] = split.test.labels.astype(int)
    write_with_header(frame, str(out / "test_scores.csv"), header)
    for kind in (ScoreKind.S_INV, ScoreKind.S_FINAL):
        click.echo(f"{kind.value} AUC {auroc(scores[kind.value], split.test.labels):.4f}")


@cli.command(name="landscape")
@click.option("--model", required=True)
@click.option("--test", "test_path", required=True, help="Labelled test features (trailing label column).")
@click.option("--train", "train_path", default=None, help="Training features; defaults to those stored in the model.")
@click.option("--grid", "grid_n", type=int, default=None)
@click.option("--range", "range_r", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True)
@handle_errors
def landscape_command(model, test_path, train_path, grid_n, range_r, seed, out):
    """Evaluate training loss and AUC on a seeded 2-D slice of parameter space."""
    defaults = load_training_config().landscape
    detector, digest = load_detector(model)
    if not detector.method.is_invariant:
        raise InvalidArgumentError(f"Landscape needs an invariant detector, got {detector.method.value}")
    test = load_features(test_path, has_labels=True)
    train_data: Optional[np.ndarray] = None if train_path is None else load_features(train_path).data
    grid_n, range_r, seed = pick(grid_n, defaults.grid), pick(range_r, defaults.range), pick(seed, defaults.seed)
    grid = landscape(detector, train_data, test, grid_n, range_r, seed)
    save_landscape(grid, out, {"model_hash": digest, "grid": grid_n, "range": range_r, "seed": seed,
                               "config": detector.config.to_dict()})
    click.echo(f"center loss {grid.center_loss:.6g}, center AUC {grid.center_auc:.4f}; {grid.n_cells} cells to {out}")


if __name__ == "__main__":
    cli()

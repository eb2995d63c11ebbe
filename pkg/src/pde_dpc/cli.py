"""Command-line pipeline: generate, train-operator, train-policy, evaluate, inspect.

Exit codes: 0 success, 1 unexpected failure, 2 usage or configuration error,
3 missing or mismatched artifact, 4 acceptance failure.
"""

import argparse
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from ._version import __version__
from .checkpoint import MAGIC, read_header
from .control.io import load_policy, save_policy
from .control.train import train_policy
from .data.dataset import DatasetHandle, generate_dataset
from .data.manifest import MANIFEST_NAME, DatasetManifest
from .dsl.models import ExperimentConfig
from .dsl.parser import load_experiment
from .errors import ArtifactMismatchError, ConfigurationError, DatasetError, DPCError
from .logging_config import setup_logging
from .numerics.grid import build_grid
from .numerics.types import Array
from .runtime.config import RuntimeSettings, load_runtime_settings
from .runtime.engine import Engine, failed_rules
from .runtime.evaluation import build_comparison
from .runtime.figures import render_scenario
from .runtime.query import eval_path
from .runtime.report import write_curve_csv, write_report_csv, write_summary_csv, write_summary_json
from .surrogate.io import load_operator, save_operator
from .surrogate.train import evaluate_operator, train_operator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_ARTIFACT = 3
EXIT_ACCEPTANCE = 4


class UsageError(Exception):
    """Command-line arguments that cannot be acted on."""


def _experiment_root(experiment: ExperimentConfig, settings: RuntimeSettings) -> Path:
    return Path(settings.out_dir or experiment.output_dir) / experiment.name


def _load(path: Path) -> ExperimentConfig:
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    return load_experiment(path)


def _with_epochs(experiment: ExperimentConfig, section: str, epochs: int | None) -> ExperimentConfig:
    """Override ``<section>.epochs``; the physical config hash is unaffected."""
    if epochs is None:
        return experiment
    if epochs < 0:
        raise UsageError("--epochs must be >= 0")
    part = getattr(experiment, section).model_copy(update={"epochs": epochs})
    return experiment.model_copy(update={section: part})


def _target_pool(
    experiment: ExperimentConfig, dataset: Path | None, force: bool
) -> Array | None:
    if experiment.target_source != "dataset":
        return None
    if dataset is None:
        raise UsageError(f"{experiment.name} draws targets from a dataset; pass --dataset")
    handle = DatasetHandle.open(dataset)
    handle.check_compatible(experiment, force)
    return handle.terminal_fields("train")


def cmd_generate(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    experiment = _load(args.config)
    n_samples = experiment.dataset.n_samples if args.samples is None else args.samples
    if n_samples < 0:
        raise UsageError("--samples must be >= 0")
    seed = experiment.dataset.seed if args.seed is None else args.seed
    out_dir = args.out or _experiment_root(experiment, settings) / "dataset"

    handle = generate_dataset(experiment, n_samples, seed, out_dir, threads=args.threads)
    manifest = handle.manifest
    print(
        f"[generate] {experiment.name}: {manifest.n_samples}/{manifest.n_requested} trajectories "
        f"({manifest.n_failed} failed) -> {handle.root} config={manifest.config_hash[:12]}"
    )
    return EXIT_OK


def cmd_train_operator(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    experiment = _with_epochs(_load(args.config), "operator", args.epochs)
    data = DatasetHandle.open(args.dataset)
    data.check_compatible(experiment, args.force)
    seed = experiment.operator.seed if args.seed is None else args.seed
    root = _experiment_root(experiment, settings)

    result = train_operator(data, experiment.operator, seed)
    checkpoint = save_operator(args.out or root / "operator.ckpt", result.model, experiment)
    curve = write_curve_csv(root / "operator_curve.csv", result.curve, experiment.config_hash())

    message = f"[train-operator] {experiment.name}: {len(result.curve)} epochs -> {checkpoint}"
    if result.aborted:
        message += " (aborted, last stable parameters kept)"
    print(message)
    print(f"[train-operator] curve -> {curve}")
    if data.indices("test"):
        print(f"[train-operator] test relative L2: {evaluate_operator(result.model, data, 'test')!r}")
    else:
        logger.warning("Dataset has no test split; skipping rollout error")
    return EXIT_OK


def cmd_train_policy(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    experiment = _with_epochs(_load(args.config), "policy", args.epochs)
    operator = load_operator(args.operator, experiment, args.force)
    pool = _target_pool(experiment, args.dataset, args.force)
    seed = experiment.policy.seed if args.seed is None else args.seed
    root = _experiment_root(experiment, settings)

    result = train_policy(operator, experiment, seed, target_pool=pool)
    checkpoint = save_policy(args.out or root / "policy.ckpt", result.policy, experiment)
    curve = write_curve_csv(root / "policy_curve.csv", result.curve, experiment.config_hash())

    message = f"[train-policy] {experiment.name}: {len(result.curve)} epochs -> {checkpoint}"
    if result.aborted:
        message += " (aborted, last stable parameters kept)"
    print(message)
    if result.curve:
        print(f"[train-policy] final DPC loss: {result.curve[-1].loss!r}")
    print(f"[train-policy] curve -> {curve}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    experiment = _load(args.config)
    n_eval = experiment.evaluation.n_eval if args.n_eval is None else args.n_eval
    if n_eval < 1:
        raise UsageError(f"--n-eval must be >= 1, got {n_eval}")
    seed = experiment.evaluation.seed if args.seed is None else args.seed
    operator = load_operator(args.operator, experiment, args.force)
    policy = load_policy(args.policy, experiment, args.force)
    pool = _target_pool(experiment, args.dataset, args.force)
    out_dir = args.out or _experiment_root(experiment, settings) / "eval"

    report = build_comparison(
        policy,
        operator,
        experiment,
        n_eval,
        seed,
        target_pool=pool,
        threads=args.threads,
        keep_runs=experiment.evaluation.figures,
    )
    write_report_csv(out_dir / "report.csv", report)
    write_summary_csv(out_dir / "summary.csv", report)
    write_summary_json(out_dir / "summary.json", report)
    grid = build_grid(experiment)
    for index, run in sorted(report.runs.items()):
        render_scenario(out_dir / "figures" / f"scenario_{index:03}.svg", run, grid, report.cost)

    summary = report.summary()
    columns = summary["columns"]
    print(f"[evaluate] {experiment.name}: {summary['n_completed']}/{summary['n_eval']} scenarios -> {out_dir}")
    for name, stats in columns.items():
        print(f"  {name}: {stats['mean']!r} ± {stats['std']!r} (median {stats['median']!r})")

    outcomes = Engine().check(experiment.evaluation.acceptance, summary)
    failed = failed_rules(outcomes)
    if failed:
        print(f"[evaluate] FAIL ({len(failed)} acceptance criteria)")
        for outcome in failed:
            print(f"  - {outcome.name}: {outcome.message}")
        return EXIT_ACCEPTANCE
    if outcomes:
        print(f"[evaluate] OK ({len(outcomes)} acceptance criteria)")
    return EXIT_OK


def _metadata(path: Path) -> dict[str, Any]:
    """Manifest, checkpoint header or JSON summary behind ``path``."""
    if path.is_dir():
        return DatasetManifest.read(path).model_dump(mode="json")
    if not path.is_file():
        raise ArtifactMismatchError(f"Nothing to inspect at {path}")
    with path.open("rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_header(path).model_dump(mode="json")
    if path.name == MANIFEST_NAME:
        return DatasetManifest.read(path.parent).model_dump(mode="json")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise ArtifactMismatchError(f"{path} is neither a checkpoint nor a JSON document") from None
    if not isinstance(document, dict):
        raise ArtifactMismatchError(f"{path}: expected a JSON object")
    return document


def cmd_inspect(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    document = _metadata(args.path)
    if args.query:
        document = eval_path(document, args.query)
    print(json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False))
    return EXIT_OK


def build_parser(settings: RuntimeSettings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads",
        type=int,
        default=settings.threads,
        help=f"Worker threads; 1 keeps runs bitwise reproducible (default: {settings.threads})",
    )
    common.add_argument("--log-level", default=settings.log_level, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--log-file", type=Path, default=None, help="Append JSONL logs to this file")

    parser = argparse.ArgumentParser(
        prog="pde-dpc",
        description="Differentiable predictive control of 1-D PDEs with time-integrated DeepONet surrogates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="Simulate an operator-training dataset")
    gen.add_argument("config", type=Path)
    gen.add_argument("--samples", type=int, default=None, help="Trajectories (default: dataset.n_samples)")
    gen.add_argument("--seed", type=int, default=None, help="Base seed (default: dataset.seed)")
    gen.add_argument("--out", type=Path, default=None, help="Dataset directory")
    gen.set_defaults(handler=cmd_generate)

    op = sub.add_parser("train-operator", parents=[common], help="Fit the surrogate on a dataset")
    op.add_argument("config", type=Path)
    op.add_argument("dataset", type=Path)
    op.add_argument("--epochs", type=int, default=None)
    op.add_argument("--seed", type=int, default=None)
    op.add_argument("--out", type=Path, default=None, help="Checkpoint path")
    op.add_argument("--force", action="store_true", help="Accept a dataset from another config")
    op.set_defaults(handler=cmd_train_operator)

    pol = sub.add_parser("train-policy", parents=[common], help="Train the control policy through the surrogate")
    pol.add_argument("config", type=Path)
    pol.add_argument("operator", type=Path)
    pol.add_argument("--epochs", type=int, default=None)
    pol.add_argument("--seed", type=int, default=None)
    pol.add_argument("--dataset", type=Path, default=None, help="Dataset supplying targets")
    pol.add_argument("--out", type=Path, default=None, help="Checkpoint path")
    pol.add_argument("--force", action="store_true")
    pol.set_defaults(handler=cmd_train_policy)

    ev = sub.add_parser("evaluate", parents=[common], help="Compare natural and controlled dynamics")
    ev.add_argument("config", type=Path)
    ev.add_argument("operator", type=Path)
    ev.add_argument("policy", type=Path)
    ev.add_argument("--n-eval", type=int, default=None)
    ev.add_argument("--seed", type=int, default=None)
    ev.add_argument("--dataset", type=Path, default=None, help="Dataset supplying targets")
    ev.add_argument("--out", type=Path, default=None, help="Report directory")
    ev.add_argument("--force", action="store_true")
    ev.set_defaults(handler=cmd_evaluate)

    ins = sub.add_parser("inspect", parents=[common], help="Print dataset or checkpoint metadata")
    ins.add_argument("path", type=Path)
    ins.add_argument("--query", default=None, help="JSONPath selecting part of the metadata")
    ins.set_defaults(handler=cmd_inspect)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        settings = load_runtime_settings()
    except ValueError as err:
        print(f"[error] {err}")
        return EXIT_USAGE

    args = build_parser(settings).parse_args(argv)
    setup_logging(args.log_level, args.log_file)
    if args.threads < 1:
        print("[error] --threads must be a positive integer")
        return EXIT_USAGE

    try:
        return args.handler(args, settings)
    except ValidationError as err:
        print(f"[error] invalid config:\n{err}")
        return EXIT_USAGE
    except (UsageError, ConfigurationError, yaml.YAMLError) as err:
        print(f"[error] {err}")
        return EXIT_USAGE
    except (ArtifactMismatchError, DatasetError) as err:
        print(f"[error] {err}")
        return EXIT_ARTIFACT
    except DPCError as err:
        logger.error(f"{args.command} failed", exc_info=True)
        print(f"[error] {type(err).__name__}: {err}")
        return EXIT_FAILURE
    except ValueError as err:
        print(f"[error] {err}")
        return EXIT_USAGE


"""
CT-GNN command-line entry point.

Every command reads its inputs from files, writes its artifacts to files and
reports failures as ``<command>: [CODE] message`` on stderr with a non-zero
exit code (1 usage/config, 2 data, 3 numeric failure).
"""

import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click

from domain.data import generate_synthetic, load_dataset, save_dataset, split
from domain.graph import (
    ADJACENCY_KINDS,
    adjacency_frame,
    build_graph,
    count_cooccurrence,
    export_graph,
    import_graph,
    load_schema,
    save_schema,
    summarize_graph,
)
from domain.metrics import MetricReport
from executors import ProcessExecutor
from framework.config import (
    APP_NAME,
    APP_VERSION,
    SearchSpace,
    SyntheticSpec,
    load_config_model,
    load_run_config,
    save_config,
)
from framework.config.constants import WATER_SCHEMES
from framework.exceptions import (
    ComputeException,
    ConfigurationException,
    DataException,
    FrameworkException,
)
from framework.logging import get_logger, setup_logging
from tasks.ml import (
    Checkpoint,
    Datasets,
    Trainer,
    default_search_space,
    evaluate_checkpoint,
    fit_single_task_baselines,
    initial_search_config,
    load_baseline,
    sequential_search,
    task_weight_sweep,
)

logger = get_logger("main")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, ComputeException):
        return EXIT_NUMERIC
    if isinstance(error, (DataException, OSError)):
        return EXIT_DATA
    return EXIT_USAGE


def _absolute(path: Optional[str]) -> Optional[str]:
    return str(Path(path).resolve()) if path else None


def _float_list(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from None


def run_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    """Flags shared by every command that trains; they override the run config."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Run config (JSON/YAML)."),
        click.option("--epochs", type=int, default=None, help="Override training.epochs."),
        click.option("--batch-size", type=int, default=None, help="Override training.batch_size."),
        click.option("--seed", type=int, default=None, help="Override training.seed."),
        click.option("--lr", type=float, default=None, help="Override optimizer.lr."),
        click.option("--gnn-kind", type=click.Choice(["gcn", "gat"]), default=None, help="Override model.gnn_kind."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _load_config(config_path: Optional[str], **flags: Any):
    overrides = {
        "training.epochs": flags.get("epochs"),
        "training.batch_size": flags.get("batch_size"),
        "training.seed": flags.get("seed"),
        "optimizer.lr": flags.get("lr"),
        "model.gnn_kind": flags.get("gnn_kind"),
        "model.mode": flags.get("mode"),
        "training.baseline_report": _absolute(flags.get("baseline_report")),
    }
    return load_run_config(config_path, overrides=overrides)


def _write_json(data: Dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2))
    return path


@click.group(context_settings={"help_option_names": ["-h", "--help"], "show_default": True})
@click.version_option(APP_VERSION, prog_name=APP_NAME)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    help="Console log level.",
)
@click.option("--log-json/--no-log-json", default=False, help="Serialize log records as JSON.")
@click.option(
    "--log-performance/--no-log-performance",
    default=False,
    help="Write timing records as JSON lines to <log dir>/performance.log.",
)
def cli(log_level: str, log_json: bool, log_performance: bool) -> None:
    """Cross-task graph neural network multi-task classification toolkit."""
    setup_logging({"level": log_level, "structured": log_json, "performance": log_performance})


@cli.command("gen-synth")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Dataset JSONL to write.")
@click.option("--seed", type=int, default=None, help="Override the generator seed.")
@click.option("--n-records", type=int, default=None, help="Override the generator record count.")
@click.option(
    "--split",
    "fractions",
    callback=_float_list,
    default=None,
    help="Also write <out>.train/.val/.test.jsonl, e.g. 0.8,0.1,0.1.",
)
def gen_synth(
    spec_path: str, out_path: str, seed: Optional[int], n_records: Optional[int], fractions: Optional[List[float]]
) -> None:
    """Generate a correlated synthetic dataset from SPEC_PATH."""
    spec = load_config_model(SyntheticSpec, spec_path)
    updates = {k: v for k, v in {"seed": seed, "n_records": n_records}.items() if v is not None}
    if updates:
        spec = spec.model_copy(update=updates)
    schema, records = generate_synthetic(spec)

    out = Path(out_path)
    save_dataset(records, out)
    save_schema(schema, out.with_suffix(".schema.json"))
    click.echo(f"wrote {len(records)} records to {out}")
    if fractions is not None:
        for name, part in zip(("train", "val", "test"), split(records, fractions, spec.seed)):
            target = out.with_suffix(f".{name}.jsonl")
            save_dataset(part, target)
            click.echo(f"wrote {len(part)} {name} records to {target}")


@cli.command("build-graph")
@click.option("--data", "data_path", type=click.Path(dir_okay=False), required=True, help="Training JSONL.")
@click.option("--schema", "schema_path", type=click.Path(dir_okay=False), required=True, help="Task schema JSON.")
@click.option("--tau", type=float, default=0.05, help="Co-occurrence threshold.")
@click.option("--p", "p", type=float, default=0.2, help="Neighbour mass of each re-weighted row.")
@click.option("--water-task", default=None, help="Task whose labels are raw water-level percentages.")
@click.option("--water-scheme", type=click.Choice(list(WATER_SCHEMES)), default="binned", help="Water label scheme.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Graph JSON to write.")
def build_graph_command(
    data_path: str,
    schema_path: str,
    tau: float,
    p: float,
    water_task: Optional[str],
    water_scheme: str,
    out_path: str,
) -> None:
    """Count label co-occurrences and build the cross-task graph."""
    schema = load_schema(schema_path)
    records = load_dataset(data_path, schema, water_task=water_task, water_scheme=water_scheme)
    graph = build_graph(count_cooccurrence(records, schema), tau, p)
    summary = summarize_graph(graph)
    logger.info(
        f"Graph: {summary.num_edges} edges, density {summary.density:.3f}, "
        f"{len(summary.isolated_nodes)} isolated nodes"
    )
    for pair, edges in summary.edges_by_pair.items():
        logger.debug(f"  {pair}: {edges} edges")
    export_graph(graph, out_path)
    click.echo(f"wrote {summary.num_nodes}-node graph to {out_path}")


@cli.command("train")
@run_options
@click.option("--mode", type=click.Choice(["ctgnn", "baseline"]), default=None, help="Override model.mode.")
@click.option("--baseline-report", type=click.Path(dir_okay=False), default=None, help="Single-task report for delta_mtl.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="runs/latest", help="Directory for run artifacts.")
@click.option("--resume", "resume_path", type=click.Path(dir_okay=False), default=None, help="Checkpoint to continue.")
@click.option("--stop-at-epoch", type=int, default=None, help="Stop after this epoch; continue later with --resume.")
def train_command(
    config_path: Optional[str],
    out_dir: str,
    resume_path: Optional[str],
    stop_at_epoch: Optional[int],
    **flags: Any,
) -> None:
    """Train a model; writes checkpoint.json, history.csv and config.json."""
    if resume_path:
        given = ["--config"] if config_path else []
        given += ["--" + name.replace("_", "-") for name, value in flags.items() if value is not None]
        if given:
            raise click.UsageError(f"--resume continues the checkpoint's own config; drop {', '.join(given)}")
        checkpoint = Checkpoint.load(resume_path)
        config = checkpoint.config
        datasets = Datasets.from_config(config)
        trainer = Trainer.from_checkpoint(checkpoint, datasets, baseline=load_baseline(config))
    else:
        config = _load_config(config_path, **flags)
        datasets = Datasets.from_config(config)
        trainer = Trainer(config, datasets, baseline=load_baseline(config))

    trainer.train(until=stop_at_epoch)
    out = Path(out_dir)
    trainer.checkpoint().save(out / "checkpoint.json")
    trainer.save_history(out / "history.csv")
    save_config(config, out / "config.json")
    click.echo(f"trained {trainer.epoch}/{config.training.epochs} epochs; artifacts in {out}")
    if trainer.best_epoch is not None:
        click.echo(f"best epoch {trainer.best_epoch} (validation score {trainer.best_score:.4f})")


@cli.command("eval")
@click.option("--checkpoint", "checkpoint_path", type=click.Path(dir_okay=False), required=True, help="Checkpoint JSON.")
@click.option("--data", "data_path", type=click.Path(dir_okay=False), required=True, help="Dataset JSONL to score.")
@click.option("--schema", "schema_path", type=click.Path(dir_okay=False), default=None, help="Dataset schema JSON.")
@click.option("--split-name", default="test", help="Split name recorded in the report.")
@click.option("--baseline-report", type=click.Path(dir_okay=False), default=None, help="Single-task report for delta_mtl.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Report JSON to write.")
def eval_command(
    checkpoint_path: str,
    data_path: str,
    schema_path: Optional[str],
    split_name: str,
    baseline_report: Optional[str],
    out_path: Optional[str],
) -> None:
    """Score a checkpoint's best parameters on a dataset."""
    checkpoint = Checkpoint.load(checkpoint_path)
    schema = load_schema(schema_path) if schema_path else checkpoint.schema
    checkpoint.schema.require_same(schema, what="Dataset")
    data = checkpoint.config.data
    records = load_dataset(data_path, schema, water_task=data.water_task, water_scheme=data.water_scheme)
    baseline = MetricReport.load(baseline_report) if baseline_report else None
    report = evaluate_checkpoint(checkpoint, records, schema, split=split_name, baseline=baseline)
    if out_path:
        report.save(out_path)
    click.echo(report.render_table())


@cli.command("sweep")
@run_options
@click.option("--space", "space_path", type=click.Path(dir_okay=False), default=None, help="Search space JSON.")
@click.option(
    "--lambda-grid",
    callback=_float_list,
    default=None,
    help="Sweep the primary task weight over these values instead, e.g. 0.5,0.7,0.9.",
)
@click.option("--initial/--no-initial", default=False, help="Start from the initial search values.")
@click.option("--workers", type=int, default=0, help="Parallel trial processes (0 runs in-process).")
@click.option("--out-dir", type=click.Path(file_okay=False), default="runs/sweep", help="Directory for the trace.")
def sweep_command(
    config_path: Optional[str],
    space_path: Optional[str],
    lambda_grid: Optional[List[float]],
    initial: bool,
    workers: int,
    out_dir: str,
    **flags: Any,
) -> None:
    """Sequential hyperparameter search (or a primary task weight sweep)."""
    config = _load_config(config_path, **flags)
    if initial:
        config = initial_search_config(config.model.gnn_kind, config)
    datasets = Datasets.from_config(config)
    baseline = load_baseline(config)
    if workers < 0:
        raise ConfigurationException(f"--workers must be >= 0, got {workers}", key="workers")

    executor = ProcessExecutor(max_workers=workers) if workers > 0 else None
    try:
        if lambda_grid is not None:
            result = task_weight_sweep(config, lambda_grid, datasets, baseline, executor=executor)
        else:
            space = load_config_model(SearchSpace, space_path) if space_path else default_search_space()
            result = sequential_search(config, space, datasets, baseline, executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()

    out = Path(out_dir)
    _write_json(result.to_dict(), out / "trace.json")
    result.trace_frame().to_csv(out / "trace.csv", index=False)
    save_config(result.best, out / "best_config.json")
    score = "n/a" if result.best_score is None else f"{result.best_score:.4f}"
    click.echo(f"{len(result.trace)} trials; best score {score}; best config in {out}")


@cli.command("export-adjacency")
@click.option("--graph", "graph_path", type=click.Path(dir_okay=False), required=True, help="Graph JSON.")
@click.option("--kind", type=click.Choice(list(ADJACENCY_KINDS)), default="weighted", help="Matrix to export.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="CSV to write.")
def export_adjacency(graph_path: str, kind: str, out_path: str) -> None:
    """Write a node-labelled adjacency matrix as CSV."""
    frame = adjacency_frame(import_graph(graph_path), kind)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out_path)
    click.echo(f"wrote {kind} adjacency ({len(frame)} nodes) to {out_path}")


@cli.command("plot-data")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), required=True, help="Metric report JSON.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Per-class CSV to write.")
def plot_data(report_path: str, out_path: str) -> None:
    """Write per-class scores of a report as CSV."""
    frame = MetricReport.load(report_path).per_class_frame()
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out_path, index=False)
    click.echo(f"wrote {len(frame)} per-class scores to {out_path}")


@cli.command("stl-baseline")
@run_options
@click.option("--split-name", type=click.Choice(["val", "test"]), default="val", help="Split to evaluate on.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Baseline report JSON.")
def stl_baseline(config_path: Optional[str], split_name: str, out_path: str, **flags: Any) -> None:
    """Train one single-task model per task and write the merged report."""
    config = _load_config(config_path, **flags)
    datasets = Datasets.from_config(config)
    _, report = fit_single_task_baselines(config, datasets, split=split_name)
    report.save(out_path)
    click.echo(report.render_table())


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = list(sys.argv[1:] if argv is None else argv)
    command = next((a for a in args if a in cli.commands), APP_NAME)
    try:
        result = cli.main(args=args, prog_name=APP_NAME, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo(f"{command}: aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except (FrameworkException, OSError) as e:
        logger.debug(f"{command} failed: {e!r}")
        click.echo(f"{command}: {e}", err=True)
        return exit_code_for(e)
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command line interface for the inverse-design pipeline.

Every verb that creates a node prints the new node id on stdout.  Exit
codes: 0 success, 1 validation error, 2 internal error.
"""

from __future__ import annotations

import functools
import sys

import click

from .chem import ChemError
from .workspace import (
    DATASET,
    FEATURE_SET,
    MERGED_FEATURE_SET,
    MODEL,
    SEARCH_RESULT,
    Workspace,
    WorkspaceError,
    ingest_csv,
    run_method,
)


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handled(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (WorkspaceError, ChemError, ValueError) as exc:
            _fail(str(exc), 1)
        except OSError as exc:
            _fail(str(exc), 1)
        except Exception as exc:  # anything unexpected is an internal error
            _fail(f"internal: {type(exc).__name__}: {exc}", 2)

    return wrapper


@click.group()
@click.option(
    "--workspace", "-w", default="./workspace", envvar="MID_WORKSPACE",
    show_default=True, help="Workspace directory.",
)
@click.pass_context
def main(ctx, workspace):
    """Molecular inverse design: ingest, model, search, generate."""
    ctx.obj = workspace


def _open(ctx) -> Workspace:
    return Workspace.open(ctx.obj)


def _latest(ws: Workspace, kinds) -> str:
    for node_id in reversed(ws.order):
        if ws.nodes[node_id].kind in kinds:
            return node_id
    raise WorkspaceError(f"workspace has no node of kind {'/'.join(kinds)}")


@main.command()
@click.argument("csv_path")
@click.option("--name", default="workspace", help="Workspace display name.")
@click.pass_context
@handled
def ingest(ctx, csv_path, name):
    """Create a workspace from a CSV of SMILES and property columns."""
    ws = ingest_csv(csv_path, ctx.obj, name)
    click.echo(ws.root.id)


@main.command()
@click.option("--levels", default="1,2,3", show_default=True,
              help="Comma-separated fragment levels.")
@click.option("--parent", default=None, help="Dataset node id (default: root).")
@click.pass_context
@handled
def featurize(ctx, levels, parent):
    """Extract fragment-count features from the dataset."""
    ws = _open(ctx)
    parent = parent or ws.root.id
    lv = [int(s) for s in levels.split(",") if s.strip()]
    node = run_method(ws, parent, "extract_features", {"levels": lv})
    click.echo(node.id)


@main.command()
@click.argument("node_a")
@click.argument("node_b")
@click.pass_context
@handled
def merge(ctx, node_a, node_b):
    """Merge two feature sets over the same molecules."""
    ws = _open(ctx)
    node = run_method(ws, node_a, "merge_features", {"with": node_b})
    click.echo(node.id)


@main.command()
@click.option("--property", "prop", required=True, help="Target property column.")
@click.option("--kinds", default="ridge,lasso,elasticnet", show_default=True)
@click.option("--folds", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--parent", default=None, help="Feature set node (default: latest).")
@click.pass_context
@handled
def train(ctx, prop, kinds, folds, seed, parent):
    """Cross-validate regressors and keep the best as a model node."""
    ws = _open(ctx)
    parent = parent or _latest(ws, (FEATURE_SET, MERGED_FEATURE_SET))
    node = run_method(ws, parent, "build_model", {
        "property": prop,
        "kinds": [k.strip() for k in kinds.split(",") if k.strip()],
        "folds": folds,
        "seed": seed,
    })
    click.echo(node.id)
    click.echo(
        f"selected {node.params['selected']['kind']} "
        f"cv_r2={node.params['cv_r2']:.4f} cv_rmse={node.params['cv_rmse']:.4g}",
        err=True,
    )


def _parse_targets(pairs):
    targets = {}
    for pair in pairs:
        if "=" not in pair:
            raise WorkspaceError(f"target {pair!r} is not name=value[:band]")
        name, _, rest = pair.partition("=")
        value, _, band = rest.partition(":")
        t = {"value": float(value)}
        if band:
            t["band"] = float(band)
        targets[name.strip()] = t
    if not targets:
        raise WorkspaceError("at least one --target is required")
    return targets


@main.command()
@click.option("--target", "targets", multiple=True,
              help="name=value[:band], repeatable; band defaults to model sigma.")
@click.option("--with-model", "with_models", multiple=True,
              help="Extra model node ids for multi-property targets.")
@click.option("--rules", "rules_file", default=None,
              help="Constraint rules file layered over the defaults.")
@click.option("--seed", default=0, show_default=True)
@click.option("--swarm", default=100, show_default=True)
@click.option("--iterations", default=200, show_default=True)
@click.option("--candidates", default=50, show_default=True)
@click.option("--index/--no-index", "use_index", default=True,
              help="Gate candidates on the chemical feasibility index.")
@click.option("--index-max-atoms", default=5, show_default=True)
@click.option("--parent", default=None, help="Model node (default: latest).")
@click.pass_context
@handled
def search(ctx, targets, with_models, rules_file, seed, swarm, iterations,
           candidates, use_index, index_max_atoms, parent):
    """Particle swarm search for feature vectors hitting the targets."""
    ws = _open(ctx)
    parent = parent or _latest(ws, (MODEL,))
    params = {
        "targets": _parse_targets(targets),
        "with_models": list(with_models),
        "seed": seed,
        "use_index": use_index,
        "index_max_atoms": index_max_atoms,
        "pso": {"swarm": swarm, "iterations": iterations, "candidates": candidates},
    }
    if rules_file:
        with open(rules_file) as fh:
            params["rules_text"] = fh.read()
    node = run_method(ws, parent, "search", params)
    click.echo(node.id)
    click.echo(f"found {node.params['found']} candidate vectors", err=True)


@main.command()
@click.argument("search_node")
@click.option("--max", "max_structures", default=20, show_default=True,
              help="Structures per candidate vector.")
@click.option("--tolerance", default=0, show_default=True)
@click.option("--max-vectors", default=None, type=int,
              help="Only expand the best N vectors.")
@click.option("--time-budget", default=None, type=float,
              help="Seconds per vector before giving up.")
@click.pass_context
@handled
def generate(ctx, search_node, max_structures, tolerance, max_vectors, time_budget):
    """Expand search candidates into concrete molecules."""
    ws = _open(ctx)
    params = {"max_structures": max_structures, "tolerance": tolerance}
    if max_vectors is not None:
        params["max_vectors"] = max_vectors
    if time_budget is not None:
        params["time_budget"] = time_budget
    node = run_method(ws, search_node, "generate", params)
    click.echo(node.id)
    click.echo(f"generated {node.params['molecules']} molecules", err=True)


@main.command()
@click.pass_context
@handled
def tree(ctx):
    """Print the workspace node tree."""
    click.echo(_open(ctx).tree(), nl=False)


@main.command()
@click.argument("node")
@click.argument("path")
@click.pass_context
@handled
def export(ctx, node, path):
    """Write a node's payload to a file."""
    ws = _open(ctx)
    data = ws.payload_bytes(node)
    with open(path, "wb") as fh:
        fh.write(data)
    click.echo(f"wrote {len(data)} bytes to {path}", err=True)


@main.command()
@click.option("--data-dir", default=None,
              help="Directory of workspaces (default MID_DATA_DIR or ./mid-data).")
@click.option("--bind", default=None, help="host:port (default MID_BIND_ADDR or 127.0.0.1:8765).")
@click.option("--max-jobs", default=None, type=int)
@handled
def serve(data_dir, bind, max_jobs):
    """Run the HTTP service over a directory of workspaces."""
    import os

    import uvicorn

    from .service import create_app

    bind = bind or os.environ.get("MID_BIND_ADDR", "127.0.0.1:8765")
    host, _, port = bind.rpartition(":")
    app = create_app(data_dir=data_dir, max_jobs=max_jobs)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))

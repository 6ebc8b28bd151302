"""Command-line front end.

    qmetric run <config.json> [--out DIR] [--seed N] [--jobs K]
    qmetric validate <config.json>
    qmetric oracle <problem.json>

All state flows through flags and config files; no environment variables are
required.  Exit status of ``run``: 0 success, 2 validation error, 3 when any
report row is tainted by nonconvergence or a failed property.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .convex import BallSpec, NormImageObjective, SolverConfig, SpreadObjective, WorkingSpace
from .convex import BallSolver, brute_force_oracle
from .core import AlgebraSpec, maximally_mixed
from .errors import ConfigValidationError, QMetricError
from .experiments import Scenario, run_scenario
from .lipnorms import LipNorm, spec_from_json
from .serialize import matrix_from_json, typed_from_json


@click.group()
def main():
    """Numerical toolkit for finite-dimensional quantum compact metric spaces."""


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, help="Output directory (overrides config).")
@click.option("--seed", type=int, default=None, help="Seed override.")
@click.option("--jobs", type=int, default=1, help="Worker pool size for row-parallel experiments.")
def run(config, out, seed, jobs):
    """Validate and run a scenario, writing report.json / results.csv / manifest.json."""
    try:
        cfg = _load_json(config)
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(2)
    try:
        status = run_scenario(cfg, out_dir=out, seed=seed, jobs=jobs)
    except ConfigValidationError as exc:
        for e in exc.errors:
            click.echo(f"validation: {e}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(1)
    if status != 0:
        click.echo("warning: some rows are tainted or failed; see results.csv flags", err=True)
    sys.exit(status)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
def validate(config):
    """Check a scenario config; list every validation error."""
    try:
        cfg = _load_json(config)
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(2)
    try:
        Scenario(cfg)
    except ConfigValidationError as exc:
        for e in exc.errors:
            click.echo(f"validation: {e}", err=True)
        sys.exit(2)
    click.echo("ok")


def _oracle_objective(obj_spec, lipnorm: LipNorm, solver: BallSolver):
    ws = solver.ws
    if obj_spec == "opnorm":
        return NormImageObjective(ws.stack)
    if obj_spec == "spread":
        return SpreadObjective(ws.stack)
    if isinstance(obj_spec, dict) and obj_spec.get("kind") == "autdiff":
        u = typed_from_json({**obj_spec["unitary"], "kind": "unitary"})
        return NormImageObjective(np.stack([u.apply(e) - e for e in ws.stack]))
    if isinstance(obj_spec, dict) and obj_spec.get("kind") == "lipnorm":
        other = LipNorm(spec_from_json(obj_spec["spec"]), lipnorm.algebra)
        return NormImageObjective(other.image_stack(ws.stack), scale=other.scale)
    raise QMetricError(f"unknown oracle objective {obj_spec!r}")


@main.command()
@click.argument("problem", type=click.Path(exists=True, dir_okay=False))
def oracle(problem):
    """Run the brute-force grid oracle on a problem description.

    The problem file names the algebra, the ball (lipnorm spec, radius,
    optional slice state), the problem class, a payload, and the grid
    resolution; the result is printed as JSON on stdout.
    """
    try:
        spec = _load_json(problem)
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read problem: {exc}", err=True)
        sys.exit(2)
    try:
        algebra = AlgebraSpec(spec["algebra"]["blocks"])
        ball_obj = spec["ball"]
        lipnorm = LipNorm(spec_from_json(ball_obj["lipnorm"]), algebra)
        slice_state = None
        if ball_obj.get("slice"):
            slice_state = typed_from_json({**ball_obj["slice"], "kind": "state"})
        elif ball_obj.get("slice_maximally_mixed"):
            slice_state = maximally_mixed(algebra.total_dim)
        ball = BallSpec(lipnorm, float(ball_obj.get("radius", 1.0)), slice_state)
        kind = spec["problem"]
        cfg = SolverConfig(seed=int(spec.get("seed", 0)))
        resolution = int(spec.get("resolution", cfg.oracle_resolution))
        if kind in ("max-linear", "min-distance"):
            payload = matrix_from_json(spec["payload"])
        else:
            payload = _oracle_objective(spec["payload"], lipnorm, BallSolver(ball, cfg))
        result = brute_force_oracle(kind, ball, payload, resolution, cfg)
    except (QMetricError, KeyError, TypeError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(
        json.dumps(
            {
                "value": result.value,
                "error_bound": result.error_bound,
                "flags": list(result.flags),
            },
            sort_keys=True,
        )
    )


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success, 2 input or validation error, 3 failed internal check.
"""
from __future__ import annotations

import csv
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np

from . import io, measures
from .errors import AlphaOutOfRange, CoventaError
from .estimation import estimate_g, report_rows
from .generators import generator_set, gell_mann_set, mub_generator_set, validate_generator_set
from .mub import build_mub, certify_unbiasedness, is_prime, require_prime
from .states import (
    random_pure_state,
    random_separable_mixed,
    schmidt_decompose,
)

DEFAULT_REPORT_TOL = 1e-9


def report_tol() -> float:
    """Pass/fail threshold for printed reports; ``COVENTA_TOL`` overrides it."""
    raw = os.environ.get("COVENTA_TOL")
    if raw is None:
        return DEFAULT_REPORT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise CoventaError(f"COVENTA_TOL must be a float, got {raw!r}") from None
    if not tol > 0:
        raise CoventaError("COVENTA_TOL must be positive")
    return tol


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(rows: list[dict], columns: list[str], path=None) -> None:
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])


def parse_dims(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected A,B (e.g. 3,3), got {text!r}", param_hint="--dims")
    return a, b


class Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except CoventaError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(2)
        except AssertionError as exc:
            click.echo(f"internal check failed: {exc}", err=True)
            ctx.exit(3)


@click.group(cls=Cli)
def main():
    """Covariance entanglement measure G: measures, audits, scans and estimation."""


def _load_sets(state, set_name):
    return generator_set(set_name, state.dim_a), generator_set(set_name, state.dim_b)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--set", "set_name", type=click.Choice(["gellmann", "mub"]), default="gellmann", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def measure(input_path, set_name, out):
    """G by every applicable route, concurrences (pure input) and verdict."""
    if not Path(input_path).is_file():
        raise CoventaError(f"cannot read state file {input_path}")
    state = io.load_state(input_path)
    if set_name == "mub":
        for d in (state.dim_a, state.dim_b):
            require_prime(d)
    rows = measures.measure_report(state, *_load_sets(state, set_name))
    sid = Path(input_path).stem
    for r in rows:
        r["state_id"] = sid
    write_csv(rows, ["state_id", "route", "G", "C_I2", "C_3", "verdict"], out)


@main.command("isotropic-scan")
@click.option("--alpha-min", type=float, default=0.0, show_default=True)
@click.option("--alpha-max", type=float, default=1.0, show_default=True)
@click.option("--step", type=float, default=0.05, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def isotropic_scan(alpha_min, alpha_max, step, out):
    """G and verdict across the two-qutrit isotropic family."""
    if not (-1 / 8 - 1e-12 <= alpha_min <= alpha_max <= 1 + 1e-12):
        raise AlphaOutOfRange(f"range [{alpha_min}, {alpha_max}] not inside [-1/8, 1]")
    if step <= 0:
        raise CoventaError("--step must be positive")
    count = int(np.floor((alpha_max - alpha_min) / step + 1e-9)) + 1
    rows = []
    for i in range(count):
        alpha = min(alpha_min + i * step, alpha_max)
        g = measures.g_hilbert_schmidt(measures.isotropic_state(alpha)).g
        rows.append({"alpha": alpha, "G": g, "verdict": measures.separability_verdict(g)})
    write_csv(rows, ["alpha", "G", "verdict"], out)


@main.command()
@click.option("--n", "n", type=int, required=True, help="Local dimension.")
@click.option("--mub/--no-mub", "force_mub", default=None,
              help="Require (or skip) the MUB audit; by default it runs when N is prime.")
def audit(n, force_mub):
    """Worst-case deviations for the generator sets and MUB family of dimension N."""
    tol = report_tol()
    ok = True
    rep = validate_generator_set(gell_mann_set(n), tol)
    click.echo(f"gellmann N={n}: trace {rep['max_trace_deviation']:.3e} "
               f"orthonormality {rep['max_orthonormality_deviation']:.3e} "
               f"{'PASS' if rep['passed'] else 'FAIL'}")
    ok &= rep["passed"]
    run_mub = is_prime(n) if force_mub is None else force_mub
    if run_mub:
        require_prime(n)
        cert = certify_unbiasedness(build_mub(n))
        passed = cert["max_cross_deviation"] < tol and cert["max_gram_deviation"] < tol
        click.echo(f"mub N={n}: bases {cert['bases']} cross {cert['max_cross_deviation']:.3e} "
                   f"gram {cert['max_gram_deviation']:.3e} {'PASS' if passed else 'FAIL'}")
        rep = validate_generator_set(mub_generator_set(n), tol)
        click.echo(f"mub-generators N={n}: trace {rep['max_trace_deviation']:.3e} "
                   f"orthonormality {rep['max_orthonormality_deviation']:.3e} "
                   f"{'PASS' if rep['passed'] else 'FAIL'}")
        ok &= passed and rep["passed"]
    if not ok:
        raise AssertionError(f"audit failed at tolerance {tol:g}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--set", "set_name", type=click.Choice(["gellmann", "mub"]), default="mub", show_default=True)
@click.option("--shots", type=click.IntRange(min=1), required=True, help="Shots per setting.")
@click.option("--total-shots", is_flag=True, help="Treat --shots as a budget split evenly over settings.")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), required=True)
@click.option("--pool-marginals", is_flag=True, help="Average marginals over all settings.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def estimate(input_path, set_name, shots, total_shots, trials, seed, pool_marginals, out):
    """Simulated finite-shot estimation of G."""
    if not Path(input_path).is_file():
        raise CoventaError(f"cannot read state file {input_path}")
    state = io.load_state(input_path)
    if set_name == "mub":
        for d in (state.dim_a, state.dim_b):
            require_prime(d)
    set_a, set_b = _load_sets(state, set_name)
    kwargs = {"total_shots": shots} if total_shots else {"shots_per_setting": shots}
    rep = estimate_g(state, set_a, set_b, trials=trials, seed=seed,
                     pool_marginals=pool_marginals, **kwargs)
    write_csv(report_rows(rep),
              ["trial", "shots", "settings", "estimate", "g_true", "mean_bias", "std_error"], out)


@main.command("random-scan")
@click.option("--dims", required=True, help="Local dimensions A,B.")
@click.option("--count", type=click.IntRange(1, 10**6), required=True)
@click.option("--kind", type=click.Choice(["pure", "separable"]), required=True)
@click.option("--seed", type=click.IntRange(min=0), required=True)
@click.option("--terms", type=click.IntRange(min=1), default=None,
              help="Product terms per separable state (default: random in 1..A*B).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def random_scan(dims, count, kind, seed, terms, out):
    """Population checks: the invariant identity (pure) or the 1/4 bound (separable)."""
    dim_a, dim_b = parse_dims(dims)
    tol = report_tol()
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        if kind == "pure":
            psi = random_pure_state(dim_a, dim_b, rng)
            g = measures.g_hilbert_schmidt(psi).g
            spec = schmidt_decompose(psi)
            c2, c3 = measures.i_concurrence_squared(spec), measures.three_concurrence(spec)
            resid = g - measures.g_from_invariants(c2, c3).g
        else:
            k = terms or int(rng.integers(1, dim_a * dim_b + 1))
            g = measures.g_hilbert_schmidt(random_separable_mixed(dim_a, dim_b, k, rng)).g
            c2 = c3 = resid = None
        rows.append({"index": i, "G": g, "C_I2": c2, "C_3": c3, "residual": resid,
                     "verdict": measures.separability_verdict(g)})
    write_csv(rows, ["index", "G", "C_I2", "C_3", "residual", "verdict"], out)
    g_max = max(r["G"] for r in rows)
    if kind == "pure":
        worst = max(abs(r["residual"]) for r in rows)
        click.echo(f"max |residual| = {worst:.3e}, max G = {g_max:.12g}", err=True)
        assert worst < tol, f"invariant identity residual {worst:.3e} >= {tol:g}"
        assert g_max <= measures.max_g(dim_a, dim_b) + tol, f"G {g_max} above global maximum"
    else:
        click.echo(f"max G = {g_max:.12g}", err=True)
        assert g_max <= measures.THRESHOLD + tol, f"separable G {g_max} above 1/4"


@main.command("export-mub")
@click.option("--n", "n", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def export_mub(n, out):
    """MUB family of prime dimension N as JSON."""
    with _output(out) as fh:
        json.dump(io.mub_family_to_dict(build_mub(n)), fh)
        fh.write("\n")


@main.command("export-generators")
@click.option("--n", "n", type=int, required=True)
@click.option("--set", "set_name", type=click.Choice(["gellmann", "mub"]), default="gellmann", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def export_generators(n, set_name, out):
    """Generator set as JSON."""
    with _output(out) as fh:
        json.dump(io.generator_set_to_dict(generator_set(set_name, n)), fh)
        fh.write("\n")


if __name__ == "__main__":
    main()

"""Thin command-line client for the service.

By default commands run against an in-process instance of the FastAPI app
(no server needed); --server points them at a running instance instead.
Reports are canonical JSON: same request and seed means byte-identical
output.

Exit codes: 0 ok, 1 verification failure, 2 input-format error,
3 precondition error, 4 trivial-factor shortcut on analyze.
"""

from __future__ import annotations

import csv
import json
import sys

import click
import httpx

KIND_EXIT = {"input": 2, "precondition": 3, "trivial_factor": 4}


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # run the app in-process; same API surface as a remote server
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from starlette.testclient import TestClient

        from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _post(ctx, path: str, payload: dict) -> dict:
    resp = ctx.obj.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json()
    detail = resp.json().get("detail")
    if isinstance(detail, dict) and "kind" in detail:
        click.echo(f"error: {detail['message']}", err=True)
        sys.exit(KIND_EXIT.get(detail["kind"], 2))
    click.echo(f"error: {detail}", err=True)
    sys.exit(2)


def _emit(report: dict, output: str | None):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


@click.group()
@click.option("--server", envvar="BBDQC1_SERVER", default=None,
              help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Trace estimation, factoring and analysis for the controlled-SWAP protocol."""
    ctx.obj = _client(server)


@main.command()
@click.option("--builtin", type=click.Choice(["identity", "modmul", "diagonal"]))
@click.option("--dim", type=int)
@click.option("--a", type=int)
@click.option("--n", "--N", "n", type=int)
@click.option("--phases", help="comma-separated phase angles for --builtin diagonal")
@click.option("--matrix", type=click.Path(), help="JSON file {dim, re, im}")
@click.option("--protocol", type=click.Choice(["standard", "bb", "both"]), default="both")
@click.option("--shots", type=int, default=10_000)
@click.option("--seed", type=int, default=0, envvar="BBDQC1_SEED")
@click.option("--output", type=click.Path())
@click.pass_context
def trace(ctx, builtin, dim, a, n, phases, matrix, protocol, shots, seed, output):
    """Estimate tr(V)/D and/or |tr(U)|^2/d^2 with shot sampling."""
    source: dict = {}
    if matrix is not None:
        try:
            with open(matrix) as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: cannot read matrix file: {exc}", err=True)
            sys.exit(2)
        source["matrix"] = payload
    else:
        source["builtin"] = builtin
        source["dim"] = dim
        source["a"] = a
        source["N"] = n
        if phases:
            source["phases"] = [float(x) for x in phases.split(",")]
    report = _post(ctx, "/trace", {
        "unitary": source, "protocol": protocol, "shots": shots, "seed": seed,
    })
    _emit(report, output)


@main.command()
@click.argument("n", type=int)
@click.option("--a", type=int, help="pin the base instead of drawing it per attempt")
@click.option("--attempts", type=int, default=500)
@click.option("--t", type=int, help="phase-estimation resolution (power of two)")
@click.option("--seed", type=int, default=0, envvar="BBDQC1_SEED")
@click.option("--no-records", is_flag=True, help="omit per-attempt records")
@click.option("--output", type=click.Path())
@click.pass_context
def factor(ctx, n, a, attempts, t, seed, no_records, output):
    """Factor an odd composite non-prime-power N."""
    report = _post(ctx, "/factor", {
        "N": n, "a": a, "attempts": attempts, "t": t, "seed": seed,
        "include_records": not no_records,
    })
    _emit(report, output)


@main.command()
@click.argument("n", type=int)
@click.argument("a", type=int)
@click.option("--t", type=int)
@click.option("--csv", "csv_path", type=click.Path(), help="write the outcome distribution as CSV")
@click.option("--output", type=click.Path())
@click.pass_context
def analyze(ctx, n, a, t, csv_path, output):
    """Exact outcome distribution and counting report for (N, a)."""
    report = _post(ctx, "/analyze", {"N": n, "a": a, "t": t})
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["c", "probability"])
            for c, prob in enumerate(report["distribution"]):
                writer.writerow([c, repr(prob)])
    _emit(report, output)


@main.command()
@click.option("--quick", is_flag=True, help="fast subset of the invariant suite")
@click.option("--break-phase-invariance", is_flag=True, hidden=True,
              help="fault-injection hook for harness self-tests")
@click.option("--seed", type=int, default=0, envvar="BBDQC1_SEED")
@click.option("--output", type=click.Path())
@click.pass_context
def verify(ctx, quick, break_phase_invariance, seed, output):
    """Run the invariant suite; exit 0 iff every check passes."""
    report = _post(ctx, "/verify", {
        "quick": quick, "break_phase_invariance": break_phase_invariance, "seed": seed,
    })
    _emit(report, output)
    for result in report["results"]:
        status = "PASS" if result["passed"] else "FAIL"
        click.echo(f"{status} {result['name']}: {result['detail']}", err=True)
    if not report["passed"]:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the service with uvicorn."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

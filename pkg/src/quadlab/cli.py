"""``quadlab`` command line: a thin client over the HTTP service.

Without ``--server`` (or ``QUADLAB_SERVER``) requests are served in-process.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click


class Client:
    def __init__(self, server: str | None):
        if server:
            import httpx

            self._http = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._http = TestClient(app, raise_server_exceptions=False)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._http.post(path, json=payload)
        body = resp.json()
        if resp.status_code != 200:
            err = body.get("error") if isinstance(body, dict) else None
            msg = body.get("message", body.get("detail")) if isinstance(body, dict) else body
            raise click.ClickException(f"{err or resp.status_code}: {msg}")
        return body


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        click.echo(text)
    else:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"), encoding="utf-8")


@click.group()
@click.option("--server", envvar="QUADLAB_SERVER", default=None, help="Base URL of a running service.")
@click.version_option(package_name="artifact")
@click.pass_context
def main(ctx, server):
    """Rooted quadrangulations: enumeration, decomposition, sampling and metric tools."""
    ctx.obj = Client(server)


@main.command()
@click.option("--n", "n", type=int, required=True, help="Number of vertices.")
@click.option("--r", "r", type=int, default=None, help="Root block size.")
@click.option("--faces", type=int, default=None, help="Number N of facial 2-cycles.")
@click.option("--emit", type=click.Choice(["counts", "maps"]), default="counts")
@click.option("--format", "fmt", type=click.Choice(["qnd", "json"]), default="qnd")
@click.option("--out", default=None)
@click.pass_obj
def enumerate(client, n, r, faces, emit, fmt, out):  # noqa: A001
    """Exhaustively enumerate a family of rooted quadrangulations."""
    body = client.post("/enumerate", {"n": n, "r": r, "faces": faces, "emit": emit, "format": fmt})
    if emit == "maps" and fmt == "qnd":
        _emit("\n".join(body["maps"]), out)
    elif emit == "maps":
        _emit("\n".join(json.dumps(m) for m in body["maps"]), out)
    else:
        body.pop("maps", None)
        _emit(json.dumps(body, sort_keys=True), out)


@main.command()
@click.option("--in", "src", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--emit", type=click.Choice(["json"]), default="json")
@click.option("--no-diameters", is_flag=True)
@click.option("--out", default=None)
@click.pass_obj
def decompose(client, src, emit, no_diameters, out):
    """One JSON record per map of a QND1 corpus."""
    lines = [ln for ln in Path(src).read_text(encoding="ascii").splitlines() if ln.strip()]
    body = client.post("/decompose", {"maps": lines, "diameters": not no_diameters})
    _emit("\n".join(json.dumps(r, sort_keys=True) for r in body["records"]), out)


@main.command()
@click.option("--balls", type=int, required=True)
@click.option("--boxes", type=int, required=True)
@click.option("--mode", type=click.Choice(["exact", "mc"]), default="exact")
@click.option("--reps", type=int, default=1000)
@click.option("--seed", type=int, default=0)
@click.option("--emit", type=click.Choice(["json"]), default="json")
@click.option("--out", default=None)
@click.pass_obj
def allocate(client, balls, boxes, mode, reps, seed, emit, out):
    """Conditioned allocation law (exact rationals) or Monte Carlo draws."""
    body = client.post("/allocate", {"balls": balls, "boxes": boxes, "mode": mode, "reps": reps, "seed": seed})
    _emit(json.dumps({k: v for k, v in body.items() if v is not None}, sort_keys=True), out)


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--r", "r", type=int, default=None)
@click.option("--faces", type=int, default=None)
@click.option("--reps", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--out", default=None, help="QND1 corpus file (stdout when omitted).")
@click.pass_obj
def sample(client, n, r, faces, reps, seed, out):
    """Uniform samples from Q_n, Q_{n,r} or Q_{n,r,N}."""
    body = client.post("/sample", {"n": n, "r": r, "faces": faces, "reps": reps, "seed": seed})
    _emit("\n".join(body["maps"]), out)


def _load_space(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@main.command()
@click.option("--a", "a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["exact", "bounds"]), default="exact")
@click.option("--local", is_flag=True, help="Local distance (sum over balls).")
@click.option("--terms", type=int, default=8)
@click.pass_obj
def ghp(client, a, b, mode, local, terms):
    """Pointed GHP distance between two space JSON files."""
    body = client.post("/ghp", {"a": _load_space(a), "b": _load_space(b), "mode": mode, "local": local, "terms": terms})
    click.echo(json.dumps({k: v for k, v in body.items() if v is not None}, sort_keys=True))


@main.command()
@click.option("--object", "obj", type=click.Choice(["map", "plane", "minbus"]), default="map")
@click.option("--grid", type=int, default=64)
@click.option("--lambda", "lam", type=float, default=1.0)
@click.option("--window", type=float, default=1.0)
@click.option("--seed", type=int, default=0)
@click.option("--emit", required=True, help="Output path: *.json for a space, *.csv for a root profile.")
@click.pass_obj
def continuum(client, obj, grid, lam, window, seed, emit):
    """Grid approximation of a continuum object."""
    kind = "profile" if emit.endswith(".csv") else "space"
    body = client.post("/continuum", {"object": obj, "grid": grid, "lambda": lam, "window": window, "seed": seed, "emit": kind})
    if kind == "space":
        Path(emit).write_text(json.dumps(body["space"]) + "\n", encoding="utf-8")
    else:
        with open(emit, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=["radius", "mass"])
            w.writeheader()
            w.writerows(body["profile"])
    click.echo(json.dumps(body["diagnostics"], sort_keys=True), err=True)


@main.command()
@click.argument("name", type=click.Choice(["condensation", "structure", "diameter", "limit"]))
@click.option("--config", "config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", required=True)
@click.option("--csv", "csv_dir", default=None, help="Directory for flattened CSV rows.")
@click.pass_obj
def experiment(client, name, config, out, csv_dir):
    """Run a pre-registered experiment and write its JSON report."""
    from .experiments import dumps, write_csv

    cfg = json.loads(Path(config).read_text(encoding="utf-8")) if config else {}
    report = client.post("/experiment", {"name": name, "config": cfg})
    Path(out).write_text(dumps(report) + "\n", encoding="utf-8")
    if csv_dir:
        write_csv(report, csv_dir)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("quadlab.service:app", host=host, port=port)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line surface over the full pipeline.

Every command loads the store directory, applies one operation and persists
the result, so scripts and the HTTP service can be mixed freely on the same
store.  Domain errors exit with status 1 and a structured JSON payload on
stderr; usage errors exit with 2 (click's default).
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys

import click

from .errors import HypoDBError
from .ingest import TrialManifest
from .store import QuerySpec, Store

STORE_ENV = "HYPODB_STORE"


def _fail(exc: HypoDBError) -> None:
    click.echo(json.dumps(exc.to_payload()), err=True)
    sys.exit(1)


def _open(store_path: str) -> Store:
    if not os.path.isdir(store_path):
        raise HypoDBError(f"store directory {store_path!r} does not exist; run 'init'")
    return Store.load(store_path)


def _parse_filter(text: str) -> tuple[str, str, float]:
    for op in ("<=", ">=", "<", ">", "="):
        if op in text:
            attr, value = text.split(op, 1)
            return attr.strip(), op, float(value)
    raise HypoDBError(f"bad filter {text!r}; expected attr=value or attr<=value etc.")


def _csv_out(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")  # RFC 4180
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def rank_rows_to_table(rows: list[dict]) -> tuple[list[str], list[list]]:
    columns = ["phi", "upsilon", "tid", "value", "prior", "posterior"]
    return columns, [[r[c] for c in columns] for r in rows]


@click.group()
@click.option("--store", "store_path", envvar=STORE_ENV, default="hypodb-store",
              show_default=True, help="store directory (env HYPODB_STORE)")
@click.pass_context
def main(ctx, store_path):
    """Manage competing scientific hypotheses as probabilistic data."""
    ctx.obj = store_path


@main.command()
@click.pass_obj
def init(store_path):
    """Create an empty research store."""
    try:
        os.makedirs(store_path, exist_ok=True)
        Store().save(store_path)
        click.echo(json.dumps({"store": store_path, "status": "initialized"}))
    except HypoDBError as exc:
        _fail(exc)


@main.command("add-phenomenon")
@click.option("--id", "phi", type=int, required=True)
@click.option("--description", default="")
@click.pass_obj
def add_phenomenon(store_path, phi, description):
    try:
        store = _open(store_path)
        store.add_phenomenon(phi, description)
        store.save(store_path)
        click.echo(json.dumps({"phenomenon_id": phi}))
    except HypoDBError as exc:
        _fail(exc)


@main.command("add-hypothesis")
@click.option("--doc", "doc_path", type=click.Path(exists=True), required=True,
              help="structure document (JSON)")
@click.option("--name", default="")
@click.pass_obj
def add_hypothesis(store_path, doc_path, name):
    """Register a hypothesis and echo its encoded fd set."""
    try:
        store = _open(store_path)
        with open(doc_path) as fh:
            hyp = store.add_hypothesis(fh.read(), name)
        sigma = store.encode(hyp.hypothesis_id)
        store.save(store_path)
        click.echo(json.dumps({
            "hypothesis_id": hyp.hypothesis_id,
            "equations": len(hyp.structure.equations),
            "variables": len(hyp.structure.variables),
            "sigma": sigma.to_text(),
        }))
    except HypoDBError as exc:
        _fail(exc)


@main.command("add-trial")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True),
              help="trial CSV (defaults to the manifest's data_path)")
@click.option("--weight", type=float, default=None,
              help="explanation weight to record for (phi, upsilon); "
                   "defaults to 1 when the pair is new")
@click.pass_obj
def add_trial(store_path, manifest_path, data_path, weight):
    """Load one simulation trial; records the explanation if new."""
    try:
        store = _open(store_path)
        with open(manifest_path) as fh:
            manifest = TrialManifest.from_json(fh.read())
        path = data_path or manifest.data_path
        if not path:
            raise HypoDBError("no trial data: pass --data or set data_path in the manifest")
        with open(path) as fh:
            n = store.load_trial(manifest, fh.read())
        pair = (manifest.phenomenon_id, manifest.hypothesis_id)
        if weight is not None or pair not in store.explanations:
            store.record_explanation(*pair, 1.0 if weight is None else weight)
        store.save(store_path)
        click.echo(json.dumps({
            "phenomenon_id": manifest.phenomenon_id,
            "hypothesis_id": manifest.hypothesis_id,
            "trial_id": manifest.trial_id,
            "rows": n,
        }))
    except HypoDBError as exc:
        _fail(exc)


@main.command("add-observations")
@click.option("--phenomenon", "phi", type=int, required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.pass_obj
def add_observations(store_path, phi, data_path):
    try:
        store = _open(store_path)
        with open(data_path) as fh:
            obs = store.load_observations(phi, fh.read())
        store.save(store_path)
        click.echo(json.dumps({
            "phenomenon_id": phi, "points": obs.n_points,
            "symbols": list(obs.symbols),
        }))
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--hypothesis", "upsilon", type=int, required=True)
@click.pass_obj
def encode(store_path, upsilon):
    """Print the hypothesis's encoded fd set in canonical text form."""
    try:
        store = _open(store_path)
        click.echo(store.encode(upsilon).to_text())
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--hypothesis", "upsilon", type=int, required=True)
@click.pass_obj
def synthesize(store_path, upsilon):
    """Run U-intro for one hypothesis and emit the synthesis report."""
    try:
        store = _open(store_path)
        result = store.synthesize_hypothesis(upsilon)
        store.save(store_path)
        click.echo(json.dumps(result.report(), indent=2))
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--phenomenon", "phi", type=int, required=True)
@click.option("--symbol", required=True, help="observed symbol (phenomenon side)")
@click.option("--sigma", type=float, required=True)
@click.option("--intersect", is_flag=True, help="permit partial coordinate overlap")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_obj
def condition(store_path, phi, symbol, sigma, intersect, fmt):
    """Bayesian-condition the distribution at a phenomenon on its observations."""
    try:
        store = _open(store_path)
        table = store.condition(phi, symbol, sigma, intersect)
        store.save(store_path)
        if fmt == "json":
            click.echo(json.dumps(table.to_obj(), indent=2))
        else:
            cols = ["phi", "upsilon", "tid", "prior", "posterior"]
            rows = [[r.phi, r.upsilon, r.tid, r.prior, r.posterior] for r in table.rows]
            click.echo(_csv_out(cols, rows), nl=False)
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--phenomenon", "phi", type=int, required=True)
@click.option("--at", default=None, help="domain filter, e.g. t=1904")
@click.option("--symbol", default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_obj
def rank(store_path, phi, at, symbol, fmt):
    """Ranked predictions (descending posterior, falling back to prior)."""
    try:
        store = _open(store_path)
        at_pair = None
        if at:
            attr, _, value = _parse_filter(at)
            at_pair = (attr, value)
        rows = store.rank(phi, at_pair, symbol)
        if fmt == "json":
            click.echo(json.dumps(rows, indent=2))
        else:
            click.echo(_csv_out(*rank_rows_to_table(rows)), nl=False)
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--projection", required=True)
@click.option("--filter", "filters", multiple=True, help="attr=value (repeatable)")
@click.option("--order", default="", help="comma-separated attributes")
@click.option("--group", default="", help="comma-separated attributes")
@click.option("--aggregate", type=click.Choice(["none", "conf"]), default="none")
@click.option("--columns", default="", help="comma-separated output columns")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_obj
def query(store_path, projection, filters, order, group, aggregate, columns, fmt):
    """Filter, order, group and aggregate a stored projection."""
    try:
        store = _open(store_path)
        spec = QuerySpec(
            projection=projection,
            filters=[_parse_filter(f) for f in filters],
            order=[c for c in order.split(",") if c],
            group=[c for c in group.split(",") if c],
            aggregate=aggregate,
            columns=[c for c in columns.split(",") if c] or None,
        )
        cols, rows = store.query(spec)
        if fmt == "json":
            click.echo(json.dumps({"columns": cols, "rows": rows}))
        else:
            click.echo(_csv_out(cols, rows), nl=False)
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--hypothesis", "upsilon", type=int, required=True)
@click.pass_obj
def verify(store_path, upsilon):
    """BCNF and lossless-join checks on a synthesized schema."""
    try:
        store = _open(store_path)
        report = store.verify(upsilon)
        click.echo(json.dumps(report, indent=2))
        if not (report["bcnf"] and report["lossless_u_factors"]
                and report["lossless_predictive"]):
            sys.exit(1)
    except HypoDBError as exc:
        _fail(exc)


@main.command()
@click.option("--op", type=click.Choice(["encode", "folding"]), default="folding")
@click.option("--min-exp", type=int, default=10, show_default=True)
@click.option("--max-exp", type=int, default=16, show_default=True)
@click.option("--repeats", type=int, default=3, show_default=True)
@click.option("--backend", type=click.Choice(["both", "numba", "python"]), default="both")
def bench(op, min_exp, max_exp, repeats, backend):
    """Scaling benchmark of the hot kernels; compares numba and fallback."""
    from .bench import format_report, run_bench

    backends = ("numba", "python") if backend == "both" else (backend,)
    points = run_bench(op, min_exp, max_exp, repeats, backends)
    click.echo(json.dumps(format_report(points), indent=2))


@main.command()
@click.option("--host", envvar="HYPODB_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="HYPODB_PORT", type=int, default=8345, show_default=True)
@click.pass_obj
def serve(store_path, host, port):
    """Serve the HTTP/JSON API (and the web UI when built)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(store_path), host=host, port=port)


@main.command()
@click.pass_obj
def status(store_path):
    try:
        store = _open(store_path)
        click.echo(json.dumps(store.status(), indent=2))
    except HypoDBError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()

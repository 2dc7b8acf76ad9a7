"""Command-line client for the fillink service.

The CLI is a thin HTTP client: by default it talks to an in-process copy of
the service (no network, same wire schemas); pass --server to target a
running instance instead.  Exit codes: 0 success, 2 usage or parse problem,
3 structural failure (torsion, offset collision, block-structure mismatch),
4 a failed certification or invariance check.
"""

from __future__ import annotations

import json
import sys
from typing import Optional

import click
import httpx

EXIT_USAGE = 2
EXIT_STRUCTURAL = 3
EXIT_FAILED = 4


def _request(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=payload)
    # in-process mode: drive the ASGI app directly over the same wire schemas
    import asyncio

    from .service import app

    async def call() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://fillink.internal", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(call())


def _post(server: Optional[str], path: str, payload: dict) -> dict:
    try:
        response = _request(server, path, payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        click.echo(f"error ({detail.get('type')}): {detail.get('message')}", err=True)
    else:
        click.echo(f"error: {detail or response.text}", err=True)
    sys.exit(EXIT_STRUCTURAL if response.status_code == 409 else EXIT_USAGE)


def _write_json(path: Optional[str], data: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(data, handle, indent=2)
            handle.write("\n")


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, ValueError) as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def render_matrix(rows, cols, entries) -> str:
    left = max([len(r) for r in rows] + [0]) + 2
    widths = [
        max(len(c), max((len(str(entries[i][j])) for i in range(len(rows))), default=1)) + 2
        for j, c in enumerate(cols)
    ]
    lines = ["".rjust(left) + "".join(c.rjust(w) for c, w in zip(cols, widths))]
    for i, r in enumerate(rows):
        lines.append(r.rjust(left) + "".join(str(entries[i][j]).rjust(w) for j, w in enumerate(widths)))
    return "\n".join(lines)


@click.group()
@click.option("--server", envvar="FILLINK_SERVER", default=None, help="Base URL of a running service; default runs in process.")
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Equivariant linking matrices and filling certificates for torus links."""
    ctx.obj = server


@main.command()
@click.option("--dim", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--k", "degree", type=int, required=True, help="Filtration degree.")
@click.option("--standard", "use_standard", is_flag=True, default=False, help="Use the standard depth-k link (the default).")
@click.option("--link", "link_path", type=click.Path(), default=None, help="JSON file with a link specification.")
@click.option("--mode", type=click.Choice(["closed-form", "geometric", "both"]), default="closed-form", show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None, help="Write the response JSON here.")
@click.pass_obj
def matrix(server, dim, degree, use_standard, link_path, mode, json_path) -> None:
    """Print the linking matrix at degree k with its published labels."""
    if use_standard and link_path:
        click.echo("error: --standard and --link are mutually exclusive", err=True)
        sys.exit(EXIT_USAGE)
    payload = {"dim": int(dim), "k": degree, "mode": mode}
    if link_path:
        payload["link"] = _load_json(link_path)
    data = _post(server, "/matrix", payload)
    m = data["matrix"]
    click.echo(render_matrix(m["rows"], m["cols"], m["entries"]))
    if data.get("modesAgree") is not None:
        click.echo(f"geometric oracle agreement: {'yes' if data['modesAgree'] else 'NO'}")
    click.echo(f"injective: {'yes' if data['injective'] else 'no'}")
    if data.get("kernelWitness"):
        click.echo(f"kernel witness (row coordinates): {data['kernelWitness']}")
    _write_json(json_path, data)
    if data.get("modesAgree") is False:
        sys.exit(EXIT_STRUCTURAL)


@main.command()
@click.option("--dim", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--m", "depth_m", type=int, required=True, help="Filling depth to certify.")
@click.option("--mode", type=click.Choice(["closed", "both"]), default="closed", show_default=True, help="'both' cross-checks low degrees against the geometric oracle.")
@click.option("--geom-depth", type=int, default=None, help="Cross-check degrees up to this bound (overrides the default cap).")
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.pass_obj
def certify(server, dim, depth_m, mode, geom_depth, json_path) -> None:
    """Run a full filling certification for the standard link."""
    geometric_depth = 0
    if mode == "both":
        geometric_depth = geom_depth  # None means the library default cap
    elif geom_depth is not None:
        geometric_depth = geom_depth
    payload = {"dim": int(dim), "m": depth_m, "geometricDepth": geometric_depth}
    data = _post(server, "/certify", payload)
    n_comps = len(data["link"]["components"])
    click.echo(f"certificate: m = {data['m']}, dim = {data['dim']}, link components = {n_comps}")
    for record in data["degrees"]:
        ranks = record["ranks"]
        oracle = ""
        if record["oracleChecked"]:
            oracle = ", oracle " + ("agrees" if record["oracleMatch"] else "DISAGREES")
        click.echo(
            f"  j = {record['j']}: "
            f"{'injective' if record['injective'] else 'NOT injective'} "
            f"(rank {ranks['bareiss']} = {ranks['smith']} of {ranks['bareiss']} needed"
            f"{oracle})"
        )
        if record.get("kernelWitness"):
            click.echo(f"    kernel witness: {record['kernelWitness']}")
    for note in data["lemmaChain"]:
        click.echo(f"  - {note}")
    click.echo(f"verdict: {'CERTIFIED' if data['verdict'] else 'FAILED'}")
    _write_json(json_path, data)
    if not data["verdict"]:
        sys.exit(EXIT_FAILED)


@main.command()
@click.argument("word_text")
@click.option("--dim", type=click.Choice(["2", "3"]), default="3", show_default=True)
@click.option("--depth-bound", type=int, default=8, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.pass_obj
def word(server, word_text, dim, depth_bound, json_path) -> None:
    """Evaluate a free-group word: lower-central depth and plaquette image."""
    payload = {"word": word_text, "dim": int(dim), "depthBound": depth_bound}
    data = _post(server, "/word", payload)
    click.echo(f"word: {data['word']}")
    if data["depth"] is None:
        click.echo(f"lower-central depth: >= {data['depthBound'] + 1}")
    else:
        click.echo(f"lower-central depth: {data['depth']}")
    if data["phi"]:
        click.echo(f"phi_{data['phi']['k']} image: {data['phi']['pretty']}")
    elif not data["inCommutatorSubgroup"]:
        click.echo("phi: not applicable (word is not in the commutator subgroup)")
    _write_json(json_path, data)


@main.command()
@click.option("--dim", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--k", "degree", type=int, default=1, show_default=True)
@click.option("--seeds", type=int, default=10, show_default=True)
@click.option("--radius", type=int, default=2, show_default=True, help="Monomial support radius of the random maps.")
@click.option("--terms", type=int, default=3, show_default=True, help="Monomial count per random coefficient.")
@click.option("--link", "link_path", type=click.Path(), default=None)
@click.option("--replay", "replay_path", type=click.Path(), default=None, help="Re-run a saved finger-move map.")
@click.option("--save-map", "save_path", type=click.Path(), default=None, help="Save the map of --seed for later replay.")
@click.option("--seed", type=int, default=None, help="Seed to save with --save-map.")
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.pass_obj
def fingers(server, dim, degree, seeds, radius, terms, link_path, replay_path, save_path, seed, json_path) -> None:
    """Check that random finger moves never disturb the filtration-level kernel."""
    payload = {
        "dim": int(dim),
        "k": degree,
        "seeds": seeds,
        "supportRadius": radius,
        "valueTerms": terms,
    }
    if link_path:
        payload["link"] = _load_json(link_path)
    if replay_path:
        payload["replay"] = _load_json(replay_path)
    if save_path:
        payload["saveSeed"] = seed if seed is not None else 0
    data = _post(server, "/fingers", payload)
    click.echo(
        f"checked {data['seedsChecked']} map(s) x {data['elementsPerSeed']} basis "
        f"elements at degree {data['k']} (dim {data['dim']})"
    )
    if data["violations"]:
        for v in data["violations"]:
            click.echo(
                f"  violation: seed {v['seed']}, element {v['element']}, line {v['line']}: "
                f"filtration {v['filtration']} < {v['required']}"
            )
    else:
        click.echo("no violations: the perturbation vanishes at filtration level")
    if save_path and data.get("savedMap"):
        _write_json(save_path, data["savedMap"])
        click.echo(f"saved map to {save_path}")
    _write_json(json_path, data)
    if data["violations"]:
        sys.exit(EXIT_FAILED)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8471, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("fillink.service:app", host=host, port=port)


if __name__ == "__main__":
    main()

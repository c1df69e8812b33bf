"""Command-line client for the modlat service.

By default requests are served in-process (ASGI transport against the FastAPI
app); pass --server to target a remote instance instead. Every command accepts
--config pointing at a JSON file of request fields; explicit flags win.

Exit codes: 0 success, 2 rank at or below its threshold t0, 3 enumeration
unavailable for the field, 4 certified-precision failure, 1 other errors.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

EXIT_CODES = {
    "rank_below_threshold": 2,
    "enumeration_unavailable": 3,
    "precision_failure": 4,
    "invalid_request": 1,
}


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=3600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service import app
    return TestClient(app, raise_server_exceptions=False)


def _explicit(payload: dict) -> dict:
    """Keep only fields whose click parameter was given on the command line.

    Values left at their click defaults are dropped so that --config file
    entries are not clobbered; the service schema supplies matching defaults
    when neither source sets a field.
    """
    from click.core import ParameterSource
    ctx = click.get_current_context()
    return {key: value for key, (pname, value) in payload.items()
            if ctx.get_parameter_source(pname) == ParameterSource.COMMANDLINE}


def _request(server: str | None, path: str, payload: dict,
             config: str | None, threads: int) -> dict:
    merged = {}
    if config:
        with open(config) as fh:
            merged.update(json.load(fh))
    merged.update(_explicit(payload))
    # --threads is a worker hint only; results are deterministic regardless,
    # so it never enters the request payload.
    with _client(server) as client:
        resp = client.post(path, json=merged)
    body = resp.json()
    if resp.status_code != 200:
        click.echo(json.dumps(body, indent=2, sort_keys=True), err=True)
        sys.exit(EXIT_CODES.get(body.get("error_kind"), 1))
    return body


def _emit(body: dict, output: str | None):
    text = json.dumps(body, indent=2, sort_keys=True)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


_common = [
    click.option("--server", default=None, help="remote service URL (default: in-process)"),
    click.option("--config", default=None, type=click.Path(exists=True),
                 help="JSON file with request fields; flags override"),
    click.option("--threads", default=0, type=int,
                 help="worker hint, 0 = auto (results are thread-count independent)"),
    click.option("--output", "-o", default=None, help="write JSON/CSV here instead of stdout"),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Certified moment bounds and SVP experiments for module lattices."""


@main.command()
@click.option("--m", type=int, required=True, help="cyclotomic conductor")
@click.option("--t", type=int, required=True, help="module rank")
@click.option("--mode", type=click.Choice(["explicit", "asymptotic"]), default="explicit")
@click.option("--h0", type=float, default=None, help="height cutoff (explicit mode)")
@click.option("--k", "k_grid", type=float, multiple=True, help="k-grid override")
@common_options
def bound(m, t, mode, h0, k_grid, server, config, threads, output):
    """Certified upper bound on the normalized second-moment error eta."""
    payload = {"m": ("m", m), "t": ("t", t), "mode": ("mode", mode),
               "h0": ("h0", h0), "k_grid": ("k_grid", list(k_grid))}
    _emit(_request(server, "/bound", payload, config, threads), output)


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--t", type=int, required=True)
@click.option("--epsilon", default="auto", help="failure probability knob or 'auto' = 1/ln n")
@click.option("--mode", type=click.Choice(["explicit", "asymptotic"]), default="explicit")
@click.option("--h0", type=float, default=None)
@common_options
def svbound(m, t, epsilon, mode, h0, server, config, threads, output):
    """Probabilistic shortest-vector bracket from the moment bound."""
    eps = None if epsilon == "auto" else float(epsilon)
    payload = {"m": ("m", m), "t": ("t", t), "epsilon": ("epsilon", eps),
               "mode": ("mode", mode), "h0": ("h0", h0)}
    _emit(_request(server, "/svbound", payload, config, threads), output)


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--s", type=float, required=True, help="real argument s > 1")
@click.option("--tol", type=float, default=1e-10)
@common_options
def zeta(m, s, tol, server, config, threads, output):
    """Certified enclosure of the Dedekind zeta value."""
    payload = {"m": ("m", m), "s": ("s", s), "tol": ("tol", tol)}
    _emit(_request(server, "/zeta", payload, config, threads), output)


@main.command("enumerate")
@click.option("--m", type=int, required=True)
@click.option("--x", "--X", "x", type=float, required=True, help="Weil height bound")
@common_options
def enumerate_orbits(m, x, server, config, threads, output):
    """List all low-height orbits of the field (JSON records)."""
    payload = {"m": ("m", m), "X": ("x", x)}
    _emit(_request(server, "/enumerate", payload, config, threads), output)


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--t", type=int, required=True)
@click.option("--p", type=int, required=True, help="unramified rational prime")
@click.option("--s", type=int, required=True, help="code dimension")
@click.option("--v", "--V", "v", type=float, required=True, help="ball volume")
@click.option("--n", "--N", "n", type=int, required=True, help="sample count")
@click.option("--seed", type=int, default=0)
@click.option("--epsilon", type=float, default=0.15)
@click.option("--samples-csv", default=None, help="also write per-sample CSV here")
@common_options
def simulate(m, t, p, s, v, n, seed, epsilon, samples_csv, server, config,
             threads, output):
    """Construction-A sampling experiment with exact SVP and ball counts."""
    payload = {"m": ("m", m), "t": ("t", t), "p": ("p", p), "s": ("s", s),
               "V": ("v", v), "N": ("n", n), "seed": ("seed", seed),
               "epsilon": ("epsilon", epsilon)}
    body = _request(server, "/simulate", payload, config, threads)
    if samples_csv:
        rep = body["report"]
        lines = ["index,lambda1,rho,seed"]
        for i, (lam, rho) in enumerate(zip(rep["lambda1_values"],
                                           rep["rho_values"])):
            lines.append(f"{i},{lam},{rho},{seed}")
        with open(samples_csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit(body, output)


@main.command()
@click.option("--m", "conductors", type=int, multiple=True,
              default=(8, 10, 12, 13, 15, 16), show_default=True)
@click.option("--t-min", type=int, default=15, show_default=True)
@click.option("--t-max", type=int, default=32, show_default=True)
@click.option("--height-cutoff", type=float, default=100.0, show_default=True)
@click.option("--csv/--json", "as_csv", default=True,
              help="emit the m,t,ln_eta_upper CSV (default) or full JSON")
@common_options
def figure(conductors, t_min, t_max, height_cutoff, as_csv, server, config,
           threads, output):
    """Second-moment error grid over conductors and ranks (CSV)."""
    payload = {"conductors": ("conductors", list(conductors)),
               "t_min": ("t_min", t_min), "t_max": ("t_max", t_max),
               "height_cutoff": ("height_cutoff", height_cutoff)}
    body = _request(server, "/figure", payload, config, threads)
    if as_csv:
        if output:
            with open(output, "w") as fh:
                fh.write(body["csv"])
        else:
            click.echo(body["csv"], nl=False)
    else:
        _emit(body, output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn
    from .service import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

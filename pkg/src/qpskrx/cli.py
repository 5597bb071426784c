"""Command-line front end.

Runs every command in-process by default; with ``--server`` the same RunSpec
is POSTed to a running service instead, and the returned CSV bytes are
identical because both paths share the handlers and the CSV renderer.
"""

from __future__ import annotations

import json

import click
from pydantic import ValidationError

from . import __version__
from .service import handlers
from .service.models import CurveResponse, RunSpec, SelftestResponse


def _parse_grid(text: str) -> list[float]:
    """Parse 'start:stop:step' (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.BadParameter("grid range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0.0:
            raise click.BadParameter("grid step must be > 0")
        count = int(round((stop - start) / step))
        grid = [start + k * step for k in range(count + 1)]
        return [x for x in grid if x <= stop + 1e-9]
    return [float(p) for p in text.split(",") if p.strip()]


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _run_options(fn):
    options = [
        click.option("--config", type=click.Path(exists=True, dir_okay=False),
                     help="JSON file with run fields; flags override it."),
        click.option("--grid", help="alpha^2 grid as 'start:stop:step' or comma list "
                     "(default 0.25:10:0.25)."),
        click.option("--steps", "-N", "N", type=int, help="Feedforward stage count N."),
        click.option("--steps-list", help="Comma list of N values (ff-curve)."),
        click.option("--mode", type=click.Choice(["onoff", "pnrd", "both"]),
                     help="Detector mode (default both)."),
        click.option("--eta", type=float, help="Detector quantum efficiency in [0, 1]."),
        click.option("--nu", type=float, help="Detector dark-count mean."),
        click.option("--nu-values", help="Comma list of dark-count means (dark-count-sweep)."),
        click.option("--eta-values", help="Comma list of efficiencies (efficiency-sweep)."),
        click.option("--trials", type=int, help="Monte Carlo trials per point (default 100000)."),
        click.option("--seed", type=int, help="RNG seed; required for Monte Carlo commands."),
        click.option("--het-photon-scale", type=float,
                     help="Evaluate the heterodyne limit at alpha^2 divided by this factor "
                     "(bounds command; exposes the rescaled photon-number convention)."),
        click.option("--output", "-o", type=click.Path(dir_okay=False),
                     help="Write CSV here instead of stdout."),
        click.option("--server", help="Base URL of a running service; POSTs the run there."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _build_spec(command: str, kw: dict) -> RunSpec:
    data: dict = {}
    config = kw.pop("config", None)
    if config:
        with open(config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise click.ClickException("config file must hold a JSON object")
    parsed = {
        "alpha_sq_grid": _parse_grid(kw["grid"]) if kw.get("grid") else None,
        "N": kw.get("N"),
        "N_values": _parse_ints(kw["steps_list"]) if kw.get("steps_list") else None,
        "mode": kw.get("mode"),
        "eta": kw.get("eta"),
        "nu": kw.get("nu"),
        "nu_values": _parse_floats(kw["nu_values"]) if kw.get("nu_values") else None,
        "eta_values": _parse_floats(kw["eta_values"]) if kw.get("eta_values") else None,
        "trials": kw.get("trials"),
        "seed": kw.get("seed"),
        "het_photon_scale": kw.get("het_photon_scale"),
        "output_path": kw.get("output"),
    }
    data.update({k: v for k, v in parsed.items() if v is not None})
    data["command"] = command
    try:
        return RunSpec.model_validate(data)
    except ValidationError as exc:
        raise click.ClickException(str(exc)) from exc


def _execute(spec: RunSpec, server: str | None) -> CurveResponse | SelftestResponse:
    if server is None:
        try:
            return handlers.run(spec)
        except (ValueError, RuntimeError) as exc:
            raise click.ClickException(str(exc)) from exc
    import httpx

    response = httpx.post(
        server.rstrip("/") + "/run",
        json=spec.model_dump(mode="json", exclude_unset=True),
        timeout=None,
    )
    if response.status_code != 200:
        raise click.ClickException(f"server returned {response.status_code}: {response.text}")
    payload = response.json()
    if spec.command == "selftest":
        return SelftestResponse.model_validate(payload)
    return CurveResponse.model_validate(payload)


def _emit_curve(result: CurveResponse, spec: RunSpec) -> None:
    if spec.output_path:
        with open(spec.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result.csv)
        click.echo(f"wrote {len(result.rows)} rows to {spec.output_path}")
    else:
        click.echo(result.csv, nl=False)


def _curve_command(command: str, kw: dict) -> None:
    server = kw.pop("server", None)
    spec = _build_spec(command, kw)
    result = _execute(spec, server)
    assert isinstance(result, CurveResponse)
    _emit_curve(result, spec)


@click.group(help="Error-rate curves for QPSK coherent-state receivers.")
@click.version_option(__version__)
def main() -> None:
    pass


@main.command("static-curve", help="Optimized static receiver curves plus the bounds.")
@_run_options
def static_curve(**kw) -> None:
    _curve_command("static-curve", kw)


@main.command("ff-curve", help="Feedforward receiver curves (exact at nu=0, else Monte Carlo).")
@_run_options
def ff_curve(**kw) -> None:
    _curve_command("ff-curve", kw)


@main.command("dark-count-sweep", help="Monte Carlo curves over a list of dark-count means.")
@_run_options
def dark_count_sweep(**kw) -> None:
    _curve_command("dark-count-sweep", kw)


@main.command("efficiency-sweep", help="Monte Carlo curves over a list of efficiencies.")
@_run_options
def efficiency_sweep(**kw) -> None:
    _curve_command("efficiency-sweep", kw)


@main.command("bounds", help="Helstrom bound and heterodyne limit over the grid.")
@_run_options
def bounds(**kw) -> None:
    _curve_command("bounds", kw)


@main.command("selftest", help="Run the built-in consistency checks.")
@_run_options
def selftest(**kw) -> None:
    server = kw.pop("server", None)
    spec = _build_spec("selftest", kw)
    result = _execute(spec, server)
    assert isinstance(result, SelftestResponse)
    for check in result.checks:
        click.echo(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    total = len(result.checks)
    good = sum(1 for c in result.checks if c.passed)
    click.echo(f"{good}/{total} checks passed")
    if not result.passed:
        raise SystemExit(1)


@main.command(help="Serve the HTTP API.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host: str, port: int) -> None:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

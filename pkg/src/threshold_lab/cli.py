"""Command-line interface.

Usage:
    threshold-lab bands --kappa 4 --n-max 5 --format csv
    threshold-lab minpoly --kappa 3 --n 5
    threshold-lab interp --kappa 3 --band 5 --sigma 3,6,9,12,15,18,21,24,27,30 --format json
    threshold-lab validate --kappa 4 --band 2 --sigma 4,8,12,24 --expect-valid
    threshold-lab rate --kappa 6 --indices 400:4800:400
    threshold-lab refdata --source table1 --format csv
    threshold-lab plot --kind g-curve --kappa 4 --sigma 4,8 --rho 1,625/1054 --energy 1.65 -o g.svg

Exit status: 0 success, 1 computation error, 2 failed expectation or
integrity check, 64 usage error.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import click

from . import bands, highprec, mourre, plotting, refdata
from .exceptions import ThresholdLabError

EXIT_OK, EXIT_ERROR, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2, 64
COMMANDS = ("bands", "minpoly", "interp", "validate", "rate", "refdata", "plot")
FORMATS = ("text", "csv", "json", "svg")


class ConfigError(click.UsageError):
    pass


@dataclass
class RunConfig:
    command: str
    kappa: int | None = None
    n: int | None = None
    sigma: tuple[int, ...] = ()
    indices: tuple[int, ...] = ()
    e_grid: int = 101
    x_grid: int = 2001
    margin: float = 0.0
    bits: int | None = None
    max_degree: int = 8
    tol: float = 1e-12
    fmt: str = "text"
    output: str | None = None
    source: str | None = None
    expect_valid: bool | None = None
    check: bool = False
    kind: str = "g-curve"
    energy: float | None = None
    rho: tuple[float, ...] = ()

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.fmt == "svg" and self.command not in ("plot", "rate"):
            raise ConfigError("svg output is only available for plot and rate")
        if self.command == "plot" and self.fmt != "svg":
            self.fmt = "svg"
        if self.fmt == "svg" and not self.output:
            raise ConfigError("svg output needs --output")
        if self.kappa is not None and self.kappa < 2:
            raise ConfigError("--kappa must be >= 2")
        if self.sigma:
            if self.kappa is None:
                raise ConfigError("--sigma needs --kappa")
            bad = [s for s in self.sigma if s <= 0 or s % self.kappa]
            if bad:
                raise ConfigError(f"sigma entries {bad} are not positive multiples of kappa={self.kappa}")
            if any(b <= a for a, b in zip(self.sigma, self.sigma[1:])):
                raise ConfigError("sigma must be strictly increasing")
        if self.rho and len(self.rho) != len(self.sigma):
            raise ConfigError("--rho needs one value per --sigma entry")

    def as_dict(self) -> dict:
        d = {"command": self.command}
        for key in ("kappa", "n", "sigma", "indices", "e_grid", "x_grid", "margin", "bits",
                    "max_degree", "tol", "fmt", "source", "expect_valid", "kind", "energy", "rho"):
            value = getattr(self, key)
            d[key] = list(value) if isinstance(value, tuple) else value
        return d


def _num(v: float) -> str:
    return f"{v:.12g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json(config: RunConfig, results) -> str:
    return json.dumps({"command": config.command, "config": config.as_dict(),
                       "results": results}, indent=2) + "\n"


def chains_to_csv(solutions) -> str:
    return _csv(["kappa", "n", "E", "X"],
                [[s.kappa, s.n, repr(s.E), ";".join(repr(x) for x in s.X)] for s in solutions])


def chains_from_csv(text: str) -> list[bands.ChainSolution]:
    return [
        bands.ChainSolution(int(r["kappa"]), int(r["n"]), float(r["E"]),
                            tuple(float(x) for x in r["X"].split(";")))
        for r in csv.DictReader(io.StringIO(text))
    ]


def _run_bands(cfg: RunConfig):
    seq = bands.band_sequence(cfg.kappa, cfg.n, cfg.tol)
    if cfg.fmt == "csv":
        return chains_to_csv(seq), EXIT_OK
    if cfg.fmt == "json":
        return _json(cfg, [{"kappa": s.kappa, "n": s.n, "E": s.E, "X": list(s.X)} for s in seq]), EXIT_OK
    lines = [f"kappa={cfg.kappa}  J_2 = ({_num(bands.BandWindow(cfg.kappa).lower)}, "
             f"{_num(bands.BandWindow(cfg.kappa).upper)})"]
    for s in seq:
        lines.append(f"E_{s.n} = {_num(s.E)}   X = [{', '.join(_num(x) for x in s.X)}]")
    return "\n".join(lines) + "\n", EXIT_OK


def _run_minpoly(cfg: RunConfig):
    bits = cfg.bits or highprec.DEFAULT_BITS
    value = highprec.refine_endpoint(cfg.kappa, cfg.n, bits)
    res = highprec.find_min_poly(value, cfg.max_degree, bits)
    import mpmath as mp
    value_str = mp.nstr(value, 40)
    if cfg.fmt == "csv":
        rows = [[cfg.kappa, cfg.n, i, c] for i, c in enumerate(res.coefficients)]
        return _csv(["kappa", "n", "power", "coefficient"], rows), EXIT_OK
    if cfg.fmt == "json":
        return _json(cfg, {"E": value_str, "coefficients": list(res.coefficients),
                           "degree": res.degree, "residual": res.residual,
                           "field": res.field}), EXIT_OK
    terms = " ".join(f"{c:+d}*E^{i}" for i, c in reversed(list(enumerate(res.coefficients))) if c)
    return (f"E_{cfg.n}(kappa={cfg.kappa}) = {value_str}\n"
            f"mp(E) = {terms}\nresidual = {res.residual:.3e}\n"), EXIT_OK


def _run_interp(cfg: RunConfig):
    plan = mourre.SigmaPlan(cfg.kappa, cfg.n, cfg.sigma)
    sol = mourre.solve_coefficients(plan)
    if cfg.fmt == "csv":
        return _csv(["index", "rho"], [[k, repr(v)] for k, v in sol.rho.items()]), EXIT_OK
    if cfg.fmt == "json":
        return _json(cfg, {"rho": {str(k): v for k, v in sol.rho.items()},
                           "singular_values": list(sol.singular_values),
                           "nullity": sol.nullity}), EXIT_OK
    lines = [f"rho_{k} = {_num(v)}" for k, v in sol.rho.items()]
    lines.append(f"nullity = {sol.nullity}")
    return "\n".join(lines) + "\n", EXIT_OK


def _run_validate(cfg: RunConfig):
    plan = mourre.SigmaPlan(cfg.kappa, cfg.n, cfg.sigma)
    verdict = mourre.validate_sigma(plan, cfg.e_grid, cfg.x_grid, cfg.margin)
    status = EXIT_OK
    if cfg.expect_valid is not None and verdict.valid != cfg.expect_valid:
        status = EXIT_VALIDATION
    result = {"valid": verdict.valid, "min_value": verdict.min_value,
              "witness": list(verdict.witness), "e_grid": verdict.e_grid,
              "x_grid": verdict.x_grid}
    if cfg.fmt == "csv":
        return _csv(list(result), [[verdict.valid, repr(verdict.min_value),
                                    ";".join(map(repr, verdict.witness)),
                                    verdict.e_grid, verdict.x_grid]]), status
    if cfg.fmt == "json":
        return _json(cfg, result), status
    word = "valid" if verdict.valid else "not valid"
    return (f"Sigma = {list(plan.indices)} is {word} on band {plan.band}\n"
            f"min G = {_num(verdict.min_value)} at E = {_num(verdict.witness[0])}, "
            f"x = {_num(verdict.witness[1])}\n"), status


def _run_rate(cfg: RunConfig):
    fit = bands.rate_fit(cfg.kappa, cfg.indices)
    if cfg.fmt == "svg":
        plotting.emit_plot("rate-loglog", plotting.rate_plot_data(fit), cfg.output)
        return f"wrote {cfg.output}\n", EXIT_OK
    if cfg.fmt == "csv":
        return _csv(["n", "gap"], [[n, repr(g)] for n, g in zip(fit.indices, fit.gaps)]), EXIT_OK
    result = {"slope": fit.slope, "intercept": fit.intercept,
              "residual_norm": fit.residual_norm, "indices": list(fit.indices),
              "gaps": list(fit.gaps)}
    if cfg.fmt == "json":
        return _json(cfg, result), EXIT_OK
    return (f"slope = {_num(fit.slope)}\nintercept = {_num(fit.intercept)}\n"
            f"residual_norm = {_num(fit.residual_norm)}\n"), EXIT_OK


def _run_refdata(cfg: RunConfig):
    if cfg.check:
        report = refdata.check_integrity()
        text = f"{report.checks} checks, {len(report.failures)} mismatches\n"
        text += "".join(f"  {f}\n" for f in report.failures)
        return text, EXIT_OK if report.ok else EXIT_VALIDATION
    records = refdata.load_dataset(cfg.source or "table1")
    if cfg.fmt == "json":
        return refdata.to_json(records) + "\n", EXIT_OK
    if cfg.fmt == "csv":
        if cfg.source == "sigma":
            rows = [[r.kappa, r.band, " ".join(map(str, r.indices)), r.expected_valid] for r in records]
            return _csv(["kappa", "band", "indices", "expected_valid"], rows), EXIT_OK
        return refdata.to_csv(records), EXIT_OK
    lines = []
    for r in records:
        if cfg.source == "sigma":
            lines.append(f"kappa={r.kappa} band={r.band} {list(r.indices)} "
                         f"{'valid' if r.expected_valid else 'not valid'}")
        else:
            extra = f"  = {r.closed_form}" if r.closed_form else ""
            lines.append(f"kappa={r.kappa} {r.label} {r.value}{extra}")
    return "\n".join(lines) + "\n", EXIT_OK


def _run_plot(cfg: RunConfig):
    if cfg.kind == "rate-loglog":
        fit = bands.rate_fit(cfg.kappa, cfg.indices)
        plotting.emit_plot("rate-loglog", plotting.rate_plot_data(fit), cfg.output)
        return f"wrote {cfg.output}\n", EXIT_OK
    if cfg.rho:
        rho = dict(zip(cfg.sigma, cfg.rho))
    else:
        if cfg.n is None:
            raise ConfigError("g-curve plot needs --rho or --band")
        rho = mourre.solve_coefficients(mourre.SigmaPlan(cfg.kappa, cfg.n, cfg.sigma)).rho
    if cfg.energy is None:
        raise ConfigError("g-curve plot needs --energy")
    plotting.emit_plot("g-curve", plotting.g_curve_data(cfg.kappa, rho, cfg.energy), cfg.output)
    return f"wrote {cfg.output}\n", EXIT_OK


_DISPATCH = {
    "bands": _run_bands, "minpoly": _run_minpoly, "interp": _run_interp,
    "validate": _run_validate, "rate": _run_rate, "refdata": _run_refdata, "plot": _run_plot,
}


def run(config: RunConfig, out=None) -> int:
    """Execute one command; returns the exit status.

    Data goes to ``config.output`` when set (except SVG, which the plot
    writer handles), otherwise to ``out``.
    """
    out = out or sys.stdout
    config.validate()
    text, status = _DISPATCH[config.command](config)
    if config.output and config.fmt != "svg":
        try:
            with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {config.output}: {exc.strerror or exc}") from exc
    else:
        out.write(text)
    return status


def _int_list(ctx, param, value):
    if value is None:
        return ()
    try:
        return tuple(int(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None


def _float_list(ctx, param, value):
    if value is None:
        return ()
    try:
        return tuple(float(Fraction(v.strip())) for v in value.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter("expected comma-separated numbers or fractions") from None


def _range(ctx, param, value):
    if value is None:
        return ()
    try:
        if ":" in value:
            start, stop, step = (int(p) for p in value.split(":"))
            if step <= 0:
                raise ValueError
            return tuple(range(start, stop + 1, step))
        return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter("expected a:b:step or a comma-separated list") from None


_fmt = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
_out = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                    help="Write to this file instead of stdout.")
_kappa = click.option("--kappa", "-k", type=int, required=True)
_sigma = click.option("--sigma", callback=_int_list, required=True,
                      help="Comma-separated multiples of kappa, e.g. 4,8,12,24.")


@click.group()
def cli():
    """Threshold energies, minimal polynomials and Mourre-symbol checks for the 2-D discrete Laplacian."""


@cli.command("bands")
@_kappa
@click.option("--n-max", type=click.IntRange(min=0), default=5, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@_fmt
@_out
def bands_cmd(kappa, n_max, tol, fmt, output):
    """Band endpoints E_0 .. E_{n-max} and their chains."""
    return RunConfig("bands", kappa=kappa, n=n_max, tol=tol, fmt=fmt, output=output)


@cli.command("minpoly")
@_kappa
@click.option("--n", "n", type=click.IntRange(min=0), required=True)
@click.option("--bits", type=click.IntRange(min=64), default=highprec.DEFAULT_BITS, show_default=True)
@click.option("--max-degree", type=click.IntRange(min=1), default=8, show_default=True)
@_fmt
@_out
def minpoly_cmd(kappa, n, bits, max_degree, fmt, output):
    """Integer minimal polynomial of E_n."""
    return RunConfig("minpoly", kappa=kappa, n=n, bits=bits, max_degree=max_degree, fmt=fmt, output=output)


@cli.command("interp")
@_kappa
@click.option("--band", type=click.IntRange(min=1), required=True)
@_sigma
@_fmt
@_out
def interp_cmd(kappa, band, sigma, fmt, output):
    """Solve M rho = 0 for a Sigma plan."""
    return RunConfig("interp", kappa=kappa, n=band, sigma=sigma, fmt=fmt, output=output)


@cli.command("validate")
@_kappa
@click.option("--band", type=click.IntRange(min=1), required=True)
@_sigma
@click.option("--e-grid", type=click.IntRange(min=3), default=101, show_default=True)
@click.option("--x-grid", type=click.IntRange(min=3), default=2001, show_default=True)
@click.option("--margin", type=float, default=0.0, show_default=True)
@click.option("--expect-valid/--expect-invalid", default=None,
              help="Exit with status 2 if the verdict differs.")
@_fmt
@_out
def validate_cmd(kappa, band, sigma, e_grid, x_grid, margin, expect_valid, fmt, output):
    """Check strict positivity of G on the band."""
    return RunConfig("validate", kappa=kappa, n=band, sigma=sigma, e_grid=e_grid, x_grid=x_grid,
                     margin=margin, expect_valid=expect_valid, fmt=fmt, output=output)


@cli.command("rate")
@_kappa
@click.option("--indices", callback=_range, default="400:4800:400", show_default=True,
              help="a:b:step (inclusive) or comma-separated n values; fits E_2n.")
@_fmt
@_out
def rate_cmd(kappa, indices, fmt, output):
    """Log-log slope of E_2n - 2cos(pi/kappa) against n."""
    return RunConfig("rate", kappa=kappa, indices=indices, fmt=fmt, output=output)


@cli.command("refdata")
@click.option("--source", type=click.Choice(refdata.SOURCES), default="table1", show_default=True)
@click.option("--check", is_flag=True, help="Run the integrity checks instead of exporting.")
@click.option("--format", "fmt", type=click.Choice(("text", "csv", "json")), default="text",
              show_default=True)
@_out
def refdata_cmd(source, check, fmt, output):
    """Export embedded reference data or check its integrity."""
    return RunConfig("refdata", source=source, check=check, fmt=fmt, output=output)


@cli.command("plot")
@click.option("--kind", type=click.Choice(plotting.PLOT_KINDS), default="g-curve", show_default=True)
@_kappa
@click.option("--sigma", callback=_int_list, default=None)
@click.option("--rho", callback=_float_list, default=None, help="Coefficients matching --sigma.")
@click.option("--band", type=click.IntRange(min=1), default=None,
              help="Solve rho for this band when --rho is not given.")
@click.option("--energy", "-E", type=float, default=None)
@click.option("--indices", callback=_range, default="400:4800:400", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def plot_cmd(kind, kappa, sigma, rho, band, energy, indices, output):
    """Write an SVG of G over [E-1, 1] or of the convergence fit."""
    return RunConfig("plot", kind=kind, kappa=kappa, sigma=sigma, rho=rho, n=band,
                     energy=energy, indices=indices, fmt="svg", output=output)


def main(argv=None) -> int:
    try:
        config = cli.main(args=argv, prog_name="threshold-lab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_ERROR
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    if not isinstance(config, RunConfig):
        # --help or a bare group invocation
        return EXIT_OK
    try:
        return run(config)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except ThresholdLabError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR


def entry_point() -> None:
    sys.exit(main())

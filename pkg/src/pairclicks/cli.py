"""Command-line pipelines: model curves, synthetic sweeps, compensation, fitting.

Exit codes: 0 success, 2 usage error, 3 config/data validation error,
4 numeric or degenerate-fit error. Results go to standard output or the
requested file; standard error carries diagnostics only.
"""

from __future__ import annotations

import functools
import sys

import click
import numpy as np

from .click_model import probabilities_for_means
from .dark_counts import correct_rates
from .distributions import PumpMapping
from .errors import DataError, FitError, ParameterError, SimulationError
from .estimation import (
    CountRecord,
    FitResult,
    classify,
    curve,
    fit_pump_constant,
    pairs_to_power,
)
from .io import (
    Config,
    Dataset,
    format_number,
    parse_config,
    read_dataset,
    write_corrected_csv,
    write_counts_csv,
)
from .montecarlo import sweep

EXIT_VALIDATION = 3
EXIT_NUMERIC = 4

_MODEL_CHOICE = click.Choice(["thermal", "poissonian"])


def _friendly_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (FitError, SimulationError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        except (DataError, ParameterError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def _load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    return parse_config(path)


def _parse_powers(ctx, param, value: str) -> tuple[float, ...]:
    try:
        powers = tuple(float(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"could not parse power list {value!r}") from None
    if not powers:
        raise click.BadParameter("at least one power is required")
    if any(p < 0 for p in powers):
        raise click.BadParameter("powers must be >= 0")
    if any(b <= a for a, b in zip(powers, powers[1:])):
        raise click.BadParameter("powers must be strictly increasing")
    return powers


@click.group()
@click.version_option(package_name="pairclicks")
def main() -> None:
    """Model, simulate, compensate, and fit photon-pair click statistics."""


@main.command()
@click.option("--model", type=_MODEL_CHOICE, required=True, help="Pair-number law.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--mean-min", type=float, required=True, help="Smallest mean pairs per gate.")
@click.option("--mean-max", type=float, required=True, help="Largest mean pairs per gate.")
@click.option("--points", type=int, required=True, help="Number of curve points.")
@click.option("--log", "log_spacing", is_flag=True, help="Space means geometrically.")
@_friendly_errors
def curves(model, config_path, mean_min, mean_max, points, log_spacing) -> None:
    """Print the single-vs-coincidence probability curve as CSV."""
    if mean_min >= mean_max:
        raise click.UsageError("--mean-min must be strictly less than --mean-max")
    if points < 2:
        raise click.UsageError("--points must be at least 2")
    if log_spacing and mean_min <= 0:
        raise click.UsageError("--log needs --mean-min > 0")
    setup = _load_config(config_path).to_setup()
    spacing = "log" if log_spacing else "linear"
    click.echo("mean_pairs,p_single,p_coinc")
    for point in curve(model, setup, mean_min, mean_max, points, spacing=spacing):
        click.echo(
            ",".join(format_number(v) for v in (point.mean_pairs, point.p_single, point.p_coinc))
        )


@main.command()
@click.option("--model", type=_MODEL_CHOICE, required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--powers", callback=_parse_powers, required=True, help="Comma-separated pump powers in mW, strictly increasing.")
@click.option("--pump-constant", type=float, required=True, help="Pump constant (1/mW thermal, pairs/mW poissonian).")
@click.option("--gates", type=click.IntRange(min=1), required=True, help="Gates per power point.")
@click.option("--seed", type=click.IntRange(min=0), required=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Worker threads; output is identical for any value.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), required=True)
@_friendly_errors
def simulate(model, config_path, powers, pump_constant, gates, seed, workers, out_path) -> None:
    """Simulate a pump-power sweep and write it as a raw counts CSV."""
    config = _load_config(config_path)
    mapping = PumpMapping(model, pump_constant)
    results = sweep(powers, mapping, config.to_setup(), gates, seed, workers=workers)
    write_counts_csv(out_path, ((power, result.raw_rates) for power, result in results))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), required=True)
@click.option("--exact", is_flag=True, help="Keep the dark1*dark2 cross term when inverting.")
@_friendly_errors
def correct(config_path, in_path, out_path, exact) -> None:
    """Compensate a raw counts CSV for dark counts."""
    config = _load_config(config_path)
    dataset = read_dataset(in_path)
    corrected = [
        CountRecord(
            record.power_mw,
            record.raw,
            correct_rates(
                record.raw, config.dark1_hz, config.dark2_hz, config.gate_rate_hz, exact=exact
            ),
        )
        for record in dataset
    ]
    write_corrected_csv(out_path, corrected)


def _ensure_corrected(dataset: Dataset, config: Config) -> list[CountRecord]:
    """Compensate raw-only records with the config dark rates before fitting."""
    records = []
    for record in dataset:
        if record.corrected is None:
            record = CountRecord(
                record.power_mw,
                record.raw,
                correct_rates(record.raw, config.dark1_hz, config.dark2_hz, config.gate_rate_hz),
            )
        records.append(record)
    return records


def _echo_fit_block(result: FitResult, n_points: int) -> None:
    click.echo(f"model = {result.kind}")
    click.echo(f"pump_constant = {format_number(result.constant)}")
    click.echo(f"pump_constant_units = {result.constant_units}")
    click.echo(f"rss = {format_number(result.rss)}")
    click.echo(f"n_points = {n_points}")


def _echo_point_table(result: FitResult, records, setup) -> None:
    powers = np.array([record.power_mw for record in records])
    means = np.asarray(result.per_point_means)
    p1, p2, pc, _ = probabilities_for_means(result.kind, means, setup.t_eta1, setup.t_eta2)
    click.echo("")
    header = (
        f"{'power_mw':>12} {'mean_pairs':>14} {'s1_fit_hz':>14} "
        f"{'s2_fit_hz':>14} {'c_fit_hz':>14} {'rss_point':>12}"
    )
    click.echo(header)
    rate = setup.gate_rate_hz
    for i in range(len(records)):
        click.echo(
            f"{powers[i]:>12.6g} {means[i]:>14.6g} {p1[i] * rate:>14.6g} "
            f"{p2[i] * rate:>14.6g} {pc[i] * rate:>14.6g} {result.per_point_rss[i]:>12.4g}"
        )


@main.command()
@click.option("--model", type=_MODEL_CHOICE, required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@_friendly_errors
def fit(model, config_path, in_path) -> None:
    """Fit the pump constant of one pair law to a sweep CSV."""
    config = _load_config(config_path)
    setup = config.to_setup()
    records = _ensure_corrected(read_dataset(in_path), config)
    result = fit_pump_constant(records, model, setup)
    _echo_fit_block(result, len(records))
    _echo_point_table(result, records, setup)


@main.command("classify")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@_friendly_errors
def classify_command(config_path, in_path) -> None:
    """Fit both pair laws to a sweep CSV and report the verdict."""
    config = _load_config(config_path)
    setup = config.to_setup()
    records = _ensure_corrected(read_dataset(in_path), config)
    result = classify(records, setup)
    _echo_fit_block(result, len(records))
    click.echo(f"rss_thermal = {format_number(result.rss_by_kind['thermal'])}")
    click.echo(f"rss_poissonian = {format_number(result.rss_by_kind['poissonian'])}")
    click.echo(f"verdict = {result.verdict}")
    click.echo(f"verdict_ratio = {format_number(result.verdict_ratio)}")
    _echo_point_table(result, records, setup)


@main.command()
@click.option("--pairs", type=float, required=True, help="Mean photon pairs per pulse.")
@click.option("--wavelength-nm", type=float, default=1550.0, show_default=True)
@click.option("--rep-rate-hz", type=float, default=8.0e7, show_default=True)
@_friendly_errors
def power(pairs, wavelength_nm, rep_rate_hz) -> None:
    """Print the optical power (W) carried by the given pair flux."""
    click.echo(f"{pairs_to_power(pairs, wavelength_nm, rep_rate_hz):.4e}")


if __name__ == "__main__":
    main()

"""Command-line entry point.

    smcsmooth <experiment> [--config FILE] [--seed S] [--out DIR]
              [--threads P] [--override key=value ...]

Exit codes: 0 success, 2 configuration error, 3 numerical degeneracy (all
particle weights collapsed; diagnostics are printed before exiting).
"""

from __future__ import annotations

import dataclasses
import sys

import click

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    apply_override,
    load_config,
    run,
)
from .ssm import DegenerateWeightsError

EXIT_CONFIG_ERROR = 2
EXIT_DEGENERACY = 3


def _build_config(experiment, config_path, seed, out, threads, overrides) -> ExperimentConfig:
    if config_path is not None:
        config = load_config(config_path, experiment=experiment)
    else:
        config = ExperimentConfig(experiment=experiment)
    replacements = {}
    if seed is not None:
        replacements["seed"] = seed
    if out is not None:
        replacements["out_dir"] = out
    if threads is not None:
        replacements["threads"] = threads
    if replacements:
        config = dataclasses.replace(config, **replacements)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        config = apply_override(config, key, value)
    return config


def _run_command(experiment, config_path, seed, out, threads, overrides) -> None:
    try:
        config = _build_config(experiment, config_path, seed, out, threads, overrides)
    except (ConfigError, ValueError, OSError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    try:
        manifest = run(config)
    except DegenerateWeightsError as exc:
        click.echo(f"numerical degeneracy: {exc}", err=True)
        click.echo(f"config: {dataclasses.asdict(config)}", err=True)
        sys.exit(EXIT_DEGENERACY)
    timings = manifest.get("timings_s", {})
    total = sum(timings.values())
    click.echo(f"{experiment}: wrote {config.out_dir} in {total:.1f} s")


def _add_experiment_command(group: click.Group, experiment: str) -> None:
    @group.command(name=experiment, help=f"Run the {experiment} experiment.")
    @click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
    @click.option("--seed", type=int, default=None)
    @click.option("--out", type=click.Path(file_okay=False), default=None)
    @click.option("--threads", type=int, default=None)
    @click.option("--override", "overrides", multiple=True, metavar="KEY=VALUE")
    def command(config_path, seed, out, threads, overrides):
        _run_command(experiment, config_path, seed, out, threads, overrides)


@click.group()
@click.version_option()
def main():
    """Sequential Monte Carlo smoothing experiments."""


for _experiment in EXPERIMENTS:
    _add_experiment_command(main, _experiment)


if __name__ == "__main__":
    main()

"""Command-line front end: profile tables and the verification suite.

Settings come from pinned defaults, then an optional ``key=value`` config
file, then command-line flags, later sources winning.

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import checks, energy, luminosity, profiles
from .profiles import (
    FIT_VALIDITY_XMAX,
    Composition,
    ModelParams,
    ParameterError,
    PhysicalConstants,
)

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_CHECK = 0, 1, 2, 3
MODES = ("profiles", "energy", "luminosity", "all", "check")

PROFILE_COLUMNS = ["x", "f_D", "f_M", "f_P", "f_T", "rho", "mass", "pressure", "temperature"]
ENERGY_COLUMNS = ["epsilon_direct", "epsilon_expansion"]
LUMINOSITY_COLUMNS = ["L", "L_over_Lmodel"]


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    composition: Composition = field(default_factory=Composition)
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    grid_points: int = 256
    x_max: float = 1.0
    output_path: str = "-"
    mode: str = "profiles"
    truncation_tol: float = energy.DEFAULT_TAIL_TOL
    expansion_radius: float = energy.DEFAULT_X_MAX
    inject_fault: str | None = None


# option key -> (parser, destination group, attribute)
_OPTIONS: dict[str, tuple[Callable, str, str]] = {
    "delta": (float, "params", "delta"),
    "gamma": (int, "params", "gamma"),
    "n-exp": (int, "params", "n_exp"),
    "m-exp": (int, "params", "m_exp"),
    "epsilon0": (float, "params", "epsilon0"),
    "X": (float, "composition", "X"),
    "Y": (float, "composition", "Y"),
    "Z": (float, "composition", "Z"),
    "G": (float, "constants", "G"),
    "k": (float, "constants", "k"),
    "N-A": (float, "constants", "N_A"),
    "M-sun": (float, "constants", "M_sun"),
    "R-sun": (float, "constants", "R_sun"),
    "molar-mass-unit": (float, "constants", "molar_mass_unit"),
    "grid": (int, "run", "grid_points"),
    "x-max": (float, "run", "x_max"),
    "mode": (str, "run", "mode"),
    "out": (str, "run", "output_path"),
    "truncation-tol": (float, "run", "truncation_tol"),
    "expansion-radius": (float, "run", "expansion_radius"),
    "inject-fault": (str, "run", "inject_fault"),
}


_HELP = {
    "delta": "density-law steepness (default 1.28)",
    "gamma": "density-law power, integer in [1, 64] (default 10)",
    "n-exp": "density exponent of the energy rate (default 1)",
    "m-exp": "temperature exponent of the energy rate, >= n-exp (default 4)",
    "epsilon0": "energy-rate normalisation (default 1.0, arbitrary units)",
    "X": "hydrogen mass fraction (default 0.7)",
    "Y": "helium mass fraction (default 0.28)",
    "Z": "metal mass fraction (default 0.02)",
    "molar-mass-unit": "kg/mol per atomic mass unit in the gas law (default 1e-3)",
    "grid": "number of grid points including both ends (default 256)",
    "x-max": "outer end of the grid, in (0, 1] (default 1.0)",
    "out": "output path, '-' for stdout (default)",
    "truncation-tol": "tail bound target for the energy expansion (default 1e-8)",
    "expansion-radius": "largest x covered by the energy expansion (default 0.5)",
    "inject-fault": "perturb one summand of eta(gamma) by 1e-3 (exercises check mode)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError([message])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="solarhyp",
        description="Analytic solar-core profiles with quadrature cross-checks.",
    )
    parser.add_argument("--config", help="key=value settings file ('#' starts a comment)")
    for key, (kind, _, _) in _OPTIONS.items():
        kwargs = {"type": kind, "default": None, "dest": key.replace("-", "_"),
                  "help": _HELP.get(key)}
        if key == "mode":
            kwargs["choices"] = MODES
        if key == "inject-fault":
            kwargs["choices"] = ("eta",)
        parser.add_argument(f"--{key}", **kwargs)
    return parser


def read_config_file(path: str) -> dict[str, object]:
    """Parse ``key=value`` lines; keys are flag names without dashes."""
    text = Path(path).read_text(encoding="utf-8")
    values: dict[str, object] = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in _OPTIONS:
            problems.append(f"{path}:{lineno}: unknown key {key!r}")
            continue
        kind = _OPTIONS[key][0]
        try:
            values[key] = kind(value)
        except ValueError:
            problems.append(f"{path}:{lineno}: {key}: cannot parse {value!r} as {kind.__name__}")
    if problems:
        raise ConfigError(problems)
    return values


def parse_config(argv: list[str] | None = None, config_file: str | None = None) -> RunConfig:
    """Merge pinned defaults, config-file values and flags into a RunConfig."""
    args = build_parser().parse_args(argv)
    merged: dict[str, object] = {}
    path = args.config or config_file
    if path:
        merged.update(read_config_file(path))
    for key in _OPTIONS:
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            merged[key] = value

    groups: dict[str, dict[str, object]] = {"params": {}, "composition": {}, "constants": {}, "run": {}}
    for key, value in merged.items():
        _, group, attr = _OPTIONS[key]
        groups[group][attr] = value

    problems: list[str] = []
    built = {}
    for group, cls in (("params", ModelParams), ("composition", Composition),
                       ("constants", PhysicalConstants)):
        try:
            built[group] = cls(**groups[group])
        except ParameterError as exc:
            problems.extend(exc.problems)
    run = groups["run"]
    if run.get("grid_points", 2) < 2:
        problems.append(f"grid must be at least 2, got {run['grid_points']}")
    if not 0 < run.get("x_max", 1.0) <= 1:
        problems.append(f"x-max must lie in (0, 1], got {run['x_max']}")
    if not run.get("truncation_tol", 1.0) > 0:
        problems.append(f"truncation-tol must be positive, got {run['truncation_tol']}")
    if not 0 < run.get("expansion_radius", 0.5) < 1:
        problems.append(f"expansion-radius must lie in (0, 1), got {run['expansion_radius']}")
    if problems:
        raise ConfigError(problems)
    return RunConfig(**built, **run)


def _fmt(value) -> str:
    return "" if value is None else format(float(value), ".17g")


def grid(config: RunConfig) -> list[float]:
    n = config.grid_points
    return [config.x_max * i / (n - 1) for i in range(n)]


def _profile_row(x: float, p: ModelParams, config: RunConfig, cv) -> list[float]:
    c, comp = config.constants, config.composition
    # exact boundary values at the endpoints
    if x == 0:
        f_d, f_m = 1.0, 0.0
        f_p, f_t = profiles.f_pressure(0.0, p), profiles.f_temperature(0.0, p)
    elif x == 1:
        f_d, f_m, f_p, f_t = 0.0, 1.0, 0.0, 0.0
    else:
        f_d, f_m = profiles.f_density(x, p), profiles.f_mass(x, p)
        f_p, f_t = profiles.f_pressure(x, p), profiles.f_temperature(x, p)
    return [
        x, f_d, f_m, f_p, f_t,
        cv.rho_c * f_d,
        c.M_sun * f_m,
        profiles.pressure_scale(c) * f_p,
        profiles.temperature_scale(c, comp) * f_t,
    ]


def profile_table(config: RunConfig) -> tuple[list[str], list[list], list[str]]:
    """Header, rows and footer comments for a table mode."""
    p, c = config.params, config.constants
    cv = profiles.central_values(p, c, config.composition)
    mode = config.mode
    want_energy = mode in ("energy", "all")
    want_lum = mode in ("luminosity", "all")
    header = list(PROFILE_COLUMNS)
    footer: list[str] = []
    expansion = terms = None
    if want_energy or want_lum:
        expansion = energy.epsilon_expansion(
            p, x_max=config.expansion_radius, tol=config.truncation_tol)
    if want_energy:
        header += ENERGY_COLUMNS
    if want_lum:
        header += LUMINOSITY_COLUMNS
        terms = luminosity.build_luminosity_terms(expansion, p, cv, c)
        l_total = luminosity.total_luminosity(terms, p)

    rows = []
    blank_direct = blank_expansion = False
    for x in grid(config):
        row = _profile_row(x, p, config, cv)
        if want_energy:
            if x >= 1 and p.m_exp > p.n_exp:
                direct, blank_direct = None, True
            else:
                direct = energy.epsilon_direct(x, p, cv)
            if x <= expansion.x_max:
                expanded = energy.epsilon_from_expansion(x, expansion, cv, p)
            else:
                expanded, blank_expansion = None, True
            row += [direct, expanded]
        if want_lum:
            lum = luminosity.luminosity_profile(x, terms)
            row += [lum, lum / l_total]
        rows.append(row)

    if blank_direct:
        footer.append("epsilon_direct is blank at x=1: the rate diverges there for m_exp > n_exp "
                      "while rho*epsilon tends to 0")
    if blank_expansion:
        footer.append(f"epsilon_expansion is blank beyond x={expansion.x_max:g}, "
                      f"the radius its truncation bound covers")
    if expansion is not None:
        footer.append(f"expansion truncation S={expansion.truncation_order}, "
                      f"tail bound {expansion.tail_bound:.3e} at x={expansion.x_max:g}")
    return header, rows, footer


def render_csv(header, rows, footer) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for note in footer:
        buf.write(f"# {note}\n")
    return buf.getvalue()


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def run(config: RunConfig) -> int:
    """Execute one mode and return the process exit status."""
    if config.mode == "check":
        if config.inject_fault == "eta":
            with checks.injected_eta_fault():
                results = checks.run_checks(config.params, config.constants, config.composition,
                                            tail_tol=config.truncation_tol)
        else:
            results = checks.run_checks(config.params, config.constants, config.composition,
                                        tail_tol=config.truncation_tol)
        text = checks.format_table(results) + "\n"
        try:
            _emit(text, config.output_path)
        except OSError as exc:
            print(f"error: cannot write {config.output_path}: {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK

    if config.x_max > FIT_VALIDITY_XMAX:
        print(f"warning: x_max={config.x_max:g} extends past x={FIT_VALIDITY_XMAX}, the region "
              f"where delta=1.28, gamma=10 were fitted to solar-model densities",
              file=sys.stderr)
    text = render_csv(*profile_table(config))
    try:
        _emit(text, config.output_path)
    except OSError as exc:
        print(f"error: cannot write {config.output_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config file: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

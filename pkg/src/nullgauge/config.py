"""Scenario configuration: flat INI-style text with [section] headers.

Strict by design: unknown sections or keys, duplicate keys (both line numbers
named), malformed values, and out-of-range parameters are all rejected with
line-numbered messages collected into a single ConfigError.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .grid import GridSpec, PhysicalConstants

SCENARIOS = (
    "kgm",
    "unitary",
    "em-only",
    "compare",
    "bohm",
    "dirac-flow",
    "majorana-suite",
    "convergence",
)

# section -> key -> (type, default); None default means required
_SCHEMA = {
    "run": {
        "scenario": (str, None),
        "seed": (int, 0),
        "out_dir": (str, "out"),
    },
    "grid": {
        "n_x": (int, 256),
        "dx": (float, 0.05),
        "dt": (float, 0.01),
    },
    "physics": {
        "e": (float, 1.0),
        "m": (float, 1.0),
    },
    "initial": {
        "recipe": (str, "gaussian_packet"),
        "amplitude": (float, 0.03),
        "sigma": (float, 2.0),
        "k0": (float, 0.0),
        "offset": (float, 1.0),
        "mode": (int, 1),
        "path": (str, ""),
    },
    "scenario": {
        "t_final": (float, 1.0),
        "record_every": (int, 1),
        "particles": (int, 10000),
        "bins": (int, 32),
        "trials": (int, 1000),
        "dtau": (float, 1e-3),
        "n_steps": (int, 10000),
        "u0": (float, 0.3),
        "q": (float, 1.0),
        "refinements": (int, 2),
    },
    "tolerances": {
        "charge_drift": (float, 1e-6),
        "node_threshold": (float, 0.0),   # 0 -> module default
        "b0_floor": (float, 0.0),         # 0 -> module default
        "radicand_tol": (float, 0.0),     # 0 -> module default
    },
}

_RECIPES = ("gaussian_packet", "plane_wave", "csv")


@dataclass
class ScenarioConfig:
    scenario: str
    grid: GridSpec
    consts: PhysicalConstants
    seed: int = 0
    out_dir: str = "out"
    initial: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "grid": {"n_x": self.grid.n_x, "dx": self.grid.dx, "dt": self.grid.dt},
            "physics": {"e": self.consts.e, "m": self.consts.m},
            "initial": dict(self.initial),
            "scenario_params": dict(self.params),
            "tolerances": dict(self.tolerances),
        }


def _parse_sections(text: str):
    """Raw pass: (section, key) -> (value, line); collects syntax problems."""
    problems = []
    values = {}
    section = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                problems.append((ln, f"malformed section header {line!r}"))
                section = None
                continue
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                problems.append((ln, f"unknown section [{section}]"))
                section = "?" + section  # keep parsing; keys inside are reported once
            continue
        if "=" not in line:
            problems.append((ln, f"expected key = value, got {line!r}"))
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if section is None:
            problems.append((ln, f"key {key!r} outside any [section]"))
            continue
        if section.startswith("?"):
            continue  # section already reported
        if (section, key) in values:
            first_ln = values[(section, key)][1]
            problems.append((ln, f"duplicate key {key!r} in [{section}] (first set on line {first_ln})"))
            continue
        values[(section, key)] = (value, ln)
    return values, problems


def parse_config(text: str) -> ScenarioConfig:
    values, problems = _parse_sections(text)

    typed: dict = {}
    for (section, key), (value, ln) in values.items():
        schema = _SCHEMA[section]
        if key not in schema:
            problems.append((ln, f"unknown key {key!r} in [{section}]"))
            continue
        want, _ = schema[key]
        try:
            typed[(section, key)] = want(value)
        except ValueError:
            problems.append((ln, f"{section}.{key}: cannot parse {value!r} as {want.__name__}"))

    def get(section, key):
        if (section, key) in typed:
            return typed[(section, key)]
        return _SCHEMA[section][key][1]

    scenario = get("run", "scenario")
    if scenario is None:
        problems.append((None, "run.scenario is required"))
    elif scenario not in SCENARIOS:
        ln = values.get(("run", "scenario"), (None, None))[1]
        problems.append((ln, f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}"))

    recipe = get("initial", "recipe")
    if recipe not in _RECIPES:
        ln = values.get(("initial", "recipe"), (None, None))[1]
        problems.append((ln, f"unknown initial recipe {recipe!r}; choose from {', '.join(_RECIPES)}"))
    if recipe == "csv" and not get("initial", "path"):
        problems.append((None, "initial.recipe = csv requires initial.path"))

    grid = consts = None
    try:
        grid = GridSpec(get("grid", "n_x"), get("grid", "dx"), get("grid", "dt"))
    except ValueError as exc:
        ln = values.get(("grid", "dt"), values.get(("grid", "n_x"), (None, None)))[1]
        problems.append((ln, str(exc)))
    try:
        consts = PhysicalConstants(get("physics", "e"), get("physics", "m"))
    except ValueError as exc:
        ln = values.get(("physics", "e"), values.get(("physics", "m"), (None, None)))[1]
        problems.append((ln, str(exc)))

    for key in ("t_final", "dtau"):
        if get("scenario", key) <= 0:
            ln = values.get(("scenario", key), (None, None))[1]
            problems.append((ln, f"scenario.{key} must be positive"))
    for key in ("record_every", "particles", "bins", "trials", "n_steps", "refinements"):
        if get("scenario", key) < 1:
            ln = values.get(("scenario", key), (None, None))[1]
            problems.append((ln, f"scenario.{key} must be >= 1"))

    if problems:
        problems.sort(key=lambda p: (p[0] is None, p[0] or 0))
        raise ConfigError(problems)

    return ScenarioConfig(
        scenario=scenario,
        grid=grid,
        consts=consts,
        seed=get("run", "seed"),
        out_dir=get("run", "out_dir"),
        initial={k: get("initial", k) for k in _SCHEMA["initial"]},
        params={k: get("scenario", k) for k in _SCHEMA["scenario"]},
        tolerances={k: get("tolerances", k) for k in _SCHEMA["tolerances"]},
    )


def load_config(path, overrides=()) -> ScenarioConfig:
    """Parse a config file, applying 'section.key=value' override strings last.

    An override replaces the file's setting for that key (the file line is
    dropped so the duplicate-key check stays meaningful).
    """
    text = Path(path).read_text(encoding="utf-8")
    if overrides:
        text = _apply_overrides(text, overrides)
    return parse_config(text)


def _apply_overrides(text: str, overrides) -> str:
    pairs = {}
    for ov in overrides:
        target, _, value = ov.partition("=")
        section, _, key = target.strip().partition(".")
        if not section or not key:
            raise ConfigError([(None, f"override {ov!r} must look like section.key=value")])
        pairs[(section, key.strip())] = value.strip()

    out = []
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            out.append(raw)
            continue
        if "=" in line and not line.startswith(("#", ";")) and section is not None:
            key = line.partition("=")[0].strip()
            if (section, key) in pairs:
                continue  # dropping; the override appends it below
        out.append(raw)
    for (section, key), value in pairs.items():
        out += [f"[{section}]", f"{key} = {value}"]
    return "\n".join(out)

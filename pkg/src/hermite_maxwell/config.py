"""YAML run configurations.

Example::

    mode: tm2d
    regime: dielectric
    m: 3
    k: 10
    t_final: 5
    grid: [28, 32, 36, 40]     # a single integer for `solve`
    medium: {epsilon: 1.25, mu: 0.8}
    diagnostics: {error_every: 1, energy_every: 10}

The document is validated before anything is allocated; unknown keys are
rejected with their line number.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .exact import REGIMES, default_medium, exact_solution
from .media import MediumSpec, Pole
from .stepper import SolverConfig

OUTPUT_ENV = "HERMITE_OUTPUT_DIR"

_TOP = {"mode", "regime", "m", "q", "cfl", "k", "t_final", "grid", "medium",
        "dissipation", "start", "output", "diagnostics"}
_MEDIUM = {"epsilon", "mu", "electric_poles", "magnetic_poles"}
_POLE = {"strength", "resonance", "damping"}
_DIAG = {"error_every", "energy_every"}
_REQUIRED = {"m", "k", "t_final", "grid", "regime"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    regime: str
    m: int
    k: float
    t_final: float
    grids: list[int]
    medium: MediumSpec
    q: int | None = None
    cfl: float = 0.9
    dissipation: bool = True
    start: str = "exact"
    output: Path = field(default_factory=lambda: Path("out"))
    error_every: int = 1
    energy_every: int = 10

    def solver(self, n: int) -> SolverConfig:
        return SolverConfig(m=self.m, n=n, t_final=self.t_final, medium=self.medium,
                            mode=self.mode, q=self.q, cfl=self.cfl, regime=self.regime,
                            k=self.k, start=self.start, dissipation=self.dissipation,
                            error_every=self.error_every, energy_every=self.energy_every)

    def output_dir(self) -> Path:
        env = os.environ.get(OUTPUT_ENV)
        return Path(env) if env else self.output


def _key_lines(node, prefix=""):
    """Map dotted key paths to 1-based line numbers from a composed YAML node."""
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}{k.value}"
            out[path] = k.start_mark.line + 1
            out.update(_key_lines(v, path + "."))
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out.update(_key_lines(v, f"{prefix}{i}."))
    return out


def _where(lines, path):
    line = lines.get(path)
    return f" (line {line})" if line else ""


def _check_keys(d, allowed, path, lines):
    if not isinstance(d, dict):
        raise ConfigError(f"'{path or 'document'}' must be a mapping{_where(lines, path)}")
    for key in d:
        if key not in allowed:
            full = f"{path}.{key}" if path else str(key)
            raise ConfigError(f"unknown key '{full}'{_where(lines, full)}; "
                              f"allowed: {', '.join(sorted(allowed))}")


def _number(d, key, lines, kind=float, positive=False, allow_zero=True, path=""):
    full = f"{path}{key}"
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"'{full}' must be a number{_where(lines, full)}")
    if kind is int and (isinstance(val, float) and not val.is_integer()):
        raise ConfigError(f"'{full}' must be an integer{_where(lines, full)}")
    val = kind(val)
    if not math.isfinite(val):
        raise ConfigError(f"'{full}' must be finite{_where(lines, full)}")
    if positive and (val < 0 or (val == 0 and not allow_zero)):
        raise ConfigError(f"'{full}' must be {'non-negative' if allow_zero else 'positive'}"
                          f"{_where(lines, full)}")
    return val


def _medium(d, regime, lines) -> MediumSpec:
    if d is None:
        return default_medium(regime)
    _check_keys(d, _MEDIUM, "medium", lines)
    kw = {}
    for key in ("epsilon", "mu"):
        if key in d:
            kw[key] = _number(d, key, lines, positive=True, allow_zero=False, path="medium.")
    for group in ("electric_poles", "magnetic_poles"):
        poles = []
        for i, p in enumerate(d.get(group) or []):
            path = f"medium.{group}.{i}"
            _check_keys(p, _POLE, path, lines)
            for req in ("strength", "resonance"):
                if req not in p:
                    raise ConfigError(f"'{path}' is missing '{req}'{_where(lines, path + '.' + req)}")
            poles.append(Pole(**{k: _number(p, k, lines, positive=True, path=path + ".")
                                 for k in p}))
        kw[group] = tuple(poles)
    return MediumSpec(**kw)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Validate a YAML document and build a :class:`RunConfig`."""
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = f" (line {mark.line + 1})" if mark else ""
        raise ConfigError(f"{source}: YAML syntax error{line}: {exc.problem}") from exc
    lines = _key_lines(node) if node is not None else {}
    if data is None:
        raise ConfigError(f"{source}: empty configuration")
    _check_keys(data, _TOP, "", lines)
    missing = sorted(_REQUIRED - set(data))
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    mode = data.get("mode", "tm2d")
    if mode not in ("tm2d", "1d"):
        raise ConfigError(f"'mode' must be tm2d or 1d, got {mode!r}{_where(lines, 'mode')}")
    regime = data["regime"]
    if regime not in REGIMES:
        raise ConfigError(f"'regime' must be one of {', '.join(REGIMES)}{_where(lines, 'regime')}")

    grid = data["grid"]
    grids = grid if isinstance(grid, list) else [grid]
    if not grids:
        raise ConfigError(f"'grid' is empty{_where(lines, 'grid')}")
    for g in grids:
        if isinstance(g, bool) or not isinstance(g, int) or g < 2:
            raise ConfigError(f"'grid' entries must be integers >= 2, got {g!r}{_where(lines, 'grid')}")

    diag = data.get("diagnostics") or {}
    _check_keys(diag, _DIAG, "diagnostics", lines)
    cadence = {}
    for key in _DIAG & set(diag):
        val = _number(diag, key, lines, kind=int, positive=True, allow_zero=False, path="diagnostics.")
        cadence[key] = val

    cfg = RunConfig(
        mode=mode, regime=regime,
        m=_number(data, "m", lines, kind=int, positive=True),
        k=_number(data, "k", lines, positive=True, allow_zero=False),
        t_final=_number(data, "t_final", lines, positive=True),
        grids=[int(g) for g in grids],
        medium=_medium(data.get("medium"), regime, lines),
        **cadence,
    )
    if "q" in data and data["q"] is not None:
        cfg.q = _number(data, "q", lines, kind=int, positive=True, allow_zero=False)
    if "cfl" in data:
        cfg.cfl = _number(data, "cfl", lines, positive=True, allow_zero=False)
    if "dissipation" in data:
        if not isinstance(data["dissipation"], bool):
            raise ConfigError(f"'dissipation' must be true or false{_where(lines, 'dissipation')}")
        cfg.dissipation = data["dissipation"]
    if "start" in data:
        if data["start"] not in ("exact", "self_start"):
            raise ConfigError(f"'start' must be exact or self_start{_where(lines, 'start')}")
        cfg.start = data["start"]
    if "output" in data:
        cfg.output = Path(str(data["output"]))
    # surface medium/regime mismatches now rather than mid-run
    try:
        exact_solution(cfg.regime, cfg.k, cfg.medium, 2 if cfg.mode == "tm2d" else 1)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))

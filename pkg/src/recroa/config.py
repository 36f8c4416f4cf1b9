"""Run configuration: one structured text file (YAML key/value).

Validation errors carry the file line of the offending key. Every default
is materialized into the resolved document so runs are self-describing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .dynamics import VectorField, field_from_config
from .integrate import IntegratorConfig
from .learner import LearnerConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "config"):
        self.message = message
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _key_lines(text: str) -> dict[str, int]:
    """Map dotted key paths to 1-based line numbers via the YAML node tree."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    lines: dict[str, int] = {}

    def walk(node, prefix: str):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
                lines[path] = key_node.start_mark.line + 1
                walk(value_node, path)

    if root is not None:
        walk(root, "")
    return lines


_TOP_KEYS = {
    "system",
    "system_params",
    "family",
    "directions",
    "epsilon",
    "k",
    "tau_s",
    "c",
    "seed",
    "stop_after",
    "k_doublings_max",
    "centers",
    "integrator",
    "grid",
    "stop_on_grid",
    "export",
    "out_dir",
}

_DEFAULT_GRID = {
    "bounds": [[-4.0, 4.0], [-4.0, 4.0]],
    "resolution": 100,
    "horizon": 30.0,
    "tol": 0.05,
}


@dataclass(frozen=True)
class RunConfig:
    system: str
    system_params: dict
    family: str
    directions: int
    epsilon: float
    k: int
    tau_s: float
    c: float
    seed: int
    stop_after: int
    k_doublings_max: int
    centers: np.ndarray  # resolved (h, d)
    substeps: int
    r_max: float
    grid_bounds: np.ndarray
    grid_resolution: int
    grid_horizon: float
    grid_tol: float
    stop_on_grid: bool
    export_set_region: bool
    out_dir: str = "."

    def field(self) -> VectorField:
        return field_from_config(self.system, self.system_params)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(tau_s=self.tau_s, substeps=self.substeps, r_max=self.r_max)

    def learner_config(self) -> LearnerConfig:
        return LearnerConfig(
            epsilon=self.epsilon,
            k=self.k,
            tau_s=self.tau_s,
            c=self.c,
            family=self.family,
            n_directions=self.directions,
            centers=self.centers,
            seed=self.seed,
            stop_after=self.stop_after,
            k_doublings_max=self.k_doublings_max,
            integrator=self.integrator(),
        )

    def resolved_doc(self) -> dict:
        return {
            "system": self.system,
            "system_params": dict(self.system_params),
            "family": self.family,
            "directions": self.directions,
            "epsilon": self.epsilon,
            "k": self.k,
            "tau_s": self.tau_s,
            "c": self.c,
            "seed": self.seed,
            "stop_after": self.stop_after,
            "k_doublings_max": self.k_doublings_max,
            "centers": {"points": [[float(v) for v in row] for row in self.centers]},
            "integrator": {"substeps": self.substeps, "r_max": self.r_max},
            "grid": {
                "bounds": [[float(lo), float(hi)] for lo, hi in self.grid_bounds],
                "resolution": self.grid_resolution,
                "horizon": self.grid_horizon,
                "tol": self.grid_tol,
            },
            "stop_on_grid": self.stop_on_grid,
            "export": {"set_region": self.export_set_region},
            "out_dir": self.out_dir,
        }


class _Checker:
    def __init__(self, raw: dict, lines: dict[str, int], source: str):
        self.raw = raw
        self.lines = lines
        self.source = source

    def fail(self, message: str, path: str):
        raise ConfigError(message, self.lines.get(path), self.source)

    def get(self, path: str, default=None):
        node = self.raw
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def number(self, path: str, default, positive=False, name=None):
        value = self.get(path, default)
        name = name or path
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            self.fail(f"{name} must be a number", path)
        if positive and not value > 0:
            self.fail(f"{name} must be positive", path)
        return float(value)

    def integer(self, path: str, default, minimum=None, name=None):
        value = self.get(path, default)
        name = name or path
        if not isinstance(value, int) or isinstance(value, bool):
            self.fail(f"{name} must be an integer", path)
        if minimum is not None and value < minimum:
            self.fail(f"{name} must be >= {minimum}", path)
        return int(value)

    def boolean(self, path: str, default):
        value = self.get(path, default)
        if not isinstance(value, bool):
            self.fail(f"{path} must be true or false", path)
        return value


def parse_config(text: str, source: str = "config", seed_override: int | None = None) -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"not valid YAML: {e}", mark.line + 1 if mark else None, source) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping", None, source)
    lines = _key_lines(text)
    ck = _Checker(raw, lines, source)

    for key in raw:
        if key not in _TOP_KEYS:
            ck.fail(f"unknown key {key!r}", key)

    system = str(ck.get("system", "paper2d"))
    system_params = ck.get("system_params", {}) or {}
    if not isinstance(system_params, dict):
        ck.fail("system_params must be a mapping", "system_params")
    try:
        field_ = field_from_config(system, system_params)
    except Exception as e:
        ck.fail(str(e), "system")
    d = field_.dimension

    family = str(ck.get("family", "sphere"))
    if family not in ("sphere", "polytope"):
        ck.fail("family must be 'sphere' or 'polytope'", "family")
    directions = ck.integer("directions", 200, minimum=1)
    epsilon = ck.number("epsilon", 0.1, positive=True)
    k = ck.integer("k", 50, minimum=1)
    tau_s = ck.number("tau_s", 0.5, positive=True)
    c = ck.number("c", 3.0, positive=True)
    seed = seed_override if seed_override is not None else ck.integer("seed", 0)
    stop_after = ck.integer("stop_after", 2000, minimum=1)
    k_doublings_max = ck.integer("k_doublings_max", 6, minimum=0)

    substeps = ck.integer("integrator.substeps", 10, minimum=1)
    r_max = ck.number("integrator.r_max", 1e3, positive=True)

    centers = _resolve_centers(ck, d, seed)

    grid_raw = ck.get("grid", {}) or {}
    if not isinstance(grid_raw, dict):
        ck.fail("grid must be a mapping", "grid")
    bounds = grid_raw.get("bounds", _default_bounds(d))
    bounds = np.asarray(bounds, dtype=np.float64)
    if bounds.shape != (d, 2) or np.any(bounds[:, 0] >= bounds[:, 1]):
        ck.fail(f"grid.bounds must be {d} [lo, hi] pairs with lo < hi", "grid.bounds")
    grid_resolution = ck.integer("grid.resolution", _DEFAULT_GRID["resolution"], minimum=1)
    grid_horizon = ck.number("grid.horizon", _DEFAULT_GRID["horizon"], positive=True)
    grid_tol = ck.number("grid.tol", _DEFAULT_GRID["tol"], positive=True)

    stop_on_grid = ck.boolean("stop_on_grid", False)
    export_set_region = ck.boolean("export.set_region", True)
    out_dir = str(ck.get("out_dir", "."))

    return RunConfig(
        system=system,
        system_params=dict(system_params),
        family=family,
        directions=directions,
        epsilon=epsilon,
        k=k,
        tau_s=tau_s,
        c=c,
        seed=int(seed),
        stop_after=stop_after,
        k_doublings_max=k_doublings_max,
        centers=centers,
        substeps=substeps,
        r_max=r_max,
        grid_bounds=bounds,
        grid_resolution=grid_resolution,
        grid_horizon=grid_horizon,
        grid_tol=grid_tol,
        stop_on_grid=stop_on_grid,
        export_set_region=export_set_region,
        out_dir=out_dir,
    )


def _default_bounds(d: int):
    return [[-4.0, 4.0]] * d


def _resolve_centers(ck: _Checker, d: int, seed: int) -> np.ndarray:
    points = ck.get("centers.points")
    if points is not None:
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != d:
            ck.fail(f"centers.points must be rows of dimension {d}", "centers.points")
        if np.any(arr[0] != 0.0):
            ck.fail("the first center must be the equilibrium (all zeros)", "centers.points")
        return arr
    count = ck.integer("centers.count", 1, minimum=1)
    if count == 1:
        return np.zeros((1, d))
    bounds = ck.get("centers.bounds", [[-3.0, 3.0]] * d)
    bounds = np.asarray(bounds, dtype=np.float64)
    if bounds.shape != (d, 2) or np.any(bounds[:, 0] >= bounds[:, 1]):
        ck.fail(f"centers.bounds must be {d} [lo, hi] pairs with lo < hi", "centers.bounds")
    # dedicated stream so center placement does not disturb the run's draws
    rng = np.random.default_rng([int(seed), 0xC3])
    rest = bounds[:, 0] + (bounds[:, 1] - bounds[:, 0]) * rng.random((count - 1, d))
    return np.vstack([np.zeros((1, d)), rest])


def load_config(path, seed_override: int | None = None) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, source=str(path), seed_override=seed_override)

"""Text-document I/O: set documents, grids, region exports, stats tables.

Floats are written with 17 significant digits so every document
round-trips bit-exactly through its decimal representation. Output is
fully deterministic (no timestamps; those belong in the run log).
"""

from __future__ import annotations

import io

import numpy as np
import yaml

from . import sets
from .groundtruth import GridClassification, grid_points
from .learner import RunResult

__all__ = [
    "dump_yaml",
    "load_yaml",
    "set_to_doc",
    "set_from_doc",
    "save_set",
    "load_set",
    "write_grid_csv",
    "read_grid_csv",
    "write_region_csv",
    "stats_rows",
    "write_stats",
    "result_to_doc",
    "save_result",
]

LABEL_NAMES = {1: "in_roa", 0: "not_in_roa"}
LABEL_CODES = {v: k for k, v in LABEL_NAMES.items()}


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


class _Dumper(yaml.SafeDumper):
    pass


_Dumper.add_representer(
    float, lambda dumper, value: dumper.represent_scalar("tag:yaml.org,2002:float", _fmt(value))
)


def dump_yaml(doc, stream=None) -> str | None:
    return yaml.dump(doc, stream, Dumper=_Dumper, sort_keys=False, default_flow_style=None)


def load_yaml(text_or_stream):
    return yaml.safe_load(text_or_stream)


# ---------------------------------------------------------------------------
# Set documents


def _floats(arr) -> list:
    return [float(v) for v in np.asarray(arr).ravel()]


def set_to_doc(set_, epsilon: float | None = None, seed: int | None = None) -> dict:
    """Structured document for a set: family, centers, directions (row-major),
    offsets, plus the epsilon/seed the run used."""
    members = set_.members if isinstance(set_, sets.MultiApprox) else (set_,)
    family = members[0].family
    doc: dict = {"family": family, "dimension": members[0].dimension}
    if epsilon is not None:
        doc["epsilon"] = float(epsilon)
    if seed is not None:
        doc["seed"] = int(seed)
    if family == sets.POLYTOPE:
        doc["directions"] = [_floats(row) for row in members[0].directions]
    out = []
    for m in members:
        entry = {"center": _floats(m.center)}
        if family == sets.SPHERE:
            entry["radius"] = float(m.radius)
        else:
            entry["offsets"] = _floats(m.offsets)
        out.append(entry)
    doc["members"] = out
    return doc


def set_from_doc(doc: dict):
    """Inverse of set_to_doc; a single-member document yields the bare set."""
    family = doc["family"]
    members = []
    if family == sets.SPHERE:
        for entry in doc["members"]:
            members.append(sets.SphereSet(np.array(entry["center"]), float(entry["radius"])))
    elif family == sets.POLYTOPE:
        A = np.array(doc["directions"], dtype=np.float64)
        for entry in doc["members"]:
            members.append(
                sets.PolytopeSet(np.array(entry["center"]), A, np.array(entry["offsets"]))
            )
    else:
        raise ValueError(f"unknown family {family!r}")
    if len(members) == 1:
        return members[0]
    return sets.MultiApprox(tuple(members))


def save_set(path, set_, epsilon=None, seed=None) -> None:
    with open(path, "w") as fh:
        dump_yaml(set_to_doc(set_, epsilon, seed), fh)


def load_set(path):
    with open(path) as fh:
        try:
            doc = load_yaml(fh)
            return set_from_doc(doc)
        except (yaml.YAMLError, KeyError, TypeError) as e:
            raise ValueError(f"{path}: not a valid set document ({e})") from None


# ---------------------------------------------------------------------------
# Grid and region tables (one record per grid point)


def write_grid_csv(path, grid: GridClassification) -> None:
    d = grid.dimension
    with open(path, "w") as fh:
        fh.write(",".join(f"x{i + 1}" for i in range(d)) + ",label\n")
        for point, label in zip(grid.points, grid.labels):
            coords = ",".join(_fmt(v) for v in point)
            fh.write(f"{coords},{LABEL_NAMES[int(label)]}\n")


def read_grid_csv(path) -> GridClassification:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[-1] != "label":
            raise ValueError(f"{path}: grid file must end with a 'label' column")
        d = len(header) - 1
        pts = []
        labels = []
        for n, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                pts.append([float(v) for v in parts[:d]])
                labels.append(LABEL_CODES[parts[d]])
            except (ValueError, KeyError, IndexError):
                raise ValueError(f"{path}:{n}: malformed grid record") from None
    if not labels:
        raise ValueError(f"{path}: no grid records")
    points = np.asarray(pts, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int8)
    resolution = round(len(labels) ** (1.0 / d))
    bounds = np.stack([points.min(axis=0), points.max(axis=0)], axis=1)
    return GridClassification(
        bounds=bounds,
        resolution=int(resolution),
        points=points,
        labels=labels,
        horizon=float("nan"),
        tol=float("nan"),
    )


def write_region_csv(path, set_, bounds, resolution: int) -> None:
    """Set membership sampled on the plotting grid: one 0/1 record per point."""
    pts = grid_points(np.asarray(bounds, dtype=np.float64), resolution)
    mask = sets.membership_mask(set_, pts)
    d = pts.shape[1]
    with open(path, "w") as fh:
        fh.write(",".join(f"x{i + 1}" for i in range(d)) + ",contained\n")
        for point, hit in zip(pts, mask):
            coords = ",".join(_fmt(v) for v in point)
            fh.write(f"{coords},{1 if hit else 0}\n")


# ---------------------------------------------------------------------------
# Stats and the run result document


def stats_rows(stats) -> list[tuple[str, object]]:
    return [
        ("counter_examples", stats.counter_examples),
        ("samples", stats.samples),
        ("steps_simulated", stats.steps_simulated),
        ("avg_steps_per_sample", round(stats.avg_steps_per_sample, 6)),
        ("k_doublings", stats.k_doublings),
    ]


def write_stats(csv_path, txt_path, stats) -> None:
    rows = stats_rows(stats)
    with open(csv_path, "w") as fh:
        fh.write(",".join(name for name, _ in rows) + "\n")
        fh.write(",".join(str(value) for _, value in rows) + "\n")
    width = max(len(name) for name, _ in rows)
    with open(txt_path, "w") as fh:
        for name, value in rows:
            fh.write(f"{name:<{width}}  {value}\n")


def result_to_doc(result: RunResult, epsilon=None, seed=None) -> dict:
    events = [
        {
            "sample": e.sample_index,
            "point": _floats(e.point),
            "verdict": e.verdict,
            "snapshot": e.snapshot_id,
        }
        for e in result.event_log
    ]
    return {
        "outcome": result.outcome,
        "stats": dict(stats_rows(result.stats)),
        "set": set_to_doc(result.final_set, epsilon, seed),
        "doublings_at": list(result.doublings_at),
        "event_log": events,
    }


def save_result(path, result: RunResult, epsilon=None, seed=None) -> None:
    with open(path, "w") as fh:
        dump_yaml(result_to_doc(result, epsilon, seed), fh)

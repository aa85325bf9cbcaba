"""Bit-exact serialization: points, hierarchies, batch summaries, parameter files.

All writers are deterministic functions of their inputs: stable row ordering,
UTF-8, ``\\n`` line endings, comma delimiters, and floats rendered with
``%.17g`` (lossless double round-trip). Node paths render as slash-joined
child indices with the root as ``/``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConsistencyError, ParameterError, ParseError
from .metrics import SCALAR_NAMES, BatchScalars, HistogramSummary, SetSummary
from .model import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_SIGMA_MAX,
    DEFAULT_SIGMA_MIN,
    Dataset,
    GeneratorParams,
    Hierarchy,
    NodeDistribution,
    NodePath,
    NodeState,
    validate,
)


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def format_path(path: NodePath) -> str:
    if not path:
        return "/"
    return "/" + "/".join(str(i) for i in path)


def parse_path(text: str) -> NodePath:
    if text == "/":
        return ()
    if not text.startswith("/"):
        raise ParseError(f"node path must start with '/': {text!r}")
    try:
        parts = tuple(int(p) for p in text[1:].split("/"))
    except ValueError as exc:
        raise ParseError(f"bad node path {text!r}") from exc
    if any(i < 0 for i in parts):
        raise ParseError(f"negative child index in path {text!r}")
    return parts


def _write_lines(destination, lines: list[str]) -> None:
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_rows(source, expected_header: str) -> list[tuple[int, list[str]]]:
    text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != expected_header:
        raise ParseError(f"{source}: expected header {expected_header!r}")
    return [(no, line.split(",")) for no, line in enumerate(lines[1:], start=2) if line]


# -- points -------------------------------------------------------------------


def write_points(points: Dataset, destination) -> None:
    """`point_id,node_path,f1,...,fd`, rows ordered by point id."""
    d = points.features.shape[1]
    header = "point_id,node_path," + ",".join(f"f{i + 1}" for i in range(d))
    order = np.argsort(points.ids, kind="stable")
    lines = [header]
    for i in order:
        feats = ",".join(fmt_float(v) for v in points.features[i])
        lines.append(f"{int(points.ids[i])},{format_path(points.owners[i])},{feats}")
    _write_lines(destination, lines)


def read_points(source) -> Dataset:
    text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("point_id,node_path"):
        raise ParseError(f"{source}: not a points file")
    d = len(lines[0].split(",")) - 2
    ids, owners, rows = [], [], []
    for no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != d + 2:
            raise ParseError(f"{source}:{no}: expected {d + 2} columns")
        try:
            ids.append(int(cells[0]))
            rows.append([float(c) for c in cells[2:]])
        except ValueError as exc:
            raise ParseError(f"{source}:{no}: {exc}") from exc
        owners.append(parse_path(cells[1]))
    features = np.array(rows, dtype=float) if rows else np.empty((0, d))
    return Dataset(np.array(ids, dtype=np.int64), features, owners)


# -- hierarchy ------------------------------------------------------------------


def write_hierarchy(hierarchy: Hierarchy, destination) -> None:
    """One row per node in depth-first path order; parents precede children."""
    d = hierarchy.params.d
    header = (
        "node_path,parent_path,depth,point_count,"
        + ",".join(f"mu_{i + 1}" for i in range(d))
        + ","
        + ",".join(f"sigma_{i + 1}" for i in range(d))
    )
    lines = [header]
    for path in hierarchy.paths_preorder():
        node = hierarchy.nodes[path]
        parent = format_path(path[:-1]) if path else ""
        mus = ",".join(fmt_float(v) for v in node.distribution.means)
        sigmas = ",".join(fmt_float(v) for v in node.distribution.sigmas)
        lines.append(
            f"{format_path(path)},{parent},{len(path)},{len(node.point_ids)},{mus},{sigmas}"
        )
    _write_lines(destination, lines)


def read_hierarchy(source) -> tuple[Hierarchy, dict[NodePath, int]]:
    """Rebuild node structure and the recorded per-node point counts.

    The file carries node state only (no generation parameters or sticks); the
    returned hierarchy gets placeholder params with the inferred dimension and
    empty ownership lists for the caller to fill.
    """
    text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("node_path,parent_path,depth,point_count"):
        raise ParseError(f"{source}: not a hierarchy file")
    d = (len(lines[0].split(",")) - 4) // 2
    nodes: dict[NodePath, NodeState] = {}
    counts: dict[NodePath, int] = {}
    total = 0
    for no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 4 + 2 * d:
            raise ParseError(f"{source}:{no}: expected {4 + 2 * d} columns")
        path = parse_path(cells[0])
        try:
            depth = int(cells[2])
            count = int(cells[3])
            means = np.array([float(c) for c in cells[4 : 4 + d]])
            sigmas = np.array([float(c) for c in cells[4 + d :]])
        except ValueError as exc:
            raise ParseError(f"{source}:{no}: {exc}") from exc
        if depth != len(path):
            raise ConsistencyError(f"{source}:{no}: depth column disagrees with path")
        parent_text = format_path(path[:-1]) if path else ""
        if cells[1] != parent_text:
            raise ConsistencyError(f"{source}:{no}: parent_path disagrees with path")
        if path and path[:-1] not in nodes:
            raise ConsistencyError(f"{source}:{no}: parent of {cells[0]} not seen yet")
        if path in nodes:
            raise ConsistencyError(f"{source}:{no}: duplicate node {cells[0]}")
        nodes[path] = NodeState(path, NodeDistribution(means, sigmas))
        counts[path] = count
        total += count
    if not nodes:
        raise ConsistencyError(f"{source}: hierarchy file has no nodes")
    placeholder = GeneratorParams(n=total, d=d, alpha0=1.0, lam=1.0, gamma=1.0)
    return Hierarchy(nodes, placeholder), counts


# -- batch summary --------------------------------------------------------------

_SUMMARY_HEADER = "metric,level_or_factor,set_label,mean,std"


def write_histograms(summaries: list[SetSummary], destination) -> None:
    """Long-format table covering the scalar summaries and all five families."""
    if not summaries:
        raise ParameterError("nothing to write: empty batch", ("summaries",))
    lines = [_SUMMARY_HEADER]
    for s in summaries:
        lines.append(f"replicates,,{s.label},{fmt_float(s.scalars.replicates)},0")
        for metric, mean, std in s.scalar_rows():
            lines.append(f"{metric},,{s.label},{fmt_float(mean)},{fmt_float(std)}")
        for family, rows in s.histograms.families.items():
            for key, mean, std in rows:
                lines.append(f"{family},{key},{s.label},{fmt_float(mean)},{fmt_float(std)}")
    _write_lines(destination, lines)


def read_summary(source) -> list[SetSummary]:
    """Inverse of write_histograms."""
    rows = _read_rows(source, _SUMMARY_HEADER)
    per_label: dict[str, dict] = {}
    order: list[str] = []
    for no, cells in rows:
        if len(cells) != 5:
            raise ParseError(f"{source}:{no}: expected 5 columns")
        metric, key, label, mean, std = cells
        if label not in per_label:
            per_label[label] = {"scalars": {}, "families": {}}
            order.append(label)
        try:
            mean_v, std_v = float(mean), float(std)
        except ValueError as exc:
            raise ParseError(f"{source}:{no}: {exc}") from exc
        if key == "":
            per_label[label]["scalars"][metric] = (mean_v, std_v)
        else:
            per_label[label]["families"].setdefault(metric, []).append(
                (int(key), mean_v, std_v)
            )
    out = []
    for label in order:
        data = per_label[label]
        sc = data["scalars"]
        missing = ({"replicates"} | set(SCALAR_NAMES)) - set(sc)
        if missing:
            raise ParseError(f"{source}: label {label} missing rows: {sorted(missing)}")
        scalars = BatchScalars(
            replicates=int(sc["replicates"][0]),
            nodes_mean=sc["nodes"][0],
            nodes_std=sc["nodes"][1],
            leaves_mean=sc["leaves"][0],
            leaves_std=sc["leaves"][1],
            depth_mean=sc["depth"][0],
            depth_std=sc["depth"][1],
            breadth_mean=sc["breadth"][0],
            breadth_std=sc["breadth"][1],
            path_mean=sc["path_length"][0],
            path_std=sc["path_length"][1],
        )
        out.append(
            SetSummary(
                label=label,
                scalars=scalars,
                histograms=HistogramSummary(data["families"]),
                object_depth_mean=sc["object_depth"][0],
                object_depth_std=sc["object_depth"][1],
            )
        )
    return out


# -- parameter files -------------------------------------------------------------

_INT_KEYS = {"n", "d", "seed", "max_depth"}
_FLOAT_KEYS = {"alpha0", "lambda", "gamma", "p", "q", "sigma_min", "sigma_max"}
_REQUIRED_KEYS = ("n", "d", "alpha0", "lambda", "gamma")
_DEFAULTS = {
    "p": 1.0,
    "q": 5.0,
    "sigma_min": DEFAULT_SIGMA_MIN,
    "sigma_max": DEFAULT_SIGMA_MAX,
    "seed": 0,
    "max_depth": DEFAULT_MAX_DEPTH,
}


def read_params(source) -> GeneratorParams:
    """Parse a flat key=value configuration into validated GeneratorParams.

    Unknown keys are rejected; missing optional keys take the documented
    defaults; ``#`` starts a comment.
    """
    text = Path(source).read_text(encoding="utf-8")
    values: dict[str, float | int] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{no}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _INT_KEYS and key not in _FLOAT_KEYS:
            raise ParseError(f"{source}:{no}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"{source}:{no}: duplicate key {key!r}")
        try:
            values[key] = int(val) if key in _INT_KEYS else float(val)
        except ValueError as exc:
            raise ParseError(f"{source}:{no}: bad value for {key!r}: {val!r}") from exc
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ParseError(f"{source}: missing required fields: {', '.join(missing)}")
    merged = {**_DEFAULTS, **values}
    params = GeneratorParams(
        n=int(merged["n"]),
        d=int(merged["d"]),
        alpha0=float(merged["alpha0"]),
        lam=float(merged["lambda"]),
        gamma=float(merged["gamma"]),
        p=float(merged["p"]),
        q=float(merged["q"]),
        sigma_min=float(merged["sigma_min"]),
        sigma_max=float(merged["sigma_max"]),
        seed=int(merged["seed"]),
        max_depth=int(merged["max_depth"]),
    )
    validate(params)
    return params

"""File formats: cgrid-v1 current grids, run manifests, route records, plot data."""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, NonMonotonicAxis, OutOfDomain, ParseError, ShapeMismatch
from .geometry import EUCLIDEAN, SPHERE
from .hybrid_search import HSConfig
from .route_analysis import VesselSpec
from .smoothing import SmoothingConfig
from .vector_field import BUILTIN_FIELDS, GridField

GRID_FORMAT = "cgrid-v1"
SPACES = {"euclidean": EUCLIDEAN, "spherical": SPHERE}


# ------------------------------------------------------------------ grids

def _matrix(doc, key, shape, path):
    rows = doc[key]
    if not isinstance(rows, list) or len(rows) != shape[0]:
        raise ShapeMismatch(f"{path}: '{key}' must have {shape[0]} rows (one per x2 value)")
    out = np.empty(shape)
    null = np.zeros(shape, dtype=bool)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise ShapeMismatch(f"{path}: '{key}' row {i} must have {shape[1]} entries")
        for j, x in enumerate(row):
            if x is None:
                null[i, j] = True
                out[i, j] = 0.0
            elif isinstance(x, (int, float)) and not isinstance(x, bool):
                out[i, j] = float(x)
            else:
                raise ParseError(f"{path}: '{key}'[{i}][{j}] is not a number or null: {x!r}")
    return out, null


def _axis(doc, key, path):
    ax = doc[key]
    if not isinstance(ax, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in ax):
        raise ParseError(f"{path}: '{key}' must be a list of numbers")
    a = np.array(ax, dtype=np.float64)
    if a.size < 2 or np.any(np.diff(a) <= 0):
        raise NonMonotonicAxis(f"{path}: '{key}' must be strictly increasing with at least 2 entries")
    return a


def parse_grid(text: str, path: str = "<grid>") -> GridField:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    missing = [k for k in ("format", "space", "x1_axis", "x2_axis", "u", "v") if k not in doc]
    if missing:
        raise ParseError(f"{path}: missing keys {missing}")
    if doc["format"] != GRID_FORMAT:
        raise ParseError(f"{path}: format must be {GRID_FORMAT!r}, got {doc['format']!r}")
    if doc["space"] not in SPACES:
        raise ParseError(f"{path}: space must be one of {sorted(SPACES)}")
    x1 = _axis(doc, "x1_axis", path)
    x2 = _axis(doc, "x2_axis", path)
    shape = (x2.size, x1.size)
    u, nu = _matrix(doc, "u", shape, path)
    v, nv = _matrix(doc, "v", shape, path)
    if np.any(nu != nv):
        i, j = np.argwhere(nu != nv)[0]
        raise ParseError(f"{path}: land must be null in both u and v; mismatch at [{i}][{j}]")
    return GridField(x1, x2, u, v, nu, SPACES[doc["space"]])


def load_grid_field(path) -> GridField:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{p}: {exc.strerror}") from exc
    return parse_grid(text, str(p))


def grid_document(field: GridField) -> dict:
    space = "spherical" if field.space.is_sphere else "euclidean"

    def cells(a):
        return [[None if m else float(x) for x, m in zip(row, mrow)]
                for row, mrow in zip(a, field.land_mask)]

    return {"format": GRID_FORMAT, "space": space,
            "x1_axis": field.x1_axis.tolist(), "x2_axis": field.x2_axis.tolist(),
            "u": cells(field.u), "v": cells(field.v)}


def write_grid_field(field: GridField, path) -> None:
    Path(path).write_text(json.dumps(grid_document(field)) + "\n")


# --------------------------------------------------------------- manifest

_HS_KEYS = {f.name for f in fields(HSConfig)}
_SM_KEYS = {f.name for f in fields(SmoothingConfig)}
_VESSEL_KEYS = {"displacement", "length", "sfoc"}
_OWN_KEYS = {"space", "field", "start", "goal", "route_csv", "summary_json", "baseline_points"}
MANIFEST_KEYS = _HS_KEYS | _SM_KEYS | _VESSEL_KEYS | _OWN_KEYS


@dataclass
class RunManifest:
    space: str
    field: str
    start: tuple
    goal: tuple
    hs: HSConfig
    smoothing: SmoothingConfig
    vessel: Optional[VesselSpec] = None
    route_csv: Optional[str] = None
    summary_json: Optional[str] = None
    baseline_points: int = 200
    base_dir: Path = Path(".")

    @property
    def space_obj(self):
        return SPACES[self.space]

    def load_field(self):
        if self.field in BUILTIN_FIELDS:
            if self.space != "euclidean":
                raise ConfigError(f"builtin field {self.field!r} is Euclidean only")
            return BUILTIN_FIELDS[self.field]()
        p = Path(self.field)
        if not p.is_absolute():
            p = self.base_dir / p
        f = load_grid_field(p)
        if f.space.is_sphere != (self.space == "spherical"):
            raise ConfigError(f"grid {p} is not in the manifest's {self.space} space")
        return f

    def output(self, key) -> Optional[Path]:
        val = getattr(self, key)
        if val is None:
            return None
        p = Path(val)
        return p if p.is_absolute() else self.base_dir / p

    def to_dict(self) -> dict:
        d = {"space": self.space, "field": self.field,
             "start": list(self.start), "goal": list(self.goal),
             "baseline_points": self.baseline_points}
        for f in fields(HSConfig):
            d[f.name] = getattr(self.hs, f.name)
        for f in fields(SmoothingConfig):
            d[f.name] = getattr(self.smoothing, f.name)
        if self.vessel is not None:
            d.update(displacement=self.vessel.displacement, length=self.vessel.length, sfoc=self.vessel.sfoc)
        if self.route_csv is not None:
            d["route_csv"] = self.route_csv
        if self.summary_json is not None:
            d["summary_json"] = self.summary_json
        return d


def _point(val, key):
    if not (isinstance(val, (list, tuple)) and len(val) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in val)):
        raise ConfigError(f"'{key}' must be a pair of numbers")
    return float(val[0]), float(val[1])


def manifest_from_dict(doc: dict, base_dir=".") -> RunManifest:
    if not isinstance(doc, dict):
        raise ConfigError("manifest must be a JSON object")
    unknown = sorted(set(doc) - MANIFEST_KEYS)
    if unknown:
        raise ConfigError(f"unknown manifest keys: {unknown}")
    for key in ("field", "start", "goal"):
        if key not in doc:
            raise ConfigError(f"manifest is missing '{key}'")
    space = doc.get("space", "euclidean")
    if space not in SPACES:
        raise ConfigError(f"space must be one of {sorted(SPACES)}")
    hs_kw = {k: doc[k] for k in _HS_KEYS if k in doc}
    try:
        hs = HSConfig.spherical(**hs_kw) if space == "spherical" else HSConfig.synthetic(**hs_kw)
        for k in ("N", "max_outer", "max_checkpoints", "workers"):
            setattr(hs, k, _int(getattr(hs, k), k))
        with warnings.catch_warnings():
            # soft warnings come once, when the search itself validates
            warnings.simplefilter("ignore")
            hs.validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    sm_kw = {k: doc[k] for k in _SM_KEYS if k in doc}
    sm_kw.setdefault("iterations", 2000 if space == "spherical" else 10_000)
    sm = SmoothingConfig(**sm_kw)
    sm.iterations = _int(sm.iterations, "iterations")
    try:
        sm.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    vessel = None
    if _VESSEL_KEYS & set(doc):
        if not {"displacement", "length"} <= set(doc):
            raise ConfigError("a vessel needs both 'displacement' and 'length'")
        try:
            vessel = VesselSpec(float(doc["displacement"]), float(doc["length"]), float(doc.get("sfoc", 185.0)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if not isinstance(doc["field"], str):
        raise ConfigError("'field' must be a builtin name or a grid path")
    return RunManifest(space, doc["field"], _point(doc["start"], "start"), _point(doc["goal"], "goal"),
                       hs, sm, vessel, doc.get("route_csv"), doc.get("summary_json"),
                       _int(doc.get("baseline_points", 200), "baseline_points"), Path(base_dir))


def _int(x, key):
    if isinstance(x, bool) or not float(x).is_integer():
        raise ConfigError(f"'{key}' must be an integer")
    return int(x)


def load_manifest(path, overrides: Optional[dict] = None) -> RunManifest:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except OSError as exc:
        raise ConfigError(f"{p}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if overrides:
        doc = {**doc, **overrides}
    return manifest_from_dict(doc, p.parent)


# ---------------------------------------------------------------- records

def _num(x: float) -> str:
    return repr(float(x))


def write_route_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "alpha"])
        for r in np.asarray(rows, dtype=np.float64):
            w.writerow([_num(x) for x in r])


def read_route_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header != ["t", "x1", "x2", "alpha"]:
            raise ParseError(f"{path}: expected header t,x1,x2,alpha")
        try:
            rows = [[float(x) for x in r] for r in rd if r]
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return np.array(rows, dtype=np.float64).reshape(-1, 4)


def write_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


# -------------------------------------------------------------- plot data

def field_samples(field, bbox, resolution):
    """Rows (x1, x2, w1, w2, land) on a regular grid covering ``bbox``."""
    x1a, x1b, x2a, x2b = (float(v) for v in bbox)
    if not (x1b > x1a and x2b > x2a and resolution > 0):
        raise ValueError("bbox must be (x1_min, x1_max, x2_min, x2_max) with positive extent")
    if isinstance(field, GridField):
        g1a, g1b, g2a, g2b = field.bounds
        if x1a < g1a or x1b > g1b or x2a < g2a or x2b > g2b:
            raise OutOfDomain(f"bbox {bbox} is outside the grid {field.bounds}")
    n1 = int(math.floor((x1b - x1a) / resolution + 1e-9)) + 1
    n2 = int(math.floor((x2b - x2a) / resolution + 1e-9)) + 1
    X2, X1 = np.meshgrid(x2a + resolution * np.arange(n2), x1a + resolution * np.arange(n1), indexing="ij")
    w1, w2, land = field.sample_many(X1.ravel(), X2.ravel())
    return np.column_stack([X1.ravel(), X2.ravel(), w1, w2, land.astype(np.float64)])


def emit_plot_data(rows, field, bbox, resolution, out_prefix):
    """Write ``<prefix>_field.csv`` and ``<prefix>_route.csv``; returns both paths."""
    samples = field_samples(field, bbox, resolution)
    fpath = Path(f"{out_prefix}_field.csv")
    rpath = Path(f"{out_prefix}_route.csv")
    with open(fpath, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "w1", "w2", "land"])
        for r in samples:
            w.writerow([_num(r[0]), _num(r[1]), _num(r[2]), _num(r[3]), int(r[4])])
    write_route_csv(rows, rpath)
    return fpath, rpath

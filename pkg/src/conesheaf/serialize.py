"""JSON encodings of spaces, cones, matrices, groups and ray systems.

Every document may carry ``"schema": "conesheaf/1"``; a missing header is
accepted, a different one is rejected.  Complex numbers are ``[re, im]``
pairs and matrices are row-major.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import InputError
from .finspace import Cone, FinMap, FinSpace
from .groups import FiniteGroup
from .matstar import PartitionOfUnity
from .piecewise import RaySystem

SCHEMA = "conesheaf/1"


def _check_schema(doc: Mapping) -> None:
    tag = doc.get("schema", SCHEMA) if isinstance(doc, Mapping) else SCHEMA
    if tag != SCHEMA:
        raise InputError(f"unsupported schema {tag!r}, expected {SCHEMA!r}")


def read_json(path: str | Path) -> tuple[Any, str]:
    """Parsed document and the sha256 of the raw bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path} is not valid UTF-8 JSON: {exc}") from exc
    _check_schema(doc)
    return doc, hashlib.sha256(raw).hexdigest()


def _need(doc: Mapping, key: str, what: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise InputError(f"{what} is missing field {key!r}")
    return doc[key]


# --- spaces and cones -------------------------------------------------------


def space_to_json(space: FinSpace) -> dict:
    return {"name": space.name, "points": list(space.points)}


def space_from_json(doc: Mapping) -> FinSpace:
    name = _need(doc, "name", "space")
    pts = _need(doc, "points", "space")
    if not isinstance(pts, list) or not all(isinstance(p, str) for p in pts):
        raise InputError(f"points of space {name!r} must be a list of strings")
    try:
        return FinSpace(str(name), tuple(pts))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def map_to_json(f: FinMap) -> dict:
    return {"domain": f.domain.name, "codomain": f.codomain.name, "map": f.as_dict()}


def map_from_json(doc: Mapping, spaces: Mapping[str, FinSpace]) -> FinMap:
    dom = _need(doc, "domain", "map")
    cod = _need(doc, "codomain", "map")
    table = _need(doc, "map", "map")
    for nm in (dom, cod):
        if nm not in spaces:
            raise InputError(f"map refers to unknown space {nm!r}")
    if not isinstance(table, Mapping):
        raise InputError("field 'map' must be an object")
    try:
        return FinMap.from_dict(spaces[dom], spaces[cod], {str(k): str(v) for k, v in table.items()})
    except (KeyError, ValueError) as exc:
        raise InputError(f"invalid map {dom} -> {cod}: {exc}") from exc


def cone_to_json(cone: Cone) -> dict:
    spaces = {cone.apex.name: cone.apex}
    for leg in cone.legs:
        known = spaces.setdefault(leg.codomain.name, leg.codomain)
        if known.points != leg.codomain.points:
            raise InputError(f"two different spaces are both named {leg.codomain.name!r}")
    del spaces[cone.apex.name]
    return {
        "schema": SCHEMA,
        "apex": space_to_json(cone.apex),
        "spaces": [space_to_json(s) for s in spaces.values()],
        "legs": [map_to_json(leg) for leg in cone.legs],
    }


def cone_from_json(doc: Mapping) -> Cone:
    _check_schema(doc)
    apex = space_from_json(_need(doc, "apex", "cone"))
    spaces = {apex.name: apex}
    for sd in doc.get("spaces", []):
        s = space_from_json(sd)
        if s.name in spaces and spaces[s.name].points != s.points:
            raise InputError(f"space name {s.name!r} defined twice")
        spaces[s.name] = s
    legs = []
    for ld in _need(doc, "legs", "cone"):
        f = map_from_json(ld, spaces)
        if f.domain.name != apex.name:
            raise InputError("every leg must start at the apex")
        legs.append(f)
    try:
        return Cone(apex, tuple(legs))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def quotient_from_json(doc: Mapping, apex: FinSpace) -> FinMap:
    """A map out of ``apex`` given as ``{"space": FinSpace, "map": {pt: pt}}``."""
    _check_schema(doc)
    target = space_from_json(_need(doc, "space", "quotient"))
    table = _need(doc, "map", "quotient")
    spaces = {apex.name: apex, target.name: target}
    if target.name == apex.name:
        spaces = {"__apex__": apex, "__target__": target}
        return map_from_json({"domain": "__apex__", "codomain": "__target__", "map": table}, spaces)
    return map_from_json({"domain": apex.name, "codomain": target.name, "map": table}, spaces)


def quotient_to_json(h: FinMap) -> dict:
    return {"schema": SCHEMA, "space": space_to_json(h.codomain), "map": h.as_dict()}


# --- matrices ---------------------------------------------------------------


def _num(x) -> float:
    v = float(x)
    return 0.0 if v == 0 else v


def matrix_to_json(m: np.ndarray, digits: int | None = None) -> dict:
    m = np.asarray(m, dtype=complex)

    def enc(z: complex) -> list[float]:
        re, im = z.real, z.imag
        if digits is not None:
            re, im = round(re, digits), round(im, digits)
        return [_num(re), _num(im)]

    return {"dim": len(m), "entries": [[enc(z) for z in row] for row in m]}


def matrix_from_json(doc: Mapping) -> np.ndarray:
    n = _need(doc, "dim", "matrix")
    rows = _need(doc, "entries", "matrix")
    try:
        m = np.array([[complex(float(e[0]), float(e[1])) for e in row] for row in rows], dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    if m.shape != (n, n) and not (n == 0 and m.size == 0):
        raise InputError(f"matrix declared dim {n} but has shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m.reshape(n, n)


def pou_to_json(p: PartitionOfUnity, digits: int | None = None) -> dict:
    return {
        "space": p.space.name,
        "projections": {pt: matrix_to_json(p[pt], digits) for pt in p.space},
    }


def pou_from_json(doc: Mapping, spaces: Mapping[str, FinSpace]) -> PartitionOfUnity:
    name = _need(doc, "space", "partition of unity")
    if name not in spaces:
        raise InputError(f"partition of unity refers to unknown space {name!r}")
    space = spaces[name]
    projs = _need(doc, "projections", "partition of unity")
    missing = [p for p in space if p not in projs]
    if missing:
        raise InputError(f"no projection for points {missing}")
    mats = {p: matrix_from_json(projs[p]) for p in space}
    dims = {m.shape[0] for m in mats.values()}
    if len(dims) > 1:
        raise InputError("projections have different dimensions")
    return PartitionOfUnity.from_dict(space, mats, dims.pop() if dims else 0)


# --- groups and ray systems -------------------------------------------------


def group_from_json(doc: Mapping, name: str = "G") -> FiniteGroup:
    _check_schema(doc)
    n = _need(doc, "order", "Cayley table")
    table = _need(doc, "table", "Cayley table")
    labels = doc.get("labels") or []
    if len(table) != n:
        raise InputError(f"Cayley table has {len(table)} rows, order is {n}")
    return FiniteGroup(tuple(tuple(row) for row in table), tuple(labels), doc.get("name", name))


def group_to_json(g: FiniteGroup) -> dict:
    return {
        "schema": SCHEMA,
        "name": g.name,
        "order": g.order,
        "table": [list(r) for r in g.table],
        "labels": list(g.labels),
    }


def rays_from_json(doc: Mapping) -> RaySystem:
    _check_schema(doc)
    dim = _need(doc, "dim", "ray system")
    rays = []
    for r in _need(doc, "rays", "ray system"):
        try:
            rays.append(np.array([complex(float(e[0]), float(e[1])) for e in r]))
        except (TypeError, ValueError, IndexError) as exc:
            raise InputError(f"ray entries must be [re, im] pairs: {exc}") from exc
    return RaySystem(int(dim), tuple(rays), tuple(tuple(b) for b in _need(doc, "bases", "ray system")))


def rays_to_json(s: RaySystem, digits: int = 12) -> dict:
    return {
        "schema": SCHEMA,
        "dim": s.dim,
        "rays": [[[_num(round(z.real, digits)), _num(round(z.imag, digits))] for z in r] for r in s.rays],
        "bases": [list(b) for b in s.bases],
    }


def dumps(doc: Any) -> str:
    """Pretty JSON with sorted keys: the canonical report encoding."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

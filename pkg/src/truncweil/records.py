"""JSON run records for single cells and sweeps.

Numbers that carry working precision are stored as decimal strings long
enough to parse back to the identical binary value.  Records carry a
``schema_version`` of the form "major.minor"; readers accept any minor
revision of the major they know.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

SCHEMA_VERSION = "1.0"
SWEEP_KIND = "sweep"


class SchemaError(ValueError):
    pass


def _check_version(v) -> None:
    if not isinstance(v, str) or "." not in v:
        raise SchemaError("missing or malformed schema_version %r" % (v,))
    major = v.split(".", 1)[0]
    if major != SCHEMA_VERSION.split(".", 1)[0]:
        raise SchemaError("unsupported schema major version %s" % major)


@dataclass
class CellRecord:
    c: str
    N: int
    T: str
    dps: int
    character: str
    character_digest: str
    status: str = "ok"
    lambda_even: str | None = None
    lambda_index: int | None = None
    negative_count: int = 0
    negative_log10: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    gamma_errors: list = field(default_factory=list)
    matching_digits: list = field(default_factory=list)
    fm_slopes: list = field(default_factory=list)
    zeros_partial: bool = False
    invariants: dict = field(default_factory=dict)
    floor: str | None = None
    below_floor: bool | None = None
    residual_max: str | None = None
    eigenvector: list = field(default_factory=list)
    spectrum: list = field(default_factory=list)
    quadrature_level: int | None = None
    jacobi_sweeps: int | None = None
    root_tol: str | None = None
    window: list = field(default_factory=list)
    backend: str = ""
    psi_cache_digest: str = ""
    hplus_cache_digest: str = ""
    wall_seconds: float = 0.0
    tool_version: str = ""
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CellRecord":
        _check_version(d.get("schema_version"))
        known = {f.name for f in fields(cls)}
        missing = {"c", "N", "T", "dps", "character", "character_digest"} - set(d)
        if missing:
            raise SchemaError("record lacks %s" % ", ".join(sorted(missing)))
        return cls(**{k: v for k, v in d.items() if k in known})

    @classmethod
    def from_json(cls, text: str) -> "CellRecord":
        return cls.from_dict(json.loads(text))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def sweep_document(cells: list, failures: list, params: dict) -> dict:
    cells = sorted(cells, key=lambda r: float(_frac(r["c"])))
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": SWEEP_KIND,
        "params": params,
        "cells": cells,
        "failures": sorted(failures, key=lambda f: float(_frac(f["c"]))),
    }


def _frac(s) -> float:
    if isinstance(s, str) and "/" in s:
        a, b = s.split("/")
        return int(a) / int(b)
    return float(s)


def load_document(path: str) -> dict:
    """A cell record or sweep document, version-checked."""
    with open(path) as fh:
        doc = json.load(fh)
    _check_version(doc.get("schema_version"))
    return doc


def records_from_files(paths: list) -> list:
    """Cell-record dicts from any mix of cell and sweep files."""
    out = []
    for p in paths:
        doc = load_document(p)
        if doc.get("kind") == SWEEP_KIND:
            out.extend(doc["cells"])
        else:
            out.append(CellRecord.from_dict(doc).to_dict())
    return out


def strip_timing(doc):
    """Copy of a record or sweep document without wall-clock fields."""
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if k != "wall_seconds"}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc

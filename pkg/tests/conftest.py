import functools
import os
from dataclasses import dataclass

import pytest

from truncweil.galerkin import assemble_full, eigensym, project_sector
from truncweil.runner import run_cell
from truncweil.weil_kernel import CHI3, ZETA, CutoffSpec, build_psi_table

JOBS = min(4, os.cpu_count() or 1)
EXTENDED = os.environ.get("TRUNCWEIL_EXTENDED") == "1"


def pytest_collection_modifyitems(config, items):
    if EXTENDED:
        return
    skip = pytest.mark.skip(reason="extended run; set TRUNCWEIL_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@dataclass
class Cell:
    spec: CutoffSpec
    table: object
    full: object
    even: object
    result: object
    record: object


@functools.lru_cache(maxsize=None)
def cell(c, N, T=400, dps=80, character="zeta"):
    """Full pipeline for one cutoff, computed once per test session."""
    ch = {"zeta": ZETA, "chi3": CHI3}[character]
    spec = CutoffSpec(c, T, N, dps, ch)
    table = build_psi_table(spec, jobs=JOBS)
    full = assemble_full(table)
    even = project_sector(full, "even")
    result = eigensym(even)
    record = run_cell(spec, jobs=JOBS)
    return Cell(spec, table, full, even, result, record)


@pytest.fixture(scope="session")
def cells():
    return cell

"""Published reference data shipped with the package (chain tables, c_p values)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def _load(name: str) -> dict:
    with resources.files("wengzeta.data").joinpath(name).open() as fh:
        return json.load(fh)


def appendix1_tables() -> dict:
    """{label of Phi: {"dual_label": str, "chains": {p: [[digits, ...], ...]}}}."""
    return _load("appendix1_chains.json")["tables"]


def chain_table(label: str, p: int):
    """Published chains for (Phi, p), each as a list of digit strings from the top down."""
    return appendix1_tables()[label]["chains"][str(p)]


def reference_cp(series: str, rank: int, p: int) -> int:
    """c_p from the published table (series formulas evaluated at (rank, p))."""
    data = _load("appendix2_cp.json")
    label = f"{series}{rank}"
    if label in data["exceptional"]:
        return data["exceptional"][label][p - 1]
    r = rank
    if series == "A":
        return r + 1
    if series == "B":
        return 2 * r if p == r else 2 * r - p
    if series == "C":
        return 2 * r - p + 1
    if series == "D":
        return 2 * r - 2 if p >= r - 1 else 2 * r - p - 1
    raise KeyError(label)


def compare_chains(rs, dec, published) -> tuple[bool, list, list]:
    """(same, ours, published) with chains as top-down digit lists; order of chains ignored."""
    ours = [list(reversed(ch)) for ch in dec.digits(rs)]
    same = sorted(map(tuple, ours)) == sorted(map(tuple, published))
    return same, ours, [list(c) for c in published]

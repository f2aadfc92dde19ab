"""Fixture library: the worked generator sets plus their certified values.

Generator sets ship as text files under ``fixtures/gen`` (overridable with
the KUNIFORM_FIXTURES environment variable); this module indexes them and
records the expected certification data used by tests and reports.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .pauli import WeylString, read_generator_file
from .states import DensityMatrix, from_generators

__all__ = [
    "Fixture",
    "fixture_dir",
    "names",
    "get",
    "build",
    "TABLE_ROWS",
    "FIG_GRID",
    "EXHAUSTIVE_M",
    "WITNESS_ALPHA",
]


@dataclass(frozen=True)
class Fixture:
    name: str
    d: int
    n: int
    k: int
    generators: tuple[WeylString, ...]
    source: str

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def purity(self) -> float:
        return float(self.d) ** (self.m - self.n)


def fixture_dir() -> Path:
    env = os.environ.get("KUNIFORM_FIXTURES")
    if env:
        return Path(env)
    return Path(__file__).parent / "fixtures"


# name -> claimed k (uniformity); everything else is read from the files
_CLAIMED_K = {
    "n2k1": 1, "n3k1": 1, "n3k2": 2,
    "n4k1": 1, "n4k2": 2, "n4k3": 3,
    "n5k1": 1, "n5k2": 2, "n5k3": 3, "n5k4": 4,
    "n6k1": 1, "n6k2": 2, "n6k3": 3, "n6k4": 4, "n6k5": 5,
    "n7k1": 1, "n7k2": 2, "n7k3": 3, "n7k5": 5,
    "n8k6": 6, "n8k7": 7,
    "n9k5": 5, "n9k7": 7, "n9k8": 8,
    "n12k5": 5,
    "d3n3k1": 1, "d3n3k2": 2, "d3n4k2": 2,
}

ALIASES = {
    "bell": "n2k1",
    "ghz3": "n3k1",
    "ghz4": "n4k1",
    "ghz5": "n5k1",
    "ghz6": "n6k1",
    "ghz7": "n7k1",
    "smolin": "n4k3",
    "ame52": "n5k2",
    "ame62": "n6k3",
    "ame43": "d3n4k2",
}


def names() -> list[str]:
    return sorted(_CLAIMED_K)


def get(name: str) -> Fixture:
    name = ALIASES.get(name, name)
    if name not in _CLAIMED_K:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(names())}")
    path = fixture_dir() / "gen" / f"{name}.txt"
    d, n, gens = read_generator_file(path)
    source = ""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("#"):
            source = first[1:].strip()
    return Fixture(name, d, n, _CLAIMED_K[name], tuple(gens), source)


def build(name: str, validate: bool = True) -> DensityMatrix:
    return from_generators(get(name).generators, validate=validate)


# witness offsets for the 7-qubit witnesses W = alpha*I - rho
WITNESS_ALPHA = {"n7k1": 0.5, "n7k2": 0.5, "n7k3": 0.25}


# Certified per-row data for the qubit families, N <= 7.  M maps rank r to
# M_r; F is (F_x, F_y, F_z) for the collective J operators, recorded only
# for the pure rows where it is exact; f_crit and p_v (percent) are the
# published robustness values (None where not reproduced at desk scale).
TABLE_ROWS: dict[tuple[int, int], dict] = {
    (2, 1): dict(fixture="n2k1", purity=1.0, M={2: 3}, F=(4, 0, 4),
                 pure=True, f_crit=0.293, p_v=28.32),
    (3, 1): dict(fixture="n3k1", purity=1.0, M={3: 4, 2: 3}, F=(3, 3, 9),
                 pure=True, f_crit=0.5, p_v=74.69),
    (3, 2): dict(fixture="n3k2", purity=0.25, M={3: 1}, F=None,
                 pure=False, f_crit=0.0, p_v=0.0),
    (4, 1): dict(fixture="n4k1", purity=1.0, M={4: 9, 2: 6}, F=(4, 4, 16),
                 pure=True, f_crit=0.647, p_v=94.24),
    (4, 2): dict(fixture="n4k2", purity=0.5, M={4: 3, 3: 4}, F=None,
                 pure=False, f_crit=0.422, p_v=35.11),
    (4, 3): dict(fixture="n4k3", purity=0.25, M={4: 3}, F=None,
                 pure=False, f_crit=0.292, p_v=0.024),
    (5, 1): dict(fixture="n5k1", purity=1.0, M={5: 16, 4: 5, 2: 10}, F=(5, 5, 25),
                 pure=True, f_crit=0.75, p_v=99.60),
    (5, 2): dict(fixture="n5k2", purity=1.0, M={5: 6, 4: 15, 3: 10}, F=(5, 5, 5),
                 pure=True, f_crit=0.568, p_v=99.96),
    (5, 3): dict(fixture="n5k3", purity=0.5, M={4: 15}, F=None,
                 pure=False, f_crit=0.460, p_v=63.65),
    (5, 4): dict(fixture="n5k4", purity=1 / 16, M={5: 1}, F=None,
                 pure=False, f_crit=0.0, p_v=0.0),
    (6, 1): dict(fixture="n6k1", purity=1.0, M={6: 33, 4: 15, 2: 15}, F=(6, 6, 36),
                 pure=True, f_crit=None, p_v=None),
    (6, 2): dict(fixture="n6k2", purity=1.0, M={6: 10, 5: 24, 4: 21, 3: 8}, F=(6, 6, 6),
                 pure=True, f_crit=None, p_v=None),
    (6, 3): dict(fixture="n6k3", purity=1.0, M={6: 18, 4: 45}, F=(6, 6, 6),
                 pure=True, f_crit=None, p_v=None),
    (6, 4): dict(fixture="n6k4", purity=1 / 16, M={6: 1, 5: 2}, F=None,
                 pure=False, f_crit=None, p_v=None),
    (6, 5): dict(fixture="n6k5", purity=1 / 16, M={6: 3}, F=None,
                 pure=False, f_crit=None, p_v=None),
    (7, 1): dict(fixture="n7k1", purity=1.0, M={7: 64, 6: 7, 4: 35, 2: 21}, F=(7, 7, 49),
                 pure=True, f_crit=None, p_v=None),
    (7, 2): dict(fixture="n7k2", purity=1.0, M={7: 15, 6: 42, 5: 42, 4: 21, 3: 7}, F=(7, 7, 7),
                 pure=True, f_crit=None, p_v=None),
    (7, 3): dict(fixture="n7k3", purity=0.5, M={6: 42, 4: 21}, F=(7, 7, 7),
                 pure=False, f_crit=None, p_v=None),
}


# Best generator-construction purity by (N, k), N = 4..9.  Cells without a
# known construction are absent.
FIG_GRID: dict[int, dict[int, float]] = {
    4: {1: 1.0, 2: 1 / 2, 3: 1 / 4},
    5: {1: 1.0, 2: 1.0, 3: 1 / 2, 4: 1 / 16},
    6: {1: 1.0, 2: 1.0, 3: 1.0, 4: 1 / 16, 5: 1 / 16},
    7: {1: 1.0, 2: 1.0, 3: 1 / 2, 5: 1 / 16, 6: 1 / 64},
    8: {1: 1.0, 6: 1 / 64, 7: 1 / 64},
    9: {1: 1.0, 5: 1 / 32, 7: 1 / 128, 8: 1 / 256},
}


# Globally maximal m for exhaustive-search verification, d = 2, N <= 5,
# plus the N = 6 cells the randomized search must reach.
EXHAUSTIVE_M: dict[tuple[int, int], int] = {
    (2, 1): 2,
    (3, 1): 3, (3, 2): 1,
    (4, 1): 4, (4, 2): 3, (4, 3): 2,
    (5, 1): 5, (5, 2): 5, (5, 3): 4, (5, 4): 1,
}

GREEDY_M_N6: dict[int, int] = {1: 6, 2: 6, 3: 6, 4: 2, 5: 2}

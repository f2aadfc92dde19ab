"""Orthogonal arrays: parsing, verification, and generator extraction.

An OA(r, N, l, s) is an r x N table over symbols 0..l-1 in which every
subset of s columns contains each of the l^s symbol tuples exactly
lambda = r / l^s times.  With l = 4 each row maps to an N-qubit Pauli
string (0 -> I, 1 -> X, 2 -> Y, 3 -> Z); the largest mutually commuting
independent subset of those strings is a generator set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .pauli import WeylString, format_pauli, parse_pauli
from .search import GeneratorSet

__all__ = [
    "OrthogonalArray",
    "OACheck",
    "ExtractResult",
    "parse_oa",
    "read_oa_file",
    "write_oa_file",
    "verify_oa",
    "rows_to_paulis",
    "extract_generators",
]

_HEADER = re.compile(r"OA\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")


@dataclass(frozen=True)
class OrthogonalArray:
    rows: int
    columns: int
    levels: int
    strength: int
    cells: np.ndarray  # (rows, columns) integers in [0, levels)

    def __post_init__(self):
        if self.cells.shape != (self.rows, self.columns):
            raise ValueError("cell table shape does not match header")
        self.cells.setflags(write=False)

    @property
    def index(self) -> int:
        """lambda = rows / levels^strength."""
        return self.rows // self.levels ** self.strength

    @property
    def index_unity(self) -> bool:
        return self.rows == self.levels ** self.strength


@dataclass(frozen=True)
class OACheck:
    ok: bool
    first_violation: tuple[int, ...] | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def parse_oa(text: str) -> OrthogonalArray:
    """Parse the text format: header ``OA(r,N,l,s)``, then whitespace- or
    digit-concatenated rows; ``#`` starts a comment."""
    header = None
    rows: list[list[int]] = []
    n_cols = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            m = _HEADER.search(line)
            if not m:
                raise ValueError(f"line {lineno}: expected header 'OA(r,N,l,s)'")
            header = tuple(int(g) for g in m.groups())
            n_cols = header[1]
            continue
        toks = line.split()
        if len(toks) == 1 and len(toks[0]) == n_cols and header[2] <= 10:
            symbols = [int(c) for c in toks[0]]
        else:
            symbols = [int(t) for t in toks]
        if len(symbols) != n_cols:
            raise ValueError(
                f"line {lineno}: ragged row, expected {n_cols} symbols, got {len(symbols)}"
            )
        rows.append(symbols)
    if header is None:
        raise ValueError("missing 'OA(r,N,l,s)' header")
    r, n, l, s = header
    if len(rows) != r:
        raise ValueError(f"header says {r} rows, found {len(rows)}")
    cells = np.array(rows, dtype=np.int64)
    if cells.size and (cells.min() < 0 or cells.max() >= l):
        raise ValueError(f"symbol out of range [0, {l})")
    if s > n:
        raise ValueError("strength exceeds the number of columns")
    if r % (l ** s) != 0:
        raise ValueError(
            f"index r / l^s = {r}/{l ** s} is not a positive integer"
        )
    return OrthogonalArray(r, n, l, s, cells)


def read_oa_file(path) -> OrthogonalArray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_oa(fh.read())


def write_oa_file(path, oa: OrthogonalArray, comment: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"OA({oa.rows},{oa.columns},{oa.levels},{oa.strength})\n")
        for row in oa.cells:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def verify_oa(oa: OrthogonalArray) -> OACheck:
    """Exact combinatorial check over all C(N, s) column subsets."""
    lam = oa.rows / oa.levels ** oa.strength
    if lam != int(lam) or lam <= 0:
        return OACheck(False, None, f"index {lam} is not a positive integer")
    lam = int(lam)
    weights = oa.levels ** np.arange(oa.strength - 1, -1, -1)
    for subset in combinations(range(oa.columns), oa.strength):
        keys = oa.cells[:, subset] @ weights
        counts = np.bincount(keys, minlength=oa.levels ** oa.strength)
        if not (counts == lam).all():
            bad = int(np.argmax(counts != lam))
            return OACheck(
                False,
                subset,
                f"columns {subset}: tuple {bad} appears {counts[bad]} times, expected {lam}",
            )
    return OACheck(True)


_ROW_LETTER = "IXYZ"


def rows_to_paulis(oa: OrthogonalArray) -> list[WeylString]:
    """Map each row to a Pauli string with 0->I, 1->X, 2->Y, 3->Z."""
    if oa.levels != 4:
        raise ValueError(f"row-to-Pauli mapping needs l = 4, got l = {oa.levels}")
    return [
        parse_pauli("".join(_ROW_LETTER[v] for v in row), d=2)
        for row in oa.cells
    ]


@dataclass
class ExtractResult:
    gens: GeneratorSet | None
    m: int
    nodes: int
    optimal: bool

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "generators": [format_pauli(g) for g in (self.gens.gens if self.gens else [])],
            "nodes_visited": self.nodes,
            "optimal": self.optimal,
        }


class _Rank:
    """Incremental row reduction of (x|z) vectors over Z_d (prime d)."""

    def __init__(self, d: int, basis: list | None = None):
        self.d = d
        self.basis = list(basis) if basis else []  # (pivot, vector) pairs

    def copy(self) -> "_Rank":
        return _Rank(self.d, self.basis)

    def try_add(self, vec: np.ndarray) -> bool:
        """Reduce vec against the basis; add and return True if independent."""
        d = self.d
        v = vec % d
        for piv, b in self.basis:
            if v[piv] % d:
                v = (v - v[piv] * b) % d
        nz = np.nonzero(v)[0]
        if len(nz) == 0:
            return False
        piv = int(nz[0])
        inv = pow(int(v[piv]), d - 2, d) if d > 2 else 1
        v = (v * inv) % d
        self.basis.append((piv, v))
        return True


def extract_generators(
    candidates: Sequence[WeylString],
    budget: int = 2_000_000,
) -> ExtractResult:
    """Largest mutually commuting, independent subset of the candidates.

    Identity rows and duplicate codes are dropped first.  Branch-and-bound
    over candidates in lexicographic code order; the first maximum found is
    the lexicographically smallest one.  Exceeding the node budget returns
    the best set so far flagged non-optimal.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("no candidates")
    d = candidates[0].d
    if any(c.d != d or c.n != candidates[0].n for c in candidates):
        raise ValueError("candidates must share d and n")
    seen: set[tuple[int, ...]] = set()
    cands: list[WeylString] = []
    for c in sorted(candidates, key=lambda w: w.code()):
        if c.is_identity() or c.code() in seen:
            continue
        seen.add(c.code())
        cands.append(c)
    c_num = len(cands)
    vecs = [np.array(c.x + c.z, dtype=np.int64) for c in cands]
    comm = np.zeros((c_num, c_num), dtype=bool)
    for i in range(c_num):
        xi = np.array(cands[i].x)
        zi = np.array(cands[i].z)
        for j in range(i, c_num):
            sym = int(xi @ np.array(cands[j].z) - zi @ np.array(cands[j].x)) % d
            comm[i, j] = comm[j, i] = sym == 0

    n_sites = cands[0].n
    best: list[int] = []
    nodes = 0
    tripped = False
    done = False  # m = n is the isotropic cap, nothing can beat it

    def dfs(chosen: list[int], rank: _Rank, alive: np.ndarray):
        nonlocal best, nodes, tripped, done
        if tripped or done:
            return
        if len(chosen) + len(alive) <= len(best):
            return
        for t in range(len(alive)):
            idx = int(alive[t])
            nodes += 1
            if nodes > budget:
                tripped = True
                return
            r2 = rank.copy()
            if not r2.try_add(vecs[idx]):
                continue
            chosen.append(idx)
            if len(chosen) > len(best):
                best = list(chosen)
                if len(best) == n_sites:
                    done = True
                    chosen.pop()
                    return
            rest = alive[t + 1:]
            rest = rest[comm[idx, rest]]
            dfs(chosen, r2, rest)
            chosen.pop()
            if tripped or done:
                return

    dfs([], _Rank(d), np.arange(c_num))
    gens = tuple(cands[i] for i in sorted(best))
    gset = GeneratorSet(d, cands[0].n, gens) if gens else None
    return ExtractResult(gset, len(gens), nodes, not tripped)

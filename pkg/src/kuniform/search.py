"""Validation of generator sets and search for maximal ones.

A valid generator set satisfies three properties: (1) mutual commutation,
(2) independence of the symplectic vectors, (3) every nontrivial product of
generators has weight >= k + 1.  The search enumerates candidate strings in
lexicographic order of their (x, z) codes and extends sets depth-first with
incremental pruning; a randomized-greedy mode covers sizes where exhaustive
enumeration is too expensive.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pauli import (
    WeylString,
    commutes,
    format_pauli,
    group_span,
    independent,
    symplectic_form,
    weight,
)

__all__ = [
    "GeneratorSet",
    "ValidationReport",
    "SearchConfig",
    "SearchResult",
    "validate_set",
    "uniformity_of_set",
    "search_max_m",
]


@dataclass(frozen=True)
class GeneratorSet:
    """A list of m WeylStrings on n sites of dimension d."""

    d: int
    n: int
    gens: tuple[WeylString, ...]
    k_claimed: int | None = None

    @property
    def m(self) -> int:
        return len(self.gens)

    def purity(self) -> float:
        return float(self.d) ** (self.m - self.n)

    @staticmethod
    def from_strings(strs: Sequence[WeylString]) -> "GeneratorSet":
        strs = tuple(strs)
        if not strs:
            raise ValueError("empty generator set")
        return GeneratorSet(strs[0].d, strs[0].n, strs)


@dataclass(frozen=True)
class ValidationReport:
    m: int
    commuting: bool
    first_noncommuting: tuple[int, int] | None
    independent: bool
    k: int | None
    k_ok: bool | None
    min_span_weight: int | None
    first_low_weight: str | None

    @property
    def passed(self) -> bool:
        ok = self.commuting and self.independent
        if self.k is not None:
            ok = ok and bool(self.k_ok)
        return ok


def validate_set(
    gens: Sequence[WeylString] | GeneratorSet,
    k: int | None = None,
    span_cap: int = 1 << 20,
) -> ValidationReport:
    """Check properties (1)-(3); property (3) only when k is given.

    Property (3) is checked over all d^m - 1 nontrivial span elements: each
    must have identity on at most n - k - 1 sites, i.e. weight >= k + 1.
    """
    if isinstance(gens, GeneratorSet):
        gens = gens.gens
    gens = list(gens)
    if not gens:
        raise ValueError("empty generator set")
    n = gens[0].n
    first_nc = None
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not commutes(gens[i], gens[j]):
                first_nc = (i, j)
                break
        if first_nc:
            break
    indep = independent(gens)
    minw = None
    k_ok = None
    first_low = None
    if first_nc is None:
        span = group_span(gens, cap=span_cap, check_commuting=False)
        weights = [(weight(s), s) for s in span if not s.is_identity()]
        if weights:
            minw, worst = min(weights, key=lambda t: t[0])
        else:
            minw, worst = n, None
        if k is not None:
            k_ok = minw >= k + 1
            if not k_ok and worst is not None:
                first_low = format_pauli(worst)
    return ValidationReport(
        m=len(gens),
        commuting=first_nc is None,
        first_noncommuting=first_nc,
        independent=indep,
        k=k,
        k_ok=k_ok,
        min_span_weight=minw,
        first_low_weight=first_low,
    )


def uniformity_of_set(gens: Sequence[WeylString] | GeneratorSet, span_cap: int = 1 << 20) -> int:
    """(min weight over nontrivial span elements) - 1.

    The generator state is then exactly this k-uniform (and not (k+1)-).
    """
    if isinstance(gens, GeneratorSet):
        gens = gens.gens
    gens = list(gens)
    span = group_span(gens, cap=span_cap)
    nontrivial = [weight(s) for s in span if not s.is_identity()]
    if not nontrivial:
        raise ValueError("the trivial group has no uniformity")
    return min(nontrivial) - 1


# -- search -------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    n: int
    k: int
    d: int = 2
    mode: str = "exhaustive"  # or "randomized-greedy"
    max_nodes: int = 50_000_000
    time_budget_s: float = 600.0
    seed: int = 0
    target_m: int | None = None  # stop early when reached; defaults to n
    restarts: int = 200  # randomized-greedy only

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValueError(f"k must be in [1, n-1], got {self.k}")
        if self.mode not in ("exhaustive", "randomized-greedy"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_nodes <= 0 or self.time_budget_s <= 0:
            raise ValueError("budgets must be positive")


@dataclass
class SearchResult:
    config: SearchConfig
    gens: GeneratorSet | None
    m: int
    purity: float
    nodes: int
    optimal: bool
    restarts_used: int = 0
    elapsed_s: float = 0.0

    def as_dict(self) -> dict:
        return {
            "n": self.config.n,
            "k": self.config.k,
            "d": self.config.d,
            "mode": self.config.mode,
            "seed": self.config.seed,
            "m": self.m,
            "generators": [format_pauli(g) for g in (self.gens.gens if self.gens else [])],
            "purity": self.purity,
            "nodes_visited": self.nodes,
            "optimal": self.optimal,
            "restarts_used": self.restarts_used,
            "elapsed_s": self.elapsed_s,
        }


class _Budget(Exception):
    pass


class _TargetReached(Exception):
    pass


class _Searcher:
    """Shared machinery: candidate tables, incremental filters, DFS, greedy."""

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        n, d, k = cfg.n, cfg.d, cfg.k
        self.minw = k + 1
        xs, zs = _candidate_codes(n, d, self.minw)
        self.X = xs  # (C, n) int8
        self.Z = zs
        self.C = len(xs)
        # commutation table; C <= (d^2)^n so this is the memory ceiling
        sym = (xs.astype(np.int32) @ zs.T.astype(np.int32)
               - zs.astype(np.int32) @ xs.T.astype(np.int32)) % d
        self.comm = sym == 0
        self.nodes = 0
        self.t0 = time.monotonic()
        self.best_idx: list[int] | None = None
        self.best_m = 0
        self.target = cfg.target_m if cfg.target_m is not None else n

    def _tick(self):
        self.nodes += 1
        if self.nodes >= self.cfg.max_nodes:
            raise _Budget
        if self.nodes % 4096 == 0 and time.monotonic() - self.t0 > self.cfg.time_budget_s:
            raise _Budget

    def _alive_against(self, alive: np.ndarray, span_x: np.ndarray, span_z: np.ndarray) -> np.ndarray:
        """Keep candidates whose products with every span element (and every
        power of themselves times the element) have weight >= k + 1."""
        d = self.cfg.d
        if len(alive) == 0:
            return alive
        ax = self.X[alive]  # (A, n)
        az = self.Z[alive]
        ok = np.ones(len(alive), dtype=bool)
        for a in range(1, d):
            px = (a * ax[:, None, :] + span_x[None, :, :]) % d  # (A, S, n)
            pz = (a * az[:, None, :] + span_z[None, :, :]) % d
            w = np.count_nonzero((px != 0) | (pz != 0), axis=2)  # (A, S)
            ok &= (w >= self.minw).all(axis=1)
        return alive[ok]

    def _record(self, chosen: list[int]):
        if len(chosen) > self.best_m:
            self.best_m = len(chosen)
            self.best_idx = list(chosen)
            if self.best_m >= self.target:
                raise _TargetReached

    def _dfs(self, chosen: list[int], span_x, span_z, alive: np.ndarray):
        if len(chosen) + len(alive) <= self.best_m:
            return
        for t in range(len(alive)):
            idx = int(alive[t])
            self._tick()
            # span blocks contributed by powers of the new generator
            gx, gz = self.X[idx], self.Z[idx]
            new_x, new_z = [span_x], [span_z]
            for a in range(1, self.cfg.d):
                new_x.append((span_x + a * gx) % self.cfg.d)
                new_z.append((span_z + a * gz) % self.cfg.d)
            nsx = np.concatenate(new_x)
            nsz = np.concatenate(new_z)
            rest = alive[t + 1:]
            rest = rest[self.comm[idx, rest]]
            rest = self._alive_against(rest, nsx[len(span_x):], nsz[len(span_z):])
            chosen.append(idx)
            self._record(chosen)
            self._dfs(chosen, nsx, nsz, rest)
            chosen.pop()

    def run_exhaustive(self) -> tuple[bool, int]:
        n, d = self.cfg.n, self.cfg.d
        span_x = np.zeros((1, n), dtype=np.int8)
        span_z = np.zeros((1, n), dtype=np.int8)
        alive = self._alive_against(np.arange(self.C), span_x, span_z)
        try:
            self._dfs([], span_x, span_z, alive)
        except _Budget:
            return False, 0
        except _TargetReached:
            # m = n is the isotropic-subspace cap, so hitting the default
            # target is itself an optimality certificate
            return self.target >= self.cfg.n or self.cfg.target_m is None, 0
        return True, 0

    def run_greedy(self) -> tuple[bool, int]:
        n, d = self.cfg.n, self.cfg.d
        rng = np.random.default_rng(self.cfg.seed)
        used = 0
        try:
            for r in range(self.cfg.restarts):
                used = r + 1
                order = rng.permutation(self.C)
                span_x = np.zeros((1, n), dtype=np.int8)
                span_z = np.zeros((1, n), dtype=np.int8)
                chosen: list[int] = []
                for idx in order:
                    idx = int(idx)
                    self._tick()
                    if chosen and not self.comm[idx, chosen].all():
                        continue
                    if len(self._alive_against(np.array([idx]), span_x, span_z)) == 0:
                        continue
                    gx, gz = self.X[idx], self.Z[idx]
                    blocks_x = [span_x] + [(span_x + a * gx) % d for a in range(1, d)]
                    blocks_z = [span_z] + [(span_z + a * gz) % d for a in range(1, d)]
                    span_x = np.concatenate(blocks_x)
                    span_z = np.concatenate(blocks_z)
                    chosen.append(idx)
                if len(chosen) > self.best_m or (
                    len(chosen) == self.best_m
                    and self.best_idx is not None
                    and sorted(chosen) < sorted(self.best_idx)
                ):
                    self.best_m = len(chosen)
                    self.best_idx = sorted(chosen)
                    if self.best_m >= self.target:
                        raise _TargetReached
        except _Budget:
            return False, used
        except _TargetReached:
            return self.target >= self.cfg.n or self.cfg.target_m is None, used
        return False, used  # a heuristic cannot certify optimality

    def result_strings(self) -> list[WeylString]:
        if self.best_idx is None:
            return []
        return [_code_to_string(self.X[i], self.Z[i], self.cfg.d) for i in sorted(self.best_idx)]


def _candidate_codes(n: int, d: int, minw: int) -> tuple[np.ndarray, np.ndarray]:
    """All nontrivial (x|z) codes of weight >= minw, one representative per
    cyclic class (scalar multiples generate the same group), in
    lexicographic order of the per-site (x, z) code."""
    total = (d * d) ** n
    codes = np.arange(total)
    digits = np.empty((2 * n, total), dtype=np.int8)
    rem = codes
    for pos in range(2 * n - 1, -1, -1):
        digits[pos] = rem % d
        rem //= d
    # per-site (x, z) pairs in order: digits columns are (x1, z1, x2, z2, ...)
    xs = digits[0::2].T.copy()  # (total, n)
    zs = digits[1::2].T.copy()
    w = np.count_nonzero((xs != 0) | (zs != 0), axis=1)
    keep = w >= minw
    xs, zs = xs[keep], zs[keep]
    if d > 2:
        # canonical representative: lexicographically smallest scalar multiple
        flat = np.concatenate([
            (xs[:, [j // 2]] if j % 2 == 0 else zs[:, [j // 2]])
            for j in range(2 * n)
        ], axis=1)
        canon = np.ones(len(xs), dtype=bool)
        for a in range(2, d):
            mx = (a * xs) % d
            mz = (a * zs) % d
            mflat = np.concatenate([
                (mx[:, [j // 2]] if j % 2 == 0 else mz[:, [j // 2]])
                for j in range(2 * n)
            ], axis=1)
            cmp = _lex_less(mflat, flat)
            canon &= ~cmp
        xs, zs = xs[canon], zs[canon]
    return xs, zs


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise a < b lexicographically."""
    out = np.zeros(len(a), dtype=bool)
    decided = np.zeros(len(a), dtype=bool)
    for col in range(a.shape[1]):
        lt = (a[:, col] < b[:, col]) & ~decided
        gt = (a[:, col] > b[:, col]) & ~decided
        out |= lt
        decided |= lt | gt
    return out


def _code_to_string(x: np.ndarray, z: np.ndarray, d: int) -> WeylString:
    xt = tuple(int(v) for v in x)
    zt = tuple(int(v) for v in z)
    if d == 2:
        pe = sum(1 for a, b in zip(xt, zt) if (a, b) == (1, 1))
    else:
        pe = 0
    return WeylString(d, xt, zt, pe)


def search_max_m(config: SearchConfig) -> SearchResult:
    """Find the largest generator set for (n, k, d).

    Exhaustive mode enumerates sets in lexicographic order with incremental
    pruning, so the returned set is the lexicographically first maximum one
    and `optimal` certifies global maximality (unless the budget tripped).
    Randomized-greedy shuffles candidate order per restart with a seeded RNG
    and never claims optimality unless the m = n cap is reached.
    """
    s = _Searcher(config)
    if config.mode == "exhaustive":
        optimal, used = s.run_exhaustive()
    else:
        optimal, used = s.run_greedy()
    gens = s.result_strings()
    gset = GeneratorSet(config.d, config.n, tuple(gens), config.k) if gens else None
    m = len(gens)
    return SearchResult(
        config=config,
        gens=gset,
        m=m,
        purity=float(config.d) ** (m - config.n) if m else 0.0,
        nodes=s.nodes,
        optimal=optimal,
        restarts_used=used,
        elapsed_s=time.monotonic() - s.t0,
    )

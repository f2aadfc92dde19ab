"""Local-realism tests via linear programming.

For qubit states and projective measurements along Bloch directions, the
joint behavior p(a|x) lies in the local polytope iff it is a convex mixture
of deterministic strategies.  The LP computes the critical visibility v*:
the largest v for which v p + (1-v) p_uniform is still local.  From many
sampled measurement settings this yields the white-noise robustness
f_crit = max (1 - v*) and the violation probability p_v.

Two settings and two outcomes per party; behaviors are handled in the
correlator representation (one coordinate per subset of parties and
setting choice on it), which is linearly equivalent to the probability
table and keeps the LP small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .simplex import solve_lp
from .states import DensityMatrix, _SIGMA

__all__ = [
    "BellScenario",
    "Behavior",
    "VisibilityResult",
    "FCritResult",
    "PvResult",
    "random_scenario",
    "quantum_behavior",
    "behavior_correlators",
    "lhv_visibility",
    "f_crit",
    "p_violation",
]

VIOLATION_TOL = 1e-7


@dataclass(frozen=True)
class BellScenario:
    """Measurement directions, shape (parties, settings, 3), unit vectors."""

    directions: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if d.ndim != 3 or d.shape[2] != 3:
            raise ValueError("directions must have shape (parties, settings, 3)")
        norms = np.linalg.norm(d, axis=2)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("directions must be unit vectors")
        d.setflags(write=False)

    @property
    def parties(self) -> int:
        return self.directions.shape[0]

    @property
    def settings(self) -> int:
        return self.directions.shape[1]


@dataclass(frozen=True)
class Behavior:
    """p[x1..xn, a1..an]: outcome distribution per setting combination."""

    parties: int
    settings: int
    table: np.ndarray  # shape (settings,)*n + (2,)*n

    def __post_init__(self):
        n, s = self.parties, self.settings
        if self.table.shape != (s,) * n + (2,) * n:
            raise ValueError("behavior table has the wrong shape")
        axes = tuple(range(n, 2 * n))
        sums = self.table.sum(axis=axes)
        if np.max(np.abs(sums - 1.0)) > 1e-10:
            raise ValueError("behavior is not normalized per setting")
        if self.table.min() < -1e-12:
            raise ValueError("behavior has negative probabilities")


def random_scenario(parties: int, rng, settings: int = 2) -> BellScenario:
    """Directions drawn uniformly on the sphere."""
    v = rng.normal(size=(parties, settings, 3))
    v /= np.linalg.norm(v, axis=2, keepdims=True)
    return BellScenario(v)


def _bloch_op(direction) -> np.ndarray:
    return (
        direction[0] * _SIGMA["X"]
        + direction[1] * _SIGMA["Y"]
        + direction[2] * _SIGMA["Z"]
    )


def quantum_behavior(rho: DensityMatrix, scenario: BellScenario) -> Behavior:
    """p(a|x) = Tr(rho  prod_j Pi^{n_{j,x_j}}_{a_j}) for all settings."""
    if rho.d != 2:
        raise ValueError("behaviors are implemented for qubits only")
    n = rho.n
    if scenario.parties != n:
        raise ValueError("scenario party count does not match the state")
    s = scenario.settings
    eye = np.eye(2, dtype=complex)
    # proj[j][x]: shape (2 outcomes, 2, 2)
    proj = [
        [
            np.stack([
                (eye + _bloch_op(scenario.directions[j, x])) / 2,
                (eye - _bloch_op(scenario.directions[j, x])) / 2,
            ])
            for x in range(s)
        ]
        for j in range(n)
    ]
    out = np.empty((s,) * n + (2,) * n)
    rho_t = rho.data.reshape((2,) * (2 * n))
    for xs in product(range(s), repeat=n):
        t = rho_t
        for j in range(n):
            # contract site j (current axes 0 and n-j) with proj[a, b, c]
            t = np.tensordot(t, proj[j][xs[j]], axes=([0, n - j], [2, 1]))
        out[xs] = t.real
    return Behavior(n, s, out)


def behavior_correlators(beh: Behavior) -> np.ndarray:
    """Correlator tensor, shape (1 + settings,)*n.

    Index 0 on a party means it is ignored (marginalized); index 1 + x means
    its +-1 outcome under setting x enters the product.
    """
    n, s = beh.parties, beh.settings
    t = beh.table
    cor = np.empty((1 + s,) * n)
    sign = np.array([1.0, -1.0])
    for mu in product(range(1 + s), repeat=n):
        xs = tuple(0 if m == 0 else m - 1 for m in mu)
        p = t[xs]  # shape (2,)*n
        for j in range(n):
            vec = sign if mu[j] else np.ones(2)
            p = np.tensordot(p, vec, axes=([0], [0]))
        cor[mu] = p
    return cor


def _state_correlators(rho: DensityMatrix, scenario: BellScenario) -> np.ndarray:
    """Same tensor as behavior_correlators(quantum_behavior(...)), computed
    directly from expectation values."""
    n, s = rho.n, scenario.settings
    ops = np.empty((n, 1 + s, 2, 2), dtype=complex)
    for j in range(n):
        ops[j, 0] = np.eye(2)
        for x in range(s):
            ops[j, 1 + x] = _bloch_op(scenario.directions[j, x])
    t = rho.data.reshape((2,) * (2 * n))
    for j in range(n):
        t = np.tensordot(t, ops[j], axes=([0, n - j], [2, 1]))
    return t.real


@dataclass
class VisibilityResult:
    v: float
    weights: np.ndarray
    functional: np.ndarray | None
    local_bound: float | None
    quantum_value: float | None
    iterations: int

    @property
    def violated(self) -> bool:
        return self.v < 1.0 - VIOLATION_TOL


def lhv_visibility(
    source,
    scenario: BellScenario | None = None,
    with_certificate: bool = True,
) -> VisibilityResult:
    """Critical visibility v* of a behavior (or of a state at a scenario).

    v* = max { v in [0,1] : v p + (1-v) p_uniform is a mixture of
    deterministic local strategies }.  v* = 1 means no violation at these
    settings.  The LP decomposition (weights) and, when v* < 1, a
    separating Bell functional are returned.
    """
    if isinstance(source, Behavior):
        cor = behavior_correlators(source)
        n, s = source.parties, source.settings
    else:
        if scenario is None:
            raise ValueError("need a scenario when passing a state")
        cor = _state_correlators(source, scenario)
        n, s = source.n, scenario.settings
    flat = cor.ravel()
    if abs(flat[0] - 1.0) > 1e-9:
        raise ValueError("behavior is not normalized")

    d = _strategy_tensor(n, s)
    rows, cols = d.shape
    a = np.zeros((rows + 1, cols + 2))
    a[:rows, :cols] = d
    a[1:rows, cols] = -flat[1:]  # v column; row 0 is normalization
    a[rows, cols] = 1.0  # v + slack = 1
    a[rows, cols + 1] = 1.0
    b = np.zeros(rows + 1)
    b[0] = 1.0
    b[rows] = 1.0
    c = np.zeros(cols + 2)
    c[cols] = 1.0
    res = solve_lp(a, b, c)
    if not res.ok:
        raise RuntimeError(f"visibility LP failed: {res.status}")
    v = min(max(res.objective, 0.0), 1.0)
    weights = res.x[:cols]
    functional = local_bound = quantum_value = None
    if with_certificate and v < 1.0 - VIOLATION_TOL:
        # dual prices on the correlator rows (excluding normalization) give
        # a separating Bell functional B with B . D_lambda <= v* for every
        # strategy while B . E = 1 at the optimum
        b_fun = -res.duals[1:rows]
        vals = b_fun @ d[1:, :]
        local_bound = float(vals.max())
        quantum_value = float(b_fun @ flat[1:])
        functional = b_fun
    return VisibilityResult(v, weights, functional, local_bound, quantum_value, res.iterations)


@lru_cache(maxsize=8)
def _strategy_tensor(parties: int, settings: int) -> np.ndarray:
    """Correlators of all deterministic strategies: rows are correlator
    coordinates ((1+settings)^n), columns strategies (2^settings)^n."""
    per_assign = [np.array([1.0, *a]) for a in product((1.0, -1.0), repeat=settings)]
    u = np.stack(per_assign).T  # rows: coord (1, a_0, a_1, ...); cols: strategy
    d = np.ones((1, 1))
    for _ in range(parties):
        d = np.kron(d, u)
    return d


@dataclass
class FCritResult:
    f_crit: float
    best_scenario: BellScenario | None
    scenarios_tested: int
    refined: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "f_crit": self.f_crit,
            "scenarios_tested": self.scenarios_tested,
            "refined": self.refined,
            "seed": self.seed,
            "best_directions": None
            if self.best_scenario is None
            else self.best_scenario.directions.tolist(),
        }


def f_crit(
    rho: DensityMatrix,
    scenarios: int = 200,
    refine_top: int = 5,
    hops: int = 24,
    hop_scales: tuple[float, ...] = (0.4, 0.8, 1.4),
    seed: int = 0,
    settings: int = 2,
) -> FCritResult:
    """White-noise robustness: max over settings of (1 - v*).

    Samples `scenarios` random direction sets, refines the best few by
    coordinate ascent on the Bloch angles, then runs seeded perturbation
    restarts (basin hopping) from the incumbent; plain ascent can stick at
    local optima of the visibility landscape.  Values below the LP
    violation tolerance are reported as exactly 0.
    """
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(scenarios):
        sc = random_scenario(rho.n, rng, settings)
        res = lhv_visibility(rho, sc, with_certificate=False)
        samples.append((1.0 - res.v, sc))
    samples.sort(key=lambda t: -t[0])
    best_f, best_sc = samples[0]
    refined = 0
    for f0, sc in samples[:refine_top]:
        f1, sc1 = _refine_scenario(rho, sc, settings)
        refined += 1
        if f1 > best_f:
            best_f, best_sc = f1, sc1
    best_ang = _angles_of(np.asarray(best_sc.directions))
    for hop in range(hops):
        scale = hop_scales[hop % len(hop_scales)]
        pert = best_ang + scale * rng.normal(size=best_ang.shape)
        dirs = _dirs_of(pert)
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        f2, sc2 = _refine_scenario(rho, BellScenario(dirs), settings)
        refined += 1
        if f2 > best_f + 1e-12:
            best_f, best_sc = f2, sc2
            best_ang = _angles_of(np.asarray(sc2.directions))
    if best_f < VIOLATION_TOL:
        best_f = 0.0
    return FCritResult(best_f, best_sc, scenarios, refined, seed)


def _angles_of(directions: np.ndarray) -> np.ndarray:
    th = np.arccos(np.clip(directions[..., 2], -1, 1))
    ph = np.arctan2(directions[..., 1], directions[..., 0])
    return np.stack([th, ph], axis=-1)


def _dirs_of(angles: np.ndarray) -> np.ndarray:
    th = angles[..., 0]
    ph = angles[..., 1]
    return np.stack(
        [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1
    )


def _refine_scenario(
    rho: DensityMatrix, sc: BellScenario, settings: int
) -> tuple[float, BellScenario]:
    """Coordinate ascent on the (theta, phi) parameters of every direction."""
    angles = _angles_of(np.asarray(sc.directions))
    shape = angles.shape

    def value(ang) -> float:
        dirs = _dirs_of(ang)
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        res = lhv_visibility(rho, BellScenario(dirs), with_certificate=False)
        return 1.0 - res.v

    best = value(angles)
    step = 0.4
    while step > 3e-4:
        improved = False
        for idx in np.ndindex(shape):
            for delta in (step, -step):
                trial = angles.copy()
                trial[idx] += delta
                val = value(trial)
                if val > best + 1e-12:
                    best, angles, improved = val, trial, True
                    break
        if not improved:
            step /= 2.0
    dirs = _dirs_of(angles)
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    return best, BellScenario(dirs)


@dataclass
class PvResult:
    fraction: float
    violations: int
    samples: int
    std_error: float
    seed: int

    @property
    def percent(self) -> float:
        return 100.0 * self.fraction

    def as_dict(self) -> dict:
        return {
            "p_violation": self.fraction,
            "percent": self.percent,
            "violations": self.violations,
            "samples": self.samples,
            "std_error": self.std_error,
            "seed": self.seed,
        }


def p_violation(
    rho: DensityMatrix,
    samples: int = 10000,
    seed: int = 0,
    settings: int = 2,
) -> PvResult:
    """Monte Carlo probability that uniformly random settings violate local
    realism (v* < 1 - tolerance)."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(samples):
        sc = random_scenario(rho.n, rng, settings)
        res = lhv_visibility(rho, sc, with_certificate=False)
        if res.v < 1.0 - VIOLATION_TOL:
            hits += 1
    frac = hits / samples
    se = math.sqrt(max(frac * (1 - frac), 1e-12) / samples)
    return PvResult(frac, hits, samples, se, seed)

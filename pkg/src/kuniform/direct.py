"""Penalized nonlinear search for k-uniform qubit states.

The cost of a state is the surviving correlation length minus a large
penalty on the low ranks,

    cost(rho) = sum_{r > k} M_r(rho) - beta * sum_{r <= k} M_r(rho),

with beta > 2^(N-1) so that any violation of k-uniformity dominates.  At an
exactly k-uniform state the cost equals 2^N Tr rho^2 - 1, so maximizing it
maximizes purity over the k-uniform set.  States are parametrized as
rho = L L^dag / Tr(L L^dag); the optimizer is derivative-free local search
(Powell's direction-set method) with seeded random restarts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .seesaw import _to_coeffs, _weights_flat
from .states import DensityMatrix, length_profile

__all__ = ["CostParams", "DirectResult", "cost", "direct_search"]


@dataclass(frozen=True)
class CostParams:
    n: int
    k: int
    beta: float | None = None  # default 2^n (must exceed 2^(n-1))
    rank: int | None = None    # columns of L; None = full rank
    restarts: int = 20
    maxfev: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValueError(f"k must be in [1, n-1], got {self.k}")
        beta = self.resolved_beta
        if beta <= 2 ** (self.n - 1):
            raise ValueError(
                f"beta must exceed 2^(n-1) = {2 ** (self.n - 1)}, got {beta}"
            )
        if self.restarts < 1:
            raise ValueError("restarts must be positive")

    @property
    def resolved_beta(self) -> float:
        return float(2 ** self.n if self.beta is None else self.beta)


def cost(rho: DensityMatrix, k: int, beta: float) -> float:
    """sum_{r>k} M_r - beta * sum_{r<=k} M_r."""
    if rho.d != 2:
        raise ValueError("the direct search is defined for qubits")
    prof = length_profile(rho)
    surviving = float(prof.M[k + 1:].sum())
    penalized = float(prof.M[1:k + 1].sum())
    return surviving - beta * penalized


@dataclass
class DirectResult:
    params: CostParams
    cost: float
    rho: DensityMatrix
    penalty_residual: float
    surviving: float
    purity_implied: float | None
    profile: np.ndarray
    restarts_used: int
    nfev: int

    def as_dict(self) -> dict:
        return {
            "n": self.params.n,
            "k": self.params.k,
            "beta": self.params.resolved_beta,
            "seed": self.params.seed,
            "cost": self.cost,
            "purity": self.purity_implied,
            "M": [float(v) for v in self.profile[1:]],
            "penalty_residual": self.penalty_residual,
            "restarts_used": self.restarts_used,
            "nfev": self.nfev,
        }


def direct_search(params: CostParams) -> DirectResult:
    """Maximize the penalized cost over rho = L L^dag / Tr(L L^dag).

    Deterministic given the seed.  The implied purity
    (1 + surviving M) / 2^n is reported when the penalty residual is below
    1e-6, i.e. when the optimum is k-uniform to optimizer precision.
    """
    n, k = params.n, params.k
    d = 2
    dim = d ** n
    rank = dim if params.rank is None else params.rank
    beta = params.resolved_beta
    w = _weights_flat(d, n)
    pen_idx = (w >= 1) & (w <= k)
    keep_idx = w > k
    scale = float(dim)

    def neg_cost(vec: np.ndarray) -> float:
        l = (vec[: dim * rank] + 1j * vec[dim * rank:]).reshape(dim, rank)
        mat = l @ l.conj().T
        tr = mat.trace().real
        if tr < 1e-300:
            return 0.0
        c = _to_coeffs(mat / tr, d, n)
        sq = c * c
        return -(scale * (sq[keep_idx].sum() - beta * sq[pen_idx].sum()))

    rng = np.random.default_rng(params.seed)
    best_val = np.inf
    best_vec = None
    nfev = 0
    used = 0
    budget = params.maxfev
    for _ in range(params.restarts):
        used += 1
        x0 = rng.normal(size=2 * dim * rank)
        res = minimize(
            neg_cost,
            x0,
            method="Powell",
            options={
                "maxfev": max(1000, budget // params.restarts),
                "xtol": 1e-10,
                "ftol": 1e-12,
            },
        )
        nfev += res.nfev
        if res.fun < best_val:
            best_val = res.fun
            best_vec = res.x
        if nfev >= budget:
            break

    l = (best_vec[: dim * rank] + 1j * best_vec[dim * rank:]).reshape(dim, rank)
    mat = l @ l.conj().T
    rho = DensityMatrix(2, n, mat / mat.trace().real)
    prof = length_profile(rho)
    penalty = float(prof.M[1:k + 1].sum())
    surviving = float(prof.M[k + 1:].sum())
    best_cost = surviving - beta * penalty
    implied = (1.0 + surviving) / dim if penalty < 1e-6 else None
    return DirectResult(
        params=params,
        cost=best_cost,
        rho=rho,
        penalty_residual=penalty,
        surviving=surviving,
        purity_implied=implied,
        profile=prof.M.copy(),
        restarts_used=used,
        nfev=nfev,
    )

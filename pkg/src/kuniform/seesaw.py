"""See-saw maximization of purity over k-uniform states.

The inner step solves, for a fixed state rho,

    max_sigma Tr(rho sigma)   with  sigma = (1 - eps) rho + eps rho_eps,
    rho_eps >= 0, Tr rho_eps = 1, sigma k-uniform,

then sets rho = sigma and repeats; Tr(rho sigma) is non-decreasing and
converges to a lower bound on the maximal purity of a k-uniform state.

States are handled as real coefficient vectors over the orthonormal
Hermitian product basis (states.site_basis), where k-uniformity is a
coordinate condition: all coefficients of weight 1..k vanish.  The SDP
step eliminates those affine constraints by construction and is solved
either by a log-det barrier Newton method on the free coordinates (small
problems) or by an ADMM splitting between the affine slice and the
trace-one PSD cone (larger ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .states import DensityMatrix, site_basis

__all__ = ["SeesawConfig", "SdpInfo", "SeesawResult", "sdp_step", "seesaw_run"]

BARRIER_MAX_FREE = 260  # dense Newton above this is slower than splitting


# -- coefficient-space plumbing ----------------------------------------------


def _to_coeffs(mat: np.ndarray, d: int, n: int) -> np.ndarray:
    """Real coefficients of a Hermitian matrix in the product basis."""
    basis = site_basis(d)
    t = mat.reshape((d,) * (2 * n))
    for j in range(n):
        t = np.tensordot(t, basis, axes=([0, n - j], [2, 1]))
    return np.ascontiguousarray(t.real).ravel()


def _from_coeffs(coef: np.ndarray, d: int, n: int) -> np.ndarray:
    """Hermitian matrix from real coefficients (inverse of _to_coeffs)."""
    basis = site_basis(d)
    cur = coef.reshape((d * d,) * n).astype(complex)
    for _ in range(n):
        cur = np.tensordot(cur, basis, axes=([0], [0]))
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    dim = d ** n
    return cur.transpose(perm).reshape(dim, dim)


@lru_cache(maxsize=16)
def _weights_flat(d: int, n: int) -> np.ndarray:
    d2 = d * d
    w = np.zeros((d2,) * n, dtype=np.int64)
    nz = np.ones(d2, dtype=np.int64)
    nz[0] = 0
    for j in range(n):
        shape = [1] * n
        shape[j] = d2
        w = w + nz.reshape(shape)
    return w.ravel()


@lru_cache(maxsize=8)
def _free_basis_stack(d: int, n: int, k: int) -> np.ndarray:
    """Dense stack of the weight > k basis matrices, shape (M, D, D)."""
    w = _weights_flat(d, n)
    free = np.nonzero(w > k)[0]
    dim = d ** n
    out = np.empty((len(free), dim, dim), dtype=complex)
    length = (d * d) ** n
    for t, idx in enumerate(free):
        e = np.zeros(length)
        e[idx] = 1.0
        out[t] = _from_coeffs(e, d, n)
    return out


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho_idx = np.nonzero(u - css / np.arange(1, len(v) + 1) > 0)[0][-1]
    theta = css[rho_idx] / (rho_idx + 1.0)
    return np.maximum(v - theta, 0.0)


# -- configuration / results ---------------------------------------------------


@dataclass(frozen=True)
class SeesawConfig:
    n: int
    k: int
    d: int = 2
    eps: float = 0.3
    tol: float = 1e-7          # convergence tolerance on P
    feas_tol: float = 1e-8     # k-uniformity feasibility tolerance
    max_iters: int = 500
    restarts: int = 10
    seed: int = 0
    method: str = "auto"       # "barrier", "splitting", or "auto"

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValueError(f"k must be in [1, n-1], got {self.k}")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must be in (0, 1]")
        if self.method not in ("auto", "barrier", "splitting"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class SdpInfo:
    objective: float        # Tr(rho sigma) attained
    method: str
    iterations: int
    converged: bool
    gap_estimate: float


@dataclass
class SeesawResult:
    config: SeesawConfig
    p_best: float
    rho_best: DensityMatrix | None
    iterations: int
    restarts_used: int
    history: list = field(default_factory=list)  # best restart's P sequence

    def as_dict(self) -> dict:
        return {
            "n": self.config.n,
            "k": self.config.k,
            "d": self.config.d,
            "eps": self.config.eps,
            "seed": self.config.seed,
            "P_best": self.p_best,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "history": list(self.history),
        }


# -- the SDP step ---------------------------------------------------------------


class _StepSolver:
    """Reusable solver for the fixed (d, n, k); keeps warm-start state."""

    def __init__(self, d: int, n: int, k: int, method: str = "auto"):
        self.d, self.n, self.k = d, n, k
        self.dim = d ** n
        w = _weights_flat(d, n)
        self.low = np.nonzero((w >= 1) & (w <= k))[0]
        self.free = np.nonzero(w > k)[0]
        self.id_coeff = 1.0 / math.sqrt(self.dim)
        if method == "auto":
            method = "barrier" if len(self.free) <= BARRIER_MAX_FREE else "splitting"
        self.method = method
        self._warm_z = None
        self._warm_u = None
        self._warm_y = None

    def reset_warm_start(self):
        self._warm_z = None
        self._warm_u = None
        self._warm_y = None

    def solve(self, rho: DensityMatrix, eps: float, feas_tol: float = 1e-8,
              tol: float = 1e-8) -> tuple[DensityMatrix, SdpInfo]:
        if (rho.d, rho.n) != (self.d, self.n):
            raise ValueError("state shape does not match the solver")
        c = _to_coeffs(rho.data, self.d, self.n)
        low_dev = float(np.max(np.abs(c[self.low]))) if len(self.low) else 0.0
        if eps < 1.0 and low_dev > 1e4 * feas_tol:
            raise ValueError(
                f"rho violates k-uniformity by {low_dev:.2e}; "
                "the eps < 1 step needs a (nearly) k-uniform input"
            )
        # affine slice for rho_eps: sigma low coords must vanish
        t_low = -(1.0 - eps) / eps * c[self.low]
        base = np.zeros_like(c)
        base[0] = self.id_coeff
        base[self.low] = t_low
        if self.method == "barrier":
            x, iters, gap, ok = self._solve_barrier(c, base, tol)
        else:
            x, iters, gap, ok = self._solve_splitting(c, base, tol)
        sigma_coef = (1.0 - eps) * c + eps * x
        # exact slice polish and PSD repair (tiny mix toward the slice center)
        sigma_coef[self.low] = 0.0
        sigma_coef[0] = self.id_coeff
        sigma = _from_coeffs(sigma_coef, self.d, self.n)
        lam_min = float(np.linalg.eigvalsh(sigma)[0])
        if lam_min < 0.0:
            delta = min(1.0, self.dim * (-lam_min) / (self.dim * (-lam_min) + 1.0) + 1e-15)
            sigma = (1.0 - delta) * sigma + delta * np.eye(self.dim) / self.dim
        objective = float(np.real(np.vdot(rho.data, sigma)))
        info = SdpInfo(objective, self.method, iters, ok, gap)
        return DensityMatrix(self.d, self.n, sigma), info

    # ---- log-det barrier Newton on the free coordinates ----

    def _solve_barrier(self, c, base, tol):
        """Central path for max <g, y> over S(y) = S0 + sum y_a E_a >= 0.

        Damped Newton with the self-concordant step 1/(1 + lambda) keeps the
        iterate strictly inside the cone without a line search; each barrier
        stage is centered to Newton decrement <= 0.25, the final one to
        high accuracy.  Suboptimality at the end is about mu_min * dim.
        """
        d, n = self.d, self.n
        free = self.free
        g = c[free]
        estack = _free_basis_stack(d, n, self.k)
        eflat = estack.reshape(len(free), -1)
        s0 = _from_coeffs(base, d, n)
        mu_min = 1e-9
        mu_snapshot = 1e-3
        y = np.zeros(len(free))
        mu = 1.0
        if self._warm_y is not None:
            s = s0 + np.tensordot(self._warm_y, estack, axes=(0, 0))
            if np.linalg.eigvalsh(s)[0] > 1e-13:
                # resume from the previous solve's mid-path point: the
                # boundary-hugging final iterate is badly off-center
                y = self._warm_y.copy()
                mu = mu_snapshot
        snapshot = None
        iters = 0
        while True:
            last_stage = mu <= mu_min
            target = 1e-8 if last_stage else 0.25
            for _ in range(80):
                iters += 1
                s = s0 + np.tensordot(y, estack, axes=(0, 0))
                lam, q = np.linalg.eigh(s)
                if lam[0] <= 0:
                    raise RuntimeError("barrier iterate left the PSD cone")
                sinv = (q / lam) @ q.conj().T
                grad = -g / mu - _to_coeffs(sinv, d, n)[free]
                t = sinv @ estack @ sinv  # (M, D, D)
                h = np.real(eflat @ t.transpose(0, 2, 1).reshape(len(free), -1).T)
                try:
                    step = np.linalg.solve(h, -grad)
                except np.linalg.LinAlgError:
                    step = np.linalg.lstsq(h, -grad, rcond=None)[0]
                lam_nt_sq = max(float(-grad @ step), 0.0)
                lam_nt = math.sqrt(lam_nt_sq)
                if lam_nt_sq <= target:
                    break
                alpha = 1.0 / (1.0 + lam_nt)
                # self-concordance keeps the damped step inside the cone in
                # exact arithmetic; guard against roundoff near the boundary
                for _try in range(50):
                    y_try = y + alpha * step
                    s_try = s0 + np.tensordot(y_try, estack, axes=(0, 0))
                    if np.linalg.eigvalsh(s_try)[0] > 0:
                        break
                    alpha /= 2.0
                y = y + alpha * step
            if snapshot is None and mu <= mu_snapshot:
                snapshot = y.copy()
            if last_stage:
                break
            mu = max(mu / 3.0, mu_min)
        self._warm_y = snapshot if snapshot is not None else y.copy()
        x = base.copy()
        x[free] = y
        gap = mu * self.dim
        return x, iters, gap, True

    # ---- ADMM splitting between the affine slice and the spectraplex ----

    def _solve_splitting(self, c, base, tol, max_iter: int = 20000):
        d, n = self.d, self.n
        dim = self.dim
        length = len(c)
        rho_p = max(float(np.linalg.norm(c)), 1e-6)

        def proj_affine(v):
            out = v.copy()
            out[0] = base[0]
            out[self.low] = base[self.low]
            return out

        def proj_spectraplex(v):
            mat = _from_coeffs(v, d, n)
            lam, q = np.linalg.eigh(mat)
            lam = _project_simplex(lam)
            mat = (q * lam) @ q.conj().T
            return _to_coeffs(mat, d, n)

        z = self._warm_z if self._warm_z is not None else proj_affine(np.zeros(length))
        u = self._warm_u if self._warm_u is not None else np.zeros(length)
        ok = False
        it = 0
        scale = math.sqrt(length)
        for it in range(1, max_iter + 1):
            x = proj_affine(z - u + c / rho_p)
            z_old = z
            z = proj_spectraplex(x + u)
            u = u + x - z
            if it % 25 == 0:
                r_norm = np.linalg.norm(x - z)
                s_norm = rho_p * np.linalg.norm(z - z_old)
                lim = tol * scale + tol * max(np.linalg.norm(x), np.linalg.norm(z))
                if r_norm < lim and s_norm < lim:
                    ok = True
                    break
                # residual balancing
                if r_norm > 10 * s_norm:
                    rho_p *= 2.0
                    u /= 2.0
                elif s_norm > 10 * r_norm:
                    rho_p /= 2.0
                    u *= 2.0
        self._warm_z = z.copy()
        self._warm_u = u.copy()
        x_out = proj_affine(z)
        gap = float(np.linalg.norm(x - z))
        return x_out, it, gap, ok


def sdp_step(
    rho: DensityMatrix,
    eps: float,
    k: int,
    method: str = "auto",
    feas_tol: float = 1e-8,
    tol: float = 1e-8,
) -> tuple[DensityMatrix, SdpInfo]:
    """One inner SDP: returns (sigma, info) with sigma = (1-eps) rho + eps
    rho_eps maximizing Tr(rho sigma) over feasible rho_eps."""
    solver = _StepSolver(rho.d, rho.n, k, method)
    return solver.solve(rho, eps, feas_tol, tol)


def seesaw_run(config: SeesawConfig) -> SeesawResult:
    """Random-restart see-saw.  Each restart starts from a full-rank random
    state with eps = 1 on the first iteration (which projects into the
    k-uniform slice); later iterations use config.eps.  P is non-decreasing
    within a restart up to solver tolerance and lower-bounds the maximal
    purity of a k-uniform state."""
    d, n, k = config.d, config.n, config.k
    dim = d ** n
    solver = _StepSolver(d, n, k, config.method)
    best_p = -np.inf
    best_rho = None
    best_hist: list[float] = []
    total_iters = 0
    restarts_used = 0
    for r in range(config.restarts):
        restarts_used += 1
        rng = np.random.default_rng([config.seed, r])
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        mat = g @ g.conj().T
        rho = DensityMatrix(d, n, mat / mat.trace().real)
        solver.reset_warm_start()
        hist: list[float] = []
        p_restart = -np.inf
        rho_restart = rho
        stall = 0
        for it in range(config.max_iters):
            eps = 1.0 if it == 0 else config.eps
            rho, info = solver.solve(rho, eps, config.feas_tol)
            total_iters += 1
            hist.append(info.objective)
            if info.objective > p_restart:
                if it > 0 and info.objective - p_restart < config.tol:
                    stall += 1
                else:
                    stall = 0
                p_restart = info.objective
                rho_restart = rho
            else:
                stall += 1
            if it > 0 and stall >= 3:
                break
        if p_restart > best_p:
            best_p = p_restart
            best_rho = rho_restart
            best_hist = hist
    return SeesawResult(
        config=config,
        p_best=float(best_p),
        rho_best=best_rho,
        iterations=total_iters,
        restarts_used=restarts_used,
        history=best_hist,
    )

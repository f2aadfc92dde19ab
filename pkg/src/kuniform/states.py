"""Dense state construction and certification.

Builds density matrices from commuting generator sets, computes reduced
states, correlation tensors and length profiles, purity, quantum Fisher
information, the antistate mixing scheme and witness values.

Conventions: sites are 0-indexed; a state of n sites with local dimension d
is a (d^n, d^n) complex Hermitian matrix of unit trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse as _sparse

from . import pauli
from .pauli import WeylString, group_span, is_hermitian, to_sparse

__all__ = [
    "DensityMatrix",
    "CorrelationTensor",
    "LengthProfile",
    "CollectiveOperator",
    "TOL_HERMITIAN",
    "TOL_TRACE",
    "TOL_PSD",
    "TOL_UNIFORM",
    "TOL_IDENTITY",
    "from_generators",
    "partial_trace",
    "is_k_uniform",
    "uniformity",
    "correlation_tensor",
    "basis_coefficients",
    "site_basis",
    "length_profile",
    "purity",
    "qfi",
    "qfi_variance",
    "collective_spin",
    "pauli_axis_operator",
    "antistate",
    "antistate_mix",
    "witness_value",
    "ame_bound",
    "random_density_matrix",
    "random_pure_state",
    "certify",
    "save_state",
    "load_state",
]

TOL_HERMITIAN = 1e-12
TOL_TRACE = 1e-12
TOL_PSD = -1e-10
TOL_UNIFORM = 1e-10
TOL_IDENTITY = 1e-9

_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class DensityMatrix:
    """A dense n-site state with local dimension d."""

    d: int
    n: int
    data: np.ndarray

    def __post_init__(self):
        dim = self.d ** self.n
        if self.data.shape != (dim, dim):
            raise ValueError(
                f"data shape {self.data.shape} does not match (d^n, d^n) = {(dim, dim)}"
            )
        self.data.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def check(self, tol_herm=TOL_HERMITIAN, tol_trace=TOL_TRACE, tol_psd=TOL_PSD):
        """Raise if not Hermitian / trace-1 / PSD within tolerances."""
        dev = np.max(np.abs(self.data - self.data.conj().T))
        if dev > tol_herm:
            raise ValueError(f"not Hermitian: max deviation {dev:.3e}")
        tr = self.data.trace()
        if abs(tr - 1.0) > max(tol_trace, 1e-12 * self.dim):
            raise ValueError(f"trace {tr} != 1")
        lam = np.linalg.eigvalsh(self.data)
        if lam[0] < tol_psd:
            raise ValueError(f"not PSD: min eigenvalue {lam[0]:.3e}")
        return self

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)


@dataclass(frozen=True)
class CorrelationTensor:
    """Pauli expansion coefficients T of a qubit state (d = 2 only)."""

    n: int
    values: np.ndarray  # real, shape (4,)*n, indices 0=I, 1=X, 2=Y, 3=Z

    def __getitem__(self, idx):
        return self.values[idx]


@dataclass(frozen=True)
class LengthProfile:
    """Squared correlation lengths M_r, r = 1..n (index 0 unused)."""

    M: np.ndarray  # shape (n + 1,)

    @property
    def n(self) -> int:
        return len(self.M) - 1

    def __getitem__(self, r: int) -> float:
        return float(self.M[r])

    def total(self) -> float:
        return float(self.M[1:].sum())

    def as_dict(self, tol: float = 1e-12) -> dict[int, float]:
        return {r: float(self.M[r]) for r in range(1, self.n + 1) if self.M[r] > tol}


@dataclass(frozen=True)
class CollectiveOperator:
    """H = (1/2) sum_j n_j . sigma^(j) for unit Bloch vectors n_j (d = 2)."""

    n: int
    directions: np.ndarray  # shape (n, 3)
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        norms = np.linalg.norm(self.directions, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("Bloch vectors must be unit length")


# -- construction ------------------------------------------------------------


def from_generators(
    gens: Sequence[WeylString],
    validate: bool = True,
    span_cap: int = pauli.DEFAULT_SPAN_CAP,
) -> DensityMatrix:
    """State rho = d^-n * sum over the full product span of the generators.

    The generators must mutually commute and be independent; the resulting
    eigenvalues are then exactly 0 or d^(m-n) so rho is a valid state of
    purity d^(m-n).  Hermiticity of the sum is verified (symbolically for
    qubits, numerically otherwise), as is the projector law rho^2 = c rho.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    d, n = gens[0].d, gens[0].n
    m = len(gens)
    dim = d ** n
    span = group_span(gens, cap=span_cap, check_commuting=validate)
    if validate and d == 2:
        for s in span:
            if not is_hermitian(s):
                raise ValueError(
                    f"span element {pauli.format_pauli(s)} is not Hermitian; "
                    "the generator phases are inconsistent"
                )
    cols = np.arange(dim)
    all_rows = np.concatenate([to_sparse(s)[0] for s in span])
    all_vals = np.concatenate([to_sparse(s)[1] for s in span])
    all_cols = np.tile(cols, len(span))
    mat = _sparse.csr_matrix((all_vals, (all_rows, all_cols)), shape=(dim, dim))
    mat = mat / dim

    if validate:
        diff = (mat - mat.getH()).tocoo()
        dev = np.max(np.abs(diff.data)) if diff.nnz else 0.0
        if dev > TOL_HERMITIAN:
            raise ValueError(f"generator sum is not Hermitian (deviation {dev:.3e})")
        tr = mat.diagonal().sum().real
        if abs(tr - 1.0) > 1e-12 * dim:
            raise ValueError(f"generator sum has trace {tr}, expected 1; "
                             "the set is probably dependent")
        # projector law: rho^2 = d^(m-n) rho certifies the two-point spectrum
        c = float(d) ** (m - n)
        resid = ((mat @ mat) - c * mat).tocoo()
        dev2 = np.max(np.abs(resid.data)) if resid.nnz else 0.0
        if dev2 > 1e-10:
            raise ValueError(
                f"rho^2 != d^(m-n) rho (deviation {dev2:.3e}); generators are "
                "dependent or do not commute"
            )
    return DensityMatrix(d, n, np.asarray(mat.todense()))


def random_pure_state(n: int, d: int = 2, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    v = rng.normal(size=d ** n) + 1j * rng.normal(size=d ** n)
    return v / np.linalg.norm(v)


def random_density_matrix(n: int, d: int = 2, rank: int | None = None, rng=None) -> DensityMatrix:
    """Ginibre-induced random state, full rank by default."""
    rng = np.random.default_rng(rng)
    dim = d ** n
    r = dim if rank is None else rank
    g = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
    rho = g @ g.conj().T
    rho /= rho.trace().real
    return DensityMatrix(d, n, rho)


# -- reductions --------------------------------------------------------------


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the (0-indexed) sites in `keep`, in their order."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep must be a nonempty site subset")
    if len(set(keep)) != len(keep):
        raise ValueError("keep contains duplicates")
    if any(not 0 <= s < rho.n for s in keep):
        raise ValueError(f"sites out of range for n={rho.n}")
    d, n = rho.d, rho.n
    t = rho.data.reshape((d,) * (2 * n))
    traced = [s for s in range(n) if s not in keep]
    for offset, s in enumerate(traced):
        ax = s - sum(1 for t_ in traced[:offset] if t_ < s)
        t = np.trace(t, axis1=ax, axis2=ax + n - offset)
        # after tracing, row axes shift left by one
    # t now has row/col axes for the kept sites in original site order
    order = sorted(range(len(keep)), key=lambda i: keep[i])
    # reorder to the order requested in `keep`
    inv = np.argsort(order)
    perm = list(inv) + [len(keep) + i for i in inv]
    t = t.transpose(perm)
    dim = d ** len(keep)
    return DensityMatrix(d, len(keep), t.reshape(dim, dim).copy())


def is_k_uniform(rho: DensityMatrix, k: int, tol: float = TOL_UNIFORM) -> bool:
    """True iff every k-site reduction is maximally mixed within tol.

    Checks all C(n, k) reductions by max-abs entry deviation from I/d^k.
    Reductions are computed hierarchically (each level traced from the one
    above) so large n stays tractable.
    """
    if not 1 <= k <= rho.n - 1:
        raise ValueError(f"k must be in [1, n-1], got k={k}, n={rho.n}")
    d, n = rho.d, rho.n
    level: dict[tuple[int, ...], np.ndarray] = {tuple(range(n)): rho.data}
    for size in range(n - 1, k - 1, -1):
        nxt: dict[tuple[int, ...], np.ndarray] = {}
        for subset in combinations(range(n), size):
            parent = next(p for p in level if set(subset) <= set(p))
            drop = next(i for i, s in enumerate(parent) if s not in subset)
            dim_p = d ** len(parent)
            mat = level[parent].reshape((d,) * (2 * len(parent)))
            red = np.trace(mat, axis1=drop, axis2=drop + len(parent))
            dim_c = d ** size
            nxt[subset] = red.reshape(dim_c, dim_c)
        level = nxt
    target = np.eye(d ** k) / d ** k
    return all(np.max(np.abs(red - target)) <= tol for red in level.values())


def uniformity(rho: DensityMatrix, tol: float = TOL_UNIFORM) -> int:
    """Largest k with is_k_uniform(rho, k); 0 if not even 1-uniform."""
    best = 0
    for k in range(1, rho.n):
        if is_k_uniform(rho, k, tol):
            best = k
        else:
            break
    return best


# -- correlation tensors and length profiles ---------------------------------


@lru_cache(maxsize=32)
def site_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian single-site basis, shape (d^2, d, d).

    Element 0 is I/sqrt(d); the rest are traceless (generalized Gell-Mann
    ladder for d > 2, sigma/sqrt(2) for qubits).  Tr(e_a e_b) = delta_ab.
    """
    mats = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for j in range(d):
        for kk in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, kk] = m[kk, j] = 1 / math.sqrt(2)
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, kk] = -1j / math.sqrt(2)
            m[kk, j] = 1j / math.sqrt(2)
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag).astype(complex) / math.sqrt(l * (l + 1)))
    return np.stack(mats)


def _contract_all_sites(rho: DensityMatrix, basis: np.ndarray) -> np.ndarray:
    """All products Tr(rho * b_{a1} x ... x b_{an}), shape (len(basis),)*n."""
    d, n = rho.d, rho.n
    t = rho.data.reshape((d,) * (2 * n))
    for j in range(n):
        # contract row axis 0 and matching column axis with basis[mu, b, a]
        t = np.tensordot(t, basis, axes=([0, n - j], [2, 1]))
    return t


def basis_coefficients(rho: DensityMatrix) -> np.ndarray:
    """Coefficients of rho in the orthonormal Hermitian product basis.

    Shape (d^2,)*n; index 0 on a site means identity there.  Parseval:
    sum |coeff|^2 = Tr rho^2.
    """
    return _contract_all_sites(rho, site_basis(rho.d))


def correlation_tensor(rho: DensityMatrix) -> CorrelationTensor:
    """T_{mu1..mun} = Tr(rho sigma_mu1 x ... x sigma_mun); qubits only."""
    if rho.d != 2:
        raise ValueError("correlation_tensor is defined for d = 2 only")
    sig = np.stack([_SIGMA[c] for c in "IXYZ"])
    t = _contract_all_sites(rho, sig)
    imag = np.max(np.abs(t.imag))
    if imag > 1e-9:
        raise ValueError(f"state is not Hermitian: imaginary correlations {imag:.3e}")
    return CorrelationTensor(rho.n, t.real)


def tensor_to_state(t: CorrelationTensor) -> DensityMatrix:
    """Inverse of correlation_tensor (Pauli expansion)."""
    n = t.n
    sig = np.stack([_SIGMA[c] for c in "IXYZ"])
    cur = np.asarray(t.values, dtype=complex)
    # successively contract each mu index with sigma[mu, a, b]
    for _ in range(n):
        cur = np.tensordot(cur, sig, axes=([0], [0]))
    # axes now (a1, b1, a2, b2, ...) interleaved; regroup rows/cols
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    cur = cur.transpose(perm).reshape(2 ** n, 2 ** n)
    return DensityMatrix(2, n, cur / 2 ** n)


@lru_cache(maxsize=64)
def _weight_of_index(d2: int, n: int) -> np.ndarray:
    """Tensor of shape (d2,)*n whose entry is the number of nonzero indices."""
    w = np.zeros((d2,) * n, dtype=np.int64)
    nz = np.ones(d2, dtype=np.int64)
    nz[0] = 0
    for j in range(n):
        shape = [1] * n
        shape[j] = d2
        w = w + nz.reshape(shape)
    return w


def length_profile(rho: DensityMatrix) -> LengthProfile:
    """M_r = sum of squared correlations over all weight-r basis labels.

    Normalized so that 1 + sum_r M_r = d^n Tr rho^2.
    """
    c = basis_coefficients(rho)
    w = _weight_of_index(rho.d ** 2, rho.n)
    sq = (np.abs(c) ** 2) * (rho.d ** rho.n)
    M = np.zeros(rho.n + 1)
    flat_w = w.ravel()
    np.add.at(M, flat_w, sq.ravel())
    M[0] = 0.0
    return LengthProfile(M)


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.vdot(rho.data, rho.data)))


# -- quantum Fisher information ----------------------------------------------


def qfi(rho: DensityMatrix, a: np.ndarray, cutoff: float = 1e-12) -> float:
    """Quantum Fisher information via the spectral formula.

    F = 2 sum_{lam_i + lam_j > cutoff} (lam_i - lam_j)^2 / (lam_i + lam_j)
        * |<i|A|j>|^2.

    Equals 4 Var(A) on pure states.
    """
    a = np.asarray(a)
    if a.shape != rho.data.shape:
        raise ValueError("observable dimension mismatch")
    if np.max(np.abs(a - a.conj().T)) > 1e-10:
        raise ValueError("observable must be Hermitian")
    lam, v = np.linalg.eigh(rho.data)
    amat = v.conj().T @ a @ v
    lsum = lam[:, None] + lam[None, :]
    ldif = lam[:, None] - lam[None, :]
    mask = lsum > cutoff
    ratio = np.zeros_like(lsum)
    ratio[mask] = (ldif[mask] ** 2) / lsum[mask]
    return float(2.0 * np.sum(ratio * np.abs(amat) ** 2))


def qfi_variance(rho: DensityMatrix, a: np.ndarray) -> float:
    """4 (Tr rho A^2 - (Tr rho A)^2): the QFI of pure states and an upper
    bound for mixed ones."""
    a = np.asarray(a)
    mean = np.real(np.trace(rho.data @ a))
    msq = np.real(np.trace(rho.data @ a @ a))
    return float(4.0 * (msq - mean ** 2))


def collective_spin(n: int, directions) -> CollectiveOperator:
    """H = (1/2) sum_j n_j . sigma^(j); `directions` is (n, 3) or one vector
    shared by all sites."""
    directions = np.asarray(directions, dtype=float)
    if directions.ndim == 1:
        directions = np.tile(directions / np.linalg.norm(directions), (n, 1))
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for j in range(n):
        s = (
            directions[j, 0] * _SIGMA["X"]
            + directions[j, 1] * _SIGMA["Y"]
            + directions[j, 2] * _SIGMA["Z"]
        )
        h += 0.5 * _embed_site(s, j, n)
    return CollectiveOperator(n, directions, h)


def pauli_axis_operator(n: int, axis: str) -> np.ndarray:
    """Collective angular momentum J_axis = (1/2) sum_j sigma_axis^(j)."""
    unit = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[axis.lower()]
    return collective_spin(n, unit).matrix


def _embed_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    mats = [np.eye(2, dtype=complex)] * n
    mats[site] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


# -- schemes and witnesses ----------------------------------------------------


def antistate(rho: DensityMatrix) -> DensityMatrix:
    """sigma_y^xN conj(rho) sigma_y^xN (qubits only)."""
    if rho.d != 2:
        raise ValueError("antistate is defined for d = 2 only")
    yn = _SIGMA["Y"]
    for _ in range(rho.n - 1):
        yn = np.kron(yn, _SIGMA["Y"])
    return DensityMatrix(2, rho.n, yn @ rho.data.conj() @ yn)


def antistate_mix(rho: DensityMatrix) -> DensityMatrix:
    """Even mixture of rho with its antistate.

    Cancels every odd-rank correlation and keeps even-rank ones, so a
    (k-1)-uniform input with even k-1 comes out k-uniform.  Idempotent.
    """
    bar = antistate(rho)
    return DensityMatrix(2, rho.n, 0.5 * (rho.data + bar.data))


def witness_value(rho_test: DensityMatrix, alpha: float, rho_ref: DensityMatrix) -> float:
    """Tr((alpha I - rho_ref) rho_test)."""
    if rho_test.data.shape != rho_ref.data.shape:
        raise ValueError("dimension mismatch")
    val = alpha * rho_test.data.trace() - np.trace(rho_ref.data @ rho_test.data)
    return float(np.real(val))


def ame_bound(n_parties: int, d: int) -> bool:
    """Necessary condition for an AME state of n_parties qudits to exist."""
    if n_parties < 2 or d < 2:
        raise ValueError("need n_parties >= 2 and d >= 2")
    if n_parties % 2 == 0:
        return n_parties <= 2 * (d ** 2 - 1)
    return n_parties <= 2 * d * (d + 1) - 1


# -- certification ------------------------------------------------------------


def certify(rho: DensityMatrix, compute_qfi: bool = True) -> dict:
    """JSON-ready certification report for a state."""
    prof = length_profile(rho)
    unif = 0
    for k in range(1, rho.n):
        if all(prof.M[r] <= TOL_UNIFORM for r in range(1, k + 1)):
            unif = k
        else:
            break
    if unif and not is_k_uniform(rho, unif):
        raise AssertionError("length profile and reductions disagree on uniformity")
    report = {
        "d": rho.d,
        "n": rho.n,
        "purity": purity(rho),
        "M": [float(prof.M[r]) for r in range(1, rho.n + 1)],
        "uniformity_k": unif,
        "eigenvalues": [float(v) for v in rho.eigenvalues()],
    }
    if compute_qfi and rho.d == 2:
        report["qfi"] = {
            ax: qfi(rho, pauli_axis_operator(rho.n, ax)) for ax in "xyz"
        }
    return report


# -- state files ---------------------------------------------------------------


def save_state(path, rho: DensityMatrix, comment: str = "") -> None:
    """Text format: header 'd=<d> n=<n>', then one row per line of
    whitespace-separated 're,im' entries."""
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"d={rho.d} n={rho.n}\n")
        for row in rho.data:
            fh.write(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row) + "\n")


def load_state(path) -> DensityMatrix:
    d = n = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if d is None:
                parts = dict(tok.split("=") for tok in line.split())
                d, n = int(parts["d"]), int(parts["n"])
                continue
            rows.append(
                [complex(*map(float, tok.split(","))) for tok in line.split()]
            )
    if d is None:
        raise ValueError("missing 'd=<int> n=<int>' header")
    data = np.array(rows, dtype=complex)
    return DensityMatrix(d, n, data)

"""Exact symbolic algebra of N-site generalized Pauli (Weyl) operators.

A WeylString stores an operator in symplectic form: exponent vectors x, z
over Z_d plus an integer phase exponent.  The dense operator it represents is

    phase * (X^x1 Z^z1) o (X^x2 Z^z2) o ... o (X^xn Z^zn)

with phase = i^phase_exp for qubits (d = 2) and omega^phase_exp otherwise,
omega = exp(2*pi*i/d).  Single-site conventions:

    X|j> = |j+1 mod d>,   Z|j> = omega^j |j>,   so  Z X = omega X Z.

For qubits the letter map is I=(0,0), X=(1,0), Z=(0,1) and Y=(1,1) with a
phase contribution of one power of i per Y site (sigma_y = i X Z).

All values are immutable; every operation is a pure function.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "WeylString",
    "parse_pauli",
    "format_pauli",
    "multiply",
    "power",
    "commutes",
    "symplectic_form",
    "is_hermitian",
    "weight",
    "identity_count",
    "identity_string",
    "group_span",
    "independent",
    "symplectic_rank",
    "to_dense",
    "to_sparse",
    "read_generator_file",
    "write_generator_file",
    "parse_generator_lines",
]

_QUBIT_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_LETTER_OF = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

# span sizes above this need an explicit opt-in
DEFAULT_SPAN_CAP = 1 << 20


@dataclass(frozen=True)
class WeylString:
    """Phase-tracked tensor product of single-site Weyl operators."""

    d: int
    x: tuple[int, ...]
    z: tuple[int, ...]
    phase_exp: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.d}")
        if len(self.x) != len(self.z):
            raise ValueError("x and z must have equal length")
        if any(not 0 <= v < self.d for v in self.x + self.z):
            raise ValueError("exponents must lie in [0, d)")
        object.__setattr__(self, "phase_exp", self.phase_exp % self._phase_mod())

    def _phase_mod(self) -> int:
        return 4 if self.d == 2 else self.d

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def phase(self) -> complex:
        """The global phase as a complex number."""
        if self.d == 2:
            return 1j ** self.phase_exp
        return cmath.exp(2j * cmath.pi * self.phase_exp / self.d)

    def is_identity(self) -> bool:
        return all(v == 0 for v in self.x) and all(v == 0 for v in self.z)

    def code(self) -> tuple[int, ...]:
        """Phase-free lexicographic key: per-site (x, z) pairs."""
        return tuple(v for site in zip(self.x, self.z) for v in site)

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"WeylString(d={self.d}, '{format_pauli(self)}')"


def identity_string(n: int, d: int = 2) -> WeylString:
    return WeylString(d, (0,) * n, (0,) * n, 0)


def parse_pauli(text: str, d: int = 2, n: int | None = None) -> WeylString:
    """Parse a Pauli/Weyl token string.

    Qubits use letters over {I, X, Y, Z}, optionally separated by spaces and
    optionally prefixed by a sign/phase token (+, -, i, -i).  For d > 2 the
    grammar is whitespace-separated site tokens ``w[a,b]`` (meaning X^a Z^b)
    or ``I``, optionally prefixed by ``w^k`` for a global phase.
    """
    raw = text.strip()
    if not raw:
        raise ValueError("empty Pauli string")
    phase_exp = 0
    if d == 2:
        compact = raw.replace(" ", "").replace("\t", "").upper()
        if compact.startswith("+"):
            compact = compact[1:]
        # a leading sign or explicit i-phase; "-I" alone would be ambiguous
        # with the identity letter, so phases use "-", "i*", "-i*"
        if compact.startswith("-I*"):
            phase_exp, compact = 3, compact[3:]
        elif compact.startswith("I*"):
            phase_exp, compact = 1, compact[2:]
        elif compact.startswith("-"):
            phase_exp, compact = 2, compact[1:]
        xs, zs = [], []
        for ch in compact:
            if ch not in _QUBIT_LETTERS:
                raise ValueError(f"invalid Pauli letter {ch!r}")
            a, b = _QUBIT_LETTERS[ch]
            xs.append(a)
            zs.append(b)
            if ch == "Y":
                phase_exp += 1
        if n is not None and len(xs) != n:
            raise ValueError(f"expected {n} sites, got {len(xs)}")
        return WeylString(2, tuple(xs), tuple(zs), phase_exp)

    tokens = raw.split()
    if tokens and tokens[0].startswith("w^"):
        phase_exp = int(tokens[0][2:])
        tokens = tokens[1:]
    xs, zs = [], []
    for tok in tokens:
        if tok in ("I", "i"):
            xs.append(0)
            zs.append(0)
            continue
        if not (tok.startswith("w[") and tok.endswith("]")):
            raise ValueError(f"invalid site token {tok!r}")
        try:
            a_s, b_s = tok[2:-1].split(",")
            a, b = int(a_s), int(b_s)
        except ValueError as exc:
            raise ValueError(f"invalid site token {tok!r}") from exc
        if not (0 <= a < d and 0 <= b < d):
            raise ValueError(f"exponent out of range in {tok!r} for d={d}")
        xs.append(a)
        zs.append(b)
    if not xs:
        raise ValueError("empty Pauli string")
    if n is not None and len(xs) != n:
        raise ValueError(f"expected {n} sites, got {len(xs)}")
    return WeylString(d, tuple(xs), tuple(zs), phase_exp)


def format_pauli(w: WeylString) -> str:
    """Canonical text form; parse_pauli(format_pauli(w)) == w."""
    if w.d == 2:
        letters = []
        residual = w.phase_exp
        for a, b in zip(w.x, w.z):
            letters.append(_LETTER_OF[(a, b)])
            if (a, b) == (1, 1):
                residual -= 1
        prefix = {0: "", 1: "i*", 2: "-", 3: "-i*"}[residual % 4]
        return prefix + "".join(letters)
    site = " ".join(
        "I" if (a, b) == (0, 0) else f"w[{a},{b}]" for a, b in zip(w.x, w.z)
    )
    if w.phase_exp:
        return f"w^{w.phase_exp} {site}"
    return site


def _check_compatible(a: WeylString, b: WeylString) -> None:
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: d={a.d} vs d={b.d}")
    if a.n != b.n:
        raise ValueError(f"site-count mismatch: n={a.n} vs n={b.n}")


def multiply(a: WeylString, b: WeylString) -> WeylString:
    """Exact operator product a * b.

    Componentwise the exponents add mod d; commuting b's X block through
    a's Z block (Z X = omega X Z) contributes z_a . x_b powers of omega,
    which for qubits is 2 * (z_a . x_b) powers of i.
    """
    _check_compatible(a, b)
    d = a.d
    cross = sum(za * xb for za, xb in zip(a.z, b.x))
    if d == 2:
        pe = a.phase_exp + b.phase_exp + 2 * cross
    else:
        pe = a.phase_exp + b.phase_exp + cross
    x = tuple((xa + xb) % d for xa, xb in zip(a.x, b.x))
    z = tuple((za + zb) % d for za, zb in zip(a.z, b.z))
    return WeylString(d, x, z, pe)


def power(a: WeylString, j: int) -> WeylString:
    """a**j for j >= 0 by repeated exact multiplication."""
    out = identity_string(a.n, a.d)
    for _ in range(j):
        out = multiply(out, a)
    return out


def symplectic_form(a: WeylString, b: WeylString) -> int:
    """<a, b> = sum_j (x_a z_b - z_a x_b) mod d; zero iff a, b commute."""
    _check_compatible(a, b)
    tot = sum(
        xa * zb - za * xb for xa, za, xb, zb in zip(a.x, a.z, b.x, b.z)
    )
    return tot % a.d


def commutes(a: WeylString, b: WeylString) -> bool:
    return symplectic_form(a, b) == 0


def is_hermitian(a: WeylString) -> bool:
    """Symbolic Hermiticity test.

    For qubits: (X^x Z^z)^dag = (-1)^(x.z) X^x Z^z sitewise, so the operator
    is Hermitian iff phase_exp + x.z is even.  For d > 2 the only Hermitian
    Weyl strings are real multiples of the identity.
    """
    if a.d == 2:
        xdz = sum(xa * za for xa, za in zip(a.x, a.z))
        return (a.phase_exp + xdz) % 2 == 0
    return a.is_identity() and a.phase_exp == 0


def weight(a: WeylString) -> int:
    """Number of non-identity sites."""
    return sum(1 for xa, za in zip(a.x, a.z) if (xa, za) != (0, 0))


def identity_count(a: WeylString) -> int:
    return a.n - weight(a)


def group_span(
    gens: Sequence[WeylString],
    cap: int = DEFAULT_SPAN_CAP,
    check_commuting: bool = True,
    n: int | None = None,
    d: int = 2,
) -> list[WeylString]:
    """All d^m products G_1^{j_1} ... G_m^{j_m} with exact phases.

    The result always contains the identity (the empty product).  For an
    independent set the d^m elements are pairwise distinct up to phase.
    For an empty generator list the shape must be given via n (and d).
    """
    gens = list(gens)
    if not gens:
        if n is None:
            raise ValueError("group_span of an empty set needs n (and d)")
        return [identity_string(n, d)]
    d, n = gens[0].d, gens[0].n
    if any(g.d != d or g.n != n for g in gens):
        raise ValueError("generators must share d and n")
    if d ** len(gens) > cap:
        raise ValueError(
            f"span size d^m = {d}^{len(gens)} exceeds cap {cap}"
        )
    if check_commuting:
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if not commutes(gens[i], gens[j]):
                    raise ValueError(
                        f"generators {i} and {j} do not commute"
                    )
    span = [identity_string(n, d)]
    for g in gens:
        powers = [identity_string(n, d)]
        for _ in range(d - 1):
            powers.append(multiply(powers[-1], g))
        span = [multiply(s, p) for p in powers for s in span]
    return span


def symplectic_rank(gens: Sequence[WeylString]) -> int:
    """Rank of the (x|z) vectors over Z_d; requires prime d."""
    gens = list(gens)
    if not gens:
        return 0
    d = gens[0].d
    if not _is_prime(d):
        raise ValueError(
            f"symbolic rank needs prime d (got {d}); use a dense check"
        )
    rows = [np.array(g.x + g.z, dtype=np.int64) % d for g in gens]
    mat = np.array(rows) % d
    return _rank_mod_p(mat, d)


def independent(gens: Sequence[WeylString]) -> bool:
    """True iff the symplectic vectors are linearly independent over Z_d."""
    gens = list(gens)
    return symplectic_rank(gens) == len(gens)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def _rank_mod_p(mat: np.ndarray, p: int) -> int:
    a = mat.copy() % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if a[r, c] % p:
                piv = r
                break
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), p - 2, p) if p > 2 else 1
        a[rank] = (a[rank] * inv) % p
        for r in range(rows):
            if r != rank and a[r, c] % p:
                a[r] = (a[r] - a[r, c] * a[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


# -- dense / sparse realizations -------------------------------------------

def _site_matrix(d: int, a: int, b: int) -> np.ndarray:
    """Dense d x d matrix of X^a Z^b."""
    omega = cmath.exp(2j * cmath.pi / d)
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + a) % d, j] = omega ** (b * j)
    return m


def to_dense(w: WeylString) -> np.ndarray:
    """Dense matrix of the operator, phase included."""
    out = np.array([[w.phase]], dtype=complex)
    for a, b in zip(w.x, w.z):
        out = np.kron(out, _site_matrix(w.d, a, b))
    return out


def to_sparse(w: WeylString):
    """The operator as (cols, vals): entry [perm[j], j] = vals[j].

    Every Weyl string is a phased permutation matrix; this avoids building
    d^n x d^n dense matrices for large n.
    """
    d, n = w.d, w.n
    dim = d ** n
    idx = np.arange(dim)
    digits = np.empty((n, dim), dtype=np.int64)
    rem = idx
    for site in range(n - 1, -1, -1):
        digits[site] = rem % d
        rem = rem // d
    omega_pow = np.zeros(dim, dtype=np.int64)
    row = np.zeros(dim, dtype=np.int64)
    for site in range(n):
        omega_pow += w.z[site] * digits[site]
        digits[site] = (digits[site] + w.x[site]) % d
    for site in range(n):
        row = row * d + digits[site]
    if d == 2:
        vals = (1j ** w.phase_exp) * np.where(omega_pow % 2, -1.0 + 0j, 1.0 + 0j)
    else:
        omega = cmath.exp(2j * cmath.pi / d)
        vals = (omega ** w.phase_exp) * omega ** (omega_pow % d)
    return row, vals


# -- generator file format --------------------------------------------------

def parse_generator_lines(lines: Iterable[str]) -> tuple[int, int, list[WeylString]]:
    """Parse the text format: header ``d=<int> n=<int>``, one string per
    line, ``#`` comments."""
    d = n = None
    gens: list[WeylString] = []
    for lineno, rawline in enumerate(lines, start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if d is None:
            parts = dict(tok.split("=") for tok in line.split())
            try:
                d, n = int(parts["d"]), int(parts["n"])
            except (KeyError, ValueError) as exc:
                raise ValueError(
                    f"line {lineno}: expected header 'd=<int> n=<int>'"
                ) from exc
            continue
        try:
            gens.append(parse_pauli(line, d=d, n=n))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if d is None:
        raise ValueError("missing 'd=<int> n=<int>' header")
    return d, n, gens


def read_generator_file(path) -> tuple[int, int, list[WeylString]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_generator_lines(fh)


def write_generator_file(path, gens: Sequence[WeylString], comment: str = "") -> None:
    gens = list(gens)
    if not gens:
        raise ValueError("cannot write an empty generator set")
    d, n = gens[0].d, gens[0].n
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"d={d} n={n}\n")
        for g in gens:
            fh.write(format_pauli(g) + "\n")

"""
Truncated mixed q-Fock space over R^N.

Degree-n tensors are stored as flat float64 arrays of length ``N**n`` in
C order, so the flat index of a word is its mixed-radix value with the first
letter most significant. Letters are 1-based at the public surface
(``e_1 .. e_N``) and 0-based inside arrays.

The deformed inner product on degree n is ``<u, P_n v>`` where ``P_n`` is the
sum over all permutations of the quasi-multiplicative lift of the
Yang-Baxter operator ``T(e_i x e_j) = q_ij e_j x e_i``.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    ArgumentError,
    CapabilityError,
    DefinitenessError,
    PreconditionError,
    StateError,
)
from .perms import all_perms, reduced_word

__all__ = [
    "QSpec", "FockVector", "GramCache",
    "word_index", "index_word", "word_table",
    "yang_baxter_site", "symmetrizer_bruteforce", "symmetrizer_recursive",
    "deformed_inner", "deformed_norm", "positivity_report",
    "deformed_operator_norm", "default_budget", "estimate_gram_bytes",
    "BRUTE_FORCE_CEILING", "POSITIVITY_FLOOR",
]

BRUTE_FORCE_CEILING = 7
# Cholesky pivot floor, relative to the largest diagonal entry of P_n
POSITIVITY_FLOOR = 1e-12
DEFAULT_BUDGET = 2 * 1024**3
BUDGET_ENV = "QFOCK_MEMORY_BUDGET"


def default_budget() -> int:
    """Memory budget in bytes; ``$QFOCK_MEMORY_BUDGET`` overrides 2 GiB."""
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# deformation matrix

@dataclass(frozen=True, eq=False)
class QSpec:
    """Symmetric deformation matrix ``Q = (q_ij)`` with ``max |q_ij| < 1``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 1:
            raise ArgumentError(f"Q must be a nonempty square matrix, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ArgumentError("Q has non-finite entries")
        if not np.array_equal(q, q.T):
            i, j = np.unravel_index(np.argmax(np.abs(q - q.T)), q.shape)
            raise ArgumentError(
                f"Q must be symmetric: q[{i + 1},{j + 1}]={q[i, j]!r} != q[{j + 1},{i + 1}]={q[j, i]!r}")
        qmax = float(np.max(np.abs(q)))
        if not qmax < 1.0:
            raise ArgumentError(f"need q = max|q_ij| < 1, got {qmax!r}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def N(self) -> int:
        return self.q.shape[0]

    @property
    def q_max(self) -> float:
        return float(np.max(np.abs(self.q)))

    @classmethod
    def uniform(cls, N: int, q: float) -> "QSpec":
        return cls(np.full((N, N), float(q)))

    @classmethod
    def random(cls, N: int, rng: np.random.Generator, bound: float = 0.9) -> "QSpec":
        """Entries uniform in ``(-bound, bound)``, symmetrized by mirroring the upper triangle."""
        a = rng.uniform(-bound, bound, size=(N, N))
        upper = np.triu(a)
        return cls(upper + np.triu(a, 1).T)

    def digest(self) -> str:
        return hashlib.sha256(self.q.tobytes() + str(self.q.shape).encode()).hexdigest()

    def __repr__(self):
        return f"QSpec(N={self.N}, q_max={self.q_max:.6g})"


# ---------------------------------------------------------------------------
# words

def _check_N(N: int):
    if N < 1:
        raise ArgumentError(f"N must be >= 1, got {N}")


def word_index(word: Sequence[int], N: int) -> int:
    """Mixed-radix index of a word of 1-based letters.

    >>> word_index((2, 1), 2)
    2
    """
    _check_N(N)
    k = 0
    for letter in word:
        if not 1 <= letter <= N:
            raise ArgumentError(f"letter {letter} out of range 1..{N}")
        k = k * N + (letter - 1)
    return k


def index_word(n: int, k: int, N: int) -> tuple[int, ...]:
    """Inverse of :func:`word_index` on degree ``n``.

    >>> index_word(2, 8, 3)
    (3, 3)
    """
    _check_N(N)
    if n < 0:
        raise ArgumentError(f"degree must be >= 0, got {n}")
    if not 0 <= k < N**n:
        raise ArgumentError(f"index {k} out of range [0, {N**n}) for degree {n}")
    letters = []
    for _ in range(n):
        k, r = divmod(k, N)
        letters.append(r + 1)
    return tuple(reversed(letters))


def word_table(N: int, n: int) -> np.ndarray:
    """All degree-``n`` words as rows of 0-based letters, in index order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.intp)
    grids = np.indices((N,) * n).reshape(n, -1)
    return np.ascontiguousarray(grids.T)


# ---------------------------------------------------------------------------
# vectors

@dataclass(frozen=True, eq=False)
class FockVector:
    """Coefficients of a vector in the truncation ``F_0 + ... + F_d``.

    ``blocks[n]`` is a read-only flat array of length ``N**n``.
    """

    N: int
    blocks: tuple

    def __post_init__(self):
        _check_N(self.N)
        frozen = []
        for n, b in enumerate(self.blocks):
            a = np.array(b, dtype=np.float64).reshape(-1)
            if a.size != self.N**n:
                raise ArgumentError(f"block {n} has length {a.size}, expected {self.N**n}")
            if not np.all(np.isfinite(a)):
                raise ArgumentError(f"block {n} has non-finite entries")
            a.setflags(write=False)
            frozen.append(a)
        if not frozen:
            raise ArgumentError("a FockVector needs at least the degree-0 block")
        object.__setattr__(self, "blocks", tuple(frozen))

    # construction -----------------------------------------------------------
    @classmethod
    def zeros(cls, N: int, max_degree: int) -> "FockVector":
        return cls(N, tuple(np.zeros(N**n) for n in range(max_degree + 1)))

    @classmethod
    def vacuum(cls, N: int, max_degree: int) -> "FockVector":
        return cls.zeros(N, max_degree).with_block(0, np.ones(1))

    @classmethod
    def basis(cls, word: Sequence[int], N: int, max_degree: int) -> "FockVector":
        n = len(word)
        if n > max_degree:
            raise ArgumentError(f"word of degree {n} exceeds max_degree {max_degree}")
        b = np.zeros(N**n)
        b[word_index(word, N)] = 1.0
        return cls.zeros(N, max_degree).with_block(n, b)

    @classmethod
    def tensor(cls, vectors: Sequence[Sequence[float]], N: int, max_degree: int) -> "FockVector":
        """Simple tensor ``xi_1 x ... x xi_m`` of vectors in R^N."""
        m = len(vectors)
        if m > max_degree:
            raise ArgumentError(f"tensor of degree {m} exceeds max_degree {max_degree}")
        b = np.ones(1)
        for v in vectors:
            v = np.asarray(v, dtype=np.float64)
            if v.shape != (N,):
                raise ArgumentError(f"factor has shape {v.shape}, expected ({N},)")
            b = np.kron(b, v)
        return cls.zeros(N, max_degree).with_block(m, b)

    @classmethod
    def tensor_power(cls, xi: Sequence[float], n: int, max_degree: int) -> "FockVector":
        xi = np.asarray(xi, dtype=np.float64)
        return cls.tensor([xi] * n, xi.size, max_degree)

    @classmethod
    def random(cls, N: int, max_degree: int, rng: np.random.Generator,
               top_degree: int | None = None) -> "FockVector":
        """Standard normal coefficients on degrees ``0..top_degree``."""
        top = max_degree if top_degree is None else top_degree
        return cls(N, tuple(rng.standard_normal(N**n) if n <= top else np.zeros(N**n)
                            for n in range(max_degree + 1)))

    def with_block(self, n: int, values) -> "FockVector":
        blocks = list(self.blocks)
        blocks[n] = values
        return FockVector(self.N, tuple(blocks))

    # inspection -------------------------------------------------------------
    @property
    def max_degree(self) -> int:
        return len(self.blocks) - 1

    @property
    def top_degree(self) -> int:
        """Highest degree with a nonzero coefficient, ``-1`` for the zero vector."""
        for n in range(self.max_degree, -1, -1):
            if np.any(self.blocks[n]):
                return n
        return -1

    def block(self, n: int) -> np.ndarray:
        return self.blocks[n]

    def tensor_block(self, n: int) -> np.ndarray:
        return self.blocks[n].reshape((self.N,) * n)

    def coefficient(self, word: Sequence[int]) -> float:
        return float(self.blocks[len(word)][word_index(word, self.N)])

    def free_norm(self) -> float:
        return float(math.sqrt(sum(float(b @ b) for b in self.blocks)))

    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks)

    def truncate(self, max_degree: int) -> "FockVector":
        """Same vector with a different truncation degree (dropping or padding blocks)."""
        blocks = list(self.blocks[: max_degree + 1])
        blocks += [np.zeros(self.N**n) for n in range(len(blocks), max_degree + 1)]
        return FockVector(self.N, tuple(blocks))

    # arithmetic -------------------------------------------------------------
    def _check_compatible(self, other: "FockVector"):
        if not isinstance(other, FockVector):
            raise TypeError(f"expected FockVector, got {type(other).__name__}")
        if other.N != self.N or other.max_degree != self.max_degree:
            raise ArgumentError(
                f"incompatible vectors: (N={self.N}, d={self.max_degree}) vs "
                f"(N={other.N}, d={other.max_degree})")

    def __add__(self, other: "FockVector") -> "FockVector":
        self._check_compatible(other)
        return FockVector(self.N, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "FockVector") -> "FockVector":
        self._check_compatible(other)
        return FockVector(self.N, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, c: float) -> "FockVector":
        return FockVector(self.N, tuple(c * b for b in self.blocks))

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "FockVector":
        return FockVector(self.N, tuple(b / c for b in self.blocks))

    def __neg__(self) -> "FockVector":
        return self * -1.0

    def __repr__(self):
        return f"FockVector(N={self.N}, max_degree={self.max_degree}, top_degree={self.top_degree})"


# ---------------------------------------------------------------------------
# Yang-Baxter operator

def _apply_T(q: np.ndarray, n: int, site: int, x: np.ndarray) -> np.ndarray:
    """T acting on tensor positions ``site-1, site`` of a ``(N**n, *batch)`` array."""
    N = q.shape[0]
    batch = x.shape[1:]
    t = x.reshape((N,) * n + batch)
    a = site - 1
    swapped = np.swapaxes(t, a, a + 1)
    # out[.., a, b, ..] = q[b, a] * x[.., b, a, ..]
    w = q.T.reshape((1,) * a + (N, N) + (1,) * (n - a - 2 + len(batch)))
    return (swapped * w).reshape((N**n,) + batch)


def yang_baxter_site(q: QSpec, n: int, i: int, v: np.ndarray) -> np.ndarray:
    """Apply ``T_i = 1^(i-1) x T x 1^(n-i-1)`` to degree-``n`` coefficients.

    ``v`` may carry trailing batch axes (columns of a matrix).
    """
    if n < 2 or not 1 <= i <= n - 1:
        raise ArgumentError(f"site {i} out of range 1..{n - 1} on degree {n}")
    v = np.asarray(v, dtype=np.float64)
    if v.shape[0] != q.N**n:
        raise ArgumentError(f"expected leading dimension {q.N**n}, got {v.shape[0]}")
    return _apply_T(q.q, n, i, v)


# ---------------------------------------------------------------------------
# symmetrizers

def estimate_gram_bytes(N: int, n: int) -> int:
    """Peak bytes for one degree: P_n, its factor and two work matrices."""
    return 4 * 8 * N ** (2 * n)


def _check_budget(N: int, n: int, budget: int | None):
    budget = default_budget() if budget is None else budget
    need = estimate_gram_bytes(N, n)
    if need > budget:
        raise CapabilityError(
            f"degree {n} with N={N} needs about {need} bytes "
            f"({N**n}x{N**n} matrices), over the budget of {budget} bytes")


def symmetrizer_bruteforce(q: QSpec, n: int, method: str = "bubble",
                           ceiling: int = BRUTE_FORCE_CEILING) -> np.ndarray:
    """Sum of ``phi(sigma)`` over all ``n!`` permutations.

    Each ``phi(sigma)`` is the product of ``T_i`` along a reduced word of
    ``sigma`` (chosen by ``method``); it is a monomial matrix, so it is built by
    tracking, for every basis word, where it lands and with what weight.
    Permutations are summed in lexicographic order.
    """
    if n < 0:
        raise ArgumentError(f"degree must be >= 0, got {n}")
    if n > ceiling:
        raise CapabilityError(
            f"brute-force symmetrizer limited to n <= {ceiling} ({n}! terms requested); "
            "use symmetrizer_recursive")
    N = q.N
    dim = N**n
    P = np.zeros((dim, dim))
    if n == 0:
        P[0, 0] = 1.0
        return P
    words0 = word_table(N, n)
    cols = np.arange(dim)
    radix = N ** np.arange(n - 1, -1, -1)
    for perm in all_perms(n):
        letters = words0.copy()
        coef = np.ones(dim)
        # operator product T_i1 ... T_ik: rightmost factor acts first
        for site in reversed(reduced_word(perm, method)):
            a, b = letters[:, site - 1].copy(), letters[:, site].copy()
            coef *= q.q[a, b]
            letters[:, site - 1], letters[:, site] = b, a
        P[letters @ radix, cols] += coef
    return P


def symmetrizer_recursive(q: QSpec, n: int, prev: np.ndarray | None = None,
                          budget: int | None = None) -> np.ndarray:
    """``P_n = (1 x P_{n-1}) R_n`` with ``R_n = 1 + T_1 + T_1T_2 + ... + T_1...T_{n-1}``.

    ``prev`` is ``P_{n-1}``; when omitted the recursion runs from ``P_0``.
    The result is symmetrized to remove rounding asymmetry.
    """
    if n < 0:
        raise ArgumentError(f"degree must be >= 0, got {n}")
    N = q.N
    _check_budget(N, n, budget)
    if n == 0:
        return np.ones((1, 1))
    if n == 1:
        return np.eye(N)
    if prev is None:
        prev = symmetrizer_recursive(q, n - 1, budget=budget)
    dim = N**n
    if prev.shape != (N ** (n - 1),) * 2:
        raise ArgumentError(f"prev has shape {prev.shape}, expected degree {n - 1}")
    # Horner form: R = 1 + T_1 (1 + T_2 (1 + ... (1 + T_{n-1})))
    R = np.eye(dim)
    for site in range(n - 1, 0, -1):
        R = _apply_T(q.q, n, site, R)
        R[np.diag_indices(dim)] += 1.0
    # (1 x P_{n-1}) acts on the trailing n-1 tensor factors
    R3 = R.reshape(N, N ** (n - 1), dim)
    P = np.matmul(prev, R3).reshape(dim, dim)
    return 0.5 * (P + P.T)


# ---------------------------------------------------------------------------
# Gram cache

@dataclass
class _GramEntry:
    P: np.ndarray
    L: np.ndarray
    min_eig: float | None = None


@dataclass
class GramCache:
    """Per-degree symmetrizers ``P_n`` with Cholesky factors ``P_n = L_n L_n^T``.

    Degrees are sealed in order by :meth:`build`; lookups of degrees that
    were never built raise :class:`StateError`.
    """

    q: QSpec
    max_degree: int = 0
    budget: int | None = None
    _entries: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.budget is None:
            self.budget = default_budget()
        self.build(self.max_degree)

    @property
    def N(self) -> int:
        return self.q.N

    @property
    def degree(self) -> int:
        """Highest degree currently sealed."""
        return len(self._entries) - 1

    def covers(self, n: int) -> bool:
        return 0 <= n < len(self._entries)

    def build(self, d: int) -> "GramCache":
        for n in range(len(self._entries), d + 1):
            prev = self._entries[-1].P if self._entries else None
            P = symmetrizer_recursive(self.q, n, prev=prev, budget=self.budget)
            self._entries.append(_GramEntry(P, _cholesky(P, n)))
        self.max_degree = max(self.max_degree, d)
        return self

    def _entry(self, n: int) -> _GramEntry:
        if not self.covers(n):
            raise StateError(f"Gram cache holds degrees 0..{self.degree}, degree {n} requested")
        return self._entries[n]

    def P(self, n: int) -> np.ndarray:
        return self._entry(n).P

    def L(self, n: int) -> np.ndarray:
        return self._entry(n).L

    def min_eig(self, n: int) -> float:
        e = self._entry(n)
        if e.min_eig is None:
            e.min_eig = float(np.linalg.eigvalsh(e.P)[0])
        return e.min_eig

    # optional on-disk cache -------------------------------------------------
    FILE_VERSION = 1

    def save(self, path) -> None:
        """Write all sealed degrees to an ``.npz`` file keyed by the Q digest."""
        arrays = {f"P{n}": e.P for n, e in enumerate(self._entries)}
        arrays.update({f"L{n}": e.L for n, e in enumerate(self._entries)})
        np.savez(path, version=np.array(self.FILE_VERSION), digest=np.array(self.q.digest()),
                 degree=np.array(self.degree), **arrays)

    @classmethod
    def load(cls, q: QSpec, path, budget: int | None = None) -> "GramCache":
        with np.load(path) as f:
            if int(f["version"]) != cls.FILE_VERSION:
                raise StateError(f"unsupported Gram cache file version {int(f['version'])}")
            if str(f["digest"]) != q.digest():
                raise StateError("Gram cache file was written for a different Q")
            cache = cls(q, 0, budget)
            cache._entries = [_GramEntry(f[f"P{n}"], f[f"L{n}"]) for n in range(int(f["degree"]) + 1)]
        cache.max_degree = cache.degree
        return cache


def _cholesky(P: np.ndarray, n: int) -> np.ndarray:
    floor = POSITIVITY_FLOOR * float(np.max(np.diag(P)))
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        raise DefinitenessError(f"P_{n} is not numerically positive definite") from None
    pivot = float(np.min(np.diag(L)) ** 2)
    if pivot <= floor:
        raise DefinitenessError(
            f"P_{n} Cholesky pivot {pivot!r} is below the floor {floor!r}")
    return L


def positivity_report(cache: GramCache, n: int) -> float:
    """Smallest eigenvalue of ``P_n``; raises if it is not safely positive."""
    lam = cache.min_eig(n)
    floor = POSITIVITY_FLOOR * float(np.max(np.diag(cache.P(n))))
    if lam <= floor:
        raise DefinitenessError(f"P_{n} has smallest eigenvalue {lam!r} <= {floor!r}")
    return lam


# ---------------------------------------------------------------------------
# inner products and norms

def deformed_inner(cache: GramCache, u: FockVector, v: FockVector) -> float:
    """``sum_n <u_n, P_n v_n>``; distinct degrees are orthogonal."""
    u._check_compatible(v)
    if u.N != cache.N:
        raise ArgumentError(f"vector has N={u.N}, cache has N={cache.N}")
    total = 0.0
    for n, (a, b) in enumerate(zip(u.blocks, v.blocks)):
        if not (np.any(a) and np.any(b)):
            continue
        total += float(a @ (cache.P(n) @ b))
    return total


def deformed_norm(cache: GramCache, v: FockVector) -> float:
    return math.sqrt(max(deformed_inner(cache, v, v), 0.0))


def deformed_operator_norm(cache: GramCache, A: np.ndarray, n_in: int, n_out: int,
                           free: bool = False) -> float:
    """Operator norm of a degree-``n_in`` to degree-``n_out`` block ``A``.

    With respect to the deformed inner products this is the spectral norm of
    ``L_out^T A L_in^{-T}``; ``free=True`` reports the plain spectral norm.
    """
    A = np.asarray(A, dtype=np.float64)
    N = cache.N
    if A.shape != (N**n_out, N**n_in):
        raise ArgumentError(f"block has shape {A.shape}, expected {(N**n_out, N**n_in)}")
    if free:
        return float(np.linalg.norm(A, 2))
    X = cache.L(n_out).T @ A
    Y = solve_triangular(cache.L(n_in), X.T, lower=True).T
    return float(np.linalg.norm(Y, 2))


def gram_spectrum(cache: GramCache, n: int) -> tuple[float, float]:
    """Smallest and largest eigenvalue of ``P_n``."""
    w = np.linalg.eigvalsh(cache.P(n))
    return float(w[0]), float(w[-1])


def iter_words(N: int, n: int) -> Iterable[tuple[int, ...]]:
    for row in word_table(N, n):
        yield tuple(int(a) + 1 for a in row)

"""
The generator subalgebra ``M = W*(W(xi0))`` at the level of vacuum vectors.

``M Omega`` spans the one-letter Fock space ``F_Q(R xi0)``, which has the
single direction ``xi0^n`` in each degree. The conditional expectation onto
``M`` therefore acts on ``a Omega`` as a per-degree rank-one projection, and
every quantity of the mixing experiments reduces to Wick operators applied
to vectors followed by that projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ArgumentError, PreconditionError
from .fock import FockVector, GramCache, QSpec, deformed_inner, deformed_norm
from .operators import LEFT, RIGHT, LadderWord, Truncation, _partial_degrees, apply_ladder_word, lemma3_bound_probe
from .wick import v_basis, wick_apply

__all__ = [
    "MODES", "ExperimentSpec", "ResultRow", "DecayFit", "ExperimentResult",
    "project_generator", "conditional_expectation_vector",
    "mixing_vectors", "mixing_term", "mixing_term_via_right_wick", "route_residual",
    "zeta_probe", "decay_fit", "mixing_sum", "run_experiment", "orthogonal_letters",
]

MODES = ("mixing_sum", "zeta_probe", "lemma3_probe")
ORTHO_TOL = 1e-12


def _letter_vector(letter, N: int) -> np.ndarray:
    if isinstance(letter, (int, np.integer)) and not isinstance(letter, bool):
        if not 1 <= letter <= N:
            raise ArgumentError(f"letter {letter} out of range 1..{N}")
        e = np.zeros(N)
        e[letter - 1] = 1.0
        return e
    v = np.asarray(letter, dtype=np.float64)
    if v.shape != (N,):
        raise ArgumentError(f"word letter {letter!r} is neither a basis index nor a vector in R^{N}")
    return v


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    """One mixing-decay experiment.

    ``x_word``/``y_word`` list the factors of ``x = W(xi_1 x .. x xi_m)`` and
    ``y = W(eta_1 x .. x eta_k)``; each factor is a 1-based basis letter or
    an explicit vector in R^N. ``xi0`` is normalized on ingestion.
    """

    q: QSpec
    xi0: np.ndarray
    x_word: tuple = ()
    y_word: tuple = ()
    n_min: int = 0
    n_max: int = 6
    max_degree: int = 8
    mode: str = "mixing_sum"
    ladder: LadderWord | None = None
    a_word: LadderWord | None = None
    b_word: LadderWord | None = None
    window: tuple | None = None
    name: str = "experiment"
    strict: bool = True

    def __post_init__(self):
        N = self.q.N
        if self.mode not in MODES:
            raise PreconditionError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        xi0 = np.asarray(self.xi0, dtype=np.float64)
        if xi0.shape != (N,):
            raise PreconditionError(f"xi0 has shape {xi0.shape}, expected ({N},)")
        nrm = float(np.linalg.norm(xi0))
        if not nrm > 0:
            raise PreconditionError("xi0 must be nonzero")
        xi0 = xi0 / nrm
        xi0.setflags(write=False)
        object.__setattr__(self, "xi0", xi0)
        object.__setattr__(self, "x_word", tuple(_letter_vector(a, N) for a in self.x_word))
        object.__setattr__(self, "y_word", tuple(_letter_vector(a, N) for a in self.y_word))
        if not 0 <= self.n_min <= self.n_max:
            raise PreconditionError(f"need 0 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if self.window is not None:
            lo, hi = self.window
            if hi - lo + 1 < 3:
                raise PreconditionError(f"fit window {self.window} has fewer than 3 degrees")
        need = self.required_degree() if self.strict else self.n_max
        if need > self.max_degree:
            raise PreconditionError(
                f"experiment '{self.name}' needs degree {need} but max_degree is {self.max_degree} "
                f"(mode {self.mode}, n_max {self.n_max})")

    @property
    def m(self) -> int:
        return len(self.x_word)

    @property
    def k(self) -> int:
        return len(self.y_word)

    def probe_word(self) -> LadderWord:
        if self.mode == "zeta_probe":
            if self.ladder is None:
                raise PreconditionError("zeta_probe needs a ladder word")
            return self.ladder
        if self.a_word is None or self.b_word is None:
            raise PreconditionError("lemma3_probe needs a_word and b_word")
        return LadderWord(self.a_word.symbols + self.b_word.symbols)

    def required_degree(self) -> int:
        if self.mode == "mixing_sum":
            return self.m + self.n_max + self.k
        return self.n_max + max(0, max(_partial_degrees(self.probe_word())))


@dataclass
class ResultRow:
    n: int
    term: float
    partial_sum: float | None = None
    ratio: float | None = None
    zeta_norm_ratio: float | None = None
    q_power: float | None = None
    lost_mass: float = 0.0


@dataclass(frozen=True)
class DecayFit:
    """Geometric fit ``value ~ C_hat * fitted_rate**n`` over ``window``."""

    fitted_rate: float
    C_hat: float
    window: tuple
    exact_zero: bool = False
    points: int = 0

    def bound(self, n: int, rate: float | None = None) -> float:
        r = self.fitted_rate if rate is None else rate
        return self.C_hat * r**n


class ExperimentResult(NamedTuple):
    rows: list
    fit: DecayFit
    tail_bound: float


# ---------------------------------------------------------------------------
# projection and conditional expectation

def project_generator(cache: GramCache, xi0, v: FockVector) -> FockVector:
    """Orthogonal projection onto ``F_Q(R xi0)``: degree by degree onto ``xi0^n``."""
    xi0 = np.asarray(xi0, dtype=np.float64)
    if xi0.shape != (v.N,):
        raise ArgumentError(f"xi0 has shape {xi0.shape}, expected ({v.N},)")
    blocks = []
    p = np.ones(1)
    for n, b in enumerate(v.blocks):
        if n > 0:
            p = np.kron(p, xi0)
        if not np.any(b):
            blocks.append(np.zeros_like(b))
            continue
        Pn = cache.P(n)
        Pp = Pn @ p
        blocks.append((float(Pp @ b) / float(p @ Pp)) * p)
    return FockVector(v.N, tuple(blocks))


def conditional_expectation_vector(q: QSpec, cache: GramCache, xi0,
                                   a_applied_to_vacuum: FockVector) -> FockVector:
    """``E_M(a) Omega`` from ``a Omega``; also the Wick symbol of ``E_M(a)``."""
    return project_generator(cache, xi0, a_applied_to_vacuum)


def orthogonal_letters(xi0, letters: Iterable[int], tol: float = ORTHO_TOL) -> list[int]:
    xi0 = np.asarray(xi0, dtype=np.float64)
    return [a for a in letters if abs(xi0[a - 1]) <= tol]


# ---------------------------------------------------------------------------
# mixing terms

def _symbols(spec: ExperimentSpec, cache: GramCache, n: int):
    N, d = spec.q.N, spec.max_degree
    cache.build(d)
    x = FockVector.tensor(spec.x_word, N, d)
    y = FockVector.tensor(spec.y_word, N, d)
    vn = v_basis(spec.q, cache, spec.xi0, n).symbol.truncate(d)
    return x, y, vn


def _check_n(spec: ExperimentSpec, n: int):
    if spec.mode != "mixing_sum":
        raise PreconditionError(f"experiment '{spec.name}' is a {spec.mode}, not a mixing_sum")
    if spec.strict and spec.m + n + spec.k > spec.max_degree:
        raise PreconditionError(
            f"m + n + k = {spec.m + n + spec.k} exceeds max_degree {spec.max_degree}")


def mixing_vectors(spec: ExperimentSpec, cache: GramCache, n: int, route: str = "direct",
                   truncation: Truncation | None = None) -> tuple[FockVector, FockVector]:
    """``(E(x v_n y) Omega, E(x) v_n E(y) Omega)``.

    ``route='direct'`` applies ``W(x) W(v_n) W(y)`` to the vacuum;
    ``route='right'`` applies ``W(x) W_r(y)`` to ``v_n Omega``.
    For a lenient spec, mass dropped at the truncation accumulates in
    ``truncation.lost``.
    """
    _check_n(spec, n)
    q = spec.q
    tr = truncation if truncation is not None else Truncation(strict=spec.strict)
    x, y, vn = _symbols(spec, cache, n)
    ex = project_generator(cache, spec.xi0, x)
    ey = project_generator(cache, spec.xi0, y)
    omega = FockVector.vacuum(q.N, spec.max_degree)

    def compose(xs, ys):
        if route == "direct":
            u = wick_apply(q, LEFT, ys, omega, tr)
            u = wick_apply(q, LEFT, vn, u, tr)
            return wick_apply(q, LEFT, xs, u, tr)
        if route == "right":
            return wick_apply(q, LEFT, xs, wick_apply(q, RIGHT, ys, vn, tr), tr)
        raise ArgumentError(f"route must be 'direct' or 'right', got {route!r}")

    u1 = project_generator(cache, spec.xi0, compose(x, y))
    u2 = project_generator(cache, spec.xi0, compose(ex, ey))
    return u1, u2


def mixing_term(spec: ExperimentSpec, cache: GramCache, n: int) -> ResultRow:
    """``||E(x v_n y) - E(x) v_n E(y)||_2^2`` via three left Wick applications."""
    tr = Truncation(strict=spec.strict)
    u1, u2 = mixing_vectors(spec, cache, n, "direct", tr)
    diff = u1 - u2
    return ResultRow(n=n, term=max(deformed_inner(cache, diff, diff), 0.0), lost_mass=tr.lost)


def mixing_term_via_right_wick(spec: ExperimentSpec, cache: GramCache, n: int) -> float:
    """Same quantity through ``W(x) W_r(y) xi0^n / ||xi0^n||``."""
    u1, u2 = mixing_vectors(spec, cache, n, "right")
    diff = u1 - u2
    return max(deformed_inner(cache, diff, diff), 0.0)


def route_residual(spec: ExperimentSpec, cache: GramCache, n: int) -> float:
    """Relative deformed distance between the two routes' ``E(x v_n y) Omega``."""
    a, _ = mixing_vectors(spec, cache, n, "direct")
    b, _ = mixing_vectors(spec, cache, n, "right")
    scale = max(deformed_norm(cache, a), deformed_norm(cache, b))
    gap = deformed_norm(cache, a - b)
    return gap / scale if scale > 0 else gap


# ---------------------------------------------------------------------------
# probes

def zeta_probe(q: QSpec, cache: GramCache, xi0, ladder: LadderWord,
               n_range: Iterable[int], tol: float = ORTHO_TOL) -> list[ResultRow]:
    """``||P(ladder xi0^n)||_Q / ||xi0^n||_Q`` for each ``n``.

    ``ladder`` must have the shape ``l.. l*.. r.. r*..`` with at least one
    left and one right letter orthogonal to ``xi0``. When every such left
    letter sits among the left creations the projection vanishes identically
    and zeros are reported without computing.
    """
    xi0 = np.asarray(xi0, dtype=np.float64)
    xi0 = xi0 / np.linalg.norm(xi0)
    if not ladder.is_canonical:
        raise PreconditionError(f"ladder '{ladder}' is not of the form l.. l*.. r.. r*..")
    for s in ladder.symbols:
        if not 1 <= s.letter <= q.N:
            raise ArgumentError(f"letter {s.letter} out of range 1..{q.N}")
    left, right = ladder.left_part(), ladder.right_part()
    left_perp = [k for k, s in enumerate(left, 1) if abs(xi0[s.letter - 1]) <= tol]
    if not left_perp:
        raise PreconditionError(
            f"ladder '{ladder}' has no left letter orthogonal to xi0; add one with <e_i, xi0> = 0")
    if not any(abs(xi0[s.letter - 1]) <= tol for s in right):
        raise PreconditionError(
            f"ladder '{ladder}' has no right letter orthogonal to xi0; add one with <e_j, xi0> = 0")
    p = sum(1 for s in left if s.kind == "create")
    vanishes = max(left_perp) <= p

    extra = max(0, max(_partial_degrees(ladder)))
    rows = []
    partial = 0.0
    prev = None
    for n in n_range:
        if vanishes:
            r = 0.0
        else:
            d = n + extra
            cache.build(d)
            v = FockVector.tensor_power(xi0, n, d)
            z = project_generator(cache, xi0, apply_ladder_word(q, ladder, v))
            r = deformed_norm(cache, z) / deformed_norm(cache, v)
        term = r * r
        partial += term
        rows.append(ResultRow(n=n, term=term, partial_sum=partial,
                              ratio=term / prev if prev else None,
                              zeta_norm_ratio=r, q_power=q.q_max**n))
        prev = term
    return rows


def decay_fit(rows: Sequence[ResultRow], window: tuple | None = None,
              field: str = "term") -> DecayFit:
    """Least-squares line through ``(n, log value)`` over ``window`` (inclusive).

    Only strictly positive values enter the fit. An all-zero window yields
    ``exact_zero=True`` with rate and prefactor 0.
    """
    if window is None:
        window = (rows[0].n, rows[-1].n)
    lo, hi = window
    if hi - lo + 1 < 3:
        raise PreconditionError(f"fit window {window} has fewer than 3 degrees")
    sel = [(r.n, getattr(r, field)) for r in rows if lo <= r.n <= hi]
    pos = [(n, v) for n, v in sel if v is not None and v > 0]
    if not pos and all(v == 0 for _, v in sel):
        return DecayFit(0.0, 0.0, tuple(window), exact_zero=True, points=0)
    if len(pos) < 3:
        raise PreconditionError(
            f"need at least 3 strictly positive values in window {window}, got {len(pos)}")
    ns = np.array([n for n, _ in pos], dtype=np.float64)
    logs = np.log(np.array([v for _, v in pos]))
    slope, intercept = np.polyfit(ns, logs, 1)
    return DecayFit(float(np.exp(slope)), float(np.exp(intercept)), tuple(window), points=len(pos))


def _default_window(n_min: int, n_max: int) -> tuple:
    span = n_max - n_min + 1
    if span <= 3:
        return (n_min, n_max)
    return (max(n_min, n_max - max(3, span // 2) + 1), n_max)


def tail_bound(fit: DecayFit, n_max: int) -> float:
    """Geometric-series bound ``C_hat rate^(n_max+1) / (1 - rate)`` on the unsummed tail.

    Empirical: it extrapolates the fitted decay, it does not prove it.
    """
    if fit.exact_zero:
        return 0.0
    if fit.fitted_rate >= 1.0:
        return math.inf
    return fit.C_hat * fit.fitted_rate ** (n_max + 1) / (1.0 - fit.fitted_rate)


def mixing_sum(spec: ExperimentSpec, cache: GramCache) -> ExperimentResult:
    """Mixing terms for ``n_min..n_max`` with partial sums, decay fit and tail bound."""
    if spec.mode != "mixing_sum":
        raise PreconditionError(f"experiment '{spec.name}' is a {spec.mode}, not a mixing_sum")
    rows = []
    partial = 0.0
    prev = None
    for n in range(spec.n_min, spec.n_max + 1):
        row = mixing_term(spec, cache, n)
        partial += row.term
        row.partial_sum = partial
        row.ratio = row.term / prev if prev else None
        prev = row.term
        rows.append(row)
    window = spec.window or _default_window(spec.n_min, spec.n_max)
    fit = decay_fit(rows, window)
    return ExperimentResult(rows, fit, tail_bound(fit, spec.n_max))


def run_experiment(spec: ExperimentSpec, cache: GramCache) -> ExperimentResult:
    """Dispatch on ``spec.mode``."""
    if spec.mode == "mixing_sum":
        return mixing_sum(spec, cache)
    n_range = range(spec.n_min, spec.n_max + 1)
    if spec.mode == "zeta_probe":
        rows = zeta_probe(spec.q, cache, spec.xi0, spec.probe_word(), n_range)
    else:
        rows = []
        partial = 0.0
        prev = None
        for n, r, qn in lemma3_bound_probe(spec.q, cache, spec.a_word, spec.b_word, spec.xi0, n_range):
            partial += r * r
            rows.append(ResultRow(n=n, term=r * r, partial_sum=partial,
                                  ratio=r * r / prev if prev else None,
                                  zeta_norm_ratio=r, q_power=qn))
            prev = r * r
    window = spec.window or _default_window(spec.n_min, spec.n_max)
    fit = decay_fit(rows, window, field="zeta_norm_ratio")
    return ExperimentResult(rows, fit, tail_bound(fit, spec.n_max))

"""
Left/right creation and annihilation operators acting matrix-free on
:class:`~qfock.fock.FockVector`.

Annihilators use the explicit deformed formulas

    l_i^* (e_j1 x ... x e_jn) = sum_k delta(i, j_k) prod_{m<k} q(i, j_m) e_j1 x .. ^k .. x e_jn
    r_i^* (e_j1 x ... x e_jn) = sum_k delta(i, j_k) prod_{m>k} q(i, j_m) e_j1 x .. ^k .. x e_jn

which are the adjoints of ``l_i`` and ``r_i`` for the deformed inner product.
Every block kernel accepts trailing batch axes so that operators can be
materialized by acting on an identity matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, PreconditionError, TruncationError
from .fock import FockVector, GramCache, QSpec, deformed_norm, deformed_operator_norm

__all__ = [
    "LEFT", "RIGHT", "CREATE", "ANNIHILATE",
    "LadderSymbol", "LadderWord", "Truncation",
    "apply_create", "apply_annihilate", "apply_symbol", "apply_gaussian",
    "apply_right_gaussian", "apply_ladder_word", "materialize",
    "commutator_block", "lemma3_bound_probe",
]

LEFT, RIGHT = "left", "right"
CREATE, ANNIHILATE = "create", "annihilate"


@dataclass(frozen=True)
class LadderSymbol:
    """One of ``l_i``, ``l_i^*``, ``r_i``, ``r_i^*`` (letter is 1-based)."""

    side: str
    kind: str
    letter: int

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise ArgumentError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.kind not in (CREATE, ANNIHILATE):
            raise ArgumentError(f"kind must be 'create' or 'annihilate', got {self.kind!r}")
        if self.letter < 1:
            raise ArgumentError(f"letter must be >= 1, got {self.letter}")

    @classmethod
    def parse(cls, token: str) -> "LadderSymbol":
        """``'l2'``, ``'l2*'``, ``'r1'``, ``'r1*'``."""
        m = re.fullmatch(r"\s*([lr])(\d+)(\*?)\s*", token)
        if not m:
            raise ArgumentError(f"cannot parse ladder symbol {token!r}")
        side = LEFT if m.group(1) == "l" else RIGHT
        kind = ANNIHILATE if m.group(3) else CREATE
        return cls(side, kind, int(m.group(2)))

    @property
    def step(self) -> int:
        return 1 if self.kind == CREATE else -1

    def __str__(self):
        return f"{'l' if self.side == LEFT else 'r'}{self.letter}{'*' if self.kind == ANNIHILATE else ''}"


# order of the canonical zeta shape: l ... l* ... r ... r*
_CANONICAL_RANK = {(LEFT, CREATE): 0, (LEFT, ANNIHILATE): 1, (RIGHT, CREATE): 2, (RIGHT, ANNIHILATE): 3}


@dataclass(frozen=True)
class LadderWord:
    """A product of ladder symbols, written as in operator notation.

    The rightmost symbol acts first.
    """

    symbols: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> "LadderWord":
        """Parse ``"l2* r2"`` (whitespace separated) or a list of tokens."""
        tokens = text.split() if isinstance(text, str) else list(text)
        return cls(tuple(LadderSymbol.parse(t) for t in tokens))

    @property
    def net_degree(self) -> int:
        return sum(s.step for s in self.symbols)

    @property
    def is_canonical(self) -> bool:
        ranks = [_CANONICAL_RANK[s.side, s.kind] for s in self.symbols]
        return ranks == sorted(ranks)

    def left_part(self) -> tuple:
        return tuple(s for s in self.symbols if s.side == LEFT)

    def right_part(self) -> tuple:
        return tuple(s for s in self.symbols if s.side == RIGHT)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return " ".join(str(s) for s in self.symbols)


@dataclass
class Truncation:
    """Truncation policy for creation steps.

    Strict mode raises :class:`TruncationError` when a creation would move
    nonzero mass past ``max_degree``. Lenient mode drops it and accumulates
    the squared free norm of what was dropped in ``lost``.
    """

    strict: bool = True
    lost: float = 0.0


STRICT = Truncation(strict=True)


# ---------------------------------------------------------------------------
# block kernels on arrays shaped (N**n, *batch)

def _create_block(N: int, n: int, side: str, i: int, x: np.ndarray) -> np.ndarray:
    batch = x.shape[1:]
    out = np.zeros((N ** (n + 1),) + batch)
    if side == LEFT:
        out.reshape((N, N**n) + batch)[i] = x
    else:
        out.reshape((N**n, N) + batch)[:, i] = x
    return out


def _annihilate_block(q: np.ndarray, n: int, side: str, i: int, x: np.ndarray) -> np.ndarray:
    N = q.shape[0]
    batch = x.shape[1:]
    nb = len(batch)
    if n == 0:
        return np.zeros((0,) + batch)
    t = x.reshape((N,) * n + batch)
    out = np.zeros((N,) * (n - 1) + batch)
    row = q[i]
    for k in range(n):
        piece = np.take(t, i, axis=k)
        # weight prod_{m<k} q(i, j_m) (left) or prod_{m>k} q(i, j_m) (right)
        others = range(k) if side == LEFT else range(k, n - 1)
        for ax in others:
            shape = [1] * (n - 1 + nb)
            shape[ax] = N
            piece = piece * row.reshape(shape)
        out += piece
    return out.reshape((N ** (n - 1),) + batch)


def _check_letter(q: QSpec, letter: int):
    if not 1 <= letter <= q.N:
        raise ArgumentError(f"letter {letter} out of range 1..{q.N}")


# ---------------------------------------------------------------------------
# vector actions

def apply_create(q: QSpec, sym: LadderSymbol, v: FockVector,
                 truncation: Truncation = STRICT) -> FockVector:
    """``l_i v = e_i x v`` or ``r_i v = v x e_i``."""
    if sym.kind != CREATE:
        raise ArgumentError(f"{sym} is not a creation symbol")
    _check_letter(q, sym.letter)
    d = v.max_degree
    top = v.blocks[d]
    if np.any(top):
        if truncation.strict:
            raise TruncationError(
                f"{sym} would raise nonzero degree-{d} mass past max_degree {d}")
        truncation.lost += float(top @ top)
    blocks = [np.zeros(1)]
    for n in range(d):
        blocks.append(_create_block(q.N, n, sym.side, sym.letter - 1, v.blocks[n]))
    return FockVector(q.N, tuple(blocks))


def apply_annihilate(q: QSpec, sym: LadderSymbol, v: FockVector) -> FockVector:
    """``l_i^* v`` or ``r_i^* v`` by the explicit deformed formula."""
    if sym.kind != ANNIHILATE:
        raise ArgumentError(f"{sym} is not an annihilation symbol")
    _check_letter(q, sym.letter)
    d = v.max_degree
    blocks = [_annihilate_block(q.q, n, sym.side, sym.letter - 1, v.blocks[n])
              for n in range(1, d + 1)]
    blocks.append(np.zeros(q.N**d))
    return FockVector(q.N, tuple(blocks))


def apply_symbol(q: QSpec, sym: LadderSymbol, v: FockVector,
                 truncation: Truncation = STRICT) -> FockVector:
    if sym.kind == CREATE:
        return apply_create(q, sym, v, truncation)
    return apply_annihilate(q, sym, v)


def apply_gaussian(q: QSpec, j: int, v: FockVector, truncation: Truncation = STRICT) -> FockVector:
    """``s_j v = l_j v + l_j^* v``."""
    return (apply_create(q, LadderSymbol(LEFT, CREATE, j), v, truncation)
            + apply_annihilate(q, LadderSymbol(LEFT, ANNIHILATE, j), v))


def apply_right_gaussian(q: QSpec, j: int, v: FockVector,
                         truncation: Truncation = STRICT) -> FockVector:
    """``d_j v = r_j v + r_j^* v``, the right counterpart of ``s_j``."""
    return (apply_create(q, LadderSymbol(RIGHT, CREATE, j), v, truncation)
            + apply_annihilate(q, LadderSymbol(RIGHT, ANNIHILATE, j), v))


def apply_ladder_word(q: QSpec, w: LadderWord, v: FockVector,
                      truncation: Truncation = STRICT) -> FockVector:
    """Compose the symbols of ``w`` right to left."""
    for pos in range(len(w.symbols) - 1, -1, -1):
        sym = w.symbols[pos]
        try:
            v = apply_symbol(q, sym, v, truncation)
        except TruncationError as exc:
            raise TruncationError(f"symbol #{pos + 1} ({sym}) of '{w}': {exc}") from None
    return v


# ---------------------------------------------------------------------------
# materialized blocks

def _block_action(q: QSpec, sym: LadderSymbol, n: int, x: np.ndarray) -> np.ndarray:
    if sym.kind == CREATE:
        return _create_block(q.N, n, sym.side, sym.letter - 1, x)
    if n == 0:
        return np.zeros((0,) + x.shape[1:])
    return _annihilate_block(q.q, n, sym.side, sym.letter - 1, x)


def materialize(q: QSpec, w: LadderWord, n: int) -> np.ndarray:
    """Matrix of ``w`` restricted to degree ``n``, shape ``(N**(n+net), N**n)``.

    Free-basis coordinates; no truncation applies.
    """
    for s in w.symbols:
        _check_letter(q, s.letter)
    x = np.eye(q.N**n)
    deg = n
    for sym in reversed(w.symbols):
        if deg == 0 and sym.kind == ANNIHILATE:
            return np.zeros((q.N ** (n + w.net_degree) if n + w.net_degree >= 0 else 0, q.N**n))
        x = _block_action(q, sym, deg, x)
        deg += sym.step
    return x


def commutator_block(q: QSpec, i: int, j: int, n: int,
                     cache: GramCache) -> tuple[np.ndarray, float]:
    """``[l_i^*, r_j]`` on degree ``n`` and its deformed operator norm."""
    _check_letter(q, i)
    _check_letter(q, j)
    cache.build(n + 1)
    a = materialize(q, LadderWord((LadderSymbol(LEFT, ANNIHILATE, i), LadderSymbol(RIGHT, CREATE, j))), n)
    b = materialize(q, LadderWord((LadderSymbol(RIGHT, CREATE, j), LadderSymbol(LEFT, ANNIHILATE, i))), n)
    C = a - b
    return C, deformed_operator_norm(cache, C, n, n)


def lemma3_bound_probe(q: QSpec, cache: GramCache, a_word: LadderWord, b_word: LadderWord,
                       xi0: Sequence[float], n_range: Iterable[int],
                       tol: float = 1e-12) -> list[tuple[int, float, float]]:
    """Ratios ``||a_word b_word xi0^n||_Q / ||xi0^n||_Q`` next to ``q_max**n``.

    ``a_word`` must consist of left symbols whose leftmost (last applied)
    member annihilates a letter orthogonal to ``xi0``; ``b_word`` must
    consist of right symbols.
    """
    xi0 = np.asarray(xi0, dtype=np.float64)
    xi0 = xi0 / np.linalg.norm(xi0)
    if not a_word.symbols:
        raise PreconditionError("a_word is empty; its leftmost symbol must annihilate a letter orthogonal to xi0")
    if any(s.side != LEFT for s in a_word.symbols):
        raise PreconditionError(f"a_word '{a_word}' must contain left symbols only")
    if any(s.side != RIGHT for s in b_word.symbols):
        raise PreconditionError(f"b_word '{b_word}' must contain right symbols only")
    lead = a_word.symbols[0]
    _check_letter(q, lead.letter)
    if lead.kind != ANNIHILATE or abs(xi0[lead.letter - 1]) > tol:
        raise PreconditionError(
            f"leftmost a-symbol {lead} must annihilate a letter orthogonal to xi0 "
            f"(<e_{lead.letter}, xi0> = {xi0[lead.letter - 1]!r})")
    word = LadderWord(a_word.symbols + b_word.symbols)
    rows = []
    for n in n_range:
        extra = max(0, max(_partial_degrees(word)))
        d = n + extra
        cache.build(d)
        v = FockVector.tensor_power(xi0, n, d)
        out = apply_ladder_word(q, word, v)
        rows.append((n, deformed_norm(cache, out) / deformed_norm(cache, v), q.q_max**n))
    return rows


def _partial_degrees(w: LadderWord) -> list[int]:
    # cumulative degree shifts as the word acts right to left
    acc, out = 0, [0]
    for sym in reversed(w.symbols):
        acc += sym.step
        out.append(acc)
    return out

"""
Wick products ``W(eta)`` and their right-handed counterparts.

``W(eta)`` is the operator in the algebra generated by the ``s_i`` with
``W(eta) Omega = eta``. It is never materialized; it acts on vectors via

    W(e_i x xi) = s_i W(xi) - W(l_i^* xi)
    W_r(xi x e_i) = d_i W_r(xi) - W_r(r_i^* xi)

with ``d_i = r_i + r_i^*``, extended linearly over the symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, TruncationError
from .fock import FockVector, GramCache, QSpec, deformed_inner
from .operators import (
    LEFT, RIGHT, STRICT, Truncation, _annihilate_block, apply_gaussian,
    apply_right_gaussian,
)

__all__ = [
    "WickOperator", "wick_apply", "wick_vacuum_norm2", "v_basis", "trace",
    "reverse_words",
]


def _wick_block(q: QSpec, side: str, n: int, eta: np.ndarray, v: FockVector,
                truncation: Truncation, memo: dict) -> FockVector:
    key = (n, eta.tobytes())
    if key in memo:
        return memo[key]
    N = q.N
    if n == 0:
        out = float(eta[0]) * v
    else:
        if side == LEFT:
            parts = eta.reshape(N, N ** (n - 1))
            gauss = apply_gaussian
        else:
            parts = eta.reshape(N ** (n - 1), N).T
            gauss = apply_right_gaussian
        out = FockVector.zeros(N, v.max_degree)
        lowered = np.zeros(N ** max(n - 2, 0))
        for i in range(N):
            sub = np.ascontiguousarray(parts[i])
            if not np.any(sub):
                continue
            out = out + gauss(q, i + 1, _wick_block(q, side, n - 1, sub, v, truncation, memo),
                              truncation)
            if n >= 2:
                lowered += _annihilate_block(q.q, n - 1, side, i, sub)
        if n >= 2 and np.any(lowered):
            out = out - _wick_block(q, side, n - 2, lowered, v, truncation, memo)
    memo[key] = out
    return out


def wick_apply(q: QSpec, side: str, symbol: FockVector, v: FockVector,
               truncation: Truncation = STRICT) -> FockVector:
    """Apply ``W(symbol)`` (``side='left'``) or ``W_r(symbol)`` (``side='right'``) to ``v``.

    In strict mode the result must fit: ``top(v) + top(symbol) <= max_degree(v)``.
    """
    if side not in (LEFT, RIGHT):
        raise ArgumentError(f"side must be 'left' or 'right', got {side!r}")
    if symbol.N != q.N or v.N != q.N:
        raise ArgumentError(f"dimension mismatch: Q has N={q.N}, symbol N={symbol.N}, vector N={v.N}")
    span = symbol.top_degree
    if span < 0:
        return FockVector.zeros(q.N, v.max_degree)
    if truncation.strict and v.top_degree + span > v.max_degree:
        raise TruncationError(
            f"W of a degree-{span} symbol on a vector of top degree {v.top_degree} "
            f"leaves the truncation (max_degree {v.max_degree})")
    memo: dict = {}
    out = FockVector.zeros(q.N, v.max_degree)
    for n in range(span + 1):
        block = symbol.blocks[n]
        if np.any(block):
            out = out + _wick_block(q, side, n, block, v, truncation, memo)
    return out


@dataclass(frozen=True)
class WickOperator:
    """``W(symbol)`` or ``W_r(symbol)`` as an unmaterialized operator."""

    side: str
    symbol: FockVector

    @property
    def degree_span(self) -> int:
        return self.symbol.top_degree

    def apply(self, q: QSpec, v: FockVector, truncation: Truncation = STRICT) -> FockVector:
        return wick_apply(q, self.side, self.symbol, v, truncation)


def reverse_words(v: FockVector) -> FockVector:
    """Linear extension of ``e_j1 x ... x e_jn -> e_jn x ... x e_j1``.

    ``W(eta)^* = W(reverse_words(eta))`` for real symbols.
    """
    blocks = []
    for n, b in enumerate(v.blocks):
        t = b.reshape((v.N,) * n)
        blocks.append(np.transpose(t, tuple(range(n - 1, -1, -1))).reshape(-1))
    return FockVector(v.N, tuple(blocks))


def wick_vacuum_norm2(cache: GramCache, symbol: FockVector) -> float:
    """``||W(symbol)||_2 = ||symbol||_Q`` (the trace is the vacuum state)."""
    return math.sqrt(max(deformed_inner(cache, symbol, symbol), 0.0))


def v_basis(q: QSpec, cache: GramCache, xi0, n: int, side: str = LEFT) -> WickOperator:
    """Normalized Wick power ``W(xi0^n) / ||W(xi0^n)||_2``."""
    xi0 = np.asarray(xi0, dtype=np.float64)
    if xi0.shape != (q.N,):
        raise ArgumentError(f"xi0 has shape {xi0.shape}, expected ({q.N},)")
    xi0 = xi0 / np.linalg.norm(xi0)
    cache.build(n)
    sym = FockVector.tensor_power(xi0, n, n)
    return WickOperator(side, sym / wick_vacuum_norm2(cache, sym))


def trace(applied_to_vacuum: FockVector) -> float:
    """Vacuum trace ``tau(a) = <Omega, a Omega>`` from ``a Omega``."""
    return float(applied_to_vacuum.blocks[0][0])

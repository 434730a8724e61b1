"""
Permutations of ``range(n)`` in one-line notation and their reduced words.

A word ``(i1, ..., ik)`` with letters in ``1..n-1`` stands for the product
``s_i1 s_i2 ... s_ik`` of adjacent transpositions, where ``s_i`` exchanges
positions ``i-1`` and ``i`` (0-based) when multiplied on the right.

>>> reduced_word((2, 1, 0))
(1, 2, 1)
>>> reduced_word((2, 1, 0), method="lex")
(1, 2, 1)
>>> word_to_perm((1, 2, 1), 3)
(2, 1, 0)
"""

from itertools import permutations
from typing import Iterator, Sequence

__all__ = [
    "all_perms", "inversions", "reduced_word", "word_to_perm",
    "REDUCED_WORD_METHODS",
]

REDUCED_WORD_METHODS = ("bubble", "lex")


def all_perms(n: int) -> Iterator[tuple[int, ...]]:
    """All permutations of ``range(n)`` in lexicographic order."""
    return permutations(range(n))


def inversions(perm: Sequence[int]) -> int:
    """Number of pairs ``a < b`` with ``perm[a] > perm[b]``."""
    n = len(perm)
    return sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])


def _bubble_word(perm: Sequence[int]) -> tuple[int, ...]:
    # sorting by right multiplications: perm * s_j1 * ... * s_jk = id
    p = list(perm)
    swaps = []
    n = len(p)
    for end in range(n - 1, 0, -1):
        for a in range(end):
            if p[a] > p[a + 1]:
                p[a], p[a + 1] = p[a + 1], p[a]
                swaps.append(a + 1)
    return tuple(reversed(swaps))


def _lex_word(perm: Sequence[int]) -> tuple[int, ...]:
    # greedy smallest left descent gives the lexicographically least reduced word
    p = list(perm)
    pos = {v: a for a, v in enumerate(p)}
    word = []
    n = len(p)
    while True:
        for i in range(1, n):
            if pos[i - 1] > pos[i]:
                break
        else:
            return tuple(word)
        # s_i * p exchanges the values i-1 and i
        a, b = pos[i - 1], pos[i]
        p[a], p[b] = i, i - 1
        pos[i - 1], pos[i] = b, a
        word.append(i)


def reduced_word(perm: Sequence[int], method: str = "bubble") -> tuple[int, ...]:
    """
    A reduced word for ``perm``, of length ``inversions(perm)``.

    ``method="bubble"`` follows the bubble-sort (inversion table) path and is
    the canonical choice; ``method="lex"`` returns the lexicographically
    smallest reduced word.
    """
    if method == "bubble":
        return _bubble_word(perm)
    if method == "lex":
        return _lex_word(perm)
    raise ValueError(f"unknown reduced-word method {method!r}")


def word_to_perm(word: Sequence[int], n: int) -> tuple[int, ...]:
    """Multiply out ``s_i1 ... s_ik`` and return the one-line notation."""
    p = list(range(n))
    for i in word:
        if not 1 <= i < n:
            raise ValueError(f"letter {i} out of range for n={n}")
        p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)

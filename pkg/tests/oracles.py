"""
Independent dense reference model of the truncated Fock space.

Nothing here calls into qfock's kernels. The symmetrizer is the sum over
permutations with one factor q(a, b) per pair of letters the permutation
inverts, and every annihilator is the Gram adjoint ``G^-1 A^T G`` of the
corresponding creator.
"""

from itertools import permutations, product

import numpy as np


def words(N, n):
    return list(product(range(N), repeat=n))


def symmetrizer(q, n):
    N = q.shape[0]
    ws = words(N, n)
    index = {w: k for k, w in enumerate(ws)}
    P = np.zeros((len(ws), len(ws)))
    for col, v in enumerate(ws):
        for perm in permutations(range(n)):
            # perm[t] = original slot placed at position t
            w = tuple(v[perm[t]] for t in range(n))
            weight = 1.0
            for a in range(n):
                for b in range(a + 1, n):
                    if perm.index(a) > perm.index(b):
                        weight *= q[v[a], v[b]]
            P[index[w], col] += weight
    return P


class DenseFock:
    """All operators as dense matrices on ``F_0 + ... + F_d``."""

    def __init__(self, q, d):
        self.q = np.asarray(q, dtype=float)
        self.N = N = self.q.shape[0]
        self.d = d
        self.dims = [N**n for n in range(d + 1)]
        self.offsets = np.concatenate([[0], np.cumsum(self.dims)])
        self.D = int(self.offsets[-1])
        self.G = np.zeros((self.D, self.D))
        for n in range(d + 1):
            s = slice(self.offsets[n], self.offsets[n + 1])
            self.G[s, s] = symmetrizer(self.q, n)
        self.Ginv = np.linalg.inv(self.G)

    def idx(self, word):
        n = len(word)
        k = 0
        for a in word:
            k = k * self.N + a
        return int(self.offsets[n] + k)

    def creator(self, i, side):
        A = np.zeros((self.D, self.D))
        for n in range(self.d):
            for w in words(self.N, n):
                new = (i,) + w if side == "left" else w + (i,)
                A[self.idx(new), self.idx(w)] = 1.0
        return A

    def adjoint(self, A):
        return self.Ginv @ A.T @ self.G

    def l(self, i):
        return self.creator(i, "left")

    def r(self, i):
        return self.creator(i, "right")

    def s(self, i):
        L = self.l(i)
        return L + self.adjoint(L)

    def inner(self, u, v):
        return float(u @ self.G @ v)

    def vacuum(self):
        e = np.zeros(self.D)
        e[0] = 1.0
        return e

    def basis(self, word):
        e = np.zeros(self.D)
        e[self.idx(word)] = 1.0
        return e

    def power(self, c, n):
        """``e_c`` repeated ``n`` times."""
        return self.basis((c,) * n)

    def wick_power(self, c, n):
        """``W(e_c^n)`` by the recursion ``W_{k+1} = s_c W_k - [k]_q W_{k-1}``."""
        qc = self.q[c, c]
        S = self.s(c)
        prev, cur = np.zeros((self.D, self.D)), np.eye(self.D)
        for k in range(n):
            qint = sum(qc**j for j in range(k))
            prev, cur = cur, S @ cur - qint * prev
        return cur

    def project_letter(self, c, v):
        """Orthogonal projection onto span{e_c^n : n <= d}."""
        out = np.zeros(self.D)
        for n in range(self.d + 1):
            p = self.power(c, n)
            out += (self.inner(p, v) / self.inner(p, p)) * p
        return out


def q_factorial(q, n):
    out = 1.0
    for k in range(1, n + 1):
        out *= sum(q**j for j in range(k))
    return out

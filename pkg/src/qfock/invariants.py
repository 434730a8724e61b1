"""
Randomized invariant suite run by ``qfock verify``.

Each check returns a :class:`Check` with the measured residual and the
tolerance it was held to; nothing here raises on failure.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .errors import QFockError
from .fock import (
    BRUTE_FORCE_CEILING, FockVector, GramCache, QSpec, deformed_inner, deformed_norm,
    positivity_report, symmetrizer_bruteforce, yang_baxter_site,
)
from .masa import ExperimentSpec, decay_fit, project_generator, route_residual, zeta_probe
from .operators import (
    ANNIHILATE, CREATE, LEFT, RIGHT, LadderSymbol, apply_annihilate, apply_create,
    apply_gaussian, apply_right_gaussian, commutator_block,
)
from .wick import reverse_words, trace, v_basis, wick_apply

__all__ = ["Check", "DEFAULT_TOLERANCES", "run_invariants"]

DEFAULT_TOLERANCES = {
    "braid": 1e-12,
    "symmetrizer_oracle": 1e-10,
    "reduced_word_independence": 1e-12,
    "positivity": 1e-12,
    "inner_symmetry": 1e-13,
    "adjoint_duality": 1e-10,
    "commutant_seed": 1e-8,
    "commutator_bound": 1e-8,
    "vacuum_reproduction": 1e-11,
    "wick_commutant": 1e-9,
    "wick_adjoint": 1e-10,
    "two_norm_identity": 1e-9,
    "v_orthonormal": 1e-10,
    "projection": 1e-11,
    "trace_preservation": 1e-12,
    "route_agreement": 1e-9,
    "decay_margin": 0.05,
}

# largest free dimension used for randomized vectors
_MAX_RANDOM_DIM = 3**7


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _rel(a: float, scale: float) -> float:
    return abs(a) / scale if scale > 0 else abs(a)


def run_invariants(q: QSpec, max_degree: int, seed: int = 0,
                   tolerances: dict | None = None,
                   experiments: list[ExperimentSpec] = (),
                   budget: int | None = None) -> list[Check]:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    rng = np.random.default_rng(seed)
    N = q.N
    d = max_degree
    while d > 3 and N**d > _MAX_RANDOM_DIM:
        d -= 1
    cache = GramCache(q, d, budget)
    checks: list[Check] = []

    def run(name: str, fn: Callable[[], tuple[float, str]], limit: float | None = None):
        limit = tol[name] if limit is None else limit
        try:
            residual, detail = fn()
        except QFockError as exc:
            checks.append(Check(name, float("inf"), limit, False, f"{type(exc).__name__}: {exc}"))
            return
        checks.append(Check(name, float(residual), limit, bool(residual <= limit), detail))

    def braid():
        eye = np.eye(N**3)
        t1 = lambda x: yang_baxter_site(q, 3, 1, x)
        t2 = lambda x: yang_baxter_site(q, 3, 2, x)
        return float(np.linalg.norm(t1(t2(t1(eye))) - t2(t1(t2(eye))))), "degree 3, Frobenius"

    def oracle():
        worst, top = 0.0, 0
        for n in range(min(6, d, BRUTE_FORCE_CEILING) + 1):
            if N**n > 729:
                break
            worst = max(worst, float(np.max(np.abs(cache.P(n) - symmetrizer_bruteforce(q, n)))))
            top = n
        return worst, f"n <= {top}"

    def word_independence():
        worst, top = 0.0, 0
        for n in range(min(5, d) + 1):
            if N**n > 729:
                break
            a = symmetrizer_bruteforce(q, n, "bubble")
            b = symmetrizer_bruteforce(q, n, "lex")
            worst = max(worst, float(np.max(np.abs(a - b))))
            top = n
        return worst, f"n <= {top}"

    def positivity():
        # residual is how far the smallest eigenvalue falls short of the floor
        lams = [positivity_report(cache, n) for n in range(d + 1)]
        lam = min(lams)
        return max(0.0, tol["positivity"] - lam), f"min eigenvalue {lam!r} over n <= {d}"

    def inner_symmetry():
        worst = 0.0
        for _ in range(10):
            u, v = FockVector.random(N, d, rng), FockVector.random(N, d, rng)
            a, b = deformed_inner(cache, u, v), deformed_inner(cache, v, u)
            worst = max(worst, _rel(a - b, deformed_norm(cache, u) * deformed_norm(cache, v)))
        return worst, "relative"

    def adjoint():
        worst = 0.0
        for _ in range(20):
            side = LEFT if rng.random() < 0.5 else RIGHT
            i = int(rng.integers(1, N + 1))
            u = FockVector.random(N, d, rng)
            v = FockVector.random(N, d, rng, top_degree=d - 1)
            a = deformed_inner(cache, apply_annihilate(q, LadderSymbol(side, ANNIHILATE, i), u), v)
            b = deformed_inner(cache, u, apply_create(q, LadderSymbol(side, CREATE, i), v))
            worst = max(worst, _rel(a - b, u.free_norm() * v.free_norm()))
        return worst, "relative to free norms"

    def commutant_seed():
        worst = 0.0
        for _ in range(10):
            i, j = (int(a) for a in rng.integers(1, N + 1, size=2))
            top = int(rng.integers(0, d - 1))
            v = FockVector.random(N, d, rng, top_degree=top)
            w = apply_gaussian(q, i, apply_right_gaussian(q, j, v)) - apply_right_gaussian(q, j, apply_gaussian(q, i, v))
            worst = max(worst, _rel(deformed_norm(cache, w), q.q_max**top * deformed_norm(cache, v)))
        return worst, "[s_i, d_j] v relative to q^top ||v||"

    def commutator_bound():
        worst = 0.0
        for n in range(min(8, d - 1) + 1):
            for i in range(1, N + 1):
                for j in range(1, N + 1):
                    _, nrm = commutator_block(q, i, j, n, cache)
                    bound = q.q_max**n
                    worst = max(worst, max(nrm - bound, 0.0) / bound if bound > 0 else nrm)
        return worst, "relative excess of ||[l_i*, r_j]|_n|| over q^n"

    def vacuum():
        worst = 0.0
        omega = FockVector.vacuum(N, d)
        for side in (LEFT, RIGHT):
            for _ in range(5):
                eta = FockVector.random(N, d, rng, top_degree=min(d, 5))
                worst = max(worst, _rel((wick_apply(q, side, eta, omega) - eta).free_norm(), eta.free_norm()))
        return worst, "relative"

    def wick_commutant():
        if d < 4:
            return 0.0, "skipped, max_degree < 4"
        worst = 0.0
        for _ in range(3):
            z = FockVector.random(N, d, rng, top_degree=2)
            e = FockVector.random(N, d, rng, top_degree=2)
            v = FockVector.random(N, d, rng, top_degree=d - 4)
            a = wick_apply(q, LEFT, z, wick_apply(q, RIGHT, e, v))
            b = wick_apply(q, RIGHT, e, wick_apply(q, LEFT, z, v))
            worst = max(worst, _rel(deformed_norm(cache, a - b), deformed_norm(cache, v)))
        return worst, "relative to ||v||_Q"

    def wick_adjoint():
        worst = 0.0
        k = min(3, d // 2)
        for side in (LEFT, RIGHT):
            eta = FockVector.random(N, d, rng, top_degree=k)
            u = FockVector.random(N, d, rng, top_degree=d - k)
            v = FockVector.random(N, d, rng, top_degree=d - k)
            a = deformed_inner(cache, wick_apply(q, side, eta, u), v)
            b = deformed_inner(cache, u, wick_apply(q, side, reverse_words(eta), v))
            worst = max(worst, _rel(a - b, deformed_norm(cache, u) * deformed_norm(cache, v)))
        return worst, "W(eta)^* = W(reversed eta)"

    def two_norm():
        k = d // 2
        eta = FockVector.random(N, d, rng, top_degree=k)
        omega = FockVector.vacuum(N, d)
        w = wick_apply(q, LEFT, eta, omega)
        tau = trace(wick_apply(q, LEFT, reverse_words(eta), w))
        n2 = deformed_inner(cache, eta, eta)
        return _rel(tau - n2, n2), "tau(W* W) vs <eta, eta>_Q"

    def v_orthonormal():
        xi0 = np.zeros(N)
        xi0[0] = 1.0
        vecs = [v_basis(q, cache, xi0, n).symbol.truncate(d) for n in range(d + 1)]
        G = np.array([[deformed_inner(cache, a, b) for b in vecs] for a in vecs])
        return float(np.max(np.abs(G - np.eye(d + 1)))), f"n <= {d}, xi0 = e_1"

    def projection():
        xi0 = rng.standard_normal(N)
        xi0 /= np.linalg.norm(xi0)
        u, v = FockVector.random(N, d, rng), FockVector.random(N, d, rng)
        pu = project_generator(cache, xi0, u)
        idem = deformed_norm(cache, project_generator(cache, xi0, pu) - pu) / deformed_norm(cache, u)
        sa = _rel(deformed_inner(cache, pu, v) - deformed_inner(cache, u, project_generator(cache, xi0, v)),
                  deformed_norm(cache, u) * deformed_norm(cache, v))
        return max(idem, sa), "idempotence and self-adjointness"

    def trace_preservation():
        xi0 = rng.standard_normal(N)
        xi0 /= np.linalg.norm(xi0)
        worst = 0.0
        for _ in range(5):
            a = FockVector.random(N, d, rng)
            worst = max(worst, abs(trace(project_generator(cache, xi0, a)) - trace(a)))
        return worst, "tau(E(a)) = tau(a)"

    run("braid", braid)
    run("symmetrizer_oracle", oracle)
    run("reduced_word_independence", word_independence)
    run("positivity", positivity, 0.0)
    run("inner_symmetry", inner_symmetry)
    run("adjoint_duality", adjoint)
    run("commutant_seed", commutant_seed, 1.0 + tol["commutant_seed"])
    run("commutator_bound", commutator_bound)
    run("vacuum_reproduction", vacuum)
    run("wick_commutant", wick_commutant)
    run("wick_adjoint", wick_adjoint)
    run("two_norm_identity", two_norm)
    run("v_orthonormal", v_orthonormal)
    run("projection", projection)
    run("trace_preservation", trace_preservation)

    for spec in experiments:
        if spec.mode == "mixing_sum":
            top = spec.max_degree - spec.m - spec.k
            run(f"route_agreement[{spec.name}]",
                lambda spec=spec, top=top: (
                    max(route_residual(spec, cache, n) for n in range(spec.n_min, min(spec.n_max, top) + 1)),
                    "relative"),
                tol["route_agreement"])
        elif spec.mode == "zeta_probe":
            def domination(spec=spec):
                rows = zeta_probe(q, cache, spec.xi0, spec.ladder, range(spec.n_min, spec.n_max + 1))
                lo, hi = spec.window or (spec.n_min, spec.n_max)
                fit = decay_fit(rows, (lo, hi), "zeta_norm_ratio")
                if fit.exact_zero:
                    return 0.0, "exact zero"
                rate = q.q_max + tol["decay_margin"]
                excess = max(r.zeta_norm_ratio / fit.bound(r.n, rate) for r in rows if lo <= r.n <= hi)
                over = max(0.0, fit.fitted_rate - rate)
                return max(over, excess - 1.0, 0.0), f"fitted rate {fit.fitted_rate!r}"
            run(f"decay_domination[{spec.name}]", domination, 0.0)
    return checks

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qfock import (
    FockVector, GramCache, QSpec, TruncationError, apply_gaussian, deformed_inner, deformed_norm,
    trace, v_basis, wick_apply, wick_vacuum_norm2,
)
from qfock.wick import WickOperator, reverse_words


def basis(word, N=2, d=6):
    return FockVector.basis(word, N, d)


def test_vacuum_symbol_is_identity(baseline_q, rng):
    v = FockVector.random(2, 6, rng)
    out = wick_apply(baseline_q, "left", FockVector.vacuum(2, 6), v)
    np.testing.assert_array_equal(out.flat(), v.flat())


def test_single_letter_is_gaussian(baseline_q, rng):
    v = FockVector.random(2, 6, rng, top_degree=5)
    np.testing.assert_allclose(wick_apply(baseline_q, "left", basis((1,)), v).flat(),
                               apply_gaussian(baseline_q, 1, v).flat(), atol=1e-14)
    np.testing.assert_array_equal(
        wick_apply(baseline_q, "left", basis((1,)), FockVector.vacuum(2, 6)).flat(), basis((1,)).flat())


def test_two_distinct_letters(baseline_q, rng):
    q = baseline_q
    v = FockVector.random(2, 6, rng, top_degree=4)
    ref = apply_gaussian(q, 1, apply_gaussian(q, 2, v))
    np.testing.assert_allclose(wick_apply(q, "left", basis((1, 2)), v).flat(), ref.flat(), atol=1e-13)
    out = wick_apply(q, "left", basis((1, 2)), FockVector.vacuum(2, 6))
    np.testing.assert_allclose(out.flat(), basis((1, 2)).flat(), atol=1e-15)


def test_wick_power_matches_q_hermite_oracle(baseline_q, rng):
    F = oracles.DenseFock(baseline_q.q, 6)
    v = FockVector.random(2, 6, rng, top_degree=2)
    for n in range(5):
        out = wick_apply(baseline_q, "left", basis((1,) * n), v)
        np.testing.assert_allclose(out.flat(), F.wick_power(0, n) @ v.flat(), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), side=st.sampled_from(["left", "right"]), N=st.integers(1, 3))
def test_vacuum_reproduction(seed, side, N):
    rng = np.random.default_rng(seed)
    q = QSpec.random(N, rng)
    d = 5 if N < 3 else 4
    eta = FockVector.random(N, d, rng)
    out = wick_apply(q, side, eta, FockVector.vacuum(N, d))
    assert np.max(np.abs(out.flat() - eta.flat())) < 1e-11


def test_left_right_commute(rng):
    q = QSpec.random(3, rng)
    d = 6
    c = GramCache(q, d)
    for _ in range(3):
        z = FockVector.random(3, d, rng, top_degree=2)
        e = FockVector.random(3, d, rng, top_degree=2)
        v = FockVector.random(3, d, rng, top_degree=d - 4)
        a = wick_apply(q, "left", z, wick_apply(q, "right", e, v))
        b = wick_apply(q, "right", e, wick_apply(q, "left", z, v))
        assert deformed_norm(c, a - b) <= 1e-9 * deformed_norm(c, v)


@pytest.mark.parametrize("side", ["left", "right"])
def test_adjoint_is_reversed_symbol(baseline_q, baseline_cache, rng, side):
    q, c = baseline_q, baseline_cache
    for _ in range(5):
        eta = FockVector.random(2, 8, rng, top_degree=3)
        u = FockVector.random(2, 8, rng, top_degree=5)
        v = FockVector.random(2, 8, rng, top_degree=5)
        a = deformed_inner(c, wick_apply(q, side, eta, u), v)
        b = deformed_inner(c, u, wick_apply(q, side, reverse_words(eta), v))
        assert abs(a - b) < 1e-10 * deformed_norm(c, u) * deformed_norm(c, v)


def test_palindromic_symbols_are_self_adjoint(baseline_q, baseline_cache, rng):
    q, c = baseline_q, baseline_cache
    base = FockVector.random(2, 8, rng, top_degree=3)
    eta = base + reverse_words(base)
    u = FockVector.random(2, 8, rng, top_degree=5)
    v = FockVector.random(2, 8, rng, top_degree=5)
    a = deformed_inner(c, wick_apply(q, "left", eta, u), v)
    b = deformed_inner(c, u, wick_apply(q, "left", eta, v))
    assert abs(a - b) < 1e-10 * deformed_norm(c, u) * deformed_norm(c, v)


def test_non_palindromic_symbol_is_not_self_adjoint(baseline_q, baseline_cache):
    # W(e1 x e2) = s1 s2, whose adjoint is s2 s1
    q, c = baseline_q, baseline_cache
    u, v = basis((2,), d=8), basis((1,), d=8)
    eta = basis((1, 2), d=8)
    a = deformed_inner(c, wick_apply(q, "left", eta, u), v)
    b = deformed_inner(c, u, wick_apply(q, "left", eta, v))
    assert abs(a - b) > 0.1


def test_two_norm_identity(baseline_q, baseline_cache, rng):
    eta = FockVector.random(2, 8, rng, top_degree=4)
    w = wick_apply(baseline_q, "left", eta, FockVector.vacuum(2, 8))
    tau = trace(wick_apply(baseline_q, "left", reverse_words(eta), w))
    assert tau == pytest.approx(wick_vacuum_norm2(baseline_cache, eta) ** 2, rel=1e-9)


def test_vacuum_norm_examples(baseline_q, baseline_cache):
    assert wick_vacuum_norm2(baseline_cache, FockVector.vacuum(2, 3)) == 1.0
    assert wick_vacuum_norm2(baseline_cache, basis((1, 1), d=3)) == pytest.approx(np.sqrt(1.5), rel=1e-15)
    qv = 0.65
    c1 = GramCache(QSpec.uniform(1, qv), 7)
    for n in range(8):
        sym = FockVector.basis((1,) * n, 1, 7)
        assert wick_vacuum_norm2(c1, sym) == pytest.approx(np.sqrt(oracles.q_factorial(qv, n)), rel=1e-13)


def test_v_basis(baseline_q, baseline_cache):
    v0 = v_basis(baseline_q, baseline_cache, [1, 0], 0)
    assert isinstance(v0, WickOperator) and v0.degree_span == 0
    np.testing.assert_array_equal(v0.symbol.flat(), [1.0])
    vecs = [v_basis(baseline_q, baseline_cache, [1, 0], n).symbol.truncate(8) for n in range(9)]
    G = np.array([[deformed_inner(baseline_cache, a, b) for b in vecs] for a in vecs])
    assert np.max(np.abs(G - np.eye(9))) < 1e-10


def test_v_basis_free_case():
    q = QSpec.uniform(2, 0.0)
    c = GramCache(q, 5)
    for n in range(6):
        np.testing.assert_array_equal(v_basis(q, c, [1, 0], n).symbol.flat(),
                                      FockVector.basis((1,) * n, 2, n).flat())


def test_trace_examples(baseline_q):
    om = FockVector.vacuum(2, 4)
    assert trace(om) == 1.0
    s1 = apply_gaussian(baseline_q, 1, om)
    assert trace(s1) == 0.0
    assert trace(apply_gaussian(baseline_q, 1, s1)) == 1.0


def test_strict_domain_overflow(baseline_q):
    with pytest.raises(TruncationError):
        wick_apply(baseline_q, "left", basis((1, 1), d=4), basis((2, 2, 2), d=4))


def test_wick_operator_apply(baseline_q, rng):
    eta = FockVector.random(2, 6, rng, top_degree=2)
    v = FockVector.random(2, 6, rng, top_degree=3)
    op = WickOperator("right", eta)
    np.testing.assert_array_equal(op.apply(baseline_q, v).flat(), wick_apply(baseline_q, "right", eta, v).flat())

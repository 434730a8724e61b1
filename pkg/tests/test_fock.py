import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qfock import (
    ArgumentError, CapabilityError, DefinitenessError, FockVector, GramCache, QSpec, StateError,
    deformed_inner, deformed_operator_norm, index_word, positivity_report,
    symmetrizer_bruteforce, symmetrizer_recursive, word_index, yang_baxter_site,
)
from qfock.fock import estimate_gram_bytes, iter_words
from qfock.operators import LadderSymbol, LadderWord, materialize


def e(word, N, d):
    return FockVector.basis(word, N, d)


# --- QSpec -------------------------------------------------------------------

def test_qspec_rejects_q_max_one():
    with pytest.raises(ArgumentError, match="< 1"):
        QSpec(np.array([[1.0, 0.0], [0.0, 0.2]]))


def test_qspec_rejects_asymmetric():
    with pytest.raises(ArgumentError, match="symmetric"):
        QSpec(np.array([[0.1, 0.2], [0.3, 0.1]]))


def test_qspec_is_frozen_and_exactly_symmetric(rng):
    q = QSpec.random(3, rng)
    assert np.array_equal(q.q, q.q.T)
    assert q.q_max < 0.9
    with pytest.raises(ValueError):
        q.q[0, 0] = 0.5


# --- words -------------------------------------------------------------------

def test_word_index_examples():
    assert word_index((1,), 2) == 0
    assert word_index((2, 1), 2) == 2
    assert index_word(2, 8, 3) == (3, 3)
    assert word_index((), 3) == 0 and index_word(0, 0, 3) == ()


def test_word_index_errors():
    with pytest.raises(ArgumentError):
        word_index((3,), 2)
    with pytest.raises(ArgumentError):
        index_word(2, 9, 3)


@given(N=st.integers(1, 4), n=st.integers(0, 5), data=st.data())
def test_word_index_bijection(N, n, data):
    k = data.draw(st.integers(0, N**n - 1))
    w = index_word(n, k, N)
    assert len(w) == n and all(1 <= a <= N for a in w)
    assert word_index(w, N) == k


# --- FockVector ----------------------------------------------------------------

def test_fock_vector_blocks_are_readonly():
    v = FockVector.vacuum(2, 3)
    assert [b.size for b in v.blocks] == [1, 2, 4, 8]
    with pytest.raises(ValueError):
        v.blocks[0][0] = 2.0


def test_fock_vector_rejects_bad_blocks():
    with pytest.raises(ArgumentError):
        FockVector(2, (np.ones(1), np.ones(3)))
    with pytest.raises(ArgumentError):
        FockVector(2, (np.array([np.nan]),))


def test_fock_vector_tensor_and_top_degree():
    v = FockVector.tensor([[1, 0], [0, 1]], 2, 4)
    assert v.coefficient((1, 2)) == 1.0
    assert v.top_degree == 2
    assert FockVector.zeros(2, 3).top_degree == -1


# --- Yang-Baxter operator ------------------------------------------------------

def test_yang_baxter_swaps_with_weight(baseline_q):
    q = baseline_q
    out = yang_baxter_site(q, 2, 1, e((1, 2), 2, 2).block(2))
    expected = q.q[0, 1] * e((2, 1), 2, 2).block(2)
    np.testing.assert_array_equal(out, expected)
    out = yang_baxter_site(q, 2, 1, e((1, 1), 2, 2).block(2))
    np.testing.assert_array_equal(out, q.q[0, 0] * e((1, 1), 2, 2).block(2))


def test_yang_baxter_free_case_annihilates():
    q = QSpec.uniform(2, 0.0)
    v = np.arange(8.0)
    assert not np.any(yang_baxter_site(q, 3, 2, v))


def test_yang_baxter_site_out_of_range(baseline_q):
    with pytest.raises(ArgumentError):
        yang_baxter_site(baseline_q, 3, 3, np.zeros(8))
    with pytest.raises(ArgumentError):
        yang_baxter_site(baseline_q, 1, 1, np.zeros(2))


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 3), seed=st.integers(0, 2**32 - 1))
def test_braid_relation(N, seed):
    q = QSpec.random(N, np.random.default_rng(seed))
    eye = np.eye(N**3)
    a = yang_baxter_site(q, 3, 1, yang_baxter_site(q, 3, 2, yang_baxter_site(q, 3, 1, eye)))
    b = yang_baxter_site(q, 3, 2, yang_baxter_site(q, 3, 1, yang_baxter_site(q, 3, 2, eye)))
    assert np.linalg.norm(a - b) < 1e-12


# --- symmetrizers ---------------------------------------------------------------

def test_bruteforce_small_degrees(baseline_q):
    assert symmetrizer_bruteforce(baseline_q, 0).tolist() == [[1.0]]
    np.testing.assert_array_equal(symmetrizer_bruteforce(baseline_q, 1), np.eye(2))


def test_bruteforce_degree_two_entry(baseline_q):
    P = symmetrizer_bruteforce(baseline_q, 2)
    assert P[word_index((1, 2), 2), word_index((2, 1), 2)] == baseline_q.q[0, 1]


def test_bruteforce_degree_three_longest_element():
    qv = 0.37
    P = symmetrizer_bruteforce(QSpec.uniform(3, qv), 3)
    a, b = word_index((1, 2, 3), 3), word_index((3, 2, 1), 3)
    assert P[a, a] == 1.0
    assert P[a, b] == pytest.approx(qv**3, abs=1e-15)


def test_bruteforce_ceiling(baseline_q):
    with pytest.raises(CapabilityError):
        symmetrizer_bruteforce(baseline_q, 8)


def test_recursive_degree_two_matches_bruteforce(baseline_q):
    np.testing.assert_array_equal(symmetrizer_recursive(baseline_q, 2),
                                  symmetrizer_bruteforce(baseline_q, 2))


def test_recursive_uniform_half_degree_four():
    q = QSpec.uniform(2, 0.5)
    dev = np.max(np.abs(symmetrizer_recursive(q, 4) - symmetrizer_bruteforce(q, 4)))
    assert dev < 1e-12


@pytest.mark.parametrize("n", range(0, 6))
def test_recursive_free_case_is_identity(n):
    np.testing.assert_array_equal(symmetrizer_recursive(QSpec.uniform(2, 0.0), n), np.eye(2**n))


@pytest.mark.parametrize("N,nmax", [(1, 6), (2, 6), (3, 5)])
def test_symmetrizers_against_inversion_weight_oracle(rng, N, nmax):
    q = QSpec.random(N, rng)
    for n in range(nmax + 1):
        ref = oracles.symmetrizer(q.q, n)
        assert np.max(np.abs(symmetrizer_bruteforce(q, n) - ref)) < 1e-12
        assert np.max(np.abs(symmetrizer_recursive(q, n) - ref)) < 1e-10


@pytest.mark.parametrize("N", [2, 3])
def test_reduced_word_independence(rng, N):
    q = QSpec.random(N, rng)
    for n in range(6):
        a = symmetrizer_bruteforce(q, n, "bubble")
        b = symmetrizer_bruteforce(q, n, "lex")
        assert np.max(np.abs(a - b)) < 1e-12


def test_recursive_budget_error(baseline_q):
    with pytest.raises(CapabilityError, match=str(estimate_gram_bytes(2, 6))):
        symmetrizer_recursive(baseline_q, 6, budget=1000)


# --- Gram cache, inner product ---------------------------------------------------

def test_deformed_inner_examples(baseline_q):
    q = baseline_q
    c = GramCache(q, 2)
    om = FockVector.vacuum(2, 2)
    assert deformed_inner(c, om, om) == 1.0
    assert deformed_inner(c, e((1, 2), 2, 2), e((2, 1), 2, 2)) == q.q[0, 1]
    assert deformed_inner(c, e((1, 1), 2, 2), e((1, 1), 2, 2)) == pytest.approx(1 + q.q[0, 0], abs=1e-15)


def test_deformed_inner_degree_orthogonality(baseline_cache, rng):
    u = FockVector.random(2, 6, rng)
    v = FockVector.random(2, 6, rng)
    only = lambda w, n: FockVector(2, tuple(b if k == n else np.zeros_like(b) for k, b in enumerate(w.blocks)))
    for n in range(6):
        assert deformed_inner(baseline_cache.build(6), only(u, n), only(v, n + 1)) == 0.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_deformed_inner_symmetric(seed):
    rng = np.random.default_rng(seed)
    q = QSpec.random(2, rng)
    c = GramCache(q, 5)
    u, v = FockVector.random(2, 5, rng), FockVector.random(2, 5, rng)
    assert abs(deformed_inner(c, u, v) - deformed_inner(c, v, u)) < 1e-13 * max(1.0, abs(deformed_inner(c, u, v)))


def test_cache_missing_degree_is_state_error(baseline_q):
    c = GramCache(baseline_q, 2)
    v = FockVector.basis((1, 1, 1), 2, 3)
    with pytest.raises(StateError):
        deformed_inner(c, v, v)


def test_gram_entries_structure(baseline_cache):
    assert baseline_cache.P(0).tolist() == [[1.0]]
    np.testing.assert_array_equal(baseline_cache.P(1), np.eye(2))
    for n in range(6):
        P, L = baseline_cache.P(n), baseline_cache.L(n)
        np.testing.assert_array_equal(P, P.T)
        np.testing.assert_allclose(L @ L.T, P, atol=1e-12 * np.max(P))


def test_cache_file_roundtrip(tmp_path, baseline_q):
    c = GramCache(baseline_q, 4)
    path = tmp_path / "gram.npz"
    c.save(path)
    back = GramCache.load(baseline_q, path)
    assert back.degree == 4
    np.testing.assert_array_equal(back.P(4), c.P(4))
    with pytest.raises(StateError):
        GramCache.load(QSpec.uniform(2, 0.1), path)


# --- positivity -----------------------------------------------------------------

def test_positivity_free_case():
    c = GramCache(QSpec.uniform(2, 0.0), 6)
    assert all(positivity_report(c, n) == pytest.approx(1.0) for n in range(7))


@pytest.mark.parametrize("qv", [-0.7, 0.3, 0.8])
def test_positivity_single_letter_is_q_factorial(qv):
    c = GramCache(QSpec.uniform(1, qv), 8)
    for n in range(9):
        assert c.P(n).shape == (1, 1)
        assert positivity_report(c, n) == pytest.approx(oracles.q_factorial(qv, n), rel=1e-13)


def test_positivity_uniform_09_degree_8_baseline():
    c = GramCache(QSpec.uniform(2, 0.9), 8)
    lam = positivity_report(c, 8)
    assert lam > 0
    # regression baseline from a float64 eigensolve
    assert lam == pytest.approx(7.671655207880713e-06, rel=1e-6)


def test_definiteness_error_reported():
    from qfock.fock import _cholesky

    with pytest.raises(DefinitenessError, match="P_3"):
        _cholesky(np.array([[1.0, 1.0], [1.0, 1.0]]), 3)


# --- operator norms ------------------------------------------------------------------

def test_operator_norm_identity(baseline_cache):
    for n in range(5):
        assert deformed_operator_norm(baseline_cache, np.eye(2**n), n, n) == pytest.approx(1.0, rel=1e-12)


def test_operator_norm_free_symmetrizer():
    c = GramCache(QSpec.uniform(2, 0.0), 4)
    assert deformed_operator_norm(c, c.P(3), 3, 3) == 1.0


def test_operator_norm_degree_one_commutator(baseline_q, baseline_cache):
    w1 = LadderWord.parse("l1* r1")
    w2 = LadderWord.parse("r1 l1*")
    A = materialize(baseline_q, w1, 1) - materialize(baseline_q, w2, 1)
    # explicit action: diagonal with entry q_{1k} on e_k
    np.testing.assert_allclose(A, np.diag(baseline_q.q[0]), atol=1e-15)
    expected = np.max(np.abs(baseline_q.q[0]))
    assert deformed_operator_norm(baseline_cache, A, 1, 1) == pytest.approx(expected, rel=1e-12)


def test_operator_norm_matches_dense_oracle(rng):
    q = QSpec.random(2, rng)
    c = GramCache(q, 4)
    A = rng.standard_normal((8, 4))  # degree 2 -> degree 3
    G2, G3 = oracles.symmetrizer(q.q, 2), oracles.symmetrizer(q.q, 3)
    # largest generalized eigenvalue of A^T G3 A against G2
    from scipy.linalg import eigh

    ref = np.sqrt(eigh(A.T @ G3 @ A, G2, eigvals_only=True)[-1])
    assert deformed_operator_norm(c, A, 2, 3) == pytest.approx(ref, rel=1e-10)


def test_iter_words_order():
    assert list(iter_words(2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]

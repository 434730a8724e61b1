"""
qfock
=====

Finite truncations of the mixed q-Fock space built from the Yang-Baxter
operator ``T(e_i x e_j) = q_ij e_j x e_i``, with the operators and Wick
products needed to measure how fast the generator subalgebra ``W(xi0)''``
decouples from the rest of the mixed q-Gaussian algebra.

Modules
-------
::

 fock       -- QSpec, words, FockVector, symmetrizers P_n, GramCache, inner products
 operators  -- left/right creation and annihilation, s_j, commutators, ladder words
 wick       -- left and right Wick products, normalized powers v_n, trace
 masa       -- projection onto F_Q(R xi0), mixing terms, zeta probes, decay fits
 invariants -- randomized invariant suite behind ``qfock verify``
 cli        -- ``qfock {verify,gram,mixing,decay}``
"""

from .errors import (
    ArgumentError, CapabilityError, ConfigError, DefinitenessError, PreconditionError,
    QFockError, StateError, TruncationError,
)
from .fock import (
    FockVector, GramCache, QSpec, deformed_inner, deformed_norm, deformed_operator_norm,
    index_word, positivity_report, symmetrizer_bruteforce, symmetrizer_recursive,
    word_index, yang_baxter_site,
)
from .masa import (
    DecayFit, ExperimentSpec, ResultRow, conditional_expectation_vector, decay_fit,
    mixing_sum, mixing_term, mixing_term_via_right_wick, project_generator, run_experiment,
    zeta_probe,
)
from .operators import (
    LadderSymbol, LadderWord, Truncation, apply_annihilate, apply_create, apply_gaussian,
    apply_ladder_word, apply_right_gaussian, commutator_block, lemma3_bound_probe,
)
from .wick import WickOperator, trace, v_basis, wick_apply, wick_vacuum_norm2

__version__ = "0.1.0"

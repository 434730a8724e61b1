# coding: utf-8

# # Creation, annihilation and Wick products

# In[1]:

import numpy as np

from qfock import (
    FockVector, GramCache, LadderWord, QSpec, apply_gaussian, apply_ladder_word, commutator_block,
    deformed_inner, trace, wick_apply,
)
from qfock.wick import reverse_words

q = QSpec([[0.5, 0.3], [0.3, 0.4]])
cache = GramCache(q, 8)


# Ladder words are written left to right and act right to left, like operator products.

# In[2]:

e21 = FockVector.basis((2, 1), 2, 4)
print(apply_ladder_word(q, LadderWord.parse("l1*"), e21).block(1))   # q_12 e2


# The commutator of l_i* with r_j is diagonal on each degree. Its norm on degree n is
# q_ii^n when i = j and zero otherwise, comfortably below q_max^n.

# In[3]:

for n in range(6):
    print(n, commutator_block(q, 1, 1, n, cache)[1], q.q_max**n)


# W(eta) is the unique operator in the algebra with W(eta) Omega = eta.

# In[4]:

rng = np.random.default_rng(0)
eta = FockVector.random(2, 6, rng, top_degree=3)
out = wick_apply(q, "left", eta, FockVector.vacuum(2, 6))
print(np.max(np.abs(out.flat() - eta.flat())))


# Its adjoint is the Wick product of the reversed symbol, so the trace
# tau(W(eta)* W(eta)) returns the squared norm of eta.

# In[5]:

w = wick_apply(q, "left", reverse_words(eta), out)
print(trace(w), deformed_inner(cache, eta, eta))


# In[6]:

s1 = apply_gaussian(q, 1, FockVector.vacuum(2, 4))
print(trace(apply_gaussian(q, 1, s1)))   # tau(s1^2) = 1

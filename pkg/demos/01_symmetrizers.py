# coding: utf-8

# # Symmetrizers and the deformed inner product

# The Fock space is graded by word length. In degree n the inner product is
# given by the symmetrizer P_n, a sum over all permutations of n slots where each
# swap of neighbouring letters a, b picks up a factor q_ab.

# In[1]:

import numpy as np

from qfock import GramCache, QSpec, symmetrizer_bruteforce, symmetrizer_recursive, yang_baxter_site


# In[2]:

q = QSpec([[0.5, 0.3], [0.3, 0.4]])
q.q_max


# A single Yang-Baxter swap on degree 2 sends e1 x e2 to q_12 e2 x e1.
# Words are flattened with the first letter most significant, so e1 x e2 sits at index 1.

# In[3]:

v = np.zeros(4)
v[1] = 1.0
print(yang_baxter_site(q, 2, 1, v))


# The brute-force sum over S_n and the recursion P_n = (1 x P_{n-1}) R_n agree.

# In[4]:

for n in range(1, 6):
    gap = np.max(np.abs(symmetrizer_recursive(q, n) - symmetrizer_bruteforce(q, n)))
    print(n, gap)


# A GramCache keeps P_n and its Cholesky factor per degree. As q approaches 1 the smallest
# eigenvalue shrinks quickly, but it stays positive.

# In[5]:

near_one = GramCache(QSpec.uniform(2, 0.9), 8)
for n in range(9):
    print(n, near_one.min_eig(n))

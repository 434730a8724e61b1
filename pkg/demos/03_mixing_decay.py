# coding: utf-8

# # How fast does the generator subalgebra decouple?

# M is generated by W(xi0). Its vacuum vectors are the powers xi0^n, and v_n is the
# normalized n-th power. For x, y outside M we track
#
#     || E(x v_n y) - E(x) v_n E(y) ||_2^2
#
# and check that the series over n converges.

# In[1]:

from qfock import ExperimentSpec, GramCache, LadderWord, QSpec, mixing_sum, zeta_probe
from qfock.masa import decay_fit

q = QSpec([[0.5, 0.3], [0.3, 0.4]])
cache = GramCache(q, 10)


# With x = y = s2 and xi0 = e1 the terms are exactly 0.09^n = q_12^(2n).

# In[2]:

spec = ExperimentSpec(q=q, xi0=[1, 0], x_word=(2,), y_word=(2,), n_max=8, max_degree=10)
res = mixing_sum(spec, cache)
for r in res.rows:
    print(r.n, r.term, r.partial_sum)
print("fitted rate", res.fit.fitted_rate, "tail bound", res.tail_bound)


# The same machinery, applied to a single ladder word, measures the vectors that drive
# the decay. The l2* r2 probe decays like 0.3^n.

# In[3]:

rows = zeta_probe(q, cache, [1, 0], LadderWord.parse("l2* r2"), range(1, 9))
print(decay_fit(rows, (3, 8), field="zeta_norm_ratio"))


# The same numbers are available from the command line:
#
#     qfock mixing --config demos/baseline.json --out mixing.csv
#     qfock decay  --config demos/baseline.json

"""
Exact check of the flip correspondence between P_{k,n} and Q_{k,n}.

P_{k,n}: axis site k has an occupied path to the far left and k+1 a
vacant path to the far right.  Q_{k,n}: both paths occupied and disjoint.
Flipping every site to the right of the occupied path maps one event onto
the other at p = 1/2, so the two probabilities agree exactly.  We
enumerate every configuration of a 22-site domain.

    python demos/flip_duality.py
"""

from lowxing import Domain
from lowxing.events import EventSpec, compile_event
from lowxing.oracle import enumerate_probability

dom = Domain(2, 2.0, center=0)
print(f"domain with {dom.site_count} sites, {2 ** dom.site_count} configurations")
for k in (-1, 0):
    p = enumerate_probability(dom, compile_event(EventSpec("P", n=2, k=k), dom))
    q = enumerate_probability(dom, compile_event(EventSpec("Q", n=2, k=k), dom))
    print(f"k={k:2d}  P = {p.numerator}/2^{p.log2_denominator}"
          f"  Q = {q.numerator}/2^{q.log2_denominator}  equal: {p == q}")

union = enumerate_probability(dom, compile_event(EventSpec("P_union", n=2), dom))
print(f"P(some P_k) = {union.float_value:.6f}, the sum of the two, since the P_k are disjoint")

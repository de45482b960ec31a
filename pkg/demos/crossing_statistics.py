"""
How often the lowest crossing comes close to AB.

For each n we sample lowest crossings on a domain of twice the size of AB
and record X, the number of radius-m half-discs along AB it visits.  The
mean of X stays of order one while P(X >= 1) falls off like
1/log(n/m): the crossing rarely comes near AB, but when it does it runs
along it for a while.

    python demos/crossing_statistics.py
"""

import math

from lowxing.experiments import run_moments

m = 2
print(" n/m  mean_X   P(X>=1)  P(X>=1)*log(n/m)  E[X|X>=1]  truncated")
for ratio in (8, 16, 32, 64):
    r = run_moments(ratio * m, m, 2_000, 5)
    print(f"{ratio:4d}  {r.mean_X:6.3f}  {r.p_X_ge_1:7.4f}  {r.p_X_ge_1 * math.log(ratio):16.3f}"
          f"  {r.mean_X_given_X_ge_1:9.3f}  {r.truncated_fraction:9.3f}")

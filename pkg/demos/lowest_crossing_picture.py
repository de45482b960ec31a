"""
Draw the lowest occupied crossing of one sample.

Occupied sites are ``o``, vacant ``.``, the crossing is ``#``; each row is
shifted by half a site so the picture has the triangular geometry.  The
axis segment AB is marked underneath.

    python demos/lowest_crossing_picture.py [n] [seed]
"""

import sys

from lowxing import Domain, lowest_crossing, sample

n = int(sys.argv[1]) if len(sys.argv) > 1 else 12
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 3
m = 2 if n % 2 == 0 else 1

dom = Domain(n, truncation_factor=1.5)
for trial in range(200):
    cfg = sample(dom, 0.5, seed, trial)
    res = lowest_crossing(cfg, m=m)
    if res is not None:
        break
else:
    sys.exit("no crossing in 200 trials, try another seed")

on_path = set(res.path)
lo, _ = dom.axis_range
for r in range(min(dom.top_row, 2 * n), -1, -1):
    q0, q1 = dom.row_bounds(r)
    cells = []
    for q in range(q0, q1 + 1):
        s = (q, r)
        cells.append("#" if s in on_path else ("o" if cfg.is_occupied(s) else "."))
    print(" " * (r + 2 * (q0 - lo)) + " ".join(cells))
axis = "".join("AB"[0] if q == 0 else ("B" if q == n else ("-" if 0 < q < n else " "))
               for q in range(lo, lo + 2 * dom.radius))
print(" ".join(axis))

print(f"\ntrial {trial}: path of {len(res.path)} sites, distance to AB {res.min_distance_to_AB},"
      f" {len(res.contact_points)} contact points, X = {res.X} (m = {m}),"
      f" touched edge: {res.touched_truncation}")

"""First-return-time distributions on a few small graphs.

Run with ``python3 tutorials/01_first_return_times.py``.
"""

import numpy as np

from frtd import compute_frtd, datasets
from frtd.embedding import compute_frtd_directed, TeleportationConfig
from frtd.graph import parse_edge_list

np.set_printoptions(precision=4, suppress=True)

# A triangle: the walk can come back after two steps at the earliest, and
# each further step halves the remaining chance.
tri = datasets.cycle(3)
f = compute_frtd(tri, max_steps=5)
print("triangle, K=5\n", f.values)

# The last column is the mass that has not returned by step K, so every row
# is a probability vector.
print("row sums", f.values.sum(axis=1))

# On a star the centre always comes back at t=2; a leaf may wander to
# another leaf first, so its returns spread over even times.
star = datasets.star(3)
print("star, K=6\n", compute_frtd(star, 6).values)

# A bipartite graph never returns at odd times.
grid = compute_frtd(datasets.cycle(6), 9).values
print("odd-time columns of C_6 are zero:", np.all(grid[:, 0:9:2] == 0))

# Directed graphs use a teleporting walk; the reverse walk runs along
# in-edges, so both directions of connectivity are seen.
g = parse_edge_list("a b\nb c\nc a\nc d", directed=True)
fwd, rev = compute_frtd_directed(g, 6, TeleportationConfig(alpha=0.15))
print("forward node d", fwd[3])
print("reverse node d", rev[3])

"""Cospectral graphs are not necessarily FRTD-equivalent.

The 4-cycle and the 3-leaf star share the normalized-adjacency spectrum
{1, 0, 0, -1}. Return probabilities depend on eigenvector masses as well,
and those differ, so no node of one graph matches a node of the other.
"""

import itertools

import numpy as np

from frtd import compute_frtd, datasets, decompose, graphs_cospectral, nodes_frtd_equivalent
from frtd.distance import pairwise_distances
from frtd.spectral import frtd_from_spectrum

c4, s3 = datasets.cycle(4), datasets.star(3)
sd_c, sd_s = decompose(c4), decompose(s3)
print("eigenvalues", sd_c.eigenvalues, sd_s.eigenvalues)
print("cospectral:", graphs_cospectral(sd_c, sd_s))

for i, j in [(0, 0), (0, 1)]:
    v = nodes_frtd_equivalent(sd_c, i, sd_s, j)
    print(f"C4 node {i} vs S3 node {j}:", v.to_dict())

print("cross TV at K=16\n", pairwise_distances(compute_frtd(c4, 16), compute_frtd(s3, 16)))

# The spectral closed form reproduces the iterative computation.
g = datasets.karate_club()
sd = decompose(g)
gap = max(np.abs(compute_frtd(g, 40)[i] - frtd_from_spectrum(sd, i, 40)).max() for i in range(g.n))
print("karate: iterative vs spectral max gap", gap)

# The Frucht graph has no symmetries, yet two of its nodes share an FRTD.
fr = datasets.frucht()
d = pairwise_distances(compute_frtd(fr, 64))
print("Frucht pairs with equal FRTDs:",
      [(i, j) for i, j in itertools.combinations(range(fr.n), 2) if d[i, j] < 1e-10])

"""Structural roles in a barbell graph and the karate club.

Nodes are compared by the total variation between their FRTDs; spectral
clustering of the resulting similarity groups nodes that play the same
part in the network, wherever they sit.
"""

from frtd import compute_frtd, datasets, spectral_cluster, cluster_report
from frtd.distance import pairwise_distances

g = datasets.barbell(5, 1)
ra = spectral_cluster(pairwise_distances(compute_frtd(g, 50)), k=3, seed=0)
# clique interiors of both bells share a role; bridge ends and the path node get their own
for c, names in cluster_report(ra, g.node_labels).members.items():
    print(f"role {c}: nodes {names}")

k = datasets.karate_club()
ra = spectral_cluster(pairwise_distances(compute_frtd(k, 50)), k=3, seed=0)
degree = k.degrees
for c in range(3):
    members = (ra.labels == c).nonzero()[0]
    print(f"karate role {c}: {len(members)} nodes, mean degree {degree[members].mean():.1f}")

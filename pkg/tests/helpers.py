"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the library internals: the
partition-function oracle enumerates configurations directly from the
definition, and the generators build host graphs and systems from scratch.
"""

import itertools
import random
from fractions import Fraction

from spinlab import lattice as lm
from spinlab.system import WeightedGraph, config_weight, make_system


def graph_z(system, graph):
    """Brute-force partition function over all configurations of a graph."""
    total = system.zero()
    for f in itertools.product(range(system.n), repeat=graph.n_vertices):
        total += config_weight(system, graph, f)
    return total


def torus_graph(dims) -> WeightedGraph:
    """Simple-graph view of a discrete torus (wrap edges deduplicated)."""
    lat = lm.make_torus(dims)
    edges = set()
    for v in range(lat.n):
        for u in lat.neighbors[v]:
            edges.add((min(u, v), max(u, v)))
    return WeightedGraph(lat.n, sorted(edges))


def prism(graph: WeightedGraph) -> WeightedGraph:
    """Two layer copies of a graph joined by vertical rungs."""
    nv = graph.n_vertices
    edges = [(v, v + nv) for v in range(nv)]
    for (u, v) in graph.edges:
        edges.append((u, v))
        edges.append((u + nv, v + nv))
    return WeightedGraph(2 * nv, edges)


def random_graph(rng: random.Random, n_min=2, n_max=6) -> WeightedGraph:
    nv = rng.randint(n_min, n_max)
    edges = [(i, j) for i in range(nv) for j in range(i + 1, nv)
             if rng.random() < 0.5]
    return WeightedGraph(nv, edges)


def random_rational_system(rng: random.Random, n_min=2, n_max=4,
                           weights=(0, 1, 1, Fraction(1, 2))):
    n = rng.randint(n_min, n_max)
    acts = [Fraction(rng.randint(1, 3), rng.randint(1, 2)) for _ in range(n)]
    while True:
        inter = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                inter[i][j] = inter[j][i] = rng.choice(weights)
        if any(v != 0 for row in inter for v in row):
            return make_system([str(i) for i in range(n)], acts, inter)


def random_proper_coloring(lat, rng: random.Random, boundary_region):
    """Random proper 3-coloring of a box, halo and internal boundary pinned
    to the (even: {0}, odd: {1,2}) pattern sides; restarts on dead ends."""
    while True:
        f = [None] * lat.n
        ok = True
        for v in sorted(lat.halo):
            f[v] = 0 if lat.parity(v) == 0 else rng.choice([1, 2])
        for v in sorted(lat.interior):
            if v in boundary_region:
                pool = [0] if lat.parity(v) == 0 else [1, 2]
            else:
                pool = [0, 1, 2]
            used = {f[u] for u in lat.neighbors[v] if f[u] is not None}
            pool = [s for s in pool if s not in used]
            if not pool:
                ok = False
                break
            f[v] = rng.choice(pool)
        if ok:
            return f


def random_independent_config(lat, rng: random.Random, boundary_region):
    """Random occupied/empty configuration of a box with no two adjacent
    occupied sites; halo and even internal boundary pinned to empty."""
    f = [None] * lat.n
    for v in sorted(lat.halo):
        f[v] = 0 if lat.parity(v) == 0 else rng.choice([0, 1])
    for v in sorted(lat.interior):
        blocked = any(f[u] == 1 for u in lat.neighbors[v] if f[u] is not None)
        if blocked or (v in boundary_region and lat.parity(v) == 0):
            f[v] = 0
        else:
            f[v] = rng.choice([0, 1])
    return f


def ordered_config(lat, even_state=0, odd_states=(1, 2)):
    """Fully ordered configuration: even sites constant, odd sites
    alternating by column so no vertex sees a single-colored neighborhood."""
    f = [None] * lat.n
    for v in range(lat.n):
        r, c = lat.coords[v]
        if lat.parity(v) == 0:
            f[v] = even_state
        else:
            f[v] = odd_states[c % len(odd_states)]
    return f

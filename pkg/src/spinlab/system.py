"""Spin systems: states, activities, pair interactions, and the
weight-preserving / structural transformations between them.

A spin system is a finite set of states S with strictly positive single-site
activities lam[i] and a symmetric non-negative interaction matrix lam[i][j].
The weight of a configuration f on a graph is
prod_v lam[f(v)] * prod_{uv in E} lam[f(u)][f(v)].

Arithmetic mode is uniform per system: "rational" (exact Fractions) or
"float".  Rational numbers serialize as "p/q" strings in JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import errors

MAX_STATES = 64


# ---------------------------------------------------------------------------
# numbers

def parse_number(x, mode):
    """Parse a JSON-level number into the system's arithmetic mode."""
    if mode == "rational":
        if isinstance(x, bool):
            raise errors.SchemaError(f"not a number: {x!r}")
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, Fraction):
            return x
        if isinstance(x, str):
            try:
                return Fraction(x)
            except (ValueError, ZeroDivisionError) as e:
                raise errors.SchemaError(f"bad rational literal {x!r}") from e
        if isinstance(x, float):
            if x == int(x):
                return Fraction(int(x))
            raise errors.SchemaError(
                f"non-integral float {x!r} in rational mode; use a 'p/q' string")
        raise errors.SchemaError(f"not a number: {x!r}")
    elif mode == "float":
        if isinstance(x, str):
            try:
                return float(Fraction(x))
            except (ValueError, ZeroDivisionError) as e:
                raise errors.SchemaError(f"bad numeric literal {x!r}") from e
        if isinstance(x, (int, float, Fraction)) and not isinstance(x, bool):
            return float(x)
        raise errors.SchemaError(f"not a number: {x!r}")
    raise errors.SchemaError(f"unknown mode {mode!r}")


def emit_number(x):
    """Serialize a number for JSON output ('p/q' strings in rational mode)."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    return x


# ---------------------------------------------------------------------------
# core types

@dataclass
class SpinSystem:
    """Immutable-by-convention container for a spin system."""
    states: tuple
    activities: tuple
    interactions: tuple  # tuple of tuples, symmetric
    mode: str  # "rational" | "float"

    _neighbor_masks: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return len(self.states)

    def zero(self):
        return Fraction(0) if self.mode == "rational" else 0.0

    def one(self):
        return Fraction(1) if self.mode == "rational" else 1.0

    @property
    def max_interaction(self):
        return max(v for row in self.interactions for v in row)

    def neighbor_mask(self, i):
        """Bitmask of states j interacting with i at the maximal weight."""
        if self._neighbor_masks is None:
            m = self.max_interaction
            masks = []
            for a in range(self.n):
                bm = 0
                for b in range(self.n):
                    if self.interactions[a][b] == m:
                        bm |= 1 << b
                masks.append(bm)
            self._neighbor_masks = tuple(masks)
        return self._neighbor_masks[i]

    def positive_neighbor_mask(self, i):
        """Bitmask of states j with lam[i][j] > 0."""
        bm = 0
        for b in range(self.n):
            if self.interactions[i][b] > 0:
                bm |= 1 << b
        return bm

    def full_mask(self):
        return (1 << self.n) - 1

    def lambda_mask(self, mask):
        """Sum of activities over a state bitmask."""
        total = self.zero()
        i = 0
        while mask:
            if mask & 1:
                total += self.activities[i]
            mask >>= 1
            i += 1
        return total

    def mask_states(self, mask):
        return [i for i in range(self.n) if mask >> i & 1]

    def to_dict(self):
        return {
            "states": list(self.states),
            "activities": [emit_number(a) for a in self.activities],
            "interactions": [[emit_number(v) for v in row] for row in self.interactions],
            "mode": self.mode,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class WeightedGraph:
    """Simple undirected host graph; vertices are 0..n-1."""
    n_vertices: int
    edges: list  # list of (u, v) pairs
    parity: Optional[list] = None  # optional proper 2-coloring, values 0/1

    def __post_init__(self):
        for (u, v) in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise errors.SchemaError(f"edge {(u, v)} out of range")
        if self.parity is not None:
            if len(self.parity) != self.n_vertices:
                raise errors.SchemaError("parity labeling has wrong length")
            for (u, v) in self.edges:
                if self.parity[u] == self.parity[v]:
                    raise errors.SchemaError(
                        f"parity labeling is not a proper 2-coloring at edge {(u, v)}")


# ---------------------------------------------------------------------------
# validation / IO

def validate_system(raw: dict) -> SpinSystem:
    """Validate a parsed spec dict and build a SpinSystem.

    Enforces: positive activities, bit-exact symmetry, at least one positive
    interaction, |S| <= 64.
    """
    if not isinstance(raw, dict):
        raise errors.SchemaError("system spec must be a JSON object")
    for key in ("states", "activities", "interactions"):
        if key not in raw:
            raise errors.SchemaError(f"missing key {key!r}")
    mode = raw.get("mode", "rational")
    if mode not in ("rational", "float"):
        raise errors.SchemaError(f"mode must be 'rational' or 'float', got {mode!r}")
    states = tuple(str(s) for s in raw["states"])
    n = len(states)
    if n == 0:
        raise errors.SchemaError("empty state list")
    if n > MAX_STATES:
        raise errors.SchemaError(f"too many states ({n} > {MAX_STATES})")
    if len(set(states)) != n:
        raise errors.SchemaError("duplicate state labels")
    acts = [parse_number(a, mode) for a in raw["activities"]]
    if len(acts) != n:
        raise errors.SchemaError("activities length mismatch")
    for i, a in enumerate(acts):
        if not a > 0:
            raise errors.NonPositiveActivity(f"activity of state {states[i]!r} is {a}")
    rows = raw["interactions"]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise errors.SchemaError("interaction matrix must be n x n")
    inter = [[parse_number(v, mode) for v in row] for row in rows]
    for i in range(n):
        for j in range(i + 1, n):
            if inter[i][j] != inter[j][i]:
                raise errors.NonSymmetricInteractions(
                    f"lam[{states[i]},{states[j]}]={inter[i][j]} != "
                    f"lam[{states[j]},{states[i]}]={inter[j][i]}")
    for i in range(n):
        for j in range(n):
            if inter[i][j] < 0:
                raise errors.SchemaError("negative interaction weight")
    if all(v == 0 for row in inter for v in row):
        raise errors.AllZeroInteractions("all pair interactions are zero")
    return SpinSystem(states=states,
                      activities=tuple(acts),
                      interactions=tuple(tuple(r) for r in inter),
                      mode=mode)


def load_system(path) -> SpinSystem:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise errors.SchemaError(f"invalid JSON in {path}: {e}") from e
    return validate_system(raw)


def make_system(states, activities, interactions, mode="rational") -> SpinSystem:
    """Convenience constructor going through full validation."""
    return validate_system({
        "states": list(states),
        "activities": list(activities),
        "interactions": [list(r) for r in interactions],
        "mode": mode,
    })


# ---------------------------------------------------------------------------
# configuration weight

def config_weight(system: SpinSystem, graph: WeightedGraph, f: Sequence[int]):
    """prod_v lam[f(v)] * prod_{uv} lam[f(u)][f(v)]; exact in rational mode."""
    if len(f) != graph.n_vertices:
        raise errors.DomainMismatch(
            f"configuration has {len(f)} values for {graph.n_vertices} vertices")
    w = system.one()
    for v in range(graph.n_vertices):
        w *= system.activities[f[v]]
    for (u, v) in graph.edges:
        w *= system.interactions[f[u]][f[v]]
    return w


# ---------------------------------------------------------------------------
# transformations

def reweight(system: SpinSystem, multipliers, d: int) -> SpinSystem:
    """Rescale activities by m_i and interactions by (m_i m_j)^(-1/2d).

    Describes the same Gibbs measure on any 2d-regular host graph.  Output is
    float mode because of the fractional powers.
    """
    if len(multipliers) != system.n:
        raise errors.SchemaError("multiplier count mismatch")
    ms = [float(m) for m in multipliers]
    for m in ms:
        if not m > 0:
            raise errors.NonPositiveMultiplier(str(m))
    acts = [float(a) * m for a, m in zip(system.activities, ms)]
    inter = [[(ms[i] * ms[j]) ** (-1.0 / (2 * d)) * float(system.interactions[i][j])
              for j in range(system.n)] for i in range(system.n)]
    return make_system(system.states, acts, inter, mode="float")


def product(sys1: SpinSystem, sys2: SpinSystem) -> SpinSystem:
    """Product system on S1 x S2 with componentwise weights."""
    if sys1.mode != sys2.mode:
        raise errors.SchemaError("product requires matching arithmetic modes")
    states = [f"({a},{b})" for a in sys1.states for b in sys2.states]
    pairs = [(i, j) for i in range(sys1.n) for j in range(sys2.n)]
    acts = [sys1.activities[i] * sys2.activities[j] for (i, j) in pairs]
    inter = [[sys1.interactions[i][k] * sys2.interactions[j][l]
              for (k, l) in pairs] for (i, j) in pairs]
    return make_system(states, acts, inter, mode=sys1.mode)


def project_from_doubled(system: SpinSystem) -> SpinSystem:
    """Collapse a system living on G x K2 onto G.

    New states are the positively-interacting ordered pairs (i,j); activities
    lam_i lam_j lam[i][j]; interactions lam[i][k] lam[j][l].
    """
    pairs = [(i, j) for i in range(system.n) for j in range(system.n)
             if system.interactions[i][j] > 0]
    if not pairs:
        raise errors.EmptyProjectedSpace("no positive interaction")
    states = [f"({system.states[i]},{system.states[j]})" for (i, j) in pairs]
    acts = [system.activities[i] * system.activities[j] * system.interactions[i][j]
            for (i, j) in pairs]
    inter = [[system.interactions[i][k] * system.interactions[j][l]
              for (k, l) in pairs] for (i, j) in pairs]
    return make_system(states, acts, inter, mode=system.mode)


def bipartite_cover(system: SpinSystem):
    """Two-layer cover: states S x {0,1}, edges only across layers.

    Returns (cover_system, phi) where phi maps cover state index -> base state
    index.  The interaction between (i,0) and (j,1) is lam[i][j]; same-layer
    interactions are 0.
    """
    n = system.n
    states = [f"({s},0)" for s in system.states] + [f"({s},1)" for s in system.states]
    acts = list(system.activities) * 2
    zero = system.zero()
    inter = [[zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            w = system.interactions[i][j]
            inter[i][n + j] = w
            inter[n + j][i] = w
    phi = list(range(n)) * 2
    return make_system(states, acts, inter, mode=system.mode), phi


def check_lift_permitting(system: SpinSystem, cover_states, cover_edges, phi) -> bool:
    """Check that an explicit finite cover graph permits lifting.

    (a) phi must restrict to a bijection from each cover neighborhood onto the
        neighborhood of the image (else NotACover);
    (b) every 4-step walk v0..v4 in the cover with v0 != v4 must have
        phi(v0) != phi(v4) (else NotLiftPermitting).

    The base graph has an edge {i,j} (possibly a self-loop) whenever
    lam[i][j] > 0.
    """
    m = len(cover_states)
    if sorted(set(phi)) != list(range(system.n)):
        raise errors.NotACover("phi is not onto the base states")
    if len(phi) != m:
        raise errors.NotACover("phi length mismatch")
    cover_nbrs = [set() for _ in range(m)]
    for (u, v) in cover_edges:
        cover_nbrs[u].add(v)
        cover_nbrs[v].add(u)
    base_nbrs = [set() for _ in range(system.n)]
    for i in range(system.n):
        for j in range(system.n):
            if system.interactions[i][j] > 0:
                base_nbrs[i].add(j)
    for v in range(m):
        images = [phi[u] for u in cover_nbrs[v]]
        if len(set(images)) != len(images) or set(images) != base_nbrs[phi[v]]:
            raise errors.NotACover(
                f"phi is not a bijection from N({cover_states[v]}) onto the "
                f"base neighborhood")
    for v0 in range(m):
        for v1 in cover_nbrs[v0]:
            for v2 in cover_nbrs[v1]:
                for v3 in cover_nbrs[v2]:
                    for v4 in cover_nbrs[v3]:
                        if v4 != v0 and phi[v4] == phi[v0]:
                            raise errors.NotLiftPermitting(
                                f"4-walk {v0}->{v1}->{v2}->{v3}->{v4} has "
                                f"distinct endpoints with equal images")
    return True

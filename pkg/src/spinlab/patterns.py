"""Pattern analysis: common-neighborhood closure, maximal and dominant
patterns, pattern equivalence, and the answer-count exponent frak_q.

All state subsets are bitmasks over the state indices.  H is the graph on
states whose edges are the pairs achieving the maximal interaction weight
(self-loops allowed).  R(I) is the set of common H-neighbors of I, with
R(empty) = S.  A pattern is an ordered pair (A, B) with every cross pair
achieving the maximal interaction; it is maximal iff A and B are both fixed
points of R o R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import errors
from .system import SpinSystem

FRAK_Q_MAX_STATES = 24  # safety valve; the closure method needs far less


@dataclass(frozen=True)
class Pattern:
    a: int  # bitmask
    b: int  # bitmask

    def swapped(self):
        return Pattern(self.b, self.a)


def weight(system: SpinSystem, p: Pattern):
    return system.lambda_mask(p.a) * system.lambda_mask(p.b)


def r_closure(system: SpinSystem, mask: int) -> int:
    """Common max-interaction neighbors of the states in mask; S for mask=0."""
    result = system.full_mask()
    i = 0
    m = mask
    while m:
        if m & 1:
            result &= system.neighbor_mask(i)
        m >>= 1
        i += 1
    return result


def is_pattern(system: SpinSystem, a: int, b: int) -> bool:
    return b & ~r_closure(system, a) == 0


def r_sets(system: SpinSystem) -> list:
    """All fixed points of R o R, as the intersection closure of the
    neighborhoods together with the full set."""
    gens = {system.neighbor_mask(i) for i in range(system.n)}
    closed = {system.full_mask()}
    frontier = list(closed)
    while frontier:
        cur = frontier.pop()
        for g in gens:
            x = cur & g
            if x not in closed:
                closed.add(x)
                frontier.append(x)
    return sorted(closed)


def maximal_patterns(system: SpinSystem) -> list:
    """All patterns (A, R(A)) with A ranging over the fixed-point sets."""
    return [Pattern(a, r_closure(system, a)) for a in r_sets(system)]


def dominant_patterns(system: SpinSystem, rel_tol=1e-12):
    """Maximal-weight patterns and their common weight.

    In float mode near-ties within rel_tol of the maximum are included and
    reported via the returned tie flag.
    """
    pats = maximal_patterns(system)
    weights = [weight(system, p) for p in pats]
    wmax = max(weights)
    if system.mode == "rational":
        dom = [p for p, w in zip(pats, weights) if w == wmax]
        near_tie = False
    else:
        dom = [p for p, w in zip(pats, weights)
               if w == wmax or (wmax > 0 and abs(w - wmax) <= rel_tol * wmax)]
        strict = [p for p, w in zip(pats, weights) if w == wmax]
        near_tie = len(dom) > len(strict)
    return dom, wmax, near_tie


def find_equivalence(system: SpinSystem, p: Pattern, q: Pattern,
                     direct: bool) -> Optional[tuple]:
    """Search for a bijection phi of the states preserving activities and
    interactions with phi(A)=A', phi(B)=B' (or the swapped target when not
    direct).  Returns phi as a tuple or None."""
    targets = [q] if direct else [q, q.swapped()]
    for tgt in targets:
        phi = _find_direct(system, p, tgt)
        if phi is not None:
            return phi
    return None


def _find_direct(system: SpinSystem, p: Pattern, q: Pattern) -> Optional[tuple]:
    n = system.n
    if bin(p.a).count("1") != bin(q.a).count("1"):
        return None
    if bin(p.b).count("1") != bin(q.b).count("1"):
        return None
    acts = system.activities
    inter = system.interactions

    # candidate images: equal activity, equal interaction multiset, and
    # compatible membership in the two pattern sides
    def compatible(i, j):
        if acts[i] != acts[j]:
            return False
        if sorted(inter[i]) != sorted(inter[j]):
            return False
        if bool(p.a >> i & 1) != bool(q.a >> j & 1):
            return False
        if bool(p.b >> i & 1) != bool(q.b >> j & 1):
            return False
        return True

    cands = [[j for j in range(n) if compatible(i, j)] for i in range(n)]
    order = sorted(range(n), key=lambda i: len(cands[i]))
    phi = [-1] * n
    used = [False] * n

    def backtrack(k):
        if k == n:
            return True
        i = order[k]
        for j in cands[i]:
            if used[j]:
                continue
            ok = True
            for i2 in order[:k]:
                if inter[i][i2] != inter[j][phi[i2]]:
                    ok = False
                    break
            if ok:
                phi[i] = j
                used[j] = True
                if backtrack(k + 1):
                    return True
                phi[i] = -1
                used[j] = False
        return False

    if not backtrack(0):
        return None
    result = tuple(phi)
    # re-verify all conditions before returning
    assert all(acts[i] == acts[result[i]] for i in range(n))
    assert all(inter[i][j] == inter[result[i]][result[j]]
               for i in range(n) for j in range(n))
    assert _image(result, p.a) == q.a and _image(result, p.b) == q.b
    return result


def _image(phi, mask):
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << phi[i]
        mask >>= 1
        i += 1
    return out


def all_dominant_equivalent(system: SpinSystem) -> bool:
    dom, _, _ = dominant_patterns(system)
    if len(dom) <= 1:
        return True
    p0 = dom[0]
    return all(find_equivalence(system, p0, q, direct=False) is not None
               for q in dom[1:])


def direct_equivalence_classes(system: SpinSystem, patterns: list) -> list:
    """Partition a pattern list into direct-equivalence classes."""
    classes = []
    for p in patterns:
        for cls in classes:
            if find_equivalence(system, cls[0], p, direct=True) is not None:
                cls.append(p)
                break
        else:
            classes.append([p])
    return classes


def equivalence_classes(system: SpinSystem, patterns: list) -> list:
    classes = []
    for p in patterns:
        for cls in classes:
            if find_equivalence(system, cls[0], p, direct=False) is not None:
                cls.append(p)
                break
        else:
            classes.append([p])
    return classes


def frak_q(system: SpinSystem) -> float:
    """log2 of the number of distinct answers to "which dominant patterns
    have their small side containing I", over all subsets I.

    The answer for I is the intersection of the answers for the singletons in
    I, so the distinct answers form the intersection closure of the singleton
    answers together with the answer for the empty set.
    """
    if system.n > FRAK_Q_MAX_STATES:
        raise errors.SpinSpaceTooLarge(str(system.n))
    dom, _, _ = dominant_patterns(system)
    small = [p for p in dom
             if bin(p.a).count("1") <= bin(p.b).count("1")]
    full = frozenset(range(len(small)))
    singleton = []
    for i in range(system.n):
        singleton.append(frozenset(
            k for k, p in enumerate(small) if p.a >> i & 1))
    closed = {full}
    frontier = [full]
    while frontier:
        cur = frontier.pop()
        for g in singleton:
            x = cur & g
            if x not in closed:
                closed.add(x)
                frontier.append(x)
    return math.log2(len(closed))


def small_large_side_counts(system: SpinSystem):
    """Counts of dominant patterns with |A| <= |B| and with |A| >= |B|."""
    dom, _, _ = dominant_patterns(system)
    small = sum(1 for p in dom if bin(p.a).count("1") <= bin(p.b).count("1"))
    large = sum(1 for p in dom if bin(p.a).count("1") >= bin(p.b).count("1"))
    return small, large


@dataclass
class PatternCatalog:
    maximal: list
    dominant: list
    omega_dom: object
    equivalence_classes: list
    direct_classes: list
    frak_q: float
    all_dominant_equivalent: bool
    near_tie: bool = False

    def to_dict(self, system: SpinSystem):
        from .system import emit_number

        def fmt(p):
            return {"A": sorted(system.states[i] for i in system.mask_states(p.a)),
                    "B": sorted(system.states[i] for i in system.mask_states(p.b)),
                    "weight": emit_number(weight(system, p))}

        return {
            "maximal": [fmt(p) for p in self.maximal],
            "dominant": [fmt(p) for p in self.dominant],
            "omega_dom": emit_number(self.omega_dom),
            "equivalence_classes": [[fmt(p) for p in cls]
                                    for cls in self.equivalence_classes],
            "direct_classes": [[fmt(p) for p in cls]
                               for cls in self.direct_classes],
            "frak_q": self.frak_q,
            "all_dominant_equivalent": self.all_dominant_equivalent,
            "near_tie": self.near_tie,
        }


def analyze(system: SpinSystem) -> PatternCatalog:
    maximal = maximal_patterns(system)
    dom, wmax, near_tie = dominant_patterns(system)
    return PatternCatalog(
        maximal=maximal,
        dominant=dom,
        omega_dom=wmax,
        equivalence_classes=equivalence_classes(system, dom),
        direct_classes=direct_equivalence_classes(system, dom),
        frak_q=frak_q(system),
        all_dominant_equivalent=all_dominant_equivalent(system),
        near_tie=near_tie,
    )

"""Exact restricted partition functions on the complete bipartite graph
K_{2d,2d}.

Z(Psi, I) sums, over left-side assignments psi in Psi and right-side values
constrained to I,
    prod_j lam[psi(j)] * (sum_{i in I} lam_i prod_j lam[i, psi(j)])^{2d}.

The fast evaluator groups assignments by their multiplicity vector xi over a
small ground set; class membership (value-set equivalence, near-constant
assignments) depends only on xi, and the number of assignments with content
xi is a multinomial (or a small DP for per-coordinate product constraints).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import errors, patterns
from .system import SpinSystem, make_system

MAX_GROUND = 20
MAX_D = 64
MAX_SUBSET_SIDE = 16


# ---------------------------------------------------------------------------
# specs

@dataclass
class PsiSpec:
    """Description of a set of left-side assignments [2d] -> S.

    kinds:
      explicit               - psis: list of tuples
      product                - coords: per-coordinate allowed bitmasks
      class                  - cls in {"full", "near_dominant", "near_subset",
                               "balanced"} over ground side J
      class_minus            - cls minus cls2 (same J)
      class_intersect_product- class constraint and per-coordinate masks
    "full" is the value-set-equivalent-to-J class; "near_dominant" /
    "near_subset" are its near-constant subclasses (thresholds eps, eps_bar);
    "balanced" is full minus both.
    """
    kind: str
    J: int = 0
    cls: str = "full"
    cls2: str = None
    eps: float = None
    eps_bar: float = None
    psis: list = None
    coords: list = None


def class_spec(J, cls="full", eps=None, eps_bar=None):
    return PsiSpec(kind="class", J=J, cls=cls, eps=eps, eps_bar=eps_bar)


# ---------------------------------------------------------------------------
# brute force

def z_bruteforce(system: SpinSystem, d: int, psis, I_mask: int):
    """Direct evaluation over an explicit list of assignments."""
    if 2 * d > 6 or system.n > 5:
        raise errors.TooLarge(f"brute force guard: 2d={2*d}, |S|={system.n}")
    return _z_explicit(system, d, psis, I_mask)


def _z_explicit(system, d, psis, I_mask):
    total = system.zero()
    I_states = system.mask_states(I_mask)
    for psi in psis:
        left = system.one()
        for v in psi:
            left *= system.activities[v]
        inner = system.zero()
        for i in I_states:
            t = system.activities[i]
            for v in psi:
                t *= system.interactions[i][v]
            inner += t
        total += left * inner ** (2 * d)
    return total


# ---------------------------------------------------------------------------
# content-level class predicates

class _ClassContext:
    """Precomputed data for content-level membership tests over a side J."""

    def __init__(self, system, d, J, eps, eps_bar):
        self.system = system
        self.d = d
        self.J = J
        self.eps = eps
        self.eps_bar = eps_bar
        self.rJ = patterns.r_closure(system, J)
        if bin(J).count("1") > MAX_SUBSET_SIDE:
            raise errors.GroundSetTooLarge(f"side has {bin(J).count('1')} states")
        dom, _, _ = patterns.dominant_patterns(system)
        dom_sides = {p.a for p in dom} | {p.b for p in dom}
        # strict subsets of J that are dominant sides
        self.dom_subsets = [a for a in dom_sides if a != J and a & ~J == 0]
        # proper subsets of J not value-set-equivalent to J
        self.inequiv_subsets = [
            I for I in _submasks(J) if I != J
            and patterns.r_closure(system, I) != self.rJ]

    def ground_mask(self):
        return patterns.r_closure(self.system, self.rJ)

    def _count_in(self, xi, mask):
        return sum(c for s, c in xi.items() if mask >> s & 1)

    def in_full(self, xi):
        supp = 0
        for s in xi:
            supp |= 1 << s
        return patterns.r_closure(self.system, supp) == self.rJ

    def in_near_dominant(self, xi):
        thr = 2 * self.d - 4 * self.eps * self.d
        return any(self._count_in(xi, I) > thr for I in self.dom_subsets)

    def in_near_subset(self, xi):
        thr = 2 * self.d - 4 * self.eps_bar * self.d
        return any(self._count_in(xi, I) > thr for I in self.inequiv_subsets)

    def member(self, xi, cls):
        if not self.in_full(xi):
            return False
        if cls == "full":
            return True
        if cls == "near_dominant":
            return self.in_near_dominant(xi)
        if cls == "near_subset":
            return self.in_near_subset(xi)
        if cls == "balanced":
            return not (self.in_near_dominant(xi) or self.in_near_subset(xi))
        raise errors.SchemaError(f"unknown class {cls!r}")


def _submasks(mask):
    """All submasks of mask, including 0 and mask itself."""
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return out


# ---------------------------------------------------------------------------
# composition evaluator

def _compositions(total, states):
    """Yield dicts state -> positive count summing to total."""
    if not states:
        if total == 0:
            yield {}
        return
    first, rest = states[0], states[1:]
    for c in range(total + 1):
        for tail in _compositions(total - c, rest):
            if c:
                d = {first: c}
                d.update(tail)
                yield d
            else:
                yield tail


def _multinomial(n, counts):
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(c)
    return out


def _product_count(coords, xi, n_states):
    """Number of assignments with content xi where coordinate j takes a value
    allowed by the bitmask coords[j]."""
    items = sorted(xi.items())
    states = [s for s, _ in items]
    memo = {}

    def rec(j, remaining):
        if j == len(coords):
            return 1 if all(c == 0 for c in remaining) else 0
        key = (j, remaining)
        if key in memo:
            return memo[key]
        total = 0
        for k, s in enumerate(states):
            if remaining[k] > 0 and coords[j] >> s & 1:
                nxt = list(remaining)
                nxt[k] -= 1
                total += rec(j + 1, tuple(nxt))
        memo[key] = total
        return total

    return rec(0, tuple(c for _, c in items))


def _spec_context(system, d, spec):
    if spec.kind in ("class", "class_minus", "class_intersect_product"):
        return _ClassContext(system, d, spec.J, spec.eps, spec.eps_bar)
    if spec.kind != "product":
        raise errors.SchemaError(f"unknown spec kind {spec.kind!r}")
    return None


def _spec_ground_mask(system, spec, ctx):
    if spec.kind == "product":
        g = 0
        for m in spec.coords:
            g |= m
        return g
    if spec.kind == "class_intersect_product":
        g = 0
        for m in spec.coords:
            g |= m
        return g
    return ctx.ground_mask()


def _xi_count(system, d, spec, ctx, xi):
    """Number of assignments in the spec with content xi."""
    if spec.kind == "product":
        return _product_count(spec.coords, xi, system.n)
    if spec.kind == "class":
        if not ctx.member(xi, spec.cls):
            return 0
        return _multinomial(2 * d, xi.values())
    if spec.kind == "class_minus":
        if ctx.member(xi, spec.cls) and not ctx.member(xi, spec.cls2):
            return _multinomial(2 * d, xi.values())
        return 0
    if spec.kind == "class_intersect_product":
        if not ctx.member(xi, spec.cls):
            return 0
        return _product_count(spec.coords, xi, system.n)
    raise errors.SchemaError(f"unknown spec kind {spec.kind!r}")


def z_compositions(system: SpinSystem, d: int, spec: PsiSpec, I_mask: int):
    """Evaluate Z(Psi, I) by summing over multiplicity vectors."""
    if d > MAX_D:
        raise errors.TooLarge(f"d={d}")
    if spec.kind == "explicit":
        return _z_explicit(system, d, spec.psis, I_mask)
    ctx = _spec_context(system, d, spec)
    ground = _spec_ground_mask(system, spec, ctx)
    g_states = system.mask_states(ground)
    if len(g_states) > MAX_GROUND:
        raise errors.GroundSetTooLarge(str(len(g_states)))
    I_states = system.mask_states(I_mask)
    total = system.zero()
    for xi in _compositions(2 * d, g_states):
        cnt = _xi_count(system, d, spec, ctx, xi)
        if cnt == 0:
            continue
        z0 = system.one()
        for s, c in xi.items():
            z0 *= system.activities[s] ** c
        z1 = system.zero()
        for i in I_states:
            t = system.activities[i]
            for s, c in xi.items():
                t *= system.interactions[i][s] ** c
            z1 += t
        total += cnt * z0 * z1 ** (2 * d)
    return total


def expand_spec(system: SpinSystem, d: int, spec: PsiSpec, limit=10 ** 6):
    """Explicit list of assignments described by a spec (test oracle use)."""
    if spec.kind == "explicit":
        return list(spec.psis)
    if system.n ** (2 * d) > limit:
        raise errors.TooLarge("explicit expansion too large")
    ctx = _spec_context(system, d, spec)
    out = []
    for psi in itertools.product(range(system.n), repeat=2 * d):
        xi = {}
        for v in psi:
            xi[v] = xi.get(v, 0) + 1
        if spec.kind == "product":
            if all(spec.coords[j] >> psi[j] & 1 for j in range(2 * d)):
                out.append(psi)
        elif spec.kind == "class":
            if ctx.member(xi, spec.cls):
                out.append(psi)
        elif spec.kind == "class_minus":
            if ctx.member(xi, spec.cls) and not ctx.member(xi, spec.cls2):
                out.append(psi)
        elif spec.kind == "class_intersect_product":
            if ctx.member(xi, spec.cls) and \
                    all(spec.coords[j] >> psi[j] & 1 for j in range(2 * d)):
                out.append(psi)
    return out


# ---------------------------------------------------------------------------
# image-restricted power sums

def lambda_restricted_power(system: SpinSystem, A_mask: int, n: int):
    """Total activity weight of functions [n] -> A whose image is not inside
    any maximal-pattern side strictly contained in A.  Inclusion-exclusion
    over the inclusion-maximal such sides."""
    sides = {p.a for p in patterns.maximal_patterns(system)}
    family = [b for b in sides if b != A_mask and b & ~A_mask == 0]
    # only inclusion-maximal members matter for the union of down-sets
    family = [b for b in family
              if not any(b != c and b & ~c == 0 for c in family)]
    if len(family) > 20:
        raise errors.GroundSetTooLarge(f"{len(family)} excluded sides")
    total = system.lambda_mask(A_mask) ** n
    for r in range(1, len(family) + 1):
        sign = 1 if r % 2 == 1 else -1
        for combo in itertools.combinations(family, r):
            inter = A_mask
            for b in combo:
                inter &= b
            total -= sign * system.lambda_mask(inter) ** n
    return total


# ---------------------------------------------------------------------------
# global enumeration bound

def z_complete_bipartite(system: SpinSystem, d: int):
    """Z with both sides unconstrained: the partition function on K_{2d,2d}."""
    spec = PsiSpec(kind="product", coords=[system.full_mask()] * (2 * d))
    return z_compositions(system, d, spec, system.full_mask())


def shearer_global_bound(system: SpinSystem, d: int) -> float:
    """(1/4d) log Z(K_{2d,2d}): per-vertex upper bound for the log-partition
    function on 2d-regular bipartite host graphs."""
    z = z_complete_bipartite(system, d)
    return math.log(z) / (4 * d)


# ---------------------------------------------------------------------------
# abstract-condition verifier

def normalize_interactions(system: SpinSystem) -> SpinSystem:
    """Rescale interactions so the maximal pair interaction is 1."""
    m = system.max_interaction
    if m == 1:
        return system
    inter = [[v / m for v in row] for row in system.interactions]
    return make_system(system.states, system.activities, inter, mode=system.mode)


def _realized_coordinate_sets(system, d, coords, ctx, cls):
    """For each coordinate, the set of values actually taken by some member
    of (product coords) intersected with the class."""
    realized = []
    for j, mask in enumerate(coords):
        vals = 0
        for v in system.mask_states(mask):
            probe = list(coords)
            probe[j] = 1 << v
            found = False
            ground = 0
            for m in probe:
                ground |= m
            for xi in _compositions(2 * d, system.mask_states(ground)):
                if not ctx.member(xi, cls):
                    continue
                if _product_count(probe, xi, system.n) > 0:
                    found = True
                    break
            if found:
                vals |= 1 << v
        realized.append(vals)
    return realized


def k_of_product(system, d, coords, ctx, cls="balanced"):
    """Number of coordinates whose realized value set is not value-set
    equivalent to the ground side."""
    realized = _realized_coordinate_sets(system, d, coords, ctx, cls)
    k = 0
    for vals in realized:
        if patterns.r_closure(system, vals) != ctx.rJ:
            k += 1
    return k


def verify_main_condition(system: SpinSystem, d: int, alpha: float,
                          gamma: float, eps: float, eps_bar: float,
                          n_random: int = 100, seed: int = 0,
                          max_restricted: int = 3) -> dict:
    """Numerically check the abstract inequalities behind the explicit
    conditions, for every dominant side.

    The first family of inequalities quantifies over all subsets of the
    balanced class; this is untestable exhaustively, so the policy here
    checks all product forms whose coordinate sets are the side J or one of
    its strict fixed-point subsets (at most `max_restricted` restricted
    coordinates), plus `n_random` seeded random product forms.  Documented
    as a sound-but-incomplete check.
    """
    if system.max_interaction != 1:
        raise errors.NotNormalized(
            "interactions must be normalized to maximum 1")
    dom, omega, _ = patterns.dominant_patterns(system)
    maximal = patterns.maximal_patterns(system)
    dom_set = set(dom)
    sides = sorted(_sides_of(dom))
    omega_2d = float(omega) ** (2 * d)
    rng = random.Random(seed)
    results = []

    def record(name, J, lhs, log_rhs, k=None):
        lhs_f = float(lhs)
        rhs = omega_2d * math.exp(log_rhs)
        alpha_tight = None
        if lhs_f > 0:
            # largest alpha-coefficient the inequality tolerates
            alpha_tight = (2 * gamma * d - math.log(lhs_f / omega_2d))
        results.append({
            "name": name,
            "J": _label(system, J) if J is not None else None,
            "k": k,
            "lhs": lhs_f,
            "rhs": rhs,
            "holds": lhs_f <= rhs,
            "alpha_budget": alpha_tight,
        })

    all_rsets = patterns.r_sets(system)
    for J in sides:
        ctx = _ClassContext(system, d, J, eps, eps_bar)
        strict = [a for a in all_rsets if a != J and a & ~J == 0 and a != 0]
        # (1) product subsets of the balanced class
        families = []
        for k in range(0, max_restricted + 1):
            for combo in itertools.combinations_with_replacement(strict, k):
                coords = list(combo) + [J] * (2 * d - k)
                families.append(coords)
        for _ in range(n_random):
            coords = [rng.choice([J] + strict) for _ in range(2 * d)]
            families.append(coords)
        seen = set()
        for coords in families:
            key = tuple(sorted(coords))
            if key in seen:
                continue
            seen.add(key)
            spec = PsiSpec(kind="class_intersect_product", J=J,
                           cls="balanced", eps=eps, eps_bar=eps_bar,
                           coords=coords)
            lhs = z_compositions(system, d, spec, system.full_mask())
            k_psi = k_of_product(system, d, coords, ctx) if lhs > 0 else \
                sum(1 for c in coords if patterns.r_closure(system, c) != ctx.rJ)
            record("restricted_left", J, lhs,
                   2 * gamma * d - alpha * k_psi, k=k_psi)
        # (2) right-side restriction
        bal = class_spec(J, "balanced", eps, eps_bar)
        rJ = patterns.r_closure(system, J)
        for I in range(1 << system.n):
            rrI = patterns.r_closure(system, patterns.r_closure(system, I))
            if rJ & ~rrI:  # R(J) not within the double closure
                lhs = z_compositions(system, d, bal, I)
                record("restricted_right", J, lhs, 2 * gamma * d - alpha * d)
        # (3) near-constant assignments
        spec = PsiSpec(kind="class_minus", J=J, cls="full", cls2="balanced",
                       eps=eps, eps_bar=eps_bar)
        lhs = z_compositions(system, d, spec, system.full_mask())
        record("unbalanced", J, lhs, 2 * gamma * d - alpha * d)
        # (4) energetically costly right side
        lhs = z_compositions(system, d, bal, system.full_mask() & ~rJ)
        record("highly_energetic", J, lhs,
               2 * gamma * d - 3 * alpha * eps * d * d)

    # (5) non-dominant sides, summed
    nd_sides = set()
    for p in maximal:
        if p not in dom_set:
            nd_sides.add(p.a)
            nd_sides.add(p.b)
    total = system.zero()
    for I in sorted(nd_sides):
        total += z_compositions(system, d, class_spec(I), system.full_mask())
    record("non_dominant", None, total, 2 * gamma * d - alpha * d)

    return {
        "d": d, "alpha": alpha, "gamma": gamma, "eps": eps,
        "eps_bar": eps_bar,
        "inequalities": results,
        "pass": all(r["holds"] for r in results),
    }


def _sides_of(pats):
    out = set()
    for p in pats:
        out.add(p.a)
        out.add(p.b)
    return out


def _label(system, mask):
    return ",".join(system.states[i] for i in system.mask_states(mask))

"""Finite-volume Gibbs measures on boxes and tori.

Boundary conditions are pattern constraints: configurations live on the
interior of a box, and each internal-boundary vertex is restricted to the
even or odd side of a dominant pattern according to its parity.

Three evaluators:
  * exact_measure / z_pattern_box - exact marginals and partition functions
    via a row-raster frontier DP;
  * z_torus / log_z_per_site_torus - exact free-boundary partition function
    of a torus via a sparse column transfer matrix (big rationals);
  * run_mcmc - heat-bath Glauber dynamics, deterministic raster scan,
    seeded PCG64 randomness, batch-means error bars.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import errors, lattice as lat_mod, patterns
from .patterns import Pattern
from .system import SpinSystem

MAX_FRONTIER = 2 * 10 ** 6
MAX_COLUMNS = 5000

RNG_ID = "numpy-pcg64"


# ---------------------------------------------------------------------------
# pattern boundary conditions

@dataclass
class PatternBoundary:
    pattern: Pattern

    def region(self, lat) -> frozenset:
        """Internal boundary of the box interior."""
        return frozenset(
            v for v in lat.interior
            if len(lat.neighbors[v]) < lat.degree
            or any(u in lat.halo for u in lat.neighbors[v]))

    def allowed_mask(self, lat, system, v) -> int:
        if v in self.region(lat):
            return self.pattern.a if lat.parity(v) == 0 else self.pattern.b
        return system.full_mask()

    def side_mask(self, lat, v) -> int:
        """The pattern side a vertex of this parity belongs to."""
        return self.pattern.a if lat.parity(v) == 0 else self.pattern.b


def sample_halo_extension(system: SpinSystem, lat, pattern: Pattern,
                          rng) -> dict:
    """Random halo assignment: each halo site independently takes a value in
    its parity's pattern side, with probability proportional to activity."""
    a_states = system.mask_states(pattern.a)
    b_states = system.mask_states(pattern.b)
    if not a_states or not b_states:
        raise errors.EmptySupport("pattern side has no states")
    out = {}
    for v in sorted(lat.halo):
        pool = a_states if lat.parity(v) == 0 else b_states
        weights = [float(system.activities[s]) for s in pool]
        tot = sum(weights)
        u = float(rng.random()) * tot
        acc = 0.0
        pick = pool[-1]
        for s, w in zip(pool, weights):
            acc += w
            if u <= acc:
                pick = s
                break
        out[v] = pick
    return out


# ---------------------------------------------------------------------------
# exact evaluation on a box (2D raster DP)

def _check_box_2d(lat):
    if lat.kind != "box" or lat.d != 2:
        raise errors.TooLarge("exact evaluation implemented for 2D boxes")


def _allowed_masks(system, lat, boundary: PatternBoundary):
    region = boundary.region(lat)
    full = system.full_mask()
    out = {}
    for v in lat.interior:
        if v in region:
            out[v] = boundary.pattern.a if lat.parity(v) == 0 \
                else boundary.pattern.b
        else:
            out[v] = full
    return out


def _dp_z(system, lat, allowed, fix):
    """Raster DP over interior rows; frontier keyed by the last w values."""
    _check_box_2d(lat)
    h, w = lat.dims
    if system.n ** w > MAX_FRONTIER:
        raise errors.StateSpaceTooLarge(f"{system.n}^{w} frontier states")
    grid = [[lat.index[(r, c)] for c in range(w)] for r in range(h)]
    acts = system.activities
    inter = system.interactions
    zero = system.zero()

    frontier = {(): system.one()}
    for r in range(h):
        for c in range(w):
            v = grid[r][c]
            mask = allowed[v]
            forced = fix.get(v)
            if forced is not None:
                mask &= 1 << forced
            choices = system.mask_states(mask)
            new = {}
            for key, wgt in frontier.items():
                left = key[-1] if c > 0 else None
                up = key[0] if len(key) == w else None
                for s in choices:
                    sw = acts[s]
                    if left is not None:
                        sw = sw * inter[s][left]
                    if up is not None:
                        sw = sw * inter[s][up]
                    if sw == zero:
                        continue
                    nk = key[1:] + (s,) if len(key) == w else key + (s,)
                    if nk in new:
                        new[nk] += wgt * sw
                    else:
                        new[nk] = wgt * sw
            frontier = new
            if not frontier:
                return zero
    total = zero
    for wgt in frontier.values():
        total += wgt
    return total


def z_pattern_box(system: SpinSystem, lat, boundary: PatternBoundary):
    """Partition function over interior configurations obeying the pattern
    boundary constraint."""
    return _dp_z(system, lat, _allowed_masks(system, lat, boundary), {})


def exact_measure(system: SpinSystem, lat, boundary: PatternBoundary,
                  site) -> dict:
    """Exact single-site marginal.  Returns {state label: probability}."""
    if isinstance(site, tuple):
        site = lat.index[site]
    allowed = _allowed_masks(system, lat, boundary)
    zs = [_dp_z(system, lat, allowed, {site: s}) for s in range(system.n)]
    total = sum(zs)
    if total == 0:
        raise errors.EmptySupport("boundary admits no configuration")
    if system.mode == "rational":
        return {system.states[s]: zs[s] / total for s in range(system.n)}
    return {system.states[s]: float(zs[s]) / float(total)
            for s in range(system.n)}


def prob_not_in_pattern(system: SpinSystem, lat, boundary: PatternBoundary,
                        site):
    """Probability that a site's value falls outside its parity's side."""
    if isinstance(site, tuple):
        site = lat.index[site]
    marg = exact_measure(system, lat, boundary, site)
    side = boundary.side_mask(lat, site)
    inside = sum(marg[system.states[s]] for s in system.mask_states(side))
    return 1 - inside


# ---------------------------------------------------------------------------
# torus partition function

def z_torus(system: SpinSystem, dims):
    """Exact free-boundary partition function on a discrete torus.  2D tori
    go through a sparse column transfer matrix; small tori of any dimension
    fall back to direct enumeration."""
    dims = tuple(dims)
    n_sites = 1
    for x in dims:
        n_sites *= x
    if len(dims) == 2 and all(x >= 3 for x in dims):
        # with a side of length < 3 the wrap edge coincides with a nearest-
        # neighbor edge, so the transfer decomposition would double-count it
        return _z_torus_transfer(system, dims[0], dims[1])
    if system.n ** n_sites > 10 ** 7:
        raise errors.StateSpaceTooLarge(f"{system.n}^{n_sites}")
    return _z_enumerate_torus(system, dims)


def _z_enumerate_torus(system, dims):
    lat = lat_mod.make_torus(dims)
    zero = system.zero()
    total = zero
    edges = set()
    for v in range(lat.n):
        for u in lat.neighbors[v]:
            edges.add((min(u, v), max(u, v)))
    for f in itertools.product(range(system.n), repeat=lat.n):
        wgt = system.one()
        for v in range(lat.n):
            wgt *= system.activities[f[v]]
        for (u, v) in edges:
            wgt *= system.interactions[f[u]][f[v]]
            if wgt == zero:
                break
        total += wgt
    return total


def _z_torus_transfer(system, n1, n2):
    """Columns of height n1 (vertical wrap); n2 columns with horizontal wrap.
    Z = trace(M^{n2}) with M[i][j] = w(col_i) * t(col_i, col_j)."""
    n = system.n
    acts = system.activities
    inter = system.interactions
    zero = system.zero()

    cols = []
    weights = []
    for col in itertools.product(range(n), repeat=n1):
        wgt = system.one()
        for i in range(n1):
            wgt *= acts[col[i]]
            wgt *= inter[col[i]][col[(i + 1) % n1]]
            if wgt == zero:
                break
        if wgt != zero:
            cols.append(col)
            weights.append(wgt)
    if len(cols) > MAX_COLUMNS:
        raise errors.StateSpaceTooLarge(f"{len(cols)} transfer states")
    m = len(cols)
    rows = []
    for i in range(m):
        row = {}
        for j in range(m):
            t = weights[i]
            ci, cj = cols[i], cols[j]
            for k in range(n1):
                t *= inter[ci[k]][cj[k]]
                if t == zero:
                    break
            if t != zero:
                row[j] = t
        rows.append(row)

    def matmul(a, b):
        out = []
        for i in range(m):
            acc = {}
            for k, av in a[i].items():
                for j, bv in b[k].items():
                    if j in acc:
                        acc[j] += av * bv
                    else:
                        acc[j] = av * bv
            out.append(acc)
        return out

    result = None
    base = rows
    e = n2
    while e:
        if e & 1:
            result = base if result is None else matmul(result, base)
        e >>= 1
        if e:
            base = matmul(base, base)
    total = zero
    for i in range(m):
        total += result[i].get(i, zero)
    return total


def log_z_per_site_torus(system: SpinSystem, dims) -> float:
    z = z_torus(system, dims)
    n_sites = 1
    for x in dims:
        n_sites *= x
    return _log_big(z) / n_sites


def _log_big(x) -> float:
    from fractions import Fraction
    if isinstance(x, Fraction):
        return _log_int(x.numerator) - _log_int(x.denominator)
    return math.log(x)


def _log_int(n: int) -> float:
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 900
    return math.log(n >> shift) + shift * math.log(2)


# ---------------------------------------------------------------------------
# heat-bath MCMC

@dataclass
class MCMCResult:
    site: int
    n_sweeps: int
    burn_in: int
    seed: int
    rng_id: str
    marginal: dict          # state label -> estimate
    se: dict                # state label -> batch-means standard error
    n_batches: int
    trace_counts: dict      # state label -> total count after burn-in
    config: list = field(default_factory=list)  # final interior values


def conditional_weights(system: SpinSystem, allowed_mask: int,
                        neighbor_values) -> list:
    """Unnormalized heat-bath law at a site: activity times the product of
    interactions with the given neighbor values, zeroed outside the mask."""
    out = []
    for s in range(system.n):
        if not allowed_mask >> s & 1:
            out.append(0.0)
            continue
        w = float(system.activities[s])
        for t in neighbor_values:
            w *= float(system.interactions[s][t])
        out.append(w)
    return out


def _safe_state_exists(system) -> bool:
    for s in range(system.n):
        if all(system.interactions[s][t] > 0 for t in range(system.n)) \
                and system.activities[s] > 0:
            return True
    return False


def initial_pattern_config(system: SpinSystem, lat,
                           boundary: PatternBoundary) -> list:
    """Deterministic pattern tiling of the interior: each site takes the
    lowest-index state of its parity's side."""
    a_states = system.mask_states(boundary.pattern.a)
    b_states = system.mask_states(boundary.pattern.b)
    if not a_states or not b_states:
        raise errors.NoAdmissibleStart("pattern side empty")
    out = [0] * lat.n
    for v in range(lat.n):
        out[v] = a_states[0] if lat.parity(v) == 0 else b_states[0]
    return out


def _build_tables(system, d, class_masks):
    """Cumulative conditional laws per site class, indexed by the packed
    values of the 2d neighbor slots in base |S|+1; the extra value is a
    free slot (missing neighbor)."""
    n = system.n
    base = n + 1
    n_keys = base ** (2 * d)
    if n_keys * n * len(class_masks) > 2 * 10 ** 7:
        raise errors.StateSpaceTooLarge(f"{n_keys} neighbor keys")
    acts = np.array([float(a) for a in system.activities])
    inter = np.ones((n, base))
    for s in range(n):
        for t in range(n):
            inter[s, t] = float(system.interactions[s][t])
    tables = np.zeros((len(class_masks), n_keys, n))
    for ci, mask in enumerate(class_masks):
        sel = np.array([1.0 if mask >> s & 1 else 0.0 for s in range(n)])
        for key in range(n_keys):
            k = key
            wgt = acts * sel
            for _ in range(2 * d):
                wgt = wgt * inter[:, k % base]
                k //= base
            tables[ci, key] = np.cumsum(wgt)
    return tables


_NUMBA_KERNEL = None


def _get_kernel():
    global _NUMBA_KERNEL
    if _NUMBA_KERNEL is not None:
        return _NUMBA_KERNEL
    try:
        import numba
    except ImportError:  # pragma: no cover
        _NUMBA_KERNEL = False
        return False

    @numba.njit(cache=True)
    def kernel(config, order, nbrs, cls, tables, n, base, uniforms, trace,
               site):
        n_sweeps = trace.shape[0]
        m = order.shape[0]
        deg = nbrs.shape[1]
        idx = 0
        for sweep in range(n_sweeps):
            for t in range(m):
                v = order[t]
                key = 0
                for j in range(deg):
                    key = key * base + config[nbrs[v, j]]
                row = tables[cls[v], key]
                u01 = uniforms[idx] * row[n - 1]
                idx += 1
                s = 0
                while row[s] < u01:
                    s += 1
                config[v] = s
            trace[sweep] = config[site]
        return idx

    _NUMBA_KERNEL = kernel
    return kernel


def _sweep_python(config, order, nbrs, cls, tables, n, base, uniforms):
    idx = 0
    for v in order:
        key = 0
        for u in nbrs[v]:
            key = key * base + config[u]
        row = tables[cls[v]][key]
        u01 = uniforms[idx] * row[n - 1]
        idx += 1
        s = 0
        while row[s] < u01:
            s += 1
        config[v] = s


def run_mcmc(system: SpinSystem, lat, boundary: PatternBoundary, site,
             n_sweeps: int = 10 ** 6, seed: int = 0,
             burn_in: int = None, n_batches: int = 40,
             force: bool = False) -> MCMCResult:
    """Heat-bath dynamics on the interior of a box under a pattern boundary
    constraint, recording the value at one site after every sweep."""
    if lat.kind != "box":
        raise errors.TooLarge("sampler runs on boxes")
    if not _safe_state_exists(system) and not force:
        raise errors.IrreducibilityUnknown(
            "hard constraints present and no universally compatible state; "
            "pass force=True to sample anyway")
    if isinstance(site, tuple):
        site = lat.index[site]
    if burn_in is None:
        burn_in = max(1, n_sweeps // 10) if n_sweeps else 0
    n = system.n
    base = n + 1
    order = np.array(sorted(lat.interior), dtype=np.int64)
    m = len(order)
    deg = lat.degree
    dummy = lat.n  # virtual free neighbor slot
    allowed = _allowed_masks(system, lat, boundary)
    class_masks = sorted({allowed[v] for v in lat.interior})
    cls = np.zeros(lat.n, dtype=np.int64)
    nbrs = np.full((lat.n, deg), dummy, dtype=np.int64)
    interior = set(lat.interior)
    for v in lat.interior:
        cls[v] = class_masks.index(allowed[v])
        j = 0
        for u in lat.neighbors[v]:
            if u in interior:
                nbrs[v, j] = u
                j += 1
    tables = _build_tables(system, lat.d, class_masks)
    rng = np.random.Generator(np.random.PCG64(seed))
    config = np.full(lat.n + 1, n, dtype=np.int64)
    init = initial_pattern_config(system, lat, boundary)
    for v in lat.interior:
        config[v] = init[v]
    trace = np.zeros(n_sweeps, dtype=np.int64)

    kernel = _get_kernel()
    if n_sweeps and kernel:
        chunk = 50000
        done = 0
        while done < n_sweeps:
            cur = min(chunk, n_sweeps - done)
            uniforms = rng.random(cur * m)
            kernel(config, order, nbrs, cls, tables, n, base, uniforms,
                   trace[done:done + cur], site)
            done += cur
    elif n_sweeps:  # pragma: no cover - exercised only without numba
        tbl = [t.tolist() for t in tables]
        nbrs_l = nbrs.tolist()
        cfg = config.tolist()
        order_l = order.tolist()
        cls_l = cls.tolist()
        for sweep in range(n_sweeps):
            uniforms = rng.random(m).tolist()
            _sweep_python(cfg, order_l, nbrs_l, cls_l, tbl, n, base, uniforms)
            trace[sweep] = cfg[site]
        config = np.array(cfg)

    marginal, se, counts = {}, {}, {}
    n_kept = n_sweeps - burn_in
    if n_kept > 0:
        kept = trace[burn_in:]
        batch = max(1, n_kept // n_batches)
        nb = n_kept // batch
        for s in range(n):
            label = system.states[s]
            ind = (kept == s).astype(np.float64)
            counts[label] = int(ind.sum())
            marginal[label] = float(ind.mean())
            means = ind[:batch * nb].reshape(nb, batch).mean(axis=1)
            se[label] = float(means.std(ddof=1) / math.sqrt(nb)) \
                if nb > 1 else float("nan")
    else:
        nb = 0
    return MCMCResult(site=int(site), n_sweeps=n_sweeps, burn_in=burn_in,
                      seed=seed, rng_id=RNG_ID, marginal=marginal, se=se,
                      n_batches=nb, trace_counts=counts,
                      config=[int(config[v]) for v in range(lat.n)])

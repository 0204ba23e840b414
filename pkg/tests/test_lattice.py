import random

import pytest

from spinlab import errors
from spinlab import lattice as lm


def test_box_structure():
    lat = lm.make_box((3, 4))
    assert lat.kind == "box" and lat.d == 2 and lat.degree == 4
    assert len(lat.interior) == 12
    assert len(lat.halo) == 2 * (3 + 4)
    assert lat.n == 26
    center = lat.index[(1, 1)]
    assert len(lat.neighbors[center]) == 4
    corner_halo = lat.index[(-1, 0)]
    # stored neighbors: (0,0) and the halo site (-1,1)
    assert len(lat.neighbors[corner_halo]) == 2
    assert lat.parity(lat.index[(0, 0)]) == 0
    assert lat.parity(lat.index[(0, 1)]) == 1
    assert lat.dist(lat.index[(0, 0)], lat.index[(2, 3)]) == 5


def test_torus_structure():
    lat = lm.make_torus((4, 6))
    assert lat.n == 24 and not lat.halo
    v = lat.index[(0, 0)]
    assert sorted(lat.coords[u] for u in lat.neighbors[v]) \
        == [(0, 1), (0, 5), (1, 0), (3, 0)]
    assert lat.dist(lat.index[(0, 0)], lat.index[(3, 5)]) == 2  # wraps
    with pytest.raises(errors.ParamOutOfRange):
        lm.make_torus((3, 4))  # odd side breaks the 2-coloring


def test_parse_lattice():
    lat = lm.parse_lattice("box:3x4+halo")
    assert lat.kind == "box" and lat.dims == (3, 4)
    lat = lm.parse_lattice("torus:4x4")
    assert lat.kind == "torus"
    for bad in ("torus:4x4+halo", "box:0x4", "box:axb", "prism:4x4", "junk"):
        with pytest.raises(errors.SchemaError):
            lm.parse_lattice(bad)


def test_boundary_operators():
    lat = lm.make_box((4, 4))
    v = lat.index[(1, 1)]
    u_set = {v}
    nb = {lat.index[c] for c in ((0, 1), (2, 1), (1, 0), (1, 2))}
    assert lm.nbhd(lat, u_set) == nb
    assert lm.outer_boundary(lat, u_set) == nb
    assert lm.inner_boundary(lat, u_set) == frozenset(u_set)
    assert lm.closed_boundary(lat, u_set) == nb | u_set
    assert lm.plus_(lat, u_set) == nb | u_set
    assert lm.plus_r(lat, u_set, 2) == lm.plus_(lat, lm.plus_(lat, u_set))
    assert lm.edge_boundary_size(lat, u_set) == 4
    assert len(lm.directed_edge_boundary(lat, u_set)) == 4
    # halo sites carry their unstored ambient edges
    h = lat.index[(-1, 0)]
    assert lm.edge_boundary_size(lat, {h}) == 4
    assert len(lm.directed_edge_boundary(lat, {h})) == 2


def test_plus_shape_is_tight_odd_set():
    lat = lm.make_box((5, 5))
    center = lat.index[(2, 2)]
    u_set = lm.plus_(lat, {center})
    assert lm.is_odd_set(lat, u_set)
    assert lm.is_regular_odd(lat, u_set)
    assert lm.edge_boundary_size(lat, u_set) == 12  # equality case
    lhs, rhs = lm.odd_set_identity(lat, u_set)
    assert lhs == rhs == 3
    # a single odd site is not the expansion of its even part
    odd_site = lat.index[(2, 1)]
    assert not lm.is_regular_odd(lat, {odd_site})


def test_n_t_degree_bound():
    lat = lm.make_box((6, 6))
    rng = random.Random(3)
    sites = sorted(lat.interior)
    for _ in range(25):
        u_set = frozenset(v for v in sites if rng.random() < 0.4)
        for t in range(1, 5):
            assert len(lm.n_t(lat, u_set, t)) * t <= lat.degree * len(u_set)
    assert lm.n_t(lat, lat.all_sites(), 5) == frozenset()


def test_wrapping_set_detection():
    lat = lm.make_torus((6, 6))
    wrap = frozenset(lat.index[(0, c)] for c in range(6)) \
        | frozenset(lat.index[(r, 0)] for r in range(6))
    with pytest.raises(errors.WrappingSet):
        lm.odd_set_identity(lat, wrap)


def test_components():
    lat = lm.make_box((6, 6))
    a = lat.index[(0, 0)]
    b = lat.index[(0, 1)]
    c = lat.index[(3, 3)]
    comps = lm.components(lat, {a, b, c})
    assert sorted(len(x) for x in comps) == [1, 2]
    # radius-2 adjacency merges sites at distance 2
    d = lat.index[(0, 2)]
    assert len(lm.components(lat, {a, d}, r=2)) == 1
    assert lm.diam_star(lat, {a, c}) == 4
    assert lm.diam_star(lat, {a, b}) == 3


def test_connectivity_to_exterior():
    lat = lm.make_box((5, 5))
    center = lat.index[(2, 2)]
    ring = frozenset(lat.index[c] for c in ((1, 2), (3, 2), (2, 1), (2, 3)))
    assert lm.connected_to_infinity(lat, frozenset(), center)
    assert not lm.connected_to_infinity(lat, ring, center)
    assert not lm.connected_to_infinity(lat, ring, next(iter(ring)))
    far = lat.index[(0, 0)]
    assert lm.connected_to_infinity(lat, ring, far)
    torus = lm.make_torus((4, 4))
    with pytest.raises(errors.NoInfinityOnTorus):
        lm.connected_to_infinity(torus, frozenset(), 0)
    with pytest.raises(errors.NoInfinityOnTorus):
        lm.separating_components(torus, frozenset(), frozenset())


def test_co_connected_closure():
    lat = lm.make_box((5, 5))
    center = lat.index[(2, 2)]
    ring = frozenset(lat.index[c] for c in ((1, 2), (3, 2), (2, 1), (2, 3)))
    far = lat.index[(0, 0)]
    assert lm.co_connected_closure(lat, ring, far) == ring | {center}
    assert lm.co_connected_closure(lat, ring, center) \
        == lat.all_sites() - {center}
    assert lm.co_connected_closure(lat, ring, next(iter(ring))) \
        == lat.all_sites()


def test_separating_components():
    lat = lm.make_box((8, 8))
    center = lat.index[(4, 4)]
    # connected square ring enclosing the center
    ring = frozenset(lat.index[(r, c)] for r in (3, 4, 5) for c in (3, 4, 5)
                     if (r, c) != (4, 4))
    blob = frozenset({lat.index[(0, 0)]})
    kept = lm.separating_components(lat, ring | blob, {center})
    assert kept == ring  # the far blob neither wraps the viewpoint nor
    # touches the exterior halo
    halo_piece = frozenset({lat.index[(-1, 3)]})
    kept = lm.separating_components(lat, ring | halo_piece, {center})
    assert kept == ring | halo_piece
    # a disconnected diamond of four singletons cuts nothing by itself
    diamond = frozenset(lat.index[c]
                        for c in ((3, 4), (5, 4), (4, 3), (4, 5)))
    assert lm.separating_components(lat, diamond, {center}) == frozenset()


def test_random_odd_set_is_interior():
    lat = lm.make_box((8, 8))
    rng = random.Random(4)
    for _ in range(10):
        u_set = lm.random_odd_set(lat, rng)
        assert u_set <= lat.interior
        assert lm.is_odd_set(lat, u_set)

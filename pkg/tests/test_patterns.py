import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spinlab import catalog, errors, patterns
from spinlab.patterns import Pattern
from spinlab.system import make_system

AF3 = catalog.build("af_potts", q=3)
AF4 = catalog.build("af_potts", q=4)
HC = catalog.build("hard_core", lam=1)
BEACH = catalog.build("beach", lam=2)


# ---------------------------------------------------------------------------
# closure operator

def test_r_closure_basics():
    assert patterns.r_closure(AF3, 0) == 0b111          # empty set -> S
    assert patterns.r_closure(AF3, 0b001) == 0b110
    assert patterns.r_closure(AF3, 0b011) == 0b100
    assert patterns.r_closure(AF3, 0b111) == 0
    assert patterns.r_closure(HC, 0b01) == 0b11
    assert patterns.r_closure(HC, 0b11) == 0b01


@given(st.integers(0, 15), st.integers(0, 15))
def test_r_closure_antitone_and_triple(a, b):
    for system in (AF4, BEACH):
        if a & ~b == 0:  # a subset of b
            ra = patterns.r_closure(system, a)
            rb = patterns.r_closure(system, b)
            assert rb & ~ra == 0
        r = patterns.r_closure(system, a)
        rr = patterns.r_closure(system, r)
        assert patterns.r_closure(system, rr) == r


def test_is_pattern_and_weight():
    assert patterns.is_pattern(AF3, 0b001, 0b110)
    assert patterns.is_pattern(AF3, 0b001, 0b010)
    assert not patterns.is_pattern(AF3, 0b001, 0b001)
    assert patterns.weight(AF3, Pattern(0b001, 0b110)) == 2
    assert patterns.weight(HC, Pattern(0b01, 0b11)) == 2


# ---------------------------------------------------------------------------
# maximal / dominant structure

def test_af3_structure():
    assert len(patterns.r_sets(AF3)) == 8  # every subset is closed here
    maximal = patterns.maximal_patterns(AF3)
    assert len(maximal) == 8
    dom, omega, near_tie = patterns.dominant_patterns(AF3)
    assert omega == 2 and len(dom) == 6 and not near_tie
    assert Pattern(0b001, 0b110) in dom and Pattern(0b110, 0b001) in dom
    assert patterns.all_dominant_equivalent(AF3)
    direct = patterns.direct_equivalence_classes(AF3, dom)
    assert sorted(len(c) for c in direct) == [3, 3]
    assert len(patterns.equivalence_classes(AF3, dom)) == 1
    assert patterns.small_large_side_counts(AF3) == (3, 3)


def test_frak_q_values():
    assert abs(patterns.frak_q(AF3) - math.log2(5)) < 1e-12
    assert patterns.frak_q(HC) == 1.0


def test_frak_q_guard():
    big = catalog.build("multi_beach", q=13, lam=1)  # 26 states
    with pytest.raises(errors.SpinSpaceTooLarge):
        patterns.frak_q(big)


def test_find_equivalence():
    p = Pattern(0b001, 0b110)
    q = Pattern(0b010, 0b101)
    phi = patterns.find_equivalence(AF3, p, q, direct=True)
    assert phi is not None
    assert patterns._image(phi, p.a) == q.a
    assert patterns._image(phi, p.b) == q.b
    # swap is reachable only without directness
    assert patterns.find_equivalence(AF3, p, p.swapped(), direct=False) \
        is not None


def test_activity_asymmetry_blocks_direct_equivalence():
    system = catalog.build("af_potts_field", q=3, lam=2)
    dom, omega, _ = patterns.dominant_patterns(system)
    assert omega == 4
    assert set(dom) == {Pattern(0b001, 0b110), Pattern(0b110, 0b001)}
    direct = patterns.direct_equivalence_classes(system, dom)
    assert sorted(len(c) for c in direct) == [1, 1]
    assert patterns.all_dominant_equivalent(system)  # swap still works


def _near_tie_path_system(mode, lam3):
    # path 0-1-2-3 on states; two inequivalent maximal patterns whose
    # weights differ only through the last activity
    inter = [[1 if abs(i - j) == 1 else 0 for j in range(4)]
             for i in range(4)]
    return make_system(["0", "1", "2", "3"], [1, 1, 1, lam3], inter,
                       mode=mode)


def test_near_tie_detection():
    floaty = _near_tie_path_system("float", 1.0 + 2e-13)
    dom, _, near_tie = patterns.dominant_patterns(floaty)
    assert near_tie and len(dom) == 4
    exact = _near_tie_path_system(
        "rational", Fraction(10 ** 13 + 2, 10 ** 13))
    dom, _, near_tie = patterns.dominant_patterns(exact)
    assert not near_tie and len(dom) == 2


def test_analyze_catalog_dict():
    cat = patterns.analyze(AF3)
    payload = cat.to_dict(AF3)
    assert payload["omega_dom"] == 2
    assert len(payload["dominant"]) == 6
    assert payload["all_dominant_equivalent"] is True
    assert payload["near_tie"] is False
    assert {"A": ["1"], "B": ["2", "3"], "weight": 2} in payload["dominant"]

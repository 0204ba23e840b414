import math
from fractions import Fraction

import pytest

from spinlab import catalog, errors
from spinlab import kbipartite as kb
from spinlab import parameters

HC = catalog.build("hard_core", lam=1)
AF3 = catalog.build("af_potts", q=3)


def test_resource_guards():
    with pytest.raises(errors.TooLarge):
        kb.z_compositions(HC, 65, kb.class_spec(0b11), 0b11)
    with pytest.raises(errors.TooLarge):
        kb.z_bruteforce(HC, 4, [(0,) * 8], 0b11)
    with pytest.raises(errors.TooLarge):
        kb.z_bruteforce(catalog.build("multi_wr", q=6, lam=1), 1, [(0, 0)],
                        0b1)
    big = catalog.build("multi_beach", q=11, lam=1)  # 22-state side
    with pytest.raises(errors.GroundSetTooLarge):
        kb.z_compositions(big, 2, kb.class_spec(big.full_mask()),
                          big.full_mask())
    with pytest.raises(errors.TooLarge):
        kb.expand_spec(AF3, 10, kb.class_spec(0b111))


def test_explicit_spec_passthrough():
    psis = [(0, 1), (1, 0)]
    spec = kb.PsiSpec(kind="explicit", psis=psis)
    assert kb.z_compositions(HC, 1, spec, 0b11) \
        == kb.z_bruteforce(HC, 1, psis, 0b11)
    assert kb.expand_spec(HC, 1, spec) == psis


def test_unknown_spec_kinds():
    with pytest.raises(errors.SchemaError):
        kb.z_compositions(HC, 1, kb.PsiSpec(kind="mystery"), 0b11)
    with pytest.raises(errors.SchemaError):
        kb.z_compositions(HC, 1, kb.class_spec(0b11, "weird"), 0b11)


def test_class_partition_counts():
    # the near-constant subclasses carve the full class into parts
    eps = eps_bar = 0.125
    j_mask = 0b110
    full = len(kb.expand_spec(AF3, 2, kb.class_spec(j_mask, "full",
                                                    eps, eps_bar)))
    balanced = len(kb.expand_spec(AF3, 2, kb.class_spec(j_mask, "balanced",
                                                        eps, eps_bar)))
    rest = len(kb.expand_spec(
        AF3, 2, kb.PsiSpec(kind="class_minus", J=j_mask, cls="full",
                           cls2="balanced", eps=eps, eps_bar=eps_bar)))
    assert full == balanced + rest
    # intersecting with the unconstrained product changes nothing
    spec = kb.PsiSpec(kind="class_intersect_product", J=j_mask,
                      cls="balanced", eps=eps, eps_bar=eps_bar,
                      coords=[AF3.full_mask()] * 4)
    assert len(kb.expand_spec(AF3, 2, spec)) == balanced
    assert kb.z_compositions(AF3, 2, spec, 0b111) == kb.z_compositions(
        AF3, 2, kb.class_spec(j_mask, "balanced", eps, eps_bar), 0b111)


def test_lambda_restricted_power_closed_forms():
    for n in range(1, 6):
        # assignments into {0,1} that are not all-0
        assert kb.lambda_restricted_power(HC, 0b11, n) == 2 ** n - 1
        # assignments onto all three values' closure: miss all three
        # two-value sides
        assert kb.lambda_restricted_power(AF3, 0b111, n) \
            == 3 ** n - 3 * 2 ** n + 3
        assert kb.lambda_restricted_power(AF3, 0b001, n) == 1


def test_complete_bipartite_and_global_bound():
    assert kb.z_complete_bipartite(HC, 1) == 7
    brute = kb.z_bruteforce(
        HC, 2, [(a, b, c, d) for a in range(2) for b in range(2)
                for c in range(2) for d in range(2)], 0b11)
    assert kb.z_complete_bipartite(HC, 2) == brute
    assert abs(kb.shearer_global_bound(HC, 1) - math.log(7) / 4) < 1e-15


def test_normalize_interactions():
    from spinlab.system import make_system
    scaled = make_system(["0", "1"], [1, 1], [[2, 2], [2, 0]])
    norm = kb.normalize_interactions(scaled)
    assert norm.interactions == ((1, 1), (1, 0))
    assert kb.normalize_interactions(HC) is HC  # already normalized


def test_k_of_product():
    j_mask = 0b110
    ctx = kb._ClassContext(AF3, 2, j_mask, 0.125, 0.125)
    assert kb.k_of_product(AF3, 2, [j_mask] * 4, ctx) == 0


def test_verify_main_condition():
    from spinlab.system import make_system
    scaled = make_system(["0", "1"], [1, 1], [[2, 2], [2, 0]])
    with pytest.raises(errors.NotNormalized):
        kb.verify_main_condition(scaled, 3, 0.1, 0.0, 0.1, 0.1)

    defaults = parameters.section_defaults(HC, 3)
    rep = kb.verify_main_condition(HC, 3, defaults["alpha"],
                                   defaults["gamma"], defaults["eps"],
                                   defaults["eps_bar"], n_random=20, seed=0)
    assert rep["pass"], [r for r in rep["inequalities"] if not r["holds"]]
    names = {r["name"] for r in rep["inequalities"]}
    assert names == {"restricted_left", "restricted_right", "unbalanced",
                     "highly_energetic", "non_dominant"}
    assert all(set(r) >= {"name", "J", "lhs", "rhs", "holds",
                          "alpha_budget"} for r in rep["inequalities"])

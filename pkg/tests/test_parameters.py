import math
from fractions import Fraction

import pytest

from spinlab import catalog, errors, parameters

AF3 = catalog.build("af_potts", q=3)
HC = catalog.build("hard_core", lam=1)

INF = math.inf


def test_neg_log():
    assert parameters.neg_log(1) == 0.0
    assert parameters.neg_log(0) == INF
    assert abs(parameters.neg_log(0.5) - math.log(2)) < 1e-15
    with pytest.raises(ValueError):
        parameters.neg_log(-1)


def test_interaction_ratio():
    assert parameters.interaction_ratio(AF3) == 0
    soft = catalog.build("af_potts", q=3, beta=1)
    assert abs(parameters.interaction_ratio(soft) - math.exp(-1)) < 1e-15
    from spinlab.system import make_system
    flat = make_system(["a", "b"], [1, 1], [[1, 1], [1, 1]])
    assert parameters.interaction_ratio(flat) == 0  # all weights equal


def test_pattern_ratios_af3():
    omega, rho_bulk, rho_bdry, rho_act = parameters.pattern_ratios(AF3)
    assert (omega, rho_bulk, rho_bdry, rho_act) == (2, 0, Fraction(1, 2), 3)


def test_pattern_ratios_hard_core():
    omega, rho_bulk, rho_bdry, rho_act = parameters.pattern_ratios(HC)
    assert omega == 2 and rho_bulk == 0
    assert rho_bdry == Fraction(1, 2)  # activity of {0} over {0,1}
    assert rho_act == 2


def test_alpha0():
    assert abs(parameters.alpha0_of(HC) - math.log(2)) < 1e-12
    assert abs(parameters.alpha0_of(AF3) - math.log(2)) < 1e-12


def test_compute_parameters_report():
    rep = parameters.compute_parameters(AF3, d=10)
    assert rep.n_maximal == 8 and rep.n_dominant == 6
    assert rep.n_small_side == 3 and rep.n_large_side == 3
    assert rep.rho_hat_act == Fraction(9, 2)  # lam(S)^2 / omega
    assert rep.alpha1 < rep.alpha0
    assert rep.rho_bulk_star == 0.0  # no non-dominant mass here
    assert abs(rep.alpha3 - math.log(2)) < 1e-12
    payload = rep.to_dict()
    assert payload["rho_pat_bdry"] == "1/2"
    with pytest.raises(errors.ParamOutOfRange):
        parameters.compute_parameters(AF3, d=1)


def test_check_condition_guards():
    with pytest.raises(errors.ParamOutOfRange):
        parameters.check_condition(HC, 1, "simple")
    with pytest.raises(errors.ParamOutOfRange):
        parameters.check_condition(HC, 100, "weird")
    soft = catalog.build("af_potts", q=3, beta=1)
    with pytest.raises(errors.Alt3OnWeightedSystem):
        parameters.check_condition(soft, 100, "alt3")
    with pytest.raises(errors.Alt3OnWeightedSystem):
        parameters.rho_bulk_star_of(soft, 2)


def test_check_condition_alternatives():
    rep = parameters.check_condition(HC, 10 ** 12, "alt1")
    assert rep.passes
    assert rep.inequalities[1].vacuous

    rep = parameters.check_condition(HC, 10 ** 12, "alt3")
    assert rep.passes
    assert abs(rep.inequalities[0].lhs - math.log(2)) < 1e-12

    soft = catalog.build("af_potts", q=3, beta=1)
    rep = parameters.check_condition(soft, 100, "alt2")
    assert rep.condition == "alt2" and rep.s is not None
    payload = rep.to_dict()
    assert set(payload) >= {"condition", "d", "inequalities", "pass", "s"}
    assert all({"name", "lhs", "rhs", "holds", "margin"}
               <= set(iq) for iq in payload["inequalities"])


def test_inequality_margins():
    iq = parameters.Inequality("x", 1.0, 0.0, holds=True, vacuous=True)
    assert iq.margin == INF
    iq = parameters.Inequality("x", 2.0, 0.0, holds=True)
    assert iq.margin == INF
    iq = parameters.Inequality("x", 1.0, 2.0, holds=False)
    assert iq.margin == 0.5


def test_section_defaults_and_closed_form_bounds():
    defaults = parameters.section_defaults(HC, 1000)
    assert set(defaults) == {"alpha", "gamma", "gamma_hat", "eps",
                             "eps_bar", "s"}
    assert defaults["gamma"] == 0.0
    assert defaults["eps"] >= defaults["eps_bar"] >= 1.0 / 4000

    result = parameters.check_closed_form_bounds(HC, 10 ** 4)
    assert isinstance(result["pass"], bool)
    names = [iq["name"] for iq in result["inequalities"]]
    assert names == ["alpha_budget", "eps_chain_low", "eps_chain_mid",
                     "eps_chain_high", "bdry_entropy",
                     "bdry_entropy_weighted"]
    chain = {iq["name"]: iq for iq in result["inequalities"]}
    assert chain["eps_chain_low"]["holds"]
    assert chain["eps_chain_mid"]["holds"]
    assert chain["eps_chain_high"]["holds"]

    soft = catalog.build("af_potts", q=3, beta=2)
    result = parameters.check_closed_form_bounds(soft, 100)
    assert isinstance(result["pass"], bool)
    assert result["gamma"] > 0

import math
from fractions import Fraction

import pytest

from spinlab import catalog, errors, parameters

INF = math.inf


def test_model_name_validation():
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("ferro_potts", q=3)
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("af_potts", q=1)
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("clock", q=8, m=2)  # needs 4m < q
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("clock", q=5, m=0)
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("hard_core", lam=0)
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("hard_core", lam=-1)
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("af_potts", q=3, beta=-1)
    with pytest.raises(errors.ParamOutOfRange):
        catalog.build("af_potts_field", q=3)  # lam required


def test_zero_temperature_is_exact():
    system = catalog.build("af_potts", q=3)
    assert system.mode == "rational"
    assert system.interactions[0][0] == 0
    assert system.interactions[0][1] == 1
    system = catalog.build("af_potts", q=3, beta="inf")
    assert system.mode == "rational"


def test_finite_temperature_is_float():
    system = catalog.build("af_potts", q=3, beta=1)
    assert system.mode == "float"
    assert abs(system.interactions[0][0] - math.exp(-1)) < 1e-15
    assert system.interactions[0][1] == 1.0
    ising = catalog.build("af_ising_field", lam=2, beta=0.5)
    assert abs(ising.interactions[1][1] - math.exp(-2.0)) < 1e-15


def test_builder_structures():
    beach = catalog.build("beach", lam=3)
    assert beach.states == ("-2", "-1", "1", "2")
    assert beach.activities == (3, 1, 1, 3)
    assert beach.interactions[0][3] == 0   # -2 with 2 forbidden
    assert beach.interactions[0][2] == 0   # -2 with 1 forbidden
    assert beach.interactions[1][2] == 1   # -1 with 1 allowed

    wr = catalog.build("widom_rowlinson", lam=2)
    assert wr.activities == (2, 1, 2)
    assert wr.interactions[0][2] == 0 and wr.interactions[0][1] == 1

    mb = catalog.build("multi_beach", q=2, lam=3)
    assert mb.states == ("(0,1)", "(0,2)", "(1,1)", "(1,2)")
    assert mb.activities == (1, 1, 3, 3)

    v1 = catalog.build("multi_occupancy_hc_v1", q=3, lam=1)
    assert v1.activities == (1, 1, Fraction(1, 2), Fraction(1, 6))
    v2 = catalog.build("multi_occupancy_hc_v2", q=3, lam=2)
    assert v2.activities == (1, 2, 4, 8)
    assert v2.interactions[2][2] == 0 and v2.interactions[2][1] == 1

    clock = catalog.build("clock", q=5, m=1)
    assert clock.interactions[0][1] == 1
    assert clock.interactions[0][2] == 0
    assert clock.interactions[0][4] == 1  # wraps around


def test_expected_parameters_regime_boundaries():
    with pytest.raises(errors.NotTabulated):
        catalog.expected_parameters("af_potts", q=2)
    with pytest.raises(errors.NotTabulated):
        catalog.expected_parameters("beach", lam=1)
    with pytest.raises(errors.NotTabulated):
        catalog.expected_parameters("multi_wr", q=4, lam=2)
    with pytest.raises(errors.NotTabulated):
        catalog.expected_parameters("multi_beach", q=3, lam=2)
    with pytest.raises(errors.NotTabulated):
        catalog.expected_parameters("af_ising_field", lam=1)


def test_expected_parameters_spot_values():
    exp = catalog.expected_parameters("af_potts", q=3)
    assert exp == {"omega_dom": 2, "inv_rho_bulk": INF, "inv_rho_bdry": 2}
    exp = catalog.expected_parameters("hard_core", lam=Fraction(1, 2))
    assert exp["omega_dom"] == Fraction(3, 2)
    assert exp["inv_rho_bulk"] == INF
    exp = catalog.expected_parameters("clock", q=9, m=2)
    assert exp["omega_dom"] == 9
    assert exp["inv_rho_bulk"] == Fraction(9, 8)
    assert exp["inv_rho_bdry"] == Fraction(3, 2)


def test_catalog_entry_round_trip():
    entry = catalog.CatalogEntry("widom_rowlinson", {"lam": 2})
    system = entry.build()
    omega, rho_bulk, rho_bdry, _ = parameters.pattern_ratios(system)
    exp = entry.expected()
    assert omega == exp["omega_dom"]
    assert Fraction(1) / rho_bulk == exp["inv_rho_bulk"]
    assert Fraction(1) / rho_bdry == exp["inv_rho_bdry"]


def test_gsum():
    assert catalog.gsum(Fraction(1), 4) == 4
    assert catalog.gsum(Fraction(2), 3) == 7
    assert catalog.gsum(Fraction(1, 2), 2) == Fraction(3, 2)

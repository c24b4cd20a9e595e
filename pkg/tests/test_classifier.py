import random
from fractions import Fraction

import pytest

from qflag import classifier as cl
from qflag.qscalar import ONE, ProjParam, bracket_ratio, q_power
from qflag.rootdata import RootSystem, ToricPoint


def _chi_a2():
    return ToricPoint.from_character(RootSystem("A", 2), [q_power(3) + 2, q_power(-1) * 5])


def test_window_and_normalization():
    window = cl.box_window(3, 1)
    assert len(window) == 9
    assert all(lam[-1] == 0 for lam in window)
    assert cl.normalize((3, 1, 2)) == (1, -1, 0)


def test_singletons_are_bracket_ratios():
    chi = _chi_a2()
    gamma = cl.gamma_from_toric(chi, cl.box_window(3, 2), 3)
    rs = chi.system
    for lam in gamma.window:
        for i in range(1, 4):
            for j in range(1, 4):
                if i != j:
                    ell = lam[i - 1] - lam[j - 1]
                    assert gamma((i,), (j,), lam) == bracket_ratio(ell - 1, ell, chi[rs.root_e(i, j)])


def test_product_formula():
    chi = _chi_a2()
    gamma = cl.gamma_from_toric(chi, cl.box_window(3, 2), 3)
    lam = (1, -1, 0)
    value = gamma((1,), (2, 3), lam)
    want = gamma((1,), (2,), lam) * gamma((1,), (3,), lam)
    assert value == want


def test_axioms_pass_on_constructed_systems():
    rng = random.Random(3)
    for rank in (2, 3):
        chi = cl.random_regular_toric(rank, rng, monomial=False)
        n = rank + 1
        report = cl.verify_scalar_axioms(cl.gamma_from_toric(chi, cl.box_window(n, 1), n))
        assert report["ok"] and sum(report["passed"].values()) > 0 and not report["failed"]


def test_round_trip_and_certificate():
    chi = _chi_a2()
    gamma = cl.gamma_from_toric(chi, cl.box_window(3, 2), 3)
    point, cert = cl.classify(gamma)
    assert point == chi
    assert cert["reconstruction"]
    assert not cert["axioms"]["failed"]
    assert all(c.get("multiplicative", True) for c in cert["checks"])


def test_perturbed_entry_fails_axioms():
    chi = _chi_a2()
    gamma = cl.gamma_from_toric(chi, cl.box_window(3, 1), 3)
    key = next(k for k in sorted(gamma.entries, key=str) if len(k[0]) == 1 and len(k[1]) == 1)
    entries = dict(gamma.entries)
    entries[key] = entries[key] * 2
    broken = cl.ScalarSystem(gamma.n, gamma.window, entries, gamma.mode)
    report = cl.verify_scalar_axioms(broken)
    assert not report["ok"] and report["violations"]
    with pytest.raises(cl.AxiomFailure):
        cl.classify(broken)


def _independent_pairs():
    # independent parameters on the three pairs break x_12 x_23 = x_13
    return {(1, 2): ProjParam(q_power(3) + 2, ONE), (2, 3): ProjParam(q_power(1) * 5, ONE), (1, 3): ProjParam(q_power(2) + 7, ONE)}


def _single(xs):
    def single(i, j, ell):
        if (i, j) in xs:
            return bracket_ratio(ell - 1, ell, xs[(i, j)])
        return bracket_ratio(ell - 1, ell, xs[(j, i)].inverted())

    return single


def test_non_multiplicative_singletons_fail_the_triple_sum():
    window = cl.box_window(3, 2)
    single = _single(_independent_pairs())
    singles = {}
    for lam in window:
        for i in range(1, 4):
            for j in range(1, 4):
                if i != j:
                    singles[(i, j, lam)] = single(i, j, lam[i - 1] - lam[j - 1])
    with pytest.raises(cl.InconsistentSingletons):
        cl.expand_gamma(singles, window, 3)


def test_classify_checks_multiplicativity():
    gamma = cl._expand(3, cl.box_window(3, 2), _single(_independent_pairs()), "quantum")
    with pytest.raises(cl.NotMultiplicative):
        cl.classify(gamma, check_axioms=False)
    with pytest.raises(cl.AxiomFailure):
        cl.classify(gamma)


def test_resonant_parameter_is_rejected():
    chi = ToricPoint.from_character(RootSystem("A", 2), [q_power(4), q_power(3) + 1])
    with pytest.raises(cl.NotRegular):
        cl.gamma_from_toric(chi, cl.box_window(3, 1), 3)


def test_solver_recovers_parameter():
    for x in (ProjParam(q_power(3) + 2, ONE), ProjParam(ONE, q_power(1) * 3), ProjParam(ONE, q_power(2) - 1)):
        z = {ell: bracket_ratio(ell - 1, ell, x) for ell in range(-2, 3)}
        assert cl.solve_projective(z) == x


def test_solver_detects_inconsistency():
    z = {0: q_power(1) * 3, 1: q_power(2)}
    with pytest.raises((cl.RecurrenceViolated, cl.InconsistentSequence)):
        cl.solve_projective(z)


def test_classical_mode_round_trip():
    point = cl.AdditivePoint.from_simple([Fraction(1, 3), Fraction(-5, 2)])
    gamma = cl.gamma_from_toric(point, cl.box_window(3, 2), 3)
    assert gamma.mode == "classical"
    lam = (2, 0, 0)
    assert gamma((1,), (2,), lam) == (ONE * Fraction(1, 3) + 1) / (ONE * Fraction(1, 3) + 2)
    back, _ = cl.classify(gamma)
    assert back == point


def test_classical_integer_parameter_is_resonant():
    point = cl.AdditivePoint.from_simple([2, Fraction(1, 2)])
    with pytest.raises(cl.NotRegular):
        cl.gamma_from_toric(point, cl.box_window(3, 1), 3)


def test_json_round_trip():
    gamma = cl.gamma_from_toric(_chi_a2(), cl.box_window(3, 1), 3)
    assert cl.ScalarSystem.from_json(gamma.to_json()) == gamma

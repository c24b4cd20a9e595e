import itertools
from fractions import Fraction

import oracles as o
import pytest

from qflag import shiftedcat as sc
from qflag.qscalar import INFINITY, ONE, ZERO, ProjParam, q_integer, q_power
from qflag.rootdata import RootSystem, ToricPoint

C_GENERIC = q_power(3) + 2


def _a2(c1, c2):
    return ToricPoint.from_character(RootSystem("A", 2), [c1, c2])


# shifted weights and the dot action


def test_shifted_weight_rejects_non_integral():
    chi = _a2(q_power(2), q_power(2))
    with pytest.raises(ValueError):
        sc.ShiftedWeight((Fraction(1, 3), 0), chi)
    sw = sc.ShiftedWeight((Fraction(2, 3), Fraction(1, 3)), chi)
    assert sc.ShiftedWeight.from_json(sw.to_json()) == sw


def test_untwisted_dot_action_matches_classical():
    rs = RootSystem("A", 2)
    chi = ToricPoint.from_character(rs, [ONE, ONE])
    for coords in itertools.product(range(-2, 3), repeat=2):
        lam = rs.weight_from_fundamental(coords)
        sw = sc.ShiftedWeight(lam, chi)
        for w in rs.weyl_group():
            expected = tuple(a - b for a, b in zip(w.act(tuple(x + y for x, y in zip(lam, rs.rho))), rs.rho))
            assert sc.shifted_dot_action(w, sw).lam == expected


def test_generic_chi_leaves_the_weight_lattice():
    # R_chi is all of R, but the reflected weight is not in P
    rs = RootSystem("A", 2)
    chi = ToricPoint.from_character(rs, [C_GENERIC, q_power(-1) * 5])
    sw = sc.ShiftedWeight((0, 0), chi)
    with pytest.raises(sc.NonIntegralShift):
        sc.shifted_dot_action([(1, 0)], sw)
    with pytest.raises(sc.NonIntegralShift):
        sc.shifted_orbit(sw)


def test_dot_action_is_word_independent():
    rs = RootSystem("A", 2)
    chi = _a2(q_power(2), q_power(-2))
    sw = sc.ShiftedWeight(rs.weight_from_fundamental((1, -1)), chi)
    a1, a2 = rs.simple_roots
    # s1 s2 s1 = s2 s1 s2
    assert sc.shifted_dot_action([a1, a2, a1], sw) == sc.shifted_dot_action([a2, a1, a2], sw)
    assert sc.shifted_dot_action([a1, a1], sw) == sw


def test_integral_roots_drop_zero_and_infinity():
    rs = RootSystem("A", 2)
    chi = ToricPoint(rs, {(1, 0): INFINITY, (0, 1): ProjParam(ONE, ONE), (1, 1): INFINITY})
    roots, refl = sc.integral_roots_of_param(chi)
    assert set(roots) == {(0, 1), (0, -1)}
    assert list(refl) == [(0, 1)]


@pytest.mark.parametrize("c1,c2", [(0, 0), (1, -1), (2, 0), (-1, -2)])
def test_dominance_matches_orbit_extremality(c1, c2):
    rs = RootSystem("A", 2)
    chi = _a2(q_power(2 * c1), q_power(2 * c2))
    for coords in itertools.product(range(-3, 4), repeat=2):
        sw = sc.ShiftedWeight(rs.weight_from_fundamental(coords), chi)
        assert sc.dominance_test(sw, "dominant")["ok"] == sc.is_maximal_in_orbit(sw)
        assert sc.dominance_test(sw, "antidominant")["ok"] == sc.is_minimal_in_orbit(sw)
        assert sc.dominance_test(sw, "simple")["ok"] == sc.dominance_test(sw, "antidominant")["ok"]


def test_dominance_witness():
    rs = RootSystem("A", 1)
    chi = ToricPoint.from_character(rs, [ONE])
    # lambda = -2 rho - alpha: (lambda + rho, 2 alpha) = -4, so q^{-4} = q^{2 * -2}
    sw = sc.ShiftedWeight((Fraction(-3, 2),), chi)
    report = sc.dominance_test(sw, "dominant")
    assert not report["ok"]
    assert report["witnesses"] == [{"root": [1], "exponent": -2}]
    assert sc.dominance_test(sw, "antidominant")["ok"]


def test_semisimple_category_mode():
    regular = _a2(C_GENERIC, q_power(1))
    assert sc.dominance_test(sc.ShiftedWeight((0, 0), regular), "semisimpleCategory")["ok"]
    resonant = _a2(q_power(2), q_power(1))
    assert not sc.dominance_test(sc.ShiftedWeight((0, 0), resonant), "semisimpleCategory")["ok"]


def test_strongly_regular():
    rs = RootSystem("A", 1)
    regular = ToricPoint.from_character(rs, [C_GENERIC])
    assert sc.dominance_test(sc.ShiftedWeight((0,), regular), "stronglyRegular")["ok"]
    integral = ToricPoint.from_character(rs, [ONE])
    sw = sc.ShiftedWeight((0,), integral)
    # weights on both sides of the wall
    report = sc.dominance_test(sw, "stronglyRegular", weights=[(0,), (Fraction(-3, 1),)])
    assert not report["ok"]
    assert sc.dominance_test(sw, "stronglyRegular", weights=[(0,), (1,)])["ok"]


# Shapovalov determinant


def test_shapovalov_exponents_are_partition_numbers():
    rs = RootSystem("A", 2)
    chi = _a2(C_GENERIC, q_power(1))
    nu = (2, 1)
    factors = sc.shapovalov_determinant(nu, chi)
    for f in factors:
        rest = tuple(a - f["m"] * b for a, b in zip(nu, f["root"]))
        assert f["exponent"] == rs.kostant_partition(rest)
    assert {tuple(f["root"]) for f in factors} <= set(rs.positive_roots)


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("h", [-1, 0, 3])
def test_pairing_against_verma_oracle(n, h):
    det = sc.sl2_pairing_determinant(n, ProjParam(C_GENERIC, ONE), h)
    assert o.same(o.to_sympy(det), o.verma_pairing(n, o.to_sympy(C_GENERIC), h))


def test_shapovalov_unit_is_parameter_independent():
    for n in range(1, 5):
        units = {sc.shapovalov_unit(n, ProjParam(c, ONE), h) for c in (C_GENERIC, q_power(-2) * 7 + 1) for h in (-2, 1)}
        assert len(units) == 1
    with pytest.raises(sc.SingularParameter):
        sc.shapovalov_unit(1, ProjParam(ONE, ONE), 0)


@pytest.mark.parametrize("n", range(1, 5))
def test_degenerate_norm_against_oracle(n):
    assert o.same(o.to_sympy(sc.degenerate_norm(n)), o.degenerate_norm(n))


def test_normal_order_relation():
    # aE aF - q^{-2} aF aE = (c aK^2 - 1)/(q - q^{-1}) on any vector
    h, chi = 2, ProjParam(C_GENERIC, ONE)
    v = sc.Sl2VermaElement({0: ONE, 2: q_power(1)}, h, chi)
    lhs = sc.sl2_normal_order(["aE", "aF"], v)
    rhs1 = sc.sl2_normal_order(["aF", "aE"], v)
    k2 = sc.sl2_normal_order(["aK", "aK"], v)
    qq = q_power(1) - q_power(-1)
    for deg in range(0, 4):
        want = q_power(-2) * rhs1.coefficient(deg) + (C_GENERIC * k2.coefficient(deg) - v.coefficient(deg)) / qq
        assert lhs.coefficient(deg) == want
    with pytest.raises(sc.InfiniteParameter):
        sc.sl2_normal_order(["aE"], sc.Sl2VermaElement({1: ONE}, 0, INFINITY))


# highest weight vectors and gamma


def test_tensor_highest_weight_vector_matches_closed_coefficient():
    rs = RootSystem("A", 3)
    chi = ToricPoint.from_character(rs, [C_GENERIC, q_power(-1) * 5, q_power(2) - 3])
    for lam in [(0, 0, 0, 0), (2, -1, 1, 0), (-3, 1, 2, 0)]:
        for i in (2, 3, 4):
            vec = sc.tensor_highest_weight_vector(chi, lam, i)
            assert vec[(i - 1, (i - 1,))] == sc.closed_highest_weight_coefficient(chi, lam, i)
    assert sc.tensor_highest_weight_vector(chi, (0, 0, 0, 0), 1) == {(1, ()): ONE}


def test_gamma_via_verma_against_oracle():
    rs = RootSystem("A", 2)
    chi = ToricPoint.from_character(rs, [C_GENERIC, q_power(-1) * 2])
    for lam in [(0, 0, 0), (2, -1, 0), (1, 3, 0)]:
        for i in (1, 2):
            via = sc.gamma_adjacent_via_verma(chi, lam, i)
            c = o.to_sympy(chi[rs.simple_roots[i - 1]].ratio())
            assert o.same(o.to_sympy(via), o.gamma_adjacent(c, lam[i - 1] - lam[i]))


def test_gamma_via_verma_is_a_shifted_closed_formula():
    """Equal to the closed formula once chi_{2 alpha_i} is replaced by q^2 chi_{2 alpha_i}."""
    rs = RootSystem("A", 2)
    chi = ToricPoint.from_character(rs, [C_GENERIC, q_power(-1) * 2])
    shifted = ToricPoint.from_character(rs, [C_GENERIC * q_power(2), q_power(-1) * 2 * q_power(2)])
    for lam in [(0, 0, 0), (2, -1, 0)]:
        for i in (1, 2):
            via = sc.gamma_adjacent_via_verma(chi, lam, i)
            # the closed formula reads chi at e_{i+1} - e_i = -alpha_i
            assert via == sc.gamma_adjacent_closed(shifted, lam, i)
            assert via != sc.gamma_adjacent_closed(chi, lam, i)


def test_invariant_coefficient_identity_case():
    rs = RootSystem("A", 1)
    chi = ToricPoint.from_character(rs, [C_GENERIC])
    # mu = nu = alpha, w = 1: [2]/[4] * [4 + l; chi]/[2 + l; chi] with l = (lambda, alpha^vee)
    for lam in [(0,), (1,), (Fraction(-1, 2),)]:
        ell = int(2 * lam[0])
        value = sc.invariant_coefficient((1,), (1,), rs.identity, 0, chi, lam)
        p = chi[(1,)]
        want = q_integer(2) / q_integer(4) * sc.bracket(4 + ell, p) / sc.bracket(2 + ell, p)
        assert value == want
    with pytest.raises(ValueError):
        sc.invariant_coefficient((0,), (1,), rs.identity, 0, chi, (0,))


def test_pulled_back_is_valid():
    rs = RootSystem("A", 2)
    chi = ToricPoint.from_character(rs, [C_GENERIC, q_power(3)])
    for w in rs.weyl_group():
        assert sc.pulled_back(chi, w).validate()["ok"]


# S(x) and the comparison square


def test_s_operator_shape():
    x = ProjParam(q_power(8), ONE)
    s = sc.s_operator(x, 3)
    assert [s[l][0] for l in range(4)] == [3, 2, 1, 0]
    assert s[0][1] == q_power(3)


@pytest.mark.parametrize("k", range(4))
def test_diagram_against_nullspace_oracle(k):
    for h, chi_exp in ((k, 0), (k + 1, -1)):
        for l in range(k + 1):
            j, got = sc.sl2_diagram_s(k, h, chi_exp, l)
            oj, want = o.diagram_s(k, h, chi_exp, l)
            assert j == oj and o.same(o.to_sympy(got), want)


@pytest.mark.parametrize("k", range(4))
def test_diagram_is_q_minus_l_times_displayed_s(k):
    h, chi_exp = k + 1, 0
    s = sc.s_operator(ProjParam(q_power(2 * (h + chi_exp)), ONE), k)
    for l in range(k + 1):
        j, got = sc.sl2_diagram_s(k, h, chi_exp, l)
        assert (j, got) == (s[l][0], s[l][1] * q_power(-l))


def test_diagram_hypothesis_is_enforced():
    with pytest.raises(ValueError):
        sc.sl2_diagram_check(3, 1, 0)


# fraction identity


def test_fraction_identity_small_sweep():
    report = sc.fraction_sweep(3, 3)
    assert report["ok"] and report["checked"] > 0


def test_fraction_identity_against_oracle():
    for k, l, m in [(2, 1, 4), (3, 2, -3), (0, 0, 5), (4, 3, 6)]:
        lhs, rhs = sc.fraction_identity_sides(k, l, m)
        olhs, orhs = o.fraction_sides(k, l, m)
        assert o.same(o.to_sympy(lhs), olhs) and o.same(o.to_sympy(rhs), orhs)
        assert lhs == rhs


def test_fraction_identity_vanishing_denominator():
    with pytest.raises(ZeroDivisionError):
        sc.fraction_identity_sides(1, 1, 0)

import oracles as o
import pytest

from qflag import webcalc as wc
from qflag.qscalar import ONE, q_binomial, q_power


def test_space_dimensions():
    assert len(wc.space_basis(4, (2,))) == 6
    assert len(wc.space_basis(4, (1, -3))) == 16
    with pytest.raises(wc.SizeOverflow):
        wc.space_basis(3, (4,))


def test_multiply_kills_q_symmetric_tensor():
    # x_1 x_2 + q^{-1} x_2 x_1 = F(x_1 x_1) spans the symmetric square in this weight
    m = wc.wedge_multiply(1, 1, 3)
    image = m.apply({((1,), (2,)): ONE, ((2,), (1,)): q_power(-1)})
    assert image == {}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bubble_scalar(n):
    for k, l in wc.admissible_params("bubble", n):
        lhs, rhs = wc.relation_sides("bubble", (k, l), n)
        assert lhs == rhs
        assert o.same(o.to_sympy(q_binomial(k + l, k)), o.qbin(k + l, k))


def test_a_wrong_scalar_is_detected():
    lhs, _ = wc.relation_sides("bubble", (1, 1), 3)
    wrong = wc.identity(3, (2,)).scaled(q_power(1) + q_power(-1) + 1)
    assert lhs != wrong
    assert lhs.first_difference(wrong) is not None


def test_mm_prime_on_vector_squares_is_two_times_a_projection():
    n = 3
    mm = wc.wedge_comultiply(1, 1, n) @ wc.wedge_multiply(1, 1, n)
    two = q_power(1) + q_power(-1)
    assert mm @ mm == mm.scaled(two)


@pytest.mark.parametrize("relation", wc.RELATIONS)
def test_each_relation_n5_small_sizes(relation):
    for params in wc.admissible_params(relation, 5, max_size=2):
        assert wc.verify_relation(relation, params, 5)["ok"], params


def test_positive_twist_breaks_equivariance():
    ok, witness = wc.is_equivariant(wc.eval_coev("epsMinus", 1, 3, twist=1))
    assert not ok and witness is not None
    assert wc.is_equivariant(wc.eval_coev("epsMinus", 1, 3))[0]


def test_dual_factor_action_is_contragredient():
    # pairing V^* (x) V -> trivial is equivariant, which pins the dual action
    for n in (2, 3):
        for i in range(1, n + 1):
            assert wc.is_equivariant(wc.eval_coev("epsPlus", i, n))[0]


def test_verify_suite_parallel_matches_serial():
    serial = wc.verify_suite([3], ["squareSwitch", "flipN"])
    parallel = wc.verify_suite([3], ["squareSwitch", "flipN"], workers=2)
    assert serial == parallel
    assert all(r["ok"] for r in serial)


def test_type_mismatch_and_unknown_relation():
    with pytest.raises(ValueError):
        wc.relation_sides("nonsense", (1,), 3)
    with pytest.raises(wc.SizeOverflow):
        wc.eval_coev("epsPlus", 4, 3)

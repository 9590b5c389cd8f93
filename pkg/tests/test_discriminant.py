from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nikmon.discriminant import DiscriminantIsometry, discriminant_module, mod1, mod2
from nikmon.intlinalg import imat
from nikmon.lattice import E8, Lattice, U, direct_sum, rank_one, twist
from nikmon.nikulin import constants

modules = st.sampled_from([
    rank_one(-2), twist(U(), 2), twist(E8(), -2), rank_one(6), Lattice(imat([[2, 1], [1, 4]])),
    direct_sum([rank_one(-2), rank_one(4)]), Lattice(imat([[4, 2, 0], [2, 6, 1], [0, 1, -2]])),
    constants().lambda_fix,
]).map(discriminant_module)


def test_rank_one_minus_two():
    A = discriminant_module(rank_one(-2))
    assert A.invariant_factors == (2,)
    assert A.q((1,)) == Fraction(3, 2)  # -1/2 mod 2
    assert A.b((1,), (1,)) == Fraction(1, 2)


def test_named_discriminants():
    assert discriminant_module(constants().lambda_nik).invariant_factors == (2,) * 8
    A = discriminant_module(twist(E8(), -2))
    assert A.invariant_factors == (2,) * 8
    assert {A.q(x) for x in A.elements()} == {Fraction(0), Fraction(1)}


def test_odd_lattice_rejected():
    with pytest.raises(ValueError):
        discriminant_module(rank_one(-1))


def test_unimodular_has_trivial_module():
    A = discriminant_module(E8())
    assert A.order == 1 and list(A.elements()) == [()]


def test_residues_are_normalized():
    assert mod2(Fraction(-1, 2)) == Fraction(3, 2)
    assert mod1(Fraction(7, 3)) == Fraction(1, 3)


def test_coords_rejects_non_dual_vectors():
    A = discriminant_module(rank_one(-2))
    with pytest.raises(ValueError):
        A.coords([Fraction(1, 3)])


@given(modules, st.data())
def test_polarization(A, data):
    x = data.draw(st.sampled_from(A.element_list))
    y = data.draw(st.sampled_from(A.element_list))
    assert mod2(A.q(A.add(x, y)) - A.q(x) - A.q(y)) == mod2(2 * A.b(x, y))


@given(modules, st.integers(-10, 10), st.data())
def test_q_is_quadratic(A, n, data):
    x = data.draw(st.sampled_from(A.element_list))
    assert A.q(A.scale(n, x)) == mod2(n * n * A.q(x))


@given(modules, st.data())
def test_lift_and_coords_round_trip(A, data):
    x = data.draw(st.sampled_from(A.element_list))
    assert A.coords(A.lift(x)) == x
    assert A.q_of_vector(A.lift(x)) == A.q(x)


def test_discriminant_isometry_checks():
    A = discriminant_module(twist(U(), 2))
    swap = DiscriminantIsometry.from_images(A, [A.basis_element(1), A.basis_element(0)])
    assert swap.preserves_form()
    assert swap.compose(swap).is_identity()
    collapse = DiscriminantIsometry.from_images(A, [A.basis_element(0), A.basis_element(0)])
    assert not collapse.preserves_form()

from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from nikmon.intlinalg import (
    determinant,
    identity,
    imat,
    in_lattice,
    integer_kernel,
    invariant_factors,
    is_integral,
    primitive_on_ray,
    rational_inverse,
    saturation,
    smith_normal_form,
    solve_in_span,
)
from nikmon.lattice import E8, U, twist

matrices = st.integers(1, 5).flatmap(
    lambda n: st.integers(1, 5).flatmap(
        lambda m: st.lists(st.lists(st.integers(-30, 30), min_size=m, max_size=m), min_size=n, max_size=n)))

square_matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=n, max_size=n))


def _sympy_factors(rows):
    d = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    return sorted(abs(int(d[i, i])) for i in range(min(d.shape)) if d[i, i] != 0)


@given(matrices)
def test_smith_form_is_a_valid_decomposition(rows):
    m = imat(rows)
    u, d, v = smith_normal_form(m)
    assert np.array_equal(u @ m @ v, d)
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    diag = [int(d[i, i]) for i in range(min(d.shape))]
    assert all(x >= 0 for x in diag)
    nonzero = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    off = d.copy()
    for i in range(min(d.shape)):
        off[i, i] = 0
    assert not off.any()


@given(matrices)
def test_smith_form_matches_sympy(rows):
    ours = sorted(int(x) for x in invariant_factors(imat(rows)) if x)
    assert ours == _sympy_factors(rows)


@given(square_matrices)
def test_determinant_matches_sympy(rows):
    assert determinant(imat(rows)) == int(sympy.Matrix(rows).det())


@pytest.mark.parametrize("m, expected", [
    ([[2, 0], [0, 2]], [2, 2]),
    (twist(U(), 2).gram, [2, 2]),
    (twist(E8(), -2).gram, [2] * 8),
])
def test_smith_form_examples(m, expected):
    assert invariant_factors(imat(m)) == expected


def test_smith_form_handles_large_entries():
    m = imat([[2 ** 70 + 1, 3 ** 50], [5 ** 40, 7 ** 30]])
    u, d, v = smith_normal_form(m)
    assert np.array_equal(u @ m @ v, d)
    assert abs(d[0, 0] * d[1, 1]) == abs(determinant(m))


@given(square_matrices)
def test_rational_inverse(rows):
    m = imat(rows)
    if determinant(m) == 0:
        with pytest.raises(ZeroDivisionError):
            rational_inverse(m)
        return
    inv = rational_inverse(m)
    assert np.array_equal(inv @ m, identity(m.shape[0]))


def test_kernel_and_saturation():
    m = imat([[1, 2, 3], [2, 4, 6]])
    k = integer_kernel(m)
    assert k.shape == (3, 2)
    assert not (m @ k).any()
    s = saturation(imat([[2], [4], [6]]))
    assert np.array_equal(abs(s[:, 0]), [1, 2, 3])


def test_solve_in_span_and_membership():
    basis = imat([[2, 0], [0, 3], [0, 0]])
    x = solve_in_span(basis, imat([[1], [1], [0]]))
    assert list(x[:, 0]) == [Fraction(1, 2), Fraction(1, 3)]
    assert solve_in_span(basis, imat([[0], [0], [1]])) is None
    assert in_lattice(basis, [4, 3, 0]) and not in_lattice(basis, [1, 0, 0])
    assert is_integral(imat([[1, 2]]))


def test_primitive_on_ray():
    assert list(primitive_on_ray([Fraction(1, 2), Fraction(-3, 4)])) == [2, -3]
    with pytest.raises(ValueError):
        primitive_on_ray([0, 0])

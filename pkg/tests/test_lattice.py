import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nikmon import e8
from nikmon.discriminant import discriminant_module
from nikmon.intlinalg import determinant as det, imat, invariant_factors
from nikmon.lattice import (
    E8,
    Lattice,
    U,
    determinant,
    direct_sum,
    divisibility,
    from_symbol,
    from_symbols,
    gram_of,
    inner,
    is_primitive,
    orthogonal_complement,
    rank_one,
    saturate,
    twist,
)
from nikmon.nikulin import constants, same_lattice


def test_lattice_validation():
    with pytest.raises(ValueError):
        Lattice(imat([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        Lattice(imat([[1, 1], [1, 1]]))
    assert Lattice(imat([[2, 1], [1, 2]])).is_even
    assert not rank_one(-1).is_even


def test_inner_examples():
    assert inner(U(), [1, 0], [0, 1]) == 1
    assert inner(rank_one(-2), [1], [1]) == -2
    em = twist(E8(), -1)
    for r in e8.all_roots():
        assert inner(em, r, r) == -2
    with pytest.raises(ValueError):
        inner(U(), [1, 0, 0], [0, 1])


def test_twist_examples():
    assert np.array_equal(twist(U(), 2).gram, [[0, 2], [2, 0]])
    assert twist(twist(E8(), -1), 2) == twist(E8(), -2)
    assert twist(twist(E8(), -1), 2).label == "E8(-2)"
    assert twist(twist(U(), 2), 1) == twist(U(), 2)
    with pytest.raises(ValueError):
        twist(U(), 0)


def test_direct_sum_and_determinants():
    assert direct_sum([U(), U()]).rank == 4
    assert determinant(direct_sum([U(), U()])) == 1
    c = constants()
    assert c.lambda_nik.rank == 16
    assert determinant(c.lambda_nik) == -256
    assert determinant(U()) == -1
    assert determinant(E8()) == 1
    assert determinant(c.lambda_fix) == 512
    # (-1)^3 * 1 * 1 * (-2) = +2
    assert determinant(c.lambda_k3) == 2
    with pytest.raises(ValueError):
        direct_sum([])


def test_block_addressing():
    L = constants().lambda_nik
    v = np.arange(16)
    assert list(L.component(v, "E8(-1)")) == list(range(6, 14))
    assert [b.name for b in L.blocks] == ["U(2)_1", "U(2)_2", "U(2)_3", "E8(-1)", "<-2>_1", "<-2>_2"]


def test_symbol_parsing():
    assert from_symbol("U(2)") == twist(U(), 2)
    assert from_symbol("E8(-1)") == twist(E8(), -1)
    assert from_symbol("<-2>") == rank_one(-2)
    L = from_symbols(["U(2)", "U(2)", "U(2)", "E8(-1)", "<-2>", "<-2>"])
    assert L == constants().lambda_nik
    with pytest.raises(ValueError):
        from_symbol("E7")


def test_divisibility_examples():
    c = constants()
    assert divisibility(U(), [1, 0]) == 1
    assert divisibility(c.lambda_nik, c.sigma_y) == 2
    em2 = twist(E8(), -2)
    for r in e8.positive_roots()[:20]:
        assert divisibility(em2, r) == 2
    with pytest.raises(ValueError):
        divisibility(U(), [0, 0])


def test_orthogonal_complement_examples():
    c = constants()
    assert np.array_equal(abs(orthogonal_complement(U(), [[1, 0]])[:, 0]), [1, 0])
    P = orthogonal_complement(c.lambda_k3, c.j_fix)
    assert P.shape == (23, 8)
    G = gram_of(c.lambda_k3, P)
    assert det(G) == 256 and invariant_factors(G) == [2] * 8
    assert np.array_equal(gram_of(c.lambda_k3, c.k3_anti_invariant), twist(E8(), -2).gram)
    S = orthogonal_complement(c.lambda_nik, [c.sigma_y])
    assert S.shape == (16, 15)
    assert det(gram_of(c.lambda_nik, S)) == 256


def test_primitivity_examples():
    c = constants()
    assert not is_primitive(U(), [[2, 0]])
    s = saturate(U(), [[2, 0]])
    assert np.array_equal(abs(s[:, 0]), [1, 0])
    assert is_primitive(c.lambda_nik, [c.sigma_y])
    # the j_nik image contains 2 * E8, so it is not primitive; its saturation is sigma_y^perp
    assert invariant_factors(c.j_nik) == [1] * 7 + [2] * 8
    assert not is_primitive(c.lambda_nik, c.j_nik)
    with pytest.raises(ValueError):
        is_primitive(U(), [[1, 0], [2, 0]])


# -- properties ----------------------------------------------------------------------

small_even = st.sampled_from([U(), twist(U(), 2), E8(), rank_one(-2), rank_one(4),
                              Lattice(imat([[2, 1], [1, 4]])), Lattice(imat([[4, 2, 0], [2, 6, 1], [0, 1, -2]])),
                              direct_sum([twist(U(), 2), rank_one(-2)]), twist(E8(), -2)])


@st.composite
def unimodular(draw, n):
    m = imat(np.eye(n, dtype=int))
    for _ in range(draw(st.integers(0, 6))):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i != j:
            e = imat(np.eye(n, dtype=int))
            e[i, j] = draw(st.integers(-3, 3))
            m = m @ e
    return m


def _q_multiset(A):
    return sorted(A.q(x) for x in A.elements())


@given(st.data())
def test_discriminant_is_a_basis_invariant(data):
    L = data.draw(small_even)
    P = data.draw(unimodular(L.rank))
    A, B = discriminant_module(L), discriminant_module(P.T @ L.gram @ P)
    assert A.invariant_factors == B.invariant_factors
    if A.order <= 256:
        assert _q_multiset(A) == _q_multiset(B)


@given(small_even)
def test_discriminant_order_is_determinant(L):
    assert discriminant_module(L).order == abs(determinant(L))


@given(st.lists(st.integers(-5, 5), min_size=16, max_size=16), st.integers(1, 6))
def test_divisibility_scales(coords, n):
    L = constants().lambda_nik
    v = np.array(coords, dtype=object)
    if not v.any():
        return
    from nikmon.intlinalg import content
    v = v // content(v)
    assert divisibility(L, n * v) == n * divisibility(L, v)


@given(small_even, st.integers(-4, 4).filter(bool), st.data())
def test_twist_scales_pairing(L, n, data):
    v = data.draw(st.lists(st.integers(-5, 5), min_size=L.rank, max_size=L.rank))
    w = data.draw(st.lists(st.integers(-5, 5), min_size=L.rank, max_size=L.rank))
    assert inner(twist(L, n), v, w) == n * inner(L, v, w)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=5, max_size=5), min_size=1, max_size=3))
def test_saturate_is_idempotent(rows):
    L = Lattice(imat(np.eye(5, dtype=int)))
    S = imat(rows).T
    if len(invariant_factors(S)) != S.shape[1]:
        return
    s = saturate(L, S)
    assert is_primitive(L, s)
    assert same_lattice(saturate(L, s), s)

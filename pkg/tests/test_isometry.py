import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nikmon import e8
from nikmon.discriminant import discriminant_module
from nikmon.intlinalg import identity
from nikmon.isometry import (
    Isometry,
    IsotropicVector,
    NonIntegralReflection,
    compose,
    identity_isometry,
    induced_discriminant_action,
    inverse,
    is_orientation_preserving,
    minus_identity,
    random_reflection_vector,
    random_word,
    reflection,
    reflection_factorization,
    signature,
    spinor_norm,
    spinor_norm_by_orientation,
)
from nikmon.lattice import E8, U, direct_sum, inner, rank_one, square, twist
from nikmon.nikulin import constants

LATTICES = {
    "lambda_nik": constants().lambda_nik, "lambda_fix": constants().lambda_fix,
    "lambda_1": constants().lambda_1, "u2": twist(U(), 2), "e8m1": twist(E8(), -1),
}


def _pool(L, seed, k=12):
    rng = random.Random(seed)
    return [reflection(L, random_reflection_vector(L, rng)) for _ in range(k)]


POOLS = {name: _pool(L, 11) for name, L in LATTICES.items()}


def test_isometry_validation():
    with pytest.raises(ValueError):
        Isometry(U(), [[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        Isometry(U(), identity(3))


def test_reflection_examples():
    assert reflection(rank_one(-2), [1]).matrix.tolist() == [[-1]]
    c = constants()
    R = reflection(c.lambda_nik, c.sigma_y)
    assert np.array_equal(R(c.sigma_y), -c.sigma_y)
    assert reflection(U(), [1, 1]) is not None
    with pytest.raises(NonIntegralReflection) as exc:
        reflection(U(), [1, 2])
    assert exc.value.witness in (0, 1)
    with pytest.raises(IsotropicVector):
        reflection(U(), [1, 0])


@given(st.sampled_from(list(LATTICES)), st.integers(0, 10 ** 6))
def test_reflection_properties(name, seed):
    L = LATTICES[name]
    v = random_reflection_vector(L, random.Random(seed))
    R = reflection(L, v)
    assert np.array_equal(R.matrix @ R.matrix, identity(L.rank))
    assert np.array_equal(R(v), -v)
    rng = random.Random(seed + 1)
    for _ in range(3):
        w = np.array([rng.randint(-3, 3) for _ in range(L.rank)], dtype=object)
        w = w * square(L, v) - v * inner(L, v, w)  # w projected to v^perp, scaled
        assert np.array_equal(R(w), w)
    assert spinor_norm(R) == (-1 if square(L, v) > 0 else 1)


def test_spinor_examples():
    c = constants()
    assert spinor_norm(reflection(c.lambda_nik, c.sigma_y)) == 1
    assert spinor_norm(identity_isometry(c.lambda_nik)) == 1
    assert spinor_norm(minus_identity(c.lambda_nik)) == -1
    assert spinor_norm_by_orientation(minus_identity(c.lambda_nik)) == -1
    assert signature(c.lambda_nik) == (3, 13)
    assert is_orientation_preserving(reflection(c.lambda_nik, c.sigma_y))
    assert not is_orientation_preserving(minus_identity(c.lambda_nik))
    u = twist(U(), 2)
    uu = direct_sum([U(), U()])
    p1, p2 = reflection(uu, [1, 1, 0, 0]), reflection(uu, [0, 0, 1, 1])
    assert spinor_norm(p1) == -1 and is_orientation_preserving(compose(p1, p2))
    # -id on a negative definite lattice is a product of reflections in negative vectors
    assert spinor_norm(minus_identity(twist(E8(), -2))) == 1
    assert spinor_norm(minus_identity(u)) == -1


def test_factorization_reproduces_the_isometry():
    L = LATTICES["lambda_nik"]
    f = random_word(L, POOLS["lambda_nik"], 6, seed=3)
    from nikmon.isometry import reflection_matrix
    from nikmon.intlinalg import to_fraction
    m = to_fraction(identity(L.rank))
    for d in reflection_factorization(f):
        m = m @ reflection_matrix(L.gram, d)
    assert np.array_equal(m, to_fraction(f.matrix))


@given(st.sampled_from(list(LATTICES)), st.integers(0, 10 ** 6))
def test_spinor_norm_is_multiplicative(name, seed):
    L = LATTICES[name]
    f = random_word(L, POOLS[name], 4, seed)
    g = random_word(L, POOLS[name], 3, seed + 1)
    assert spinor_norm(f @ g) == spinor_norm(f) * spinor_norm(g)
    assert spinor_norm(f) == spinor_norm_by_orientation(f)


def test_group_operations():
    L = LATTICES["lambda_fix"]
    f = random_word(L, POOLS["lambda_fix"], 5, seed=0)
    assert compose(f, inverse(f)).is_identity()
    assert random_word(L, POOLS["lambda_fix"], 5, seed=0) == f
    with pytest.raises(ValueError):
        compose(f, identity_isometry(U()))


def test_induced_action_examples():
    c = constants()
    L = c.lambda_nik
    A = discriminant_module(L)
    assert induced_discriminant_action(identity_isometry(L), A).is_identity()
    assert induced_discriminant_action(minus_identity(L), A).is_identity()
    em2 = twist(E8(), -2)
    act = induced_discriminant_action(reflection(em2, e8.positive_roots()[0]))
    assert not act.is_identity()
    assert act.compose(act).is_identity()


@given(st.integers(0, 10 ** 6))
def test_induced_action_is_a_homomorphism(seed):
    L = LATTICES["lambda_nik"]
    A = discriminant_module(L)
    f = random_word(L, POOLS["lambda_nik"], 3, seed)
    g = random_word(L, POOLS["lambda_nik"], 3, seed + 7)
    lhs = induced_discriminant_action(f @ g, A)
    rhs = induced_discriminant_action(f, A).compose(induced_discriminant_action(g, A))
    assert lhs == rhs
    assert lhs.preserves_form()

import os
import random
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nikmon import e8, f2, kernels
from nikmon.bsgs import BSGSGroup, MembershipError
from nikmon.discriminant import DiscriminantIsometry, discriminant_module
from nikmon.isometry import induced_discriminant_action, reflection
from nikmon.kernels import _perm_py
from nikmon.nikulin import constants


@pytest.fixture(scope="module")
def group():
    return f2.e8_mod2_group()


def test_reduce_mod2_examples():
    assert f2.reduce_mod2([0] * 8) == (0, 0)
    for r in e8.positive_roots()[:10]:
        assert f2.reduce_mod2(r)[1] == 1
    rng = random.Random(0)
    for _ in range(20):
        e = np.array([rng.randint(-3, 3) for _ in range(8)], dtype=object)
        g = np.array([rng.randint(-3, 3) for _ in range(8)], dtype=object)
        assert f2.reduce_mod2(e) == f2.reduce_mod2(e + 2 * g)


def test_f2_form_matches_e8():
    space = f2.e8_mod2_space()
    rng = random.Random(1)
    C = e8.CARTAN
    for _ in range(50):
        e = np.array([rng.randint(-2, 2) for _ in range(8)], dtype=object)
        g = np.array([rng.randint(-2, 2) for _ in range(8)], dtype=object)
        x, qe = f2.reduce_mod2(e)
        y, _ = f2.reduce_mod2(g)
        assert space.q(x) == qe
        assert space.b(x, y) == int(e @ C @ g) % 2


def test_mod2_discriminant_isomorphism():
    cert = f2.verify_mod2_discriminant_isomorphism()
    assert cert["pass"] and cert["classes"] == 256 and cert["zero_to_zero"]
    A = f2.e8m2_discriminant()
    for r in e8.positive_roots()[:10]:
        x, _ = f2.reduce_mod2(r)
        assert A.q(f2.alpha(x)) == 1


def test_characteristic_vectors():
    assert f2.characteristic_vector(f2.e8_mod2_space()).w == 0
    A = discriminant_module(constants().lambda_fix)
    w = f2.characteristic_vector(A).w
    assert w == A.coords([0] * 14 + [__import__("fractions").Fraction(1, 2)])
    with pytest.raises(ValueError):
        f2.characteristic_vector(discriminant_module(np.array([[6]], dtype=object)))


def test_characteristic_vector_of_degenerate_form():
    space = f2.F2QuadraticSpace(2, ((1, 0), (0, 0)))  # polar form is zero
    with pytest.raises(ValueError):
        f2.characteristic_vector(space)


def test_bsgs_small_examples():
    t = f2.to_perm(f2.root_transvection(e8.positive_roots()[0]))
    g = BSGSGroup([("t", t)], base_points=range(1, 256))
    assert g.order() == 2
    assert g.factor(kernels.identity()) == ()
    assert g.factor(t) == (0,)


def test_bsgs_order(group):
    assert group.order() == f2.orthogonal_group_order(4, plus=True) == 348_364_800
    assert group.order() == np.prod(group.transversal_sizes())
    # -id reduces to the identity mod 2
    gens = [(k, f2.to_perm(f2.root_transvection(r))) for k, r in enumerate(e8.positive_roots())]
    more = BSGSGroup(gens + [("minus_id", kernels.identity())], base_points=range(1, 256))
    assert more.order() == group.order()


def test_transversal_words_are_correct(group):
    for lvl in group.levels:
        for pt, w in lvl.words.items():
            assert group.evaluate(w)[lvl.point] == pt
    assert len(group.base) <= 8


def test_factor_generators_and_products(group):
    for k in range(group.ngens):
        assert group.evaluate(group.factor(group.perms[k])) == group.perms[k]
    rng = random.Random(5)
    for _ in range(20):
        word = [rng.randrange(group.ngens) for _ in range(20)]
        g = group.evaluate(word)
        assert group.evaluate(group.factor(g)) == g


def test_factor_evaluate_round_trip(group):
    rng = random.Random(7)
    for _ in range(1000):
        g, w = group.random_element(rng)
        assert group.evaluate(w) == g
        assert group.evaluate(group.factor(g)) == g


def test_membership_failure(group):
    # a transvection in a non-singular non-root direction is not an isometry of q
    bad = bytes(x ^ 1 if x & 2 else x for x in range(256))
    assert not group.contains(bad)
    with pytest.raises(MembershipError):
        group.factor(bad)


def test_characteristic_vector_fixed_by_group(group):
    rng = random.Random(9)
    space = f2.e8_mod2_space()
    w = f2.characteristic_vector(space).w
    for _ in range(1000):
        g, _ = group.random_element(rng)
        assert g[w] == w
    for _ in range(20):
        g, _ = group.random_element(rng)
        assert space.is_isometry(f2.from_perm(g))


def test_lift_examples(group):
    A = f2.e8m2_discriminant()
    ident = DiscriminantIsometry.identity(A)
    assert induced_discriminant_action(f2.lift_discriminant_isometry(ident), A).is_identity()
    r = e8.positive_roots()[17]
    target = induced_discriminant_action(reflection(f2.e8m2(), r), A)
    lift = f2.lift_discriminant_isometry(target)
    assert np.array_equal(lift.matrix, reflection(f2.e8m2(), r).matrix)
    bad = DiscriminantIsometry.from_images(A, [A.basis_element(0)] * A.ngens)
    with pytest.raises(ValueError):
        f2.lift_discriminant_isometry(bad)


def test_lift_round_trips():
    rng = random.Random(3)
    A = f2.e8m2_discriminant()
    for _ in range(100):
        mat, _ = f2.random_group_element(rng)
        t = f2.discriminant_isometry_from_f2(mat)
        assert induced_discriminant_action(f2.lift_discriminant_isometry(t), A) == t


# -- kernels -------------------------------------------------------------------------

perms = st.permutations(list(range(256))).map(bytes)


@given(perms, perms)
def test_kernel_backends_agree(a, b):
    assert kernels.compose(a, b) == _perm_py.compose(a, b)
    assert kernels.invert(a) == _perm_py.invert(a)
    assert kernels.compose(a, kernels.invert(a)) == kernels.identity()


def test_sift_backends_agree(group):
    rng = random.Random(2)
    inv = [lvl.inv_reps for lvl in group.levels]
    for _ in range(50):
        g, _ = group.random_element(rng)
        assert kernels.sift(g, group.base, inv) == _perm_py.sift(g, group.base, inv)


def test_pure_python_backend_builds_the_same_group():
    code = ("from nikmon import f2, kernels; g = f2.e8_mod2_group();"
            "print(kernels.BACKEND, g.order(), g.base, g.transversal_sizes())")
    env = dict(os.environ, NIKMON_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    g = f2.e8_mod2_group()
    assert out.stdout.split(" ", 1)[0] == "python"
    assert out.stdout.strip().split(" ", 1)[1] == f"{g.order()} {g.base} {g.transversal_sizes()}"

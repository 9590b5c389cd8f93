import random

import numpy as np
import pytest

from nikmon import nikulin
from nikmon.glue import (
    NotPrimitive,
    OrientationError,
    assemble,
    e8m2_solver,
    glue_group,
    identity_solver,
    minus_identity_solver,
    nikulin_extends,
    orientation_correct,
)
from nikmon.intlinalg import identity, imat
from nikmon.isometry import Isometry, minus_identity, spinor_norm
from nikmon.lattice import E8, U, direct_sum, gram_of, rank_one, twist
from nikmon.nikulin import constants, extend_equivariantly, k3_glue, random_fixed_isometry


def _assert_invariants(glue):
    chk = glue.check()
    assert all(v for k, v in chk.items() if k != "order"), chk


def test_split_case():
    L = direct_sum([twist(E8(), -2), U()])
    T = imat(np.eye(10, dtype=int))[:, :8]
    glue = glue_group(L, T)
    assert len(glue.M) == 1
    _assert_invariants(glue)
    ext = nikulin_extends(L, T, identity(8), identity_solver, glue)
    assert ext.isometry.is_identity()


def test_k3_glue_is_the_e8_diagonal():
    glue = k3_glue()
    _assert_invariants(glue)
    assert len(glue.M) == 256
    for a, b in glue.M:
        x, y = glue.A_T.lift(a), glue.A_perp.lift(b)
        assert all((x[6 + j] + y[j]).denominator == 1 for j in range(8))
        assert x[14].denominator == 1
    # the complement is E8(-2) in root coordinates
    assert np.array_equal(glue.Tperp_lattice.gram, twist(E8(), -2).gram)


def test_glue_through_sigma_y_perp():
    c = constants()
    glue = glue_group(c.lambda_nik, nikulin.sigma_y_perp())
    _assert_invariants(glue)
    assert len(glue.M) == 2


def test_non_primitive_rejected():
    c = constants()
    with pytest.raises(NotPrimitive):
        glue_group(c.lambda_nik, c.j_nik)


def test_minus_identity_extends_to_minus_identity():
    c = constants()
    ext = nikulin_extends(c.lambda_k3, c.j_fix, -identity(15), minus_identity_solver, k3_glue())
    assert ext.isometry == minus_identity(c.lambda_k3)


def test_incompatible_solver_gives_no_extension():
    c = constants()
    rng = random.Random(4)
    for _ in range(10):
        phi = random_fixed_isometry(rng, 2)
        if nikulin_extends(c.lambda_k3, c.j_fix, phi.matrix, identity_solver, k3_glue()) is None:
            return
    pytest.fail("identity solver accepted every random phi")


def test_solver_must_return_an_isometry():
    c = constants()
    with pytest.raises(ValueError):
        nikulin_extends(c.lambda_k3, c.j_fix, identity(15), lambda g, r: 2 * identity(8), k3_glue())


def test_extensions_restrict_correctly():
    c = constants()
    rng = random.Random(8)
    for _ in range(5):
        phi = random_fixed_isometry(rng, 3)
        ext = nikulin_extends(c.lambda_k3, c.j_fix, phi.matrix, e8m2_solver, k3_glue())
        F = ext.isometry.matrix
        assert np.array_equal(F.T @ c.lambda_k3.gram @ F, c.lambda_k3.gram)
        assert np.array_equal(F @ c.j_fix, c.j_fix @ phi.matrix)
        assert np.array_equal(F @ c.k3_anti_invariant, c.k3_anti_invariant @ ext.psi)


def test_equivariant_extension_examples():
    c = constants()
    assert nikulin.equivariant_extension(Isometry(c.lambda_fix, identity(15))).is_identity()
    F = nikulin.equivariant_extension(minus_identity(c.lambda_fix))
    assert np.array_equal(F.matrix @ c.j_fix, -c.j_fix)
    assert nikulin.commutes_with_sigma(F)
    rng = random.Random(12)
    s = c.sigma.matrix
    for _ in range(5):
        F = nikulin.equivariant_extension(random_fixed_isometry(rng, 3)).matrix
        for j in range(23):
            e = c.lambda_k3.basis_vector(j)
            assert np.array_equal(s @ (F @ e), F @ (s @ e))


def test_orientation_correct_keeps_orientation_preserving_extensions():
    c = constants()
    rng = random.Random(21)
    phi = random_fixed_isometry(rng, 2, orientation_preserving=True)
    ext = extend_equivariantly(phi)
    assert spinor_norm(ext.isometry) == 1
    once = orientation_correct(ext)
    assert once is ext
    assert orientation_correct(once).isometry == once.isometry


def test_negating_psi_does_not_change_the_spinor_norm():
    # psi lives on a negative definite lattice, so -psi and psi have the same spinor norm
    rng = random.Random(30)
    for _ in range(6):
        ext = extend_equivariantly(random_fixed_isometry(rng, 3))
        flipped = assemble(ext.glue, ext.phi, -ext.psi)
        assert spinor_norm(flipped) == spinor_norm(ext.isometry) == spinor_norm(Isometry(constants().lambda_fix, ext.phi))


def test_orientation_correct_raises_when_phi_reverses_orientation():
    c = constants()
    ext = extend_equivariantly(minus_identity(c.lambda_fix))
    assert spinor_norm(ext.isometry) == -1
    with pytest.raises(OrientationError):
        orientation_correct(ext)

"""Glue groups of primitive sublattices and extension of isometries across them.

For ``T`` primitive in an even lattice ``L`` with complement ``P = T^⊥``, the
quotient ``M = L/(T ⊕ P)`` embeds in ``A_T ⊕ A_P``.  An isometry ``phi`` of
``T`` extends to ``L`` exactly when some ``psi`` in ``O(P)`` satisfies
``gamma ∘ psi_bar = phi_bar ∘ gamma`` on the projection of ``M`` to ``A_P``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .discriminant import DiscriminantIsometry, DiscriminantModule, discriminant_module, mod2
from .intlinalg import imat, rational_inverse, smith_normal_form, to_fraction, to_int, is_integral
from .isometry import Isometry, induced_discriminant_action, spinor_norm
from .lattice import Lattice, gram_of, is_primitive, orthogonal_complement

Element = tuple[int, ...]
PsiSolver = Callable[["GlueData", dict], "np.ndarray | None"]


class NotPrimitive(ValueError):
    pass


class NonIntegralExtension(AssertionError):
    pass


class OrientationError(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class GlueData:
    lattice: Lattice
    T_basis: np.ndarray
    Tperp_basis: np.ndarray
    A_T: DiscriminantModule
    A_perp: DiscriminantModule
    M: tuple[tuple[Element, Element], ...]
    gamma: dict  # Mbar_perp element -> Mbar element
    index: int

    @property
    def Mbar(self) -> frozenset:
        return frozenset(a for a, _ in self.M)

    @property
    def Mbar_perp(self) -> frozenset:
        return frozenset(b for _, b in self.M)

    @property
    def gamma_inverse(self) -> dict:
        return {a: b for b, a in self.gamma.items()}

    @cached_property
    def T_lattice(self) -> Lattice:
        return Lattice(gram_of(self.lattice, self.T_basis), "T")

    @cached_property
    def Tperp_lattice(self) -> Lattice:
        return Lattice(gram_of(self.lattice, self.Tperp_basis), "T_perp")

    @cached_property
    def split_inverse(self) -> np.ndarray:
        """Rational inverse of ``[T_basis | Tperp_basis]``."""
        return rational_inverse(np.concatenate([self.T_basis, self.Tperp_basis], axis=1))

    def check(self) -> dict:
        """Evaluate the structural identities of the glue data."""
        from .lattice import determinant

        A_L_order = abs(determinant(self.lattice))
        anti = all(mod2(self.A_T.q(a) + self.A_perp.q(b)) == 0 for b, a in self.gamma.items())
        return {
            "order": len(self.M),
            "index_identity": len(self.M) ** 2 * A_L_order == self.A_T.order * self.A_perp.order,
            "index_matches_determinant": len(self.M) == self.index,
            "gamma_anti_isometry": anti,
            "p_injective": len(self.Mbar) == len(self.M),
            "p_perp_injective": len(self.Mbar_perp) == len(self.M),
        }


def glue_group(L: Lattice, T_basis, Tperp_basis=None) -> GlueData:
    """Glue data of the primitive sublattice spanned by the columns of ``T_basis``.

    ``Tperp_basis`` fixes a basis of the complement; by default a saturated
    kernel basis is used.
    """
    T = imat(T_basis)
    if not is_primitive(L, T):
        raise NotPrimitive("sublattice is not primitive")
    P = imat(Tperp_basis) if Tperp_basis is not None else orthogonal_complement(L, T)
    t = T.shape[1]
    C = np.concatenate([T, P], axis=1)
    cinv = rational_inverse(C)
    A_T = discriminant_module(gram_of(L, T))
    A_P = discriminant_module(gram_of(L, P))
    # L / (T ⊕ P) is generated by the columns of U^{-1}, with orders d_i
    u, d, _ = smith_normal_form(C)
    uinv = to_int(rational_inverse(u))
    gens = [(uinv[:, i], int(d[i, i])) for i in range(C.shape[0]) if d[i, i] > 1]
    M = []
    for cs in itertools.product(*(range(o) for _, o in gens)):
        v = sum((c * g for c, (g, _) in zip(cs, gens)), np.zeros(L.rank, dtype=object))
        y = cinv @ to_fraction(v)
        M.append((A_T.coords(y[:t]), A_P.coords(y[t:])))
    gamma = {b: a for a, b in M}
    index = 1
    for _, o in gens:
        index *= o
    return GlueData(L, T, P, A_T, A_P, tuple(M), gamma, index)


@dataclass(frozen=True, eq=False)
class Extension:
    """An isometry of ``L`` assembled from ``phi`` on ``T`` and ``psi`` on ``T^⊥``."""

    isometry: Isometry
    phi: np.ndarray
    psi: np.ndarray
    glue: GlueData


def assemble(glue: GlueData, phi: np.ndarray, psi: np.ndarray) -> Isometry:
    """The map equal to ``phi`` on ``T`` and ``psi`` on ``T^⊥``; raises if not integral."""
    T, P = glue.T_basis, glue.Tperp_basis
    image = np.concatenate([T @ imat(phi), P @ imat(psi)], axis=1)
    m = to_fraction(image) @ glue.split_inverse
    if not is_integral(m):
        raise NonIntegralExtension("phi ⊕ psi does not preserve the lattice")
    return Isometry(glue.lattice, to_int(m))


def required_perp_action(glue: GlueData, phi: np.ndarray) -> dict | None:
    """``gamma^{-1} ∘ phi_bar ∘ gamma`` on ``Mbar_perp``, or None if ``phi_bar``
    does not preserve ``Mbar``."""
    phibar = induced_discriminant_action(Isometry(glue.T_lattice, phi), glue.A_T)
    ginv = glue.gamma_inverse
    out = {}
    for b, a in glue.gamma.items():
        img = phibar(a)
        if img not in ginv:
            return None
        out[b] = ginv[img]
    return out


def nikulin_extends(L: Lattice, T_basis, phi, psi_solver: PsiSolver, glue: GlueData | None = None) -> Extension | None:
    """Extend ``phi`` (an isometry of ``T`` in ``T``-coordinates) to ``L``.

    ``psi_solver(glue, required)`` must return an isometry of ``T^⊥`` (in
    ``T^⊥``-coordinates) whose discriminant action agrees with ``required`` on
    ``Mbar_perp``, or None.  Returns None when no extension is produced.
    """
    glue = glue or glue_group(L, T_basis)
    phi = imat(phi.matrix if isinstance(phi, Isometry) else phi)
    required = required_perp_action(glue, phi)
    if required is None:
        return None
    psi = psi_solver(glue, required)
    if psi is None:
        return None
    psi = imat(psi.matrix if isinstance(psi, Isometry) else psi)
    try:
        psi_iso = Isometry(glue.Tperp_lattice, psi)
    except ValueError as exc:
        raise ValueError("psi solver returned a non-isometry") from exc
    psibar = induced_discriminant_action(psi_iso, glue.A_perp)
    if any(psibar(b) != img for b, img in required.items()):
        raise ValueError("psi solver returned a map with the wrong discriminant action")
    return Extension(assemble(glue, phi, psi), phi, psi, glue)


def identity_solver(glue: GlueData, required: dict):
    """Solver offering only ``psi = id``."""
    if all(b == img for b, img in required.items()):
        return imat(np.eye(glue.Tperp_basis.shape[1], dtype=int))
    return None


def minus_identity_solver(glue: GlueData, required: dict):
    A = glue.A_perp
    if all(A.neg(b) == img for b, img in required.items()):
        return -imat(np.eye(glue.Tperp_basis.shape[1], dtype=int))
    return None


def e8m2_solver(glue: GlueData, required: dict):
    """Solver for ``T^⊥`` with Gram exactly ``E8(-2)`` in root coordinates:
    lift the required discriminant action through O(E8) -> O(E8/2E8)."""
    from .f2 import e8m2, lift_discriminant_isometry

    if not np.array_equal(gram_of(glue.lattice, glue.Tperp_basis), e8m2().gram):
        raise ValueError("complement basis is not an E8(-2) root basis")
    A = glue.A_perp
    if len(required) != A.order:
        raise ValueError("required action must be given on all of A_{T_perp}")
    target = DiscriminantIsometry.from_images(A, [required[A.basis_element(j)] for j in range(A.ngens)])
    return lift_discriminant_isometry(target).matrix


def orientation_correct(ext: Extension) -> Extension:
    """Return ``ext`` or its ``psi -> -psi`` variant, whichever has spinor norm +1."""
    if spinor_norm(ext.isometry) == 1:
        return ext
    flipped = Extension(assemble(ext.glue, ext.phi, -ext.psi), ext.phi, -ext.psi, ext.glue)
    if spinor_norm(flipped.isometry) == 1:
        return flipped
    raise OrientationError("neither psi nor -psi gives an orientation-preserving extension")

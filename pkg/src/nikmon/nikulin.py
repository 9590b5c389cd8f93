"""The lattices of a Nikulin-type orbifold and the monodromy reconstruction.

Coordinate layouts (block order is fixed):

* ``lambda_nik``  = U(2) U(2) U(2) E8(-1) <-2> <-2>, rank 16.  With ``g1, g2``
  the two <-2> generators, ``delta_y = g1 + g2`` and ``sigma_y = g1 - g2``.
* ``lambda_k3``   = U U U E8(-1) E8(-1) <-2>, rank 23; ``delta_x`` is the last
  basis vector and ``sigma`` swaps the two E8(-1) blocks.
* ``lambda_fix``  = U U U E8(-2) <-2>, rank 15, the sigma-fixed lattice.
* ``lambda_1``    = U U U E8(-2) <-1> <-1>, rank 16; ``delta_1 = h1 + h2`` and
  ``sigma_1 = h1 - h2``.

``j_fix`` embeds ``lambda_fix`` as the sigma-invariants of ``lambda_k3`` and
``j_nik`` embeds ``lambda_fix(2)`` into ``lambda_nik`` (both as coordinate
matrices whose columns are images of basis vectors).  ``phi`` maps
``lambda_1`` onto the even-divisibility sublattice of ``lambda_nik`` and
doubles the form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .glue import Extension, GlueData, e8m2_solver, glue_group, nikulin_extends, orientation_correct
from .intlinalg import (
    block_diag,
    identity,
    imat,
    in_lattice,
    invariant_factors,
    is_integral,
    ivec,
    primitive_on_ray,
    rational_inverse,
    solve_in_span,
    to_fraction,
    to_int,
    zeros,
)
from .isometry import (
    Isometry,
    minus_identity,
    reflection,
    spinor_norm,
)
from .lattice import (
    E8,
    Lattice,
    U,
    determinant,
    direct_sum,
    divisibility,
    gram_of,
    inner,
    is_primitive,
    orthogonal_complement,
    rank_one,
    square,
    sublattice_of_divisibility,
    twist,
)


def _named(L: Lattice, name: str) -> Lattice:
    return Lattice(L.gram, name, L.blocks if len(L.blocks) > 1 else ())


@dataclass(frozen=True, eq=False)
class Constants:
    lambda_nik: Lattice
    lambda_k3: Lattice
    lambda_fix: Lattice
    lambda_1: Lattice
    delta_x: np.ndarray
    delta_y: np.ndarray
    sigma_y: np.ndarray
    delta_1: np.ndarray
    sigma_1: np.ndarray
    sigma: Isometry
    j_fix: np.ndarray
    j_nik: np.ndarray
    phi: np.ndarray
    k3_anti_invariant: np.ndarray  # basis of sigma-anti-invariants, Gram E8(-2) in root coordinates


def _blocks(*parts: tuple[str, Lattice], label: str) -> Lattice:
    return direct_sum([_named(L, name) for name, L in parts], label)


@lru_cache(maxsize=None)
def constants() -> Constants:
    u, u2, e8m1, e8m2 = U(), twist(U(), 2), twist(E8(), -1), twist(E8(), -2)
    nik = _blocks(("U(2)_1", u2), ("U(2)_2", u2), ("U(2)_3", u2), ("E8(-1)", e8m1),
                  ("<-2>_1", rank_one(-2)), ("<-2>_2", rank_one(-2)), label="lambda_nik")
    k3 = _blocks(("U_1", u), ("U_2", u), ("U_3", u), ("E8(-1)_1", e8m1), ("E8(-1)_2", e8m1),
                 ("<-2>", rank_one(-2)), label="lambda_k3")
    fix = _blocks(("U_1", u), ("U_2", u), ("U_3", u), ("E8(-2)", e8m2), ("<-2>", rank_one(-2)),
                  label="lambda_fix")
    lam1 = _blocks(("U_1", u), ("U_2", u), ("U_3", u), ("E8(-2)", e8m2),
                   ("<-1>_1", rank_one(-1)), ("<-1>_2", rank_one(-1)), label="lambda_1")

    def basis(n, i):
        v = ivec([0] * n)
        v[i] = 1
        return v

    g1, g2 = basis(16, 14), basis(16, 15)
    h1, h2 = basis(16, 14), basis(16, 15)
    delta_x = basis(23, 22)

    swap = identity(23)
    swap[6:14, 6:14] = zeros(8, 8)
    swap[14:22, 14:22] = zeros(8, 8)
    swap[6:14, 14:22] = identity(8)
    swap[14:22, 6:14] = identity(8)

    j_fix = zeros(23, 15)
    j_fix[0:6, 0:6] = identity(6)
    j_fix[6:14, 6:14] = identity(8)
    j_fix[14:22, 6:14] = identity(8)
    j_fix[22, 14] = 1

    j_nik = zeros(16, 15)
    j_nik[0:6, 0:6] = identity(6)
    j_nik[6:14, 6:14] = 2 * identity(8)
    j_nik[14, 14] = 1
    j_nik[15, 14] = 1

    phi = block_diag([identity(6), 2 * identity(8), identity(2)])

    anti = zeros(23, 8)
    anti[6:14, :] = identity(8)
    anti[14:22, :] = -identity(8)

    return Constants(
        lambda_nik=nik, lambda_k3=k3, lambda_fix=fix, lambda_1=lam1,
        delta_x=delta_x, delta_y=g1 + g2, sigma_y=g1 - g2,
        delta_1=h1 + h2, sigma_1=h1 - h2,
        sigma=Isometry(k3, swap), j_fix=j_fix, j_nik=j_nik, phi=phi,
        k3_anti_invariant=anti,
    )


def _const() -> Constants:
    return constants()


# -- twisted-sum transfer ---------------------------------------------------------

def phi(v) -> np.ndarray:
    """``lambda_1 -> lambda_nik``: doubles the E8 block, identity elsewhere."""
    return _const().phi @ ivec(v)


def transfer(f: Isometry) -> Isometry:
    """``phi^{-1} f phi`` as an isometry of ``lambda_1``."""
    c = _const()
    if f.lattice != c.lambda_nik:
        raise ValueError("transfer takes an isometry of lambda_nik")
    m = rational_inverse(c.phi) @ to_fraction(f.matrix @ c.phi)
    if not is_integral(m):
        raise AssertionError("transfer is not integral; phi image is not preserved")
    return Isometry(c.lambda_1, to_int(m))


# -- sigma-equivariant extension --------------------------------------------------

@lru_cache(maxsize=None)
def k3_glue() -> GlueData:
    """Glue data of ``j_fix(lambda_fix)`` inside ``lambda_k3``, complement in root coordinates."""
    c = _const()
    return glue_group(c.lambda_k3, c.j_fix, c.k3_anti_invariant)


def commutes_with_sigma(F: Isometry) -> bool:
    s = _const().sigma.matrix
    return np.array_equal(s @ F.matrix, F.matrix @ s)


def extend_equivariantly(phi_fix: Isometry) -> Extension:
    """Extension data of ``phi_fix`` to ``lambda_k3``, with the restriction and
    sigma-commutation checked."""
    c = _const()
    if phi_fix.lattice != c.lambda_fix:
        raise ValueError("expected an isometry of lambda_fix")
    ext = nikulin_extends(c.lambda_k3, c.j_fix, phi_fix.matrix, e8m2_solver, k3_glue())
    if ext is None:
        raise AssertionError("no extension found; restriction map failed to be surjective")
    F = ext.isometry
    if not np.array_equal(F.matrix @ c.j_fix, c.j_fix @ phi_fix.matrix):
        raise AssertionError("extension does not restrict to phi")
    if not commutes_with_sigma(F):
        raise AssertionError("extension does not commute with sigma")
    return ext


def equivariant_extension(phi_fix: Isometry) -> Isometry:
    """A sigma-equivariant isometry of ``lambda_k3`` restricting to ``phi_fix``."""
    return extend_equivariantly(phi_fix).isometry


def restrict_to_fixed(F: Isometry) -> Isometry:
    """The isometry of ``lambda_fix`` read off from ``F j_fix = j_fix phi``."""
    c = _const()
    x = solve_in_span(c.j_fix, F.matrix @ c.j_fix)
    if x is None or not is_integral(x):
        raise ValueError("isometry does not preserve the sigma-fixed lattice")
    return Isometry(c.lambda_fix, to_int(x))


def induce_from_k3(F: Isometry) -> Isometry:
    """The isometry of ``lambda_nik`` fixing ``sigma_y`` that agrees with ``F``
    on ``j_nik(lambda_fix(2))``."""
    c = _const()
    if F.lattice != c.lambda_k3:
        raise ValueError("expected an isometry of lambda_k3")
    if not commutes_with_sigma(F):
        raise ValueError("isometry does not commute with sigma")
    phi_fix = restrict_to_fixed(F)
    C = np.concatenate([c.j_nik, c.sigma_y.reshape(-1, 1)], axis=1)
    image = np.concatenate([c.j_nik @ phi_fix.matrix, c.sigma_y.reshape(-1, 1)], axis=1)
    m = to_fraction(image) @ _split_inverse()
    if not is_integral(m):
        raise AssertionError("induced operator is not integral")
    return Isometry(c.lambda_nik, to_int(m))


@lru_cache(maxsize=None)
def _split_inverse() -> np.ndarray:
    c = _const()
    return rational_inverse(np.concatenate([c.j_nik, c.sigma_y.reshape(-1, 1)], axis=1))


# -- monodromy generators -----------------------------------------------------------

class GeneratorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MonodromyGenerator:
    kind: str  # "reflection" or "induced"
    data: object  # the reflection vector, or the sigma-equivariant isometry of lambda_k3
    realized: Isometry

    def to_json(self) -> dict:
        if self.kind == "reflection":
            return {"kind": self.kind, "vector": [int(x) for x in self.data]}
        return {"kind": self.kind, "k3_matrix": self.data.to_json()["matrix"]}


def monodromy_reflection(v) -> MonodromyGenerator:
    c = _const()
    L = c.lambda_nik
    v = L.vector(v)
    if not any(v):
        raise GeneratorError("zero vector")
    if not is_primitive(L, [v]):
        raise GeneratorError("vector is not primitive")
    sq = square(L, v)
    if sq not in (-2, -4):
        raise GeneratorError(f"square {sq} is not -2 or -4")
    d = divisibility(L, v)
    if d != 2:
        raise GeneratorError(f"divisibility {d} is not 2")
    return MonodromyGenerator("reflection", v, reflection(L, v))


def induced_generator(F: Isometry) -> MonodromyGenerator:
    """Operator induced by an orientation-preserving sigma-equivariant ``F``."""
    if spinor_norm(F) != 1:
        raise GeneratorError("inducing isometry is not orientation preserving")
    g = induce_from_k3(F)
    if not np.array_equal(g(_const().sigma_y), _const().sigma_y):
        raise AssertionError("induced operator moves sigma_y")
    return MonodromyGenerator("induced", F, g)


def realize(word: Sequence[MonodromyGenerator]) -> Isometry:
    """Product of a word of generators; letters apply left to right."""
    L = _const().lambda_nik
    m = identity(L.rank)
    for g in word:
        m = g.realized.matrix @ m
    return Isometry(L, m)


# -- orbit invariants ---------------------------------------------------------------

@dataclass(frozen=True)
class OrbitInvariants:
    square: int
    divisibility: int
    lambda1_ray_div1: bool
    e8_mod4_zero: bool

    def as_tuple(self) -> tuple:
        return (self.square, self.divisibility, self.lambda1_ray_div1, self.e8_mod4_zero)


def lambda1_ray_generator(v) -> np.ndarray:
    """Primitive vector of ``lambda_1`` whose ``phi``-image spans the ray of ``v``."""
    c = _const()
    return primitive_on_ray(rational_inverse(c.phi) @ to_fraction(ivec(v)))


def orbit_invariants(v) -> OrbitInvariants:
    c = _const()
    L = c.lambda_nik
    v = L.vector(v)
    if not any(v):
        raise ValueError("invariants of the zero vector are undefined")
    w = lambda1_ray_generator(v)
    e = L.component(v, "E8(-1)")
    return OrbitInvariants(
        square=square(L, v),
        divisibility=divisibility(L, v),
        lambda1_ray_div1=divisibility(c.lambda_1, w) == 1,
        e8_mod4_zero=all(int(x) % 4 == 0 for x in e),
    )


def e8_mod4_zero_via_lambda1(f: Isometry) -> bool:
    """Cross-check: ``E8`` component of ``transfer(f)(sigma_1)`` is even."""
    c = _const()
    img = transfer(f)(c.sigma_1)
    return all(int(x) % 2 == 0 for x in c.lambda_1.component(img, "E8(-2)"))


# -- sublattices of sigma_y^perp ---------------------------------------------------

def sigma_y_perp() -> np.ndarray:
    c = _const()
    return orthogonal_complement(c.lambda_nik, [c.sigma_y])


def even_divisibility_sublattice(within: np.ndarray | None = None) -> np.ndarray:
    """Vectors of ``within`` (default ``sigma_y^perp``) whose pairings with every
    vector of ``within`` are even, as columns in ``lambda_nik`` coordinates."""
    c = _const()
    P = sigma_y_perp() if within is None else imat(within)
    coeffs = sublattice_of_divisibility(gram_of(c.lambda_nik, P), 2)
    return P @ coeffs


def same_lattice(A: np.ndarray, B: np.ndarray) -> bool:
    """Whether the column spans of ``A`` and ``B`` coincide."""
    return all(in_lattice(B, A[:, j]) for j in range(A.shape[1])) and \
        all(in_lattice(A, B[:, j]) for j in range(B.shape[1]))


def index_by_determinants() -> int:
    c = _const()
    C = np.concatenate([c.j_nik, c.sigma_y.reshape(-1, 1)], axis=1)
    ratio, rem = divmod(abs(int(determinant(Lattice(gram_of(c.lambda_nik, C))))),
                        abs(determinant(c.lambda_nik)))
    root = int(round(ratio ** 0.5))
    if rem or root * root != ratio:
        raise AssertionError("determinant ratio is not a square")
    return root


def index_by_smith_form() -> int:
    c = _const()
    C = np.concatenate([c.j_nik, c.sigma_y.reshape(-1, 1)], axis=1)
    out = 1
    for d in invariant_factors(C):
        out *= d
    return out


# -- reconstruction ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Reconstruction:
    epsilon: int
    word: tuple[MonodromyGenerator, ...]
    operator: Isometry
    phi_fix: Isometry

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "word": [g.to_json() for g in self.word]}


def restrict_to_fixed_image(f: Isometry) -> Isometry:
    """Read ``phi_fix`` from ``f j_nik = j_nik phi_fix``."""
    c = _const()
    x = solve_in_span(c.j_nik, f.matrix @ c.j_nik)
    if x is None or not is_integral(x):
        raise AssertionError("f does not preserve j_nik(lambda_fix(2))")
    return Isometry(c.lambda_fix, to_int(x))


def reconstruct(f: Isometry) -> Reconstruction:
    """Write ``epsilon * f`` as a word in monodromy generators, ``epsilon = ±1``.

    ``f`` must fix ``sigma_y``.  Then ``f`` preserves the even-divisibility
    part of ``sigma_y^perp``, which is ``j_nik(lambda_fix(2))``; its
    restriction extends to a sigma-equivariant ``F``.  When ``F`` is
    orientation preserving it induces ``f``.  Otherwise ``-F`` is, and it
    induces ``-f`` composed with the reflection in ``sigma_y``.
    """
    c = _const()
    if f.lattice != c.lambda_nik:
        raise ValueError("expected an isometry of lambda_nik")
    if not np.array_equal(f(c.sigma_y), c.sigma_y):
        raise ValueError("f does not fix sigma_y")
    phi_fix = restrict_to_fixed_image(f)
    F = equivariant_extension(phi_fix)
    eps = spinor_norm(F)
    if F.is_identity():
        word = ()
    elif eps == 1:
        word = (induced_generator(F),)
    else:
        word = (monodromy_reflection(c.sigma_y), induced_generator(-F))
    op = realize(word)
    if not np.array_equal(op.matrix, eps * f.matrix):
        raise AssertionError("certificate does not reproduce epsilon * f")
    return Reconstruction(eps, word, op, phi_fix)


# -- sampling ----------------------------------------------------------------------

def random_reflection_word(L: Lattice, rng: random.Random, length: int, *,
                           orientation_preserving: bool = False) -> Isometry:
    """Product of reflections in random sparse integral vectors.

    With ``orientation_preserving`` only negative vectors are used, so the
    product has spinor norm +1.
    """
    from .isometry import random_reflection_vector

    m = identity(L.rank)
    for _ in range(length):
        v = random_reflection_vector(L, rng, sign=-1 if orientation_preserving else None)
        m = reflection(L, v).matrix @ m
    return Isometry(L, m)


def random_fixed_isometry(rng: random.Random, length: int, *, orientation_preserving: bool = False,
                          allow_minus_identity: bool = True) -> Isometry:
    """Random element of ``O(lambda_fix)``: a reflection word, times ``-id`` half the time."""
    L = _const().lambda_fix
    f = random_reflection_word(L, rng, length, orientation_preserving=orientation_preserving)
    # -id has spinor norm -1 on signature (3, 12)
    if allow_minus_identity and not orientation_preserving and rng.random() < 0.5:
        f = minus_identity(L) @ f
    return f


def random_div2_vector(rng: random.Random, target: int, *, orthogonal_to_sigma: bool = False,
                       bound: int = 2) -> np.ndarray:
    """Random primitive ``v`` in ``lambda_nik`` with ``v^2 = target`` and divisibility 2.

    The E8(-1) component is twice a random E8 vector (unimodularity forces
    this), the <-2> coordinates are random, and the last U(2) block is solved
    to hit the square.
    """
    from . import e8

    if target % 2:
        raise ValueError("divisibility 2 vectors in lambda_nik have even square")
    c = _const()
    L = c.lambda_nik
    roots = e8.all_roots()
    for _ in range(1000):
        v = ivec([0] * 16)
        for i in range(4):
            v[i] = rng.randint(-bound, bound)
        e = ivec([0] * 8)
        for _ in range(rng.randint(0, 2)):
            e = e + ivec(roots[rng.randrange(len(roots))])
        v[6:14] = 2 * e
        k1 = rng.randint(-bound, bound)
        k2 = k1 if orthogonal_to_sigma else rng.randint(-bound, bound)
        v[14], v[15] = k1, k2
        rest = target - square(L, v)
        # the last U(2) block (1, b) contributes 4b
        if rest % 4:
            continue
        v[4], v[5] = 1, rest // 4
        if rng.random() < 0.5:
            v[4], v[5] = v[5], v[4]
            if v[4] == 0 and v[5] == 0:
                continue
        if square(L, v) != target or divisibility(L, v) != 2 or not is_primitive(L, [v]):
            continue
        return v
    raise RuntimeError("no divisibility 2 vector found")


def random_reflection_generator(rng: random.Random, *, orthogonal_to_sigma: bool = False) -> MonodromyGenerator:
    target = -4 if orthogonal_to_sigma else rng.choice([-2, -4])
    return monodromy_reflection(random_div2_vector(rng, target, orthogonal_to_sigma=orthogonal_to_sigma))


def random_induced_generator(rng: random.Random, length: int = 2) -> MonodromyGenerator:
    phi_fix = random_fixed_isometry(rng, length, orientation_preserving=True)
    return induced_generator(equivariant_extension(phi_fix))


def random_g_word(rng: random.Random, length: int) -> tuple[MonodromyGenerator, ...]:
    """A random word in both generator families (not constrained to fix ``sigma_y``)."""
    word = []
    for _ in range(length):
        if rng.random() < 0.25:
            word.append(random_induced_generator(rng, rng.randint(1, 2)))
        else:
            word.append(random_reflection_generator(rng))
    return tuple(word)


def sample_sigma_fixing_isometry(seed: int, length: int) -> Isometry:
    """Deterministic isometry of ``lambda_nik`` fixing ``sigma_y``.

    Letters are reflections in -4 vectors orthogonal to ``sigma_y``, induced
    operators, and ``-R_{sigma_y}`` (which fixes ``sigma_y`` and has spinor
    norm -1).
    """
    c = _const()
    L = c.lambda_nik
    rng = random.Random(seed)
    minus_r = Isometry(L, -reflection(L, c.sigma_y).matrix)
    m = identity(L.rank)
    for _ in range(length):
        x = rng.random()
        if x < 0.25:
            g = minus_r
        elif x < 0.5:
            g = random_induced_generator(rng, rng.randint(1, 2)).realized
        else:
            g = random_reflection_generator(rng, orthogonal_to_sigma=True).realized
        m = g.matrix @ m
    f = Isometry(L, m)
    if not np.array_equal(f(c.sigma_y), c.sigma_y):
        raise AssertionError("sample does not fix sigma_y")
    return f


def greedy_reduce(v, seed: int = 0, *, iterations: int = 200, restarts: int = 5,
                  target=None) -> tuple[bool, tuple[MonodromyGenerator, ...]]:
    """Experimental: try to move ``v`` to ``target`` (default ``sigma_y``) by
    monodromy reflections, descending on the sup norm with random restarts.

    Returns ``(reached, word)``; ``word`` applied to ``v`` gives ``target`` when
    ``reached``.  No completeness is claimed.
    """
    c = _const()
    L = c.lambda_nik
    target = c.sigma_y if target is None else ivec(target)
    rng = random.Random(seed)
    v0 = L.vector(v)

    def cost(x):
        return sum(abs(int(a - b)) for a, b in zip(x, target))

    for _ in range(restarts):
        x, word = v0, []
        for _ in range(iterations):
            if np.array_equal(x, target):
                return True, tuple(word)
            best = None
            for _ in range(20):
                g = random_reflection_generator(rng)
                y = g.realized(x)
                if best is None or cost(y) < best[0]:
                    best = (cost(y), g, y)
            if best[0] >= cost(x) and rng.random() < 0.8:
                continue
            word.append(best[1])
            x = best[2]
        if np.array_equal(x, target):
            return True, tuple(word)
    return False, ()

"""Quadratic spaces over F2, the reduction E8/2E8, and lifting of
discriminant isometries of E8(-2) to integral isometries.

F2 vectors are ints used as bit masks: bit ``i`` is coordinate ``i``.  An
8x8 F2 matrix is a tuple of column masks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import e8, kernels
from .bsgs import BSGSGroup, MembershipError
from .discriminant import DiscriminantIsometry, DiscriminantModule, FiniteQuadraticModule, discriminant_module
from .intlinalg import identity, ivec
from .isometry import Isometry
from .lattice import E8, Lattice, twist


def bits(x: int, n: int) -> list[int]:
    return [(x >> i) & 1 for i in range(n)]


def from_bits(cs: Sequence[int]) -> int:
    return sum((int(c) & 1) << i for i, c in enumerate(cs))


def parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class F2QuadraticSpace:
    """``q(x) = sum_{i<=j} coef[i][j] x_i x_j`` over F2 (upper-triangular coefficients)."""

    dim: int
    coef: tuple[tuple[int, ...], ...]

    @classmethod
    def from_even_gram(cls, gram) -> "F2QuadraticSpace":
        """The form ``x -> (x, x)/2 mod 2`` of an even lattice reduced mod 2."""
        g = np.asarray(gram)
        n = g.shape[0]
        return cls(n, tuple(tuple(
            (int(g[i, i]) // 2) % 2 if i == j else (int(g[i, j]) % 2 if j > i else 0)
            for j in range(n)) for i in range(n)))

    def q(self, x: int) -> int:
        c = bits(x, self.dim)
        s = 0
        for i in range(self.dim):
            if c[i]:
                for j in range(i, self.dim):
                    if c[j] and self.coef[i][j]:
                        s ^= 1
        return s

    def b(self, x: int, y: int) -> int:
        return self.q(x ^ y) ^ self.q(x) ^ self.q(y)

    def polar_matrix(self) -> tuple[int, ...]:
        """Rows of the polar form as masks."""
        return tuple(from_bits(self.b(1 << i, 1 << j) for j in range(self.dim)) for i in range(self.dim))

    def points(self) -> range:
        return range(1, 1 << self.dim)

    def is_isometry(self, m: Sequence[int]) -> bool:
        return all(self.q(apply(m, x)) == self.q(x) for x in range(1 << self.dim)) and rank(m, self.dim) == self.dim


# -- F2 matrices ------------------------------------------------------------------

def apply(m: Sequence[int], x: int) -> int:
    y = 0
    i = 0
    while x:
        if x & 1:
            y ^= m[i]
        x >>= 1
        i += 1
    return y


def matmul(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """``a @ b`` on column masks."""
    return tuple(apply(a, col) for col in b)


def rank(m: Sequence[int], n: int) -> int:
    rows = list(m)
    r = 0
    for bit in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i] >> bit & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> bit & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def to_perm(m: Sequence[int], dim: int = 8) -> bytes:
    return bytes(apply(m, x) for x in range(1 << dim))


def from_perm(p: bytes, dim: int = 8) -> tuple[int, ...]:
    return tuple(p[1 << i] for i in range(dim))


def reduce_matrix(m: np.ndarray) -> tuple[int, ...]:
    """Integer matrix mod 2 as column masks."""
    return tuple(from_bits(int(x) % 2 for x in m[:, j]) for j in range(m.shape[1]))


def solve(rows: Sequence[int], rhs: Sequence[int], n: int) -> int | None:
    """Solve ``A w = rhs`` over F2 for square ``A`` given by row masks; None if singular."""
    aug = [(rows[i], rhs[i] & 1) for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][0] >> c & 1), None)
        if piv is None:
            return None
        aug[c], aug[piv] = aug[piv], aug[c]
        for i in range(n):
            if i != c and aug[i][0] >> c & 1:
                aug[i] = (aug[i][0] ^ aug[c][0], aug[i][1] ^ aug[c][1])
    return from_bits(aug[i][1] for i in range(n))


# -- characteristic vectors ---------------------------------------------------------

@dataclass(frozen=True)
class CharacteristicVector:
    w: int | tuple
    space: object


def _bilinear_rows(space) -> tuple[list[int], int]:
    if isinstance(space, F2QuadraticSpace):
        return list(space.polar_matrix()), space.dim
    if isinstance(space, FiniteQuadraticModule):
        if not space.is_two_elementary():
            raise ValueError("characteristic vector needs a 2-elementary module")
        k = space.ngens
        rows = [from_bits(int(2 * space.gen_b[i][j]) % 2 for j in range(k)) for i in range(k)]
        return rows, k
    raise TypeError(f"unsupported space {type(space).__name__}")


def characteristic_vector(space) -> CharacteristicVector:
    """The unique ``w`` with ``b(w, v) = b(v, v)`` for every ``v``.

    Accepts an :class:`F2QuadraticSpace` (polar form) or a 2-elementary
    finite quadratic module, whose bilinear form takes values in ``(1/2)Z/Z``.
    """
    rows, n = _bilinear_rows(space)
    diag = [(rows[i] >> i) & 1 for i in range(n)]
    w = solve(rows, diag, n)
    if w is None:
        raise ValueError("bilinear form is degenerate")
    if isinstance(space, FiniteQuadraticModule):
        return CharacteristicVector(tuple(bits(w, n)), space)
    return CharacteristicVector(w, space)


# -- E8 / 2E8 -------------------------------------------------------------------------

@lru_cache(maxsize=None)
def e8_mod2_space() -> F2QuadraticSpace:
    return F2QuadraticSpace.from_even_gram(e8.CARTAN)


def reduce_mod2(e) -> tuple[int, int]:
    """Class of an E8 vector in E8/2E8 and the value ``(e, e)/2 mod 2``."""
    e = ivec(e)
    return from_bits(int(x) % 2 for x in e), (int(e @ e8.CARTAN @ e) // 2) % 2


@lru_cache(maxsize=None)
def e8m2() -> Lattice:
    return twist(E8(), -2)


@lru_cache(maxsize=None)
def e8m2_discriminant() -> DiscriminantModule:
    return discriminant_module(e8m2())


def alpha(x: int) -> tuple:
    """E8/2E8 -> A_{E8(-2)}: the class of ``e/2``, with ``e`` any lift of ``x``."""
    A = e8m2_discriminant()
    return A.coords([Fraction(c, 2) for c in bits(x, 8)])


def alpha_inverse(c: tuple) -> int:
    A = e8m2_discriminant()
    return from_bits(int(2 * t) % 2 for t in A.lift(c))


def verify_mod2_discriminant_isomorphism() -> dict:
    """Check that ``alpha`` is a group isomorphism ``E8/2E8 -> A_{E8(-2)}`` and
    that ``q_A(alpha(x))`` equals the F2 form value read in ``Z/2Z ⊂ Q/2Z``."""
    A = e8m2_discriminant()
    space = e8_mod2_space()
    images = {}
    failures = []
    for x in range(256):
        ax = alpha(x)
        images[x] = ax
        if A.q(ax) != Fraction(space.q(x)):
            failures.append({"class": x, "q_A": str(A.q(ax)), "q_F2": space.q(x)})
    additive = all(images[x ^ y] == A.add(images[x], images[y])
                   for x in range(256) for y in range(x, 256))
    bijective = len(set(images.values())) == 256 == A.order
    return {
        "classes": 256,
        "bijective": bijective,
        "additive": additive,
        "zero_to_zero": images[0] == A.zero,
        "form_failures": failures,
        "pass": bijective and additive and not failures and images[0] == A.zero,
    }


def orthogonal_group_order(m: int, plus: bool = True, q: int = 2) -> int:
    """Order of the full orthogonal group ``O^{±}_{2m}(q)`` (``q`` even)."""
    eps = 1 if plus else -1
    out = 2 * q ** (m * (m - 1)) * (q ** m - eps)
    for i in range(1, m):
        out *= q ** (2 * i) - 1
    return out


def root_transvection(r) -> tuple[int, ...]:
    """Image in GL(8, F2) of the reflection in a root."""
    return reduce_matrix(e8.root_reflection(r))


@lru_cache(maxsize=None)
def e8_mod2_group() -> BSGSGroup:
    """The image of W(E8) in GL(8, F2), generated by the 120 positive-root
    reflections (label = index into ``e8.positive_roots()``)."""
    gens = [(k, to_perm(root_transvection(r))) for k, r in enumerate(e8.positive_roots())]
    return BSGSGroup(gens, base_points=_scan_base_points())


def _scan_base_points() -> list[int]:
    # nonzero points in increasing order; the chain picks the first moved ones
    return list(range(1, 256))


def lift_word(word: Sequence[int], group: BSGSGroup | None = None) -> np.ndarray:
    """Integer matrix (on E8 root coordinates) of the product of root
    reflections spelled by a word; letters apply left to right."""
    group = group or e8_mod2_group()
    roots = e8.positive_roots()
    m = identity(8)
    for k in word:
        m = e8.root_reflection(roots[group.labels[k]]) @ m
    return m


def f2_matrix_of(target: DiscriminantIsometry) -> tuple[int, ...]:
    """Transport an isometry of ``A_{E8(-2)}`` to GL(8, F2) through ``alpha``."""
    return tuple(alpha_inverse(target(alpha(1 << j))) for j in range(8))


def lift_discriminant_isometry(target: DiscriminantIsometry) -> Isometry:
    """An isometry of E8(-2) (root coordinates) inducing ``target`` on ``A_{E8(-2)}``."""
    from .isometry import induced_discriminant_action

    A = e8m2_discriminant()
    if target.module is not A and target.module.invariant_factors != A.invariant_factors:
        raise ValueError("target does not act on A_{E8(-2)}")
    if not target.preserves_form():
        raise ValueError("target does not preserve the discriminant form")
    mat = f2_matrix_of(target)
    group = e8_mod2_group()
    perm = to_perm(mat)
    try:
        word = group.factor(perm)
    except MembershipError as exc:
        raise AssertionError("target is outside the image of O(E8); surjectivity failed") from exc
    lift = Isometry(e8m2(), lift_word(word, group))
    induced = induced_discriminant_action(lift, A)
    if induced.matrix != DiscriminantIsometry.from_images(A, [target(A.basis_element(j)) for j in range(A.ngens)]).matrix:
        raise AssertionError("lift does not re-induce the target")
    return lift


def random_group_element(rng: random.Random) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """A uniformly random element of the image group: (F2 matrix, word)."""
    g, w = e8_mod2_group().random_element(rng)
    return from_perm(g), w


def discriminant_isometry_from_f2(mat: Sequence[int]) -> DiscriminantIsometry:
    A = e8m2_discriminant()
    return DiscriminantIsometry.from_images(A, [alpha(apply(mat, alpha_inverse(A.basis_element(j))))
                                                for j in range(A.ngens)])


BACKEND = kernels.BACKEND

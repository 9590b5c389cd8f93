"""Finite quadratic modules and discriminant groups of even lattices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm, prod
from typing import Iterator, Sequence

import numpy as np

from .intlinalg import imat, rational_inverse, smith_normal_form, to_int
from .lattice import Lattice

Element = tuple[int, ...]


def mod2(x) -> Fraction:
    x = Fraction(x)
    return x - 2 * (x // 2)


def mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x // 1)


@dataclass(frozen=True, eq=False)
class FiniteQuadraticModule:
    """``⊕ Z/d_i`` with a ``Q/2Z``-valued quadratic form.

    The form is stored on generators: ``gen_q[i] = q(g_i)`` in ``[0, 2)`` and
    ``gen_b[i][j] = b(g_i, g_j)`` in ``[0, 1)``.  Elements are coordinate
    tuples ``c`` with ``0 <= c_i < d_i``.
    """

    invariant_factors: tuple[int, ...]
    gen_q: tuple[Fraction, ...]
    gen_b: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors)

    @property
    def zero(self) -> Element:
        return (0,) * self.ngens

    def normalize(self, c: Sequence[int]) -> Element:
        return tuple(int(x) % d for x, d in zip(c, self.invariant_factors))

    def add(self, x: Element, y: Element) -> Element:
        return self.normalize([a + b for a, b in zip(x, y)])

    def neg(self, x: Element) -> Element:
        return self.normalize([-a for a in x])

    def scale(self, n: int, x: Element) -> Element:
        return self.normalize([n * a for a in x])

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def basis_element(self, i: int) -> Element:
        return tuple(int(j == i) for j in range(self.ngens))

    def q(self, x: Element) -> Fraction:
        s = Fraction(0)
        for i, a in enumerate(x):
            if a:
                s += a * a * self.gen_q[i]
                for j in range(i + 1, self.ngens):
                    if x[j]:
                        s += 2 * a * x[j] * self.gen_b[i][j]
        return mod2(s)

    def b(self, x: Element, y: Element) -> Fraction:
        s = Fraction(0)
        for i, a in enumerate(x):
            if a:
                for j, c in enumerate(y):
                    if c:
                        s += a * c * self.gen_b[i][j]
        return mod1(s)

    def element_order(self, x: Element) -> int:
        return lcm(1, *(d // gcd(a, d) for a, d in zip(x, self.invariant_factors)))

    def is_two_elementary(self) -> bool:
        return all(d == 2 for d in self.invariant_factors)

    def __repr__(self):
        parts = " + ".join(f"Z/{d}" for d in self.invariant_factors) or "0"
        return f"FiniteQuadraticModule({parts})"


@dataclass(frozen=True, eq=False, repr=False)
class DiscriminantModule(FiniteQuadraticModule):
    """``A_L = L*/L`` together with the data tying it back to ``L``.

    Generator ``g_i`` is the dual vector ``gens[:, i] / exponent`` written in
    lattice coordinates (a single common denominator for all of them).
    """

    gram: np.ndarray = None
    gens: np.ndarray = None
    exponent: int = 1
    _vinv: np.ndarray = None
    _nontrivial: tuple[int, ...] = ()

    def lift(self, x: Element) -> np.ndarray:
        """A dual vector (rational, lattice coordinates) representing ``x``."""
        num = self.gens @ np.array(x, dtype=object) if self.ngens else np.zeros(self.gram.shape[0], dtype=object)
        return np.array([Fraction(int(a), self.exponent) for a in num], dtype=object)

    def coords(self, v) -> Element:
        """Coordinates of the class of the dual vector ``v``; raises if ``v`` is not in ``L*``."""
        y = self._vinv @ np.array([Fraction(a) for a in v], dtype=object)
        out = []
        nontriv = set(self._nontrivial)
        k = 0
        for i, yi in enumerate(y):
            if i in nontriv:
                d = self.invariant_factors[k]
                t = yi * d
                if t.denominator != 1:
                    raise ValueError("vector is not in the dual lattice")
                out.append(int(t) % d)
                k += 1
            elif Fraction(yi).denominator != 1:
                raise ValueError("vector is not in the dual lattice")
        return tuple(out)

    def q_of_vector(self, v) -> Fraction:
        v = np.array([Fraction(a) for a in v], dtype=object)
        return mod2(v @ self.gram @ v)

    @cached_property
    def element_list(self) -> list[Element]:
        return list(self.elements())


def discriminant_module(L: Lattice | np.ndarray) -> DiscriminantModule:
    """Discriminant quadratic module of an even lattice."""
    gram = L.gram if isinstance(L, Lattice) else imat(L)
    n = gram.shape[0]
    if any(gram[i, i] % 2 for i in range(n)):
        raise ValueError("discriminant quadratic form needs an even lattice")
    _, d, v = smith_normal_form(gram)
    diag = [int(d[i, i]) for i in range(n)]
    if 0 in diag:
        raise ValueError("degenerate lattice")
    nontrivial = tuple(i for i, x in enumerate(diag) if x > 1)
    factors = tuple(diag[i] for i in nontrivial)
    exponent = lcm(*factors) if factors else 1
    gens = imat([[v[r, i] * (exponent // diag[i]) for i in nontrivial] for r in range(n)]) \
        if factors else np.zeros((n, 0), dtype=object)
    gvec = [np.array([Fraction(int(a), exponent) for a in gens[:, k]], dtype=object)
            for k in range(len(factors))]
    gq = tuple(mod2(g @ gram @ g) for g in gvec)
    gb = tuple(tuple(mod1(g @ gram @ h) for h in gvec) for g in gvec)
    vinv = to_int(rational_inverse(v))
    return DiscriminantModule(
        invariant_factors=factors, gen_q=gq, gen_b=gb,
        gram=gram, gens=gens, exponent=exponent, _vinv=vinv, _nontrivial=nontrivial,
    )


@dataclass(frozen=True, eq=False)
class DiscriminantIsometry:
    """An automorphism of a finite quadratic module, as a matrix on generator
    coordinates: column ``j`` holds the coordinates of the image of ``g_j``."""

    module: FiniteQuadraticModule
    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def from_images(cls, module: FiniteQuadraticModule, images: Sequence[Element]):
        k = module.ngens
        cols = [module.normalize(im) for im in images]
        return cls(module, tuple(tuple(cols[j][i] for j in range(k)) for i in range(k)))

    @classmethod
    def identity(cls, module: FiniteQuadraticModule):
        return cls.from_images(module, [module.basis_element(i) for i in range(module.ngens)])

    def image_of_generator(self, j: int) -> Element:
        return tuple(row[j] for row in self.matrix)

    def __call__(self, x: Element) -> Element:
        acc = [0] * self.module.ngens
        for j, a in enumerate(x):
            if a:
                for i in range(self.module.ngens):
                    acc[i] += a * self.matrix[i][j]
        return self.module.normalize(acc)

    def compose(self, other: "DiscriminantIsometry") -> "DiscriminantIsometry":
        """``self ∘ other``."""
        return DiscriminantIsometry.from_images(
            self.module, [self(other.image_of_generator(j)) for j in range(self.module.ngens)])

    def __eq__(self, other):
        return isinstance(other, DiscriminantIsometry) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_identity(self) -> bool:
        return self == DiscriminantIsometry.identity(self.module)

    def preserves_form(self) -> bool:
        m = self.module
        ims = [self.image_of_generator(j) for j in range(m.ngens)]
        for i, im in enumerate(ims):
            if m.q(im) != m.gen_q[i]:
                return False
            if m.scale(m.invariant_factors[i], im) != m.zero:
                return False
            for j in range(i + 1, m.ngens):
                if m.b(im, ims[j]) != m.gen_b[i][j]:
                    return False
        # b is nondegenerate on the modules we build, so this is already injective
        return True

"""Deterministic Schreier-Sims for groups acting on at most 256 points.

Group elements are permutations stored as ``bytes`` and multiplied left to
right: the word ``(a, b)`` means "apply ``a``, then ``b``".  Every strong
generator and every transversal element carries a word in the labelled input
generators, so membership tests also produce factorizations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import prod
from typing import Hashable, Sequence

from . import kernels

Word = tuple[int, ...]


class MembershipError(ValueError):
    pass


@dataclass
class _Level:
    point: int
    strong: list[int] = field(default_factory=list)
    orbit: list[int] = field(default_factory=list)
    reps: list = field(default_factory=list)
    inv_reps: list = field(default_factory=list)
    words: dict = field(default_factory=dict)


class BSGSGroup:
    """Base and strong generating set for the group generated by ``generators``.

    ``generators`` is a sequence of ``(label, perm)`` pairs.  Words returned by
    :meth:`factor` are tuples of generator indices; :meth:`labels_of` maps them
    to labels.  Non-involutive generators get an inverse letter appended to
    the alphabet.
    """

    def __init__(self, generators: Sequence[tuple[Hashable, bytes]], base_points: Sequence[int] | None = None):
        perms = [bytes(p) for _, p in generators]
        self.degree = len(perms[0]) if perms else 256
        self.identity = kernels.identity(self.degree)
        self.labels = [lab for lab, _ in generators]
        self.perms = list(perms)
        self.ngens = len(perms)
        self.inverse_letter: list[int] = []
        for k, p in enumerate(perms):
            if kernels.compose(p, p) == self.identity:
                self.inverse_letter.append(k)
            else:
                self.labels.append((self.labels[k], -1))
                self.perms.append(kernels.invert(p))
                self.inverse_letter.append(len(self.perms) - 1)
        for k in range(len(perms), len(self.perms)):
            self.inverse_letter.append(next(j for j in range(len(perms)) if self.inverse_letter[j] == k))
        self._candidates = list(base_points) if base_points is not None else list(range(self.degree))
        self.strong_perms: list[bytes] = []
        self.strong_words: list[Word] = []
        self.base: list[int] = []
        self.levels: list[_Level] = []
        self._build()

    # -- words ---------------------------------------------------------------

    def invert_word(self, w: Word) -> Word:
        return tuple(self.inverse_letter[k] for k in reversed(w))

    def reduce_word(self, w) -> Word:
        out: list[int] = []
        for k in w:
            if out and out[-1] == self.inverse_letter[k]:
                out.pop()
            else:
                out.append(k)
        return tuple(out)

    def evaluate(self, w: Word) -> bytes:
        g = self.identity
        for k in w:
            g = kernels.compose(g, self.perms[k])
        return g

    def labels_of(self, w: Word) -> list:
        return [self.labels[k] for k in w]

    # -- construction --------------------------------------------------------

    def _next_base_point(self, g: bytes) -> int:
        for pt in self._candidates:
            if g[pt] != pt and pt not in self.base:
                return pt
        raise AssertionError("element fixes every candidate base point")

    def _add_strong(self, g: bytes, w: Word) -> None:
        self.strong_perms.append(g)
        self.strong_words.append(self.reduce_word(w))
        if all(g[b] == b for b in self.base):
            self.base.append(self._next_base_point(g))
            self.levels.append(_Level(self.base[-1]))

    def _refresh(self, upto: int) -> None:
        for i in range(min(upto + 1, len(self.base))):
            lvl = self.levels[i]
            prefix = self.base[:i]
            lvl.strong = [k for k, g in enumerate(self.strong_perms) if all(g[b] == b for b in prefix)]
            reps: list = [None] * self.degree
            words: dict = {lvl.point: ()}
            reps[lvl.point] = self.identity
            orbit = [lvl.point]
            for gamma in orbit:
                u = reps[gamma]
                for k in lvl.strong:
                    s = self.strong_perms[k]
                    img = s[gamma]
                    if reps[img] is None:
                        reps[img] = kernels.compose(u, s)
                        words[img] = words[gamma] + self.strong_words[k]
                        orbit.append(img)
            lvl.orbit, lvl.reps, lvl.words = orbit, reps, words
            lvl.inv_reps = [None if r is None else kernels.invert(r) for r in reps]

    def _build(self) -> None:
        for k in range(self.ngens):
            if self.perms[k] != self.identity:
                self._add_strong(self.perms[k], (k,))
        self._refresh(len(self.base))
        i = len(self.base) - 1
        while i >= 0:
            lvl = self.levels[i]
            gens = [self.strong_perms[k] for k in lvl.strong]
            hit = kernels.first_nonsifting(
                i, self.base, lvl.orbit, gens,
                [lv.reps for lv in self.levels], [lv.inv_reps for lv in self.levels])
            if hit is None:
                i -= 1
                continue
            beta, k, _, _ = hit
            s = lvl.strong[k]
            img = self.strong_perms[s][beta]
            h = kernels.compose(kernels.compose(lvl.reps[beta], self.strong_perms[s]), lvl.inv_reps[img])
            w = lvl.words[beta] + self.strong_words[s] + self.invert_word(lvl.words[img])
            h, w, depth = self._sift_with_word(h, w, i + 1)
            self._add_strong(h, w)
            self._refresh(depth)
            i = min(depth, len(self.base) - 1)

    def _sift_with_word(self, g: bytes, w: Word, start: int = 0):
        for i in range(start, len(self.base)):
            lvl = self.levels[i]
            gamma = g[lvl.point]
            if lvl.reps[gamma] is None:
                return g, w, i
            g = kernels.compose(g, lvl.inv_reps[gamma])
            w = w + self.invert_word(lvl.words[gamma])
        return g, w, len(self.base)

    # -- queries -------------------------------------------------------------

    def order(self) -> int:
        return prod(len(lvl.orbit) for lvl in self.levels)

    def transversal_sizes(self) -> list[int]:
        return [len(lvl.orbit) for lvl in self.levels]

    def contains(self, g: bytes) -> bool:
        r, _ = kernels.sift(bytes(g), self.base, [lvl.inv_reps for lvl in self.levels])
        return r == self.identity

    def factor(self, g: bytes) -> Word:
        """A word in the generators evaluating to ``g``."""
        g = bytes(g)
        pieces = []
        for lvl in self.levels:
            gamma = g[lvl.point]
            if lvl.reps[gamma] is None:
                raise MembershipError("element is not in the group")
            pieces.append(lvl.words[gamma])
            g = kernels.compose(g, lvl.inv_reps[gamma])
        if g != self.identity:
            raise MembershipError("element is not in the group")
        return self.reduce_word(w for piece in reversed(pieces) for w in piece)

    def random_element(self, rng: random.Random) -> tuple[bytes, Word]:
        """Uniformly random element and a word for it."""
        g = self.identity
        pieces = []
        for lvl in reversed(self.levels):
            gamma = lvl.orbit[rng.randrange(len(lvl.orbit))]
            g = kernels.compose(g, lvl.reps[gamma])
            pieces.append(lvl.words[gamma])
        return g, self.reduce_word(w for piece in pieces for w in piece)

    def max_word_length(self) -> int:
        return max((len(w) for lvl in self.levels for w in lvl.words.values()), default=0)

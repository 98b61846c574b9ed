"""Graded pieces of the Koszul complex of ``(f_1, ..., f_n)`` and of its Skoda subcomplex.

Position ``p`` of the complex in degree ``t`` is a sum over ``p``-subsets
``I`` of ``{0..n-1}`` (lexicographic order) of spaces of forms of degree
``t - sum(d_i for i in I)``. The differential sends ``e_I`` to
``sum_k (-1)^k f_{i_k} e_{I - i_k}``.

In the Skoda variant the summand at position ``p`` is cut down to forms
vanishing to order ``mi_exponent(n, w, n - p)`` along the excess locus ``W``.
Each summand carries the canonical kernel basis of its condition system, and
a form in it is written in that basis by reading its coefficients at the
free monomial positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Sequence

from .algebra import Field, Matrix, kernel_basis, matmul, rank
from .cb import CIScenario, mi_exponent
from .polyring import Form, Parametrization
from .vanishing import LinearSystem, SubvarietyJet, h0, points_vanish

VARIANTS = ("koszul", "skoda")


@dataclass
class Summand:
    """One ``e_I`` component: a space of degree-``degree`` forms with a fixed basis."""

    subset: tuple[int, ...]
    degree: int
    order: int
    basis: list[tuple]
    free: list[int]

    @property
    def dim(self) -> int:
        return len(self.basis)


class GradedComplex:
    """The degree-``t`` strand of the (Koszul or Skoda) complex of ``sections`` on P^n."""

    def __init__(self, n: int, sections: Sequence[Form], t: int, variant: str = "koszul",
                 excess: Sequence[Parametrization] = ()):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        sections = tuple(sections)
        if len(sections) != n or any(f.nvars != n + 1 for f in sections):
            raise ValueError(f"need {n} forms on P^{n}")
        if any(not f for f in sections):
            raise ValueError("sections must be nonzero forms")
        fields = {f.field for f in sections}
        if len(fields) != 1:
            raise ValueError("sections over different fields")
        excess = tuple(excess)
        if variant == "skoda":
            if not excess:
                raise ValueError("the Skoda variant needs an excess locus")
            if len({p.dim for p in excess}) != 1:
                raise ValueError("excess components of mixed dimension are not supported")
        self.n = n
        self.sections = sections
        self.degrees = tuple(f.degree for f in sections)
        self.t = t
        self.variant = variant
        self.excess = excess
        self.field: Field = fields.pop()
        self.w = excess[0].dim if excess else None

    @classmethod
    def from_scenario(cls, sc: CIScenario, t: int, variant: str = "koszul") -> "GradedComplex":
        return cls(sc.n, sc.sections, t, variant, sc.excess if variant == "skoda" else ())

    def jet_order(self, p: int) -> int:
        if self.variant == "koszul":
            return 0
        return mi_exponent(self.n, self.w, self.n - p)

    def conditions(self, p: int) -> list[SubvarietyJet]:
        order = self.jet_order(p)
        return [SubvarietyJet(w, order) for w in self.excess] if order else []

    def summands(self, p: int) -> list[Summand]:
        return self._summands[p]

    @cached_property
    def _summands(self) -> list[list[Summand]]:
        return [[self._summand(p, subset) for subset in combinations(range(self.n), p)]
                for p in range(self.n + 1)]

    def _summand(self, p: int, subset: tuple[int, ...]) -> Summand:
        deg = self.t - sum(self.degrees[i] for i in subset)
        order = self.jet_order(p)
        if deg < 0:
            return Summand(subset, deg, order, [], [])
        size = comb(deg + self.n, self.n)
        conds = self.conditions(p)
        if not conds:
            one, zero = self.field.one, self.field.zero
            basis = [tuple(one if k == j else zero for k in range(size)) for j in range(size)]
            return Summand(subset, deg, order, basis, list(range(size)))
        basis = kernel_basis(LinearSystem(self.n, deg, conds, self.field).matrix)
        free = [max(k for k, x in enumerate(v) if x) for v in basis]
        return Summand(subset, deg, order, basis, free)


def term_dim(cx: GradedComplex, p: int) -> int:
    if not 0 <= p <= cx.n:
        raise ValueError(f"position must lie in 0..{cx.n}")
    return sum(s.dim for s in cx.summands(p))


def differential_matrix(cx: GradedComplex, p: int) -> Matrix:
    """Matrix of position ``p`` -> position ``p - 1`` in the summand bases (columns = source)."""
    if not 1 <= p <= cx.n:
        raise ValueError(f"differential index must lie in 1..{cx.n}")
    f = cx.field
    src, dst = cx.summands(p), cx.summands(p - 1)
    offsets, total = {}, 0
    for s in dst:
        offsets[s.subset] = (total, s)
        total += s.dim
    cols: list[list] = []
    nvars = cx.n + 1
    for s in src:
        for vec in s.basis:
            col = [f.zero] * total
            b = Form.from_vector(nvars, s.degree, vec, f)
            for k, i in enumerate(s.subset):
                target = s.subset[:k] + s.subset[k + 1:]
                start, ts = offsets[target]
                if not ts.dim:
                    continue
                image = (cx.sections[i] * b).to_vector()
                sign = 1 if k % 2 == 0 else -1
                for r, pos in enumerate(ts.free):
                    c = image[pos]
                    if c:
                        col[start + r] += c if sign > 0 else -c
            cols.append(col)
    rows = [list(r) for r in zip(*cols)] if cols else [[] for _ in range(total)]
    return Matrix(rows, f, len(cols))


def embedding_matrix(cx: GradedComplex, p: int) -> Matrix:
    """Block-diagonal matrix writing the position-``p`` basis in monomial coordinates."""
    f = cx.field
    blocks = cx.summands(p)
    sizes = [comb(s.degree + cx.n, cx.n) if s.degree >= 0 else 0 for s in blocks]
    cols, start = [], 0
    for s, size in zip(blocks, sizes):
        for v in s.basis:
            col = [f.zero] * sum(sizes)
            col[start:start + size] = v
            cols.append(col)
        start += size
    rows = [list(r) for r in zip(*cols)] if cols else [[] for _ in range(sum(sizes))]
    return Matrix(rows, f, len(cols))


def differential_ranks(cx: GradedComplex) -> dict[int, int]:
    return {p: rank(differential_matrix(cx, p)) for p in range(1, cx.n + 1)}


def homology_dims(cx: GradedComplex, ranks: dict[int, int] | None = None) -> list[int]:
    """Homology dimensions at positions ``n, n-1, ..., 0``."""
    ranks = ranks if ranks is not None else differential_ranks(cx)
    out = []
    for p in range(cx.n, -1, -1):
        out.append(term_dim(cx, p) - ranks.get(p, 0) - ranks.get(p + 1, 0))
    return out


def composes_to_zero(cx: GradedComplex) -> bool:
    """``D_p @ D_(p+1) == 0`` for every ``p``."""
    for p in range(1, cx.n):
        prod = matmul(differential_matrix(cx, p), differential_matrix(cx, p + 1))
        if any(x for r in prod.rows() for x in r):
            return False
    return True


def tail_target_dim(cx: GradedComplex, points: Sequence[Sequence]) -> int:
    """Degree-``t`` forms in the position-0 condition space that also vanish at ``points``."""
    return h0(cx.n, cx.t, cx.conditions(0) + points_vanish(points), cx.field)


@dataclass
class KoszulReport:
    t: int
    variant: str
    term_dims: list[int]
    ranks: dict[int, int]
    homology: list[int]
    tail_image: int
    tail_target: int | None

    @property
    def interior_exact(self) -> bool:
        """Homology vanishes at every position ``>= 1``."""
        return not any(self.homology[:-1])

    @property
    def tail_matches(self) -> bool | None:
        return None if self.tail_target is None else self.tail_image == self.tail_target

    def to_dict(self) -> dict:
        return {"t": self.t, "variant": self.variant, "term_dims": self.term_dims,
                "ranks": {str(p): r for p, r in sorted(self.ranks.items())},
                "homology": self.homology, "interior_exact": self.interior_exact,
                "tail_image": self.tail_image, "tail_target": self.tail_target,
                "tail_matches": self.tail_matches}


def koszul_report(sc: CIScenario, t: int, variant: str = "koszul") -> KoszulReport:
    """Homology of one degree strand, with the tail image compared to Z-vanishing forms."""
    cx = GradedComplex.from_scenario(sc, t, variant)
    ranks = differential_ranks(cx)
    dims = [term_dim(cx, p) for p in range(cx.n, -1, -1)]
    target = tail_target_dim(cx, sc.points) if variant == "skoda" else None
    return KoszulReport(t, variant, dims, ranks, homology_dims(cx, ranks),
                        ranks.get(1, 0), target)

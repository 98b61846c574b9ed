"""Vanishing conditions as linear systems on spaces of forms.

A condition of order ``m`` asks that a form and all of its partial
derivatives of order ``< m`` (taken in the homogeneous coordinates) vanish at
a point, or vanish identically after restriction to a parametrized
subvariety. For a smooth subvariety ``W`` this is membership in the
symbolic power of ``I_W``, which agrees with the ordinary power ``I_W^m``;
that equivalence is the premise that lets every graded piece of ``I_W^m``,
and of the multiplier ideals built from it, be a kernel.

Rows of a compiled system are ordered by condition index, then
derivative operator (by order, then graded-lex), then parameter monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .algebra import QQ, ConfigurationError, Field, Matrix, Scalar, coerce, common_field
from .algebra import kernel_basis, rank
from .polyring import (Form, Monomial, Parametrization, _MonomialComposer, eval_monomial,
                       monomial_basis, monomial_index)


@dataclass(frozen=True)
class PointJet:
    """Vanishing to order ``order`` at a point of P^n."""

    point: tuple
    order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(self.point))
        if self.order < 1:
            raise ValueError("jet order must be at least 1")
        f = common_field(self.point)
        if not any(coerce(f, x) for x in self.point):
            raise ValueError("the zero vector is not a projective point")

    @property
    def field(self) -> Field:
        return common_field(self.point)


@dataclass(frozen=True)
class PointVanish(PointJet):
    """Plain vanishing at a point (a :class:`PointJet` of order 1)."""

    order: int = dc_field(default=1, init=False)


@dataclass(frozen=True)
class SubvarietyJet:
    """Vanishing to order ``order`` along the image of a parametrization."""

    param: Parametrization
    order: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("jet order must be at least 1")

    @property
    def field(self) -> Field:
        return self.param.field


Condition = PointJet | SubvarietyJet


@lru_cache(maxsize=None)
def derivative_operators(nvars: int, max_order: int) -> tuple[Monomial, ...]:
    """Multi-indices of all partial derivative operators of order ``<= max_order``."""
    return tuple(b for k in range(max_order + 1) for b in monomial_basis(nvars, k))


def _falling(alpha: Monomial, beta: Monomial) -> int:
    """Coefficient of ``x^(alpha - beta)`` in ``D^beta x^alpha`` (0 unless alpha >= beta)."""
    c = 1
    for a, b in zip(alpha, beta):
        if b > a:
            return 0
        for j in range(b):
            c *= a - j
    return c


@lru_cache(maxsize=64)
def _composer(param: Parametrization) -> _MonomialComposer:
    return _MonomialComposer(param)


def conditions_field(conditions: Iterable[Condition], default: Field | None = None) -> Field:
    fields = {c.field for c in conditions}
    if len(fields) > 1:
        raise ConfigurationError(f"conditions over different fields: {sorted(map(repr, fields))}")
    if fields:
        return fields.pop()
    return default if default is not None else QQ


def condition_rows(n: int, d: int, c: Condition, field: Field | None = None) -> list[list[Scalar]]:
    """Scalar rows imposing ``c`` on the coefficients of degree-``d`` forms on P^n."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    field = field or c.field
    if c.field != field:
        raise ConfigurationError("condition does not live over the system field")
    nvars = n + 1
    basis = monomial_basis(nvars, d)
    ops = derivative_operators(nvars, c.order - 1)
    rows: list[list[Scalar]] = []
    zero, one = field.zero, field.one
    if isinstance(c, PointJet):
        if len(c.point) != nvars:
            raise ValueError(f"point {c.point} is not in P^{n}")
        point = [coerce(field, x) for x in c.point]
        values: dict[Monomial, Scalar] = {}
        for beta in ops:
            row = []
            for alpha in basis:
                k = _falling(alpha, beta)
                if k:
                    gamma = tuple(a - b for a, b in zip(alpha, beta))
                    v = values.get(gamma)
                    if v is None:
                        v = values[gamma] = eval_monomial(gamma, point, one)
                    row.append(v * k)
                else:
                    row.append(zero)
            rows.append(row)
        return rows
    if isinstance(c, SubvarietyJet):
        param = c.param
        if param.target_dim != n:
            raise ValueError(f"parametrization lands in P^{param.target_dim}, not P^{n}")
        comp = _composer(param)
        for beta in ops:
            k = sum(beta)
            if k > d:
                continue
            pidx = monomial_index(param.dim + 1, (d - k) * param.degree)
            block = [[zero] * len(basis) for _ in range(len(pidx))]
            for j, alpha in enumerate(basis):
                ff = _falling(alpha, beta)
                if not ff:
                    continue
                gamma = tuple(a - b for a, b in zip(alpha, beta))
                for pm, coef in comp(gamma).terms.items():
                    block[pidx[pm]][j] = coef * ff
            rows.extend(r for r in block if any(r))
        return rows
    raise TypeError(f"unknown condition {c!r}")


class LinearSystem:
    """Degree-``d`` forms on P^n subject to a list of conditions."""

    def __init__(self, n: int, d: int, conditions: Sequence[Condition] = (),
                 field: Field | None = None):
        self.n = n
        self.d = d
        self.conditions = tuple(conditions)
        self.field = conditions_field(self.conditions, field)
        if field is not None and field != self.field:
            raise ConfigurationError("conditions do not live over the requested field")
        self._matrix: Matrix | None = None

    @property
    def ncols(self) -> int:
        return comb(self.d + self.n, self.n) if self.d >= 0 else 0

    @property
    def matrix(self) -> Matrix:
        if self._matrix is None:
            rows: list[list[Scalar]] = []
            if self.d >= 0:
                for c in self.conditions:
                    rows.extend(condition_rows(self.n, self.d, c, self.field))
            self._matrix = Matrix(rows, self.field, self.ncols)
        return self._matrix

    def with_conditions(self, extra: Iterable[Condition]) -> "LinearSystem":
        return LinearSystem(self.n, self.d, self.conditions + tuple(extra), self.field)

    def rank(self) -> int:
        return rank(self.matrix) if self.d >= 0 else 0

    def dimension(self) -> int:
        return self.ncols - self.rank()

    def basis(self) -> list[Form]:
        if self.d < 0:
            return []
        nvars = self.n + 1
        return [Form.from_vector(nvars, self.d, v, self.field) for v in kernel_basis(self.matrix)]


def h0(n: int, d: int, conditions: Sequence[Condition] = (), field: Field | None = None) -> int:
    """Dimension of the space of degree-``d`` forms on P^n satisfying ``conditions``."""
    return LinearSystem(n, d, conditions, field).dimension()


def basis_h0(n: int, d: int, conditions: Sequence[Condition] = (),
             field: Field | None = None) -> list[Form]:
    """Canonical basis of that space, as forms (see :func:`algebra.kernel_basis`)."""
    return LinearSystem(n, d, conditions, field).basis()


def points_vanish(points: Iterable[Sequence]) -> list[PointVanish]:
    return [PointVanish(tuple(p)) for p in points]

"""Seeded constructors for the worked configurations.

"General" choices are replaced by pseudorandom small integers drawn from a
``random.Random(seed)``; every build is validated and re-drawn (a bounded
number of times) when the draw is degenerate. The same parameters and seed
always give the same scenario.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Any, Sequence

from .algebra import QQ, Field, Matrix, Scalar, rank
from .cb import CIScenario, Split, ValidationError
from .detloci import DetScenario, FormMatrix, decompose_through_point
from .polyring import Form, Parametrization, evaluate, monomial_basis

MAX_RETRIES = 64
COEFF_RANGE = 5


class BuildError(RuntimeError):
    """No valid configuration was found within the retry budget."""


@dataclass
class ScenarioSpec:
    """Serializable description of a built-in scenario."""

    name: str
    kind: str
    params: dict[str, Any] = dc_field(default_factory=dict)
    field: Field = QQ
    seed: int = 0

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "params": dict(self.params),
                "field": self.field.spec(), "seed": self.seed}

    def build(self):
        builders = {"line_grid": build_line_grid, "twisted_cubic": build_twisted_cubic,
                    "det_eleven_points": build_det_eleven_points}
        if self.kind not in builders:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        return builders[self.kind](**self.params, seed=self.seed, field=self.field)


def _cross(u: Sequence[Any], v: Sequence[Any]) -> tuple:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _random_vector(rng: random.Random, size: int) -> list[int]:
    while True:
        v = [rng.randint(-COEFF_RANGE, COEFF_RANGE) for _ in range(size)]
        if any(v):
            return v


def _random_form(rng: random.Random, nvars: int, degree: int, field: Field) -> Form:
    return Form(nvars, degree,
                {m: rng.randint(-COEFF_RANGE, COEFF_RANGE) for m in monomial_basis(nvars, degree)},
                field)


def _product(forms: Sequence[Form], nvars: int, field: Field) -> Form:
    out = Form.constant(nvars, 1, field)
    for f in forms:
        out = out * f
    return out


def _line_arrangement(rng: random.Random, counts: Sequence[int], field: Field):
    """Random lines in P^2 (one group per count) in general position.

    Returns the line coefficient vectors and the intersection points of lines
    from different groups; no three lines are concurrent and no two coincide.
    """
    lines = [[_random_vector(rng, 3) for _ in range(c)] for c in counts]
    flat = [field_vec(l, field) for group in lines for l in group]
    if rank(Matrix(flat, field)) < min(3, len(flat)):
        return None
    for i in range(len(flat)):
        for j in range(i):
            if rank(Matrix([flat[i], flat[j]], field)) < 2:
                return None
            for k in range(j):
                if rank(Matrix([flat[i], flat[j], flat[k]], field)) < 3:
                    return None
    return [[field_vec(l, field) for l in group] for group in lines]


def field_vec(v: Sequence[Any], field: Field) -> tuple:
    return tuple(field(x) for x in v)


def build_line_grid(d1: int, d2: int, seed: int = 0, field: Field = QQ, n: int = 2) -> CIScenario:
    """Products of ``d1`` and ``d2`` lines in P^2; Z is the ``d1*d2`` grid of crossings."""
    if n != 2:
        raise ValueError("line grids live in P^2")
    if d1 < 1 or d2 < 1:
        raise ValueError("degrees must be positive")
    rng = random.Random(seed)
    last: Exception | None = None
    for _ in range(MAX_RETRIES):
        groups = _line_arrangement(rng, (d1, d2), field)
        if groups is None:
            continue
        a, b = groups
        f1 = _product([Form.linear(l, field) for l in a], 3, field)
        f2 = _product([Form.linear(l, field) for l in b], 3, field)
        points = [_cross(la, lb) for la in a for lb in b]
        try:
            return CIScenario(2, (f1, f2), tuple(points), name=f"line_grid({d1},{d2})")
        except ValidationError as exc:
            last = exc
    raise BuildError(f"no valid line grid found: {last}")


def twisted_cubic(field: Field = QQ) -> Parametrization:
    s, t = Form.variable(2, 0, field), Form.variable(2, 1, field)
    return Parametrization([s ** 3, s * s * t, s * t * t, t ** 3], "twisted cubic",
                           equation_degree=2)


def twisted_cubic_quadrics(field: Field = QQ) -> tuple[Form, Form, Form]:
    """``Q1 = x0x2 - x1^2``, ``Q2 = x1x3 - x2^2``, ``Q3 = x0x3 - x1x2``."""
    x = [Form.variable(4, i, field) for i in range(4)]
    return (x[0] * x[2] - x[1] * x[1], x[1] * x[3] - x[2] * x[2], x[0] * x[3] - x[1] * x[2])


def build_twisted_cubic(d: int, roots: Sequence[Any] | None = None, seed: int = 0,
                        field: Field = QQ) -> CIScenario:
    """Quadrics ``Q1, Q2`` and a degree-``d`` surface ``F`` meeting in the twisted cubic plus Z.

    ``F = c0*Q1 + c1*Q2 + c2*Q3`` with ``c2 = prod(x0 - k_i x3)`` and seeded
    ``c0, c1``. Z is the set of points ``(k_i, 0, 0, 1)`` on the secant line
    ``x1 = x2 = 0`` besides ``(1,0,0,0)`` and ``(0,0,0,1)``.
    """
    if d <= 2:
        raise ValueError("need d > 2")
    roots = list(range(1, d - 1)) if roots is None else list(roots)
    if len(roots) != d - 2:
        raise ValueError(f"need exactly d - 2 = {d - 2} roots")
    ks = [field(k) for k in roots]
    if any(not k for k in ks) or len(set(ks)) != len(ks):
        raise ValueError("roots must be distinct and nonzero")
    q1, q2, q3 = twisted_cubic_quadrics(field)
    x0, x3 = Form.variable(4, 0, field), Form.variable(4, 3, field)
    c2 = _product([x0 - x3.scale(k) for k in ks], 4, field)
    points = tuple((k, field.zero, field.zero, field.one) for k in ks)
    curve = twisted_cubic(field)
    rng = random.Random(seed)
    last: Exception | None = None
    for _ in range(MAX_RETRIES):
        c0 = _random_form(rng, 4, d - 2, field)
        c1 = _random_form(rng, 4, d - 2, field)
        f = c0 * q1 + c1 * q2 + c2 * q3
        try:
            return CIScenario(3, (q1, q2, f), points, (curve,), name=f"twisted_cubic(d={d})")
        except ValidationError as exc:
            last = exc
    raise BuildError(f"no valid twisted cubic scenario found: {last}")


def twisted_cubic_counterexample(sc: CIScenario, omit: int) -> Form:
    """A degree-d surface through C and Z - {z_omit} missing z_omit.

    It is a cubic through C (nonzero on the secant line away from C) times
    one plane through each of the other points of Z.
    """
    field = sc.field
    q1, q2, q3 = twisted_cubic_quadrics(field)
    x = [Form.variable(4, i, field) for i in range(4)]
    cubic = x[3] * q3 + x[0] * q1 + x[3] * q2
    planes = []
    for j, z in enumerate(sc.points):
        if j != omit:
            planes.append(x[0].scale(z[3]) - x[3].scale(z[0]))
    return cubic * _product(planes, 4, field)


def build_det_eleven_points(seed: int = 0, collinear_flag: bool = True,
                            field: Field = QQ) -> DetScenario:
    """Eleven of the twelve crossings of three lines (C) and four lines (D).

    ``O`` is the crossing of the first line of C with the first line of D.
    The form matrix has rows ``(L1, L2), (A2, A1), (B2, B1)`` where
    ``C = A1 L1 - A2 L2`` and ``D = B1 L1 - B2 L2`` for two random linear forms
    through O. With ``collinear_flag`` the default split takes Z1 to be the
    two further points on the first line of D (collinear with O); otherwise
    Z1 is a pair whose joining line misses O.
    """
    rng = random.Random(seed)
    for _ in range(MAX_RETRIES):
        groups = _line_arrangement(rng, (3, 4), field)
        if groups is None:
            continue
        cl, dl = groups
        origin = _cross(cl[0], dl[0])
        labels = [(i, j) for i in range(3) for j in range(4) if (i, j) != (0, 0)]
        points = [_cross(cl[i], dl[j]) for i, j in labels]
        if not _lines_through_origin_are_clean(origin, points, labels, field):
            continue
        u, v = _random_vector(rng, 3), _random_vector(rng, 3)
        l1 = Form.linear(_cross(origin, field_vec(u, field)), field)
        l2 = Form.linear(_cross(origin, field_vec(v, field)), field)
        if not l1 or not l2 or rank(Matrix([l1.to_vector(), l2.to_vector()], field)) < 2:
            continue
        c = _product([Form.linear(l, field) for l in cl], 3, field)
        d = _product([Form.linear(l, field) for l in dl], 3, field)
        a1, a2 = decompose_through_point(c, l1, l2)
        b1, b2 = decompose_through_point(d, l1, l2)
        matrix = FormMatrix([(l1, l2), (a2, a1), (b2, b1)], n=2)
        if rank(matrix.at(origin)) != 2:
            continue
        if collinear_flag:
            z1 = [k for k, (i, j) in enumerate(labels) if j == 0]
        else:
            z1 = [labels.index((1, 1)), labels.index((2, 2))]
        try:
            return DetScenario(matrix, tuple(points), Split.from_z1(z1, len(points)), origin,
                               name="det_eleven_points", labels=tuple(labels))
        except ValidationError:
            continue
    raise BuildError("no valid eleven-point configuration found")


def _lines_through_origin_are_clean(origin, points, labels, field: Field) -> bool:
    """Two points of Z are collinear with O only along the two lines through O."""
    for k in range(len(points)):
        for j in range(k):
            on_line = rank(Matrix([origin, points[j], points[k]], field)) < 3
            (ik, jk), (ij, jj) = labels[k], labels[j]
            expected = (ik == ij == 0) or (jk == jj == 0)
            if on_line != expected:
                return False
    return True


def det_from_ci(sc: CIScenario) -> DetScenario:
    """View a complete intersection as an ``n x 1`` determinantal scenario (e = 0)."""
    matrix = FormMatrix([(f,) for f in sc.sections], sc.n)
    return DetScenario(matrix, sc.points, name=f"{sc.name} as e=0 locus")


def points_scaled(points: Sequence[Sequence[Scalar]], factors: Sequence[Any]):
    return tuple(tuple(x * c for x in p) for p, c in zip(points, factors))

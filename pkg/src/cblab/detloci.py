"""Cayley-Bacharach for finite determinantal loci on P^n.

Sections ``s_0..s_e`` of ``E = O(a_1) + ... + O(a_{n+e})`` are the columns of
an ``(n+e) x (e+1)`` matrix of forms ``U`` (row ``i`` has degree ``a_i``). At a
point where ``U`` has rank exactly ``e`` its kernel is a line in the space of
sections, i.e. a point ``phi(z)`` of P^e. ``c1`` measures the failure of
``phi(Z1)`` to impose independent conditions on forms of degree ``n - 1`` on
P^e; ``c2`` counts forms of degree ``sum a_i - n - 1`` through Z2 but not Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .algebra import Field, Matrix, Scalar, coerce, kernel_basis, rank, solve
from .cb import Split, ValidationError, all_splits, points_equal
from .polyring import Form, eval_monomial, evaluate, monomial_basis
from .vanishing import h0, points_vanish


class DecompositionError(ValueError):
    """The form does not vanish at the point cut out by the two linear forms."""


class FormMatrix:
    """An ``(n+e) x (e+1)`` matrix of forms, homogeneous along each row."""

    def __init__(self, rows: Sequence[Sequence[Form]], n: int,
                 row_degrees: Sequence[int] | None = None):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("empty form matrix")
        e = len(rows[0]) - 1
        if len(rows) != n + e or any(len(r) != e + 1 for r in rows):
            raise ValueError(f"expected a {n + e} x {e + 1} matrix of forms")
        fields = {f.field for r in rows for f in r}
        if len(fields) != 1 or any(f.nvars != n + 1 for r in rows for f in r):
            raise ValueError("entries must be forms on P^n over one field")
        if row_degrees is None:
            row_degrees = []
            for i, r in enumerate(rows):
                degs = {f.degree for f in r if f}
                if len(degs) != 1:
                    raise ValueError(f"row {i} is not homogeneous")
                row_degrees.append(degs.pop())
        for i, (r, a) in enumerate(zip(rows, row_degrees)):
            if any(f and f.degree != a for f in r):
                raise ValueError(f"row {i} is not homogeneous of degree {a}")
        self.rows = rows
        self.n = n
        self.e = e
        self.row_degrees = tuple(row_degrees)
        self.field: Field = fields.pop()

    def at(self, z: Sequence[Scalar]) -> Matrix:
        return Matrix([[evaluate(f, z) if f else self.field.zero for f in r] for r in self.rows],
                      self.field, self.e + 1)

    def scale_row(self, i: int, c) -> "FormMatrix":
        rows = [list(r) for r in self.rows]
        rows[i] = [f.scale(c) for f in rows[i]]
        return FormMatrix(rows, self.n, self.row_degrees)

    def column_operation(self, g: Matrix) -> "FormMatrix":
        """Right-multiply by a constant ``(e+1) x (e+1)`` matrix (change of basis of sections)."""
        rows = []
        for r, a in zip(self.rows, self.row_degrees):
            new = []
            for j in range(self.e + 1):
                acc = Form.zero(self.n + 1, a, self.field)
                for k in range(self.e + 1):
                    if g[k, j] and r[k]:
                        acc = acc + r[k].scale(g[k, j])
                new.append(acc)
            rows.append(new)
        return FormMatrix(rows, self.n, self.row_degrees)


def rank_drop_check(u: FormMatrix, z: Sequence[Scalar]) -> bool:
    """True iff ``U(z)`` has rank exactly ``e``."""
    if not any(coerce(u.field, x) for x in z):
        raise ValueError("the zero vector is not a projective point")
    return rank(u.at(z)) == u.e


def phi(u: FormMatrix, z: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """Kernel line of ``U(z)`` as a point of P^e, first nonzero coordinate 1."""
    ker = kernel_basis(u.at(z))
    if len(ker) != 1:
        raise ValueError(f"U(z) has rank {u.e + 1 - len(ker)}, not {u.e}")
    v = ker[0]
    lead = next(x for x in v if x)
    return tuple(x / lead for x in v)


def rho_matrix(u: FormMatrix, zs: Sequence[Sequence[Scalar]], k: int) -> Matrix:
    """Evaluation of degree-``k`` forms on P^e at the points ``phi(z)``."""
    basis = monomial_basis(u.e + 1, k)
    one = u.field.one
    images = [phi(u, z) for z in zs]
    return Matrix([[eval_monomial(m, q, one) for m in basis] for q in images], u.field, len(basis))


def c1(u: FormMatrix, z1: Sequence[Sequence[Scalar]]) -> int:
    return len(z1) - rank(rho_matrix(u, z1, u.n - 1))


def c2(n: int, a_list: Sequence[int], z: Sequence[Sequence[Scalar]],
       z2: Sequence[Sequence[Scalar]], field: Field) -> int:
    """Forms of degree ``sum a_i - n - 1`` vanishing on Z2 but not on all of Z (0 if vacuous)."""
    d = sum(a_list) - (n + 1)
    if d < 0:
        return 0
    return h0(n, d, points_vanish(z2), field) - h0(n, d, points_vanish(z), field)


@dataclass
class DetScenario:
    """A form matrix dropping rank simply on ``points``; validated on construction."""

    matrix: FormMatrix
    points: tuple[tuple[Scalar, ...], ...]
    split: Split | None = None
    origin: tuple[Scalar, ...] | None = None
    name: str = ""
    labels: tuple = ()
    checks: list[str] = dc_field(default_factory=list)

    def __post_init__(self):
        f = self.matrix.field
        self.points = tuple(tuple(coerce(f, x) for x in p) for p in self.points)
        if self.origin is not None:
            self.origin = tuple(coerce(f, x) for x in self.origin)
        problems = []
        if not self.points:
            problems.append("Z is empty")
        for k, z in enumerate(self.points):
            if len(z) != self.matrix.n + 1:
                raise ValidationError([f"point {k} is not in P^{self.matrix.n}"])
            for j in range(k):
                if points_equal(z, self.points[j], f):
                    problems.append(f"points {j} and {k} coincide")
        bad = [k for k, z in enumerate(self.points) if not rank_drop_check(self.matrix, z)]
        if bad:
            problems.append(f"U does not drop rank by exactly one at points {bad}")
        if self.split is not None:
            self.split.check(len(self.points))
        if problems:
            raise ValidationError(problems)
        self.checks[:] = ["points distinct", "rank exactly e on Z"]

    @property
    def field(self) -> Field:
        return self.matrix.field

    @property
    def n(self) -> int:
        return self.matrix.n

    def subset(self, idx: Iterable[int]) -> list[tuple[Scalar, ...]]:
        return [self.points[i] for i in idx]


@dataclass
class DetReport:
    split: Split
    c1: int
    c2: int
    passed: bool
    vacuous: bool

    def to_dict(self) -> dict:
        return {"z1": list(self.split.z1), "z2": list(self.split.z2), "c1": self.c1,
                "c2": self.c2, "pass": self.passed, "vacuous": self.vacuous}


def det_cb_check(sc: DetScenario, split: Split | None = None) -> DetReport:
    split = split or sc.split
    if split is None:
        raise ValueError("no split given")
    split.check(len(sc.points))
    u = sc.matrix
    first = c1(u, sc.subset(split.z1))
    second = c2(u.n, u.row_degrees, sc.points, sc.subset(split.z2), sc.field)
    vacuous = sum(u.row_degrees) - (u.n + 1) < 0
    return DetReport(split, first, second, second <= first, vacuous)


def det_sweep(sc: DetScenario, sizes: Iterable[int] | None = None) -> list[DetReport]:
    """Check every split, or only those with ``|Z1|`` in ``sizes``."""
    splits = all_splits(len(sc.points))
    if sizes is not None:
        keep = set(sizes)
        splits = [s for s in splits if len(s.z1) in keep]
    return [det_cb_check(sc, s) for s in splits]


def decompose_through_point(f: Form, l1: Form, l2: Form) -> tuple[Form, Form]:
    """Forms ``A1, A2`` of degree ``deg f - 1`` with ``f = A1*L1 - A2*L2``.

    ``L1, L2`` are independent linear forms; a decomposition exists exactly
    when ``f`` vanishes on their common zero.
    """
    if l1.degree != 1 or l2.degree != 1 or not l1 or not l2:
        raise ValueError("L1 and L2 must be nonzero linear forms")
    field = f.field
    if rank(Matrix([l1.to_vector(), l2.to_vector()], field)) < 2:
        raise ValueError("L1 and L2 are dependent")
    nv = f.nvars
    if not f:
        zero = Form.zero(nv, f.degree - 1, field)
        return zero, zero
    if f.degree < 1:
        raise DecompositionError("a nonzero constant does not vanish anywhere")
    src = monomial_basis(nv, f.degree - 1)
    cols = []
    for lin, sign in ((l1, 1), (l2, -1)):
        for m in src:
            cols.append((Form(nv, f.degree - 1, {m: sign}, field) * lin).to_vector())
    mat = Matrix(list(zip(*cols)), field, len(cols))
    x = solve(mat, f.to_vector())
    if x is None:
        raise DecompositionError("the form does not vanish at {L1 = L2 = 0}")
    k = len(src)
    return (Form.from_vector(nv, f.degree - 1, x[:k], field),
            Form.from_vector(nv, f.degree - 1, x[k:], field))

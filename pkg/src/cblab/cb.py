"""Cayley-Bacharach statements for sections of a sum of line bundles on P^n.

A scenario is a section ``s = (f_1, ..., f_n)`` of ``E = O(d_1) + ... + O(d_n)``
whose zero scheme is a reduced finite set ``Z``, possibly together with a
smooth excess locus ``W`` given by parametrizations. On P^n the bundle
``K + det E - A`` for ``A = O(a)`` is ``O(sum d_i - (n + 1) - a)``, so every
space of sections below is a space of forms of that degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Iterable, Sequence

from .algebra import Field, Matrix, Scalar, coerce, rank
from .polyring import Form, Parametrization, binary_form_gcd_degree, compose, evaluate
from .polyring import monomial_basis, eval_monomial, partial_derivative
from .vanishing import Condition, PointVanish, SubvarietyJet, basis_h0, h0


class ValidationError(ValueError):
    """A scenario violates one of the hypotheses of the theorems it is used for."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def mi_exponent(n: int, w: int, m: int) -> int:
    """Exponent ``k`` with J(I_W^m) = I_W^k for a smooth W of dimension ``w`` in an n-fold."""
    if not 0 <= w < n:
        raise ValueError("need 0 <= w < n")
    if m < 0:
        raise ValueError("power must be nonnegative")
    return max(0, w + 1 + (m - n))


def li_degree(d_list: Sequence[int], n: int, w: int, e: int | None) -> int:
    """Degree ``sum d_i - (n + 1) - w * e`` of the Li-type propagation statement."""
    if any(d < 1 for d in d_list):
        raise ValueError("section degrees must be positive")
    if w > 0 and (e is None or e < 1):
        raise ValueError("equation degree e >= 1 required when w > 0")
    return sum(d_list) - (n + 1) - (w * e if w else 0)


def points_equal(p: Sequence[Scalar], q: Sequence[Scalar], field: Field) -> bool:
    return rank(Matrix([list(p), list(q)], field)) < 2


def point_on_curve(param: Parametrization, z: Sequence[Scalar]) -> bool:
    """Whether a point lies on the image of a parametrized curve (w = 1).

    ``z`` is in the image iff the binary forms ``g_i z_j - g_j z_i`` share a
    zero on P^1, i.e. have a nonconstant gcd.
    """
    gs = param.components
    forms = []
    for i in range(len(gs)):
        for j in range(i):
            f = gs[i].scale(z[j]) - gs[j].scale(z[i])
            if f:
                forms.append(f)
    if not forms:
        return True
    return binary_form_gcd_degree(forms) > 0


@dataclass
class CIScenario:
    """Sections ``f_1..f_n`` on P^n vanishing on ``W ⊔ Z``.

    Construction validates the checkable hypotheses and raises
    :class:`ValidationError` naming every failed one. Scheme-theoretic
    equality of the zero locus with ``W ⊔ Z`` is only checked through
    necessary conditions; when W is absent the point count must match Bézout.
    """

    n: int
    sections: tuple[Form, ...]
    points: tuple[tuple[Scalar, ...], ...]
    excess: tuple[Parametrization, ...] = ()
    name: str = ""
    checks: list[str] = dc_field(default_factory=list)

    def __post_init__(self):
        self.sections = tuple(self.sections)
        if not self.sections:
            raise ValidationError(["no sections given"])
        self.excess = tuple(self.excess)
        self.points = tuple(tuple(coerce(self.field, x) for x in p) for p in self.points)
        problems = validate_ci(self)
        if problems:
            raise ValidationError(problems)

    @property
    def field(self) -> Field:
        return self.sections[0].field

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(f.degree for f in self.sections)

    @property
    def excess_dim(self) -> int | None:
        return self.excess[0].dim if self.excess else None

    @property
    def equation_degree(self) -> int | None:
        return self.excess[0].equation_degree if self.excess else None

    def canonical_degree(self, a: int = 0) -> int:
        """Degree of forms representing K + det E - O(a)."""
        return sum(self.degrees) - (self.n + 1) - a

    def point_conditions(self, indices: Iterable[int] | None = None) -> list[PointVanish]:
        idx = range(len(self.points)) if indices is None else indices
        return [PointVanish(self.points[i]) for i in idx]

    def multiplier_conditions(self, power: int | None = None) -> list[Condition]:
        """Jet conditions carving out J(I_W^power) ⊗ ..., default power n."""
        if not self.excess:
            return []
        m = self.n if power is None else power
        order = mi_exponent(self.n, self.excess_dim, m)
        if order == 0:
            return []
        return [SubvarietyJet(p, order) for p in self.excess]

    def excess_conditions(self, order: int) -> list[Condition]:
        return [SubvarietyJet(p, order) for p in self.excess] if order > 0 else []


def validate_ci(sc: CIScenario) -> list[str]:
    problems: list[str] = []
    n = sc.n
    if len(sc.sections) != n:
        return [f"expected {n} sections on P^{n}, got {len(sc.sections)}"]
    field = sc.field
    for i, f in enumerate(sc.sections):
        if f.nvars != n + 1:
            problems.append(f"section {i} is not a form on P^{n}")
        if f.field != field:
            problems.append(f"section {i} lives over another field")
        if not f:
            problems.append(f"section {i} is zero")
    if problems:
        return problems
    if not sc.points:
        problems.append("Z is empty")
    dims = {p.dim for p in sc.excess}
    if len(dims) > 1:
        problems.append("excess components of mixed dimension are not supported")
    for p in sc.excess:
        if p.target_dim != n or p.field != field:
            problems.append(f"parametrization {p.name!r} does not map into P^{n} over {field!r}")
            return problems
        if p.dim >= n:
            problems.append(f"parametrization {p.name!r} is not a proper subvariety")
    for k, z in enumerate(sc.points):
        if len(z) != n + 1 or not any(z):
            problems.append(f"point {k} is not a point of P^{n}")
            return problems
    for k, z in enumerate(sc.points):
        for j in range(k):
            if points_equal(z, sc.points[j], field):
                problems.append(f"points {j} and {k} coincide")
    for k, z in enumerate(sc.points):
        for i, f in enumerate(sc.sections):
            if evaluate(f, z):
                problems.append(f"section {i} does not vanish at point {k}")
    grads = [[partial_derivative(f, j) for j in range(n + 1)] for f in sc.sections]
    for k, z in enumerate(sc.points):
        jac = Matrix([[evaluate(g, z) if g else field.zero for g in row] for row in grads], field)
        if rank(jac) < n:
            problems.append(f"Jacobian has rank < {n} at point {k} (Z not reduced/transverse)")
    for p in sc.excess:
        for i, f in enumerate(sc.sections):
            if compose(f, p):
                problems.append(f"section {i} does not vanish along {p.name!r}")
        problems.extend(f"{p.name!r}: {msg}" for msg in p.check_immersion())
        if p.dim == 1:
            for k, z in enumerate(sc.points):
                if point_on_curve(p, z):
                    problems.append(f"point {k} lies on {p.name!r}")
    if not sc.excess:
        bezout = 1
        for d in sc.degrees:
            bezout *= d
        if len(sc.points) != bezout:
            problems.append(f"#Z = {len(sc.points)} but the sections meet in {bezout} points")
    if not problems:
        sc.checks[:] = ["points distinct", "sections vanish on Z", "Jacobian rank n on Z"]
        if sc.excess:
            sc.checks += ["sections vanish along W", "immersion samples", "Z disjoint from W"]
        else:
            sc.checks.append("Bezout count")
    return problems


# --------------------------------------------------------------------------
# propagation


@dataclass
class PropagationResult:
    omit: int
    degree: int
    holds: bool
    vacuous: bool
    dim_without: int
    dim_with: int
    witness: Form | None = None

    def to_dict(self) -> dict:
        return {"omit": self.omit, "degree": self.degree, "holds": self.holds,
                "vacuous": self.vacuous, "h0_without_point": self.dim_without,
                "h0_with_point": self.dim_with,
                "witness": None if self.witness is None else str(self.witness)}


def propagation(sc: CIScenario, extra: Sequence[Condition], d: int, omit: int,
                want_witness: bool = True) -> PropagationResult:
    """Does every degree-``d`` form meeting ``extra`` and ``Z - {z_omit}`` vanish at ``z_omit``?

    The statement is *vacuous* when no nonzero form satisfies the base
    conditions. On failure a witness (a basis form nonzero at ``z_omit``) is
    attached.
    """
    if not sc.points:
        raise ValueError("Z is empty")
    if not 0 <= omit < len(sc.points):
        raise IndexError("omitted point index out of range")
    others = [i for i in range(len(sc.points)) if i != omit]
    base = list(extra) + sc.point_conditions(others)
    if d < 0:
        return PropagationResult(omit, d, True, True, 0, 0)
    without = h0(sc.n, d, base, sc.field)
    with_pt = h0(sc.n, d, base + [PointVanish(sc.points[omit])], sc.field)
    holds = without == with_pt
    witness = None
    if not holds and want_witness:
        z = sc.points[omit]
        witness = next(f for f in basis_h0(sc.n, d, base, sc.field) if evaluate(f, z))
    return PropagationResult(omit, d, holds, without == 0, without, with_pt, witness)


def cb_propagates(sc: CIScenario, extra: Sequence[Condition], target_degree: int,
                  omit: int) -> bool:
    return propagation(sc, extra, target_degree, omit, want_witness=False).holds


# --------------------------------------------------------------------------
# Tan-Viehweg quantities


@dataclass(frozen=True)
class Split:
    """A decomposition ``Z = Z1 ⊔ Z2`` by point indices; both parts nonempty."""

    z1: tuple[int, ...]
    z2: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "z1", tuple(sorted(self.z1)))
        object.__setattr__(self, "z2", tuple(sorted(self.z2)))
        if not self.z1 or not self.z2:
            raise ValueError("both parts of a split must be nonempty")
        if set(self.z1) & set(self.z2):
            raise ValueError("split parts overlap")

    @classmethod
    def from_z1(cls, z1: Iterable[int], size: int) -> "Split":
        z1 = tuple(sorted(set(z1)))
        if any(not 0 <= i < size for i in z1):
            raise IndexError("split index out of range")
        return cls(z1, tuple(i for i in range(size) if i not in z1))

    def check(self, size: int) -> None:
        if sorted(self.z1 + self.z2) != list(range(size)):
            raise ValueError("split does not partition Z")


def all_splits(size: int) -> list[Split]:
    """Every proper split of ``size`` points, ordered by |Z1| then lexicographically."""
    out = []
    for k in range(1, size):
        for z1 in combinations(range(size), k):
            out.append(Split.from_z1(z1, size))
    return out


def v1(n: int, a: int, z1: Sequence[Sequence[Scalar]], field: Field) -> int:
    """Failure of ``Z1`` to impose independent conditions on forms of degree ``a``."""
    if a < 0:
        return len(z1)
    basis = monomial_basis(n + 1, a)
    one = field.one
    ev = Matrix([[eval_monomial(m, [coerce(field, x) for x in p], one) for m in basis] for p in z1],
                field, len(basis))
    return len(z1) - rank(ev)


def v2(sc: CIScenario, a: int, split: Split, use_multiplier: bool = True) -> int:
    """Forms of degree ``sum d_i - n - 1 - a`` vanishing on Z2 but not on all of Z.

    With ``use_multiplier`` the forms must also lie in J(I_W^n). A negative
    degree gives 0 (the statement is vacuous).
    """
    split.check(len(sc.points))
    d = sc.canonical_degree(a)
    if d < 0:
        return 0
    base = sc.multiplier_conditions() if use_multiplier else []
    on_z2 = h0(sc.n, d, base + sc.point_conditions(split.z2), sc.field)
    on_z = h0(sc.n, d, base + sc.point_conditions(), sc.field)
    return on_z2 - on_z


@dataclass
class TVReport:
    split: Split
    a: int
    v1: int
    v2: int
    passed: bool
    vacuous: bool
    use_multiplier: bool

    def to_dict(self) -> dict:
        return {"z1": list(self.split.z1), "z2": list(self.split.z2), "a": self.a,
                "v1": self.v1, "v2": self.v2, "pass": self.passed, "vacuous": self.vacuous,
                "use_multiplier": self.use_multiplier}


def tv_check(sc: CIScenario, a: int, split: Split, use_multiplier: bool = True) -> TVReport:
    split.check(len(sc.points))
    first = v1(sc.n, a, [sc.points[i] for i in split.z1], sc.field)
    second = v2(sc, a, split, use_multiplier)
    return TVReport(split, a, first, second, second <= first, sc.canonical_degree(a) < 0,
                    use_multiplier)


def tv_sweep(sc: CIScenario, twists: Iterable[int], use_multiplier: bool = True,
             splits: Sequence[Split] | None = None) -> list[TVReport]:
    splits = all_splits(len(sc.points)) if splits is None else splits
    return [tv_check(sc, a, s, use_multiplier) for a in twists for s in splits]

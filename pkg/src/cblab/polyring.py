"""Homogeneous polynomials in sparse exponent-vector form.

Monomials are tuples of exponents. Within a fixed degree they are always
enumerated in graded-lexicographic order, largest first: for three variables
and degree 2 the order is ``x0^2, x0x1, x0x2, x1^2, x1x2, x2^2``. This order
indexes the columns of every coefficient-space matrix in the package.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Any, Iterable, Mapping, Sequence

from .algebra import QQ, ConfigurationError, Field, Matrix, Scalar, coerce, common_field, rank

Monomial = tuple[int, ...]


@lru_cache(maxsize=None)
def monomial_basis(nvars: int, d: int) -> tuple[Monomial, ...]:
    """All monomials of degree ``d`` in ``nvars`` variables, graded-lex order."""
    if nvars < 1:
        raise ValueError("need at least one variable")
    if d < 0:
        return ()
    if nvars == 1:
        return ((d,),)
    out = []
    for a in range(d, -1, -1):
        for rest in monomial_basis(nvars - 1, d - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, d: int) -> dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomial_basis(nvars, d))}


def basis_size(nvars: int, d: int) -> int:
    return comb(d + nvars - 1, nvars - 1) if d >= 0 else 0


def eval_monomial(m: Monomial, point: Sequence[Scalar], one: Scalar) -> Scalar:
    v = one
    for x, k in zip(point, m):
        if k:
            v = v * x ** k
    return v


class Form:
    """A homogeneous polynomial of declared degree over an exact field.

    ``terms`` maps exponent tuples to nonzero coefficients. Forms are treated
    as immutable values.
    """

    __slots__ = ("nvars", "degree", "field", "_terms", "_hash")

    def __init__(self, nvars: int, degree: int, terms: Mapping[Monomial, Any] | None = None,
                 field: Field | None = None):
        terms = dict(terms or {})
        if field is None:
            field = common_field(terms.values())
        clean: dict[Monomial, Scalar] = {}
        for m, c in terms.items():
            m = tuple(int(e) for e in m)
            if len(m) != nvars:
                raise ValueError(f"monomial {m} has wrong number of variables")
            if sum(m) != degree or min(m, default=0) < 0:
                raise ValueError(f"monomial {m} is not of degree {degree}")
            c = coerce(field, c)
            if c:
                clean[m] = c
        self.nvars = nvars
        self.degree = degree
        self.field = field
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, degree: int, terms: dict, field: Field) -> "Form":
        f = object.__new__(cls)
        f.nvars, f.degree, f.field, f._terms, f._hash = nvars, degree, field, terms, None
        return f

    @classmethod
    def zero(cls, nvars: int, degree: int, field: Field = QQ) -> "Form":
        return cls._raw(nvars, degree, {}, field)

    @classmethod
    def constant(cls, nvars: int, c: Any, field: Field = QQ) -> "Form":
        return cls(nvars, 0, {(0,) * nvars: c}, field)

    @classmethod
    def variable(cls, nvars: int, i: int, field: Field = QQ) -> "Form":
        m = [0] * nvars
        m[i] = 1
        return cls(nvars, 1, {tuple(m): 1}, field)

    @classmethod
    def linear(cls, coeffs: Sequence[Any], field: Field = QQ) -> "Form":
        n = len(coeffs)
        return cls(n, 1, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)},
                   field)

    @classmethod
    def from_vector(cls, nvars: int, degree: int, vec: Sequence[Scalar], field: Field) -> "Form":
        basis = monomial_basis(nvars, degree)
        if len(vec) != len(basis):
            raise ValueError("coefficient vector has wrong length")
        return cls._raw(nvars, degree, {m: c for m, c in zip(basis, vec) if c}, field)

    @property
    def terms(self) -> Mapping[Monomial, Scalar]:
        return self._terms

    def to_vector(self) -> list[Scalar]:
        idx = monomial_index(self.nvars, self.degree)
        v = [self.field.zero] * len(idx)
        for m, c in self._terms.items():
            v[idx[m]] = c
        return v

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _compatible(self, other: "Form") -> None:
        if self.nvars != other.nvars:
            raise ValueError("forms live in different numbers of variables")
        if self.field != other.field:
            raise ConfigurationError(f"mixed fields {self.field!r} and {other.field!r}")

    def __add__(self, other: "Form") -> "Form":
        self._compatible(other)
        if other.degree != self.degree and self._terms and other._terms:
            raise ValueError("cannot add forms of different degrees")
        deg = self.degree if self._terms else other.degree
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Form._raw(self.nvars, deg, out, self.field)

    def __neg__(self) -> "Form":
        return Form._raw(self.nvars, self.degree, {m: -c for m, c in self._terms.items()},
                         self.field)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c: Any) -> "Form":
        c = coerce(self.field, c)
        if not c:
            return Form.zero(self.nvars, self.degree, self.field)
        return Form._raw(self.nvars, self.degree, {m: c * v for m, v in self._terms.items()},
                         self.field)

    def __mul__(self, other: Any) -> "Form":
        if not isinstance(other, Form):
            return self.scale(other)
        self._compatible(other)
        out: dict[Monomial, Scalar] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        out = {m: c for m, c in out.items() if c}
        return Form._raw(self.nvars, self.degree + other.degree, out, self.field)

    __rmul__ = scale

    def __pow__(self, k: int) -> "Form":
        out = Form.constant(self.nvars, 1, self.field)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        if self.nvars != other.nvars or self.field != other.field:
            return False
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            deg = self.degree if self._terms else None
            self._hash = hash((self.nvars, deg, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, point: Sequence[Any]) -> Scalar:
        return evaluate(self, point)

    def __repr__(self) -> str:
        return f"Form({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, reverse=True):
            c = self._terms[m]
            mono = "*".join(f"x{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def evaluate(f: Form, point: Sequence[Any]) -> Scalar:
    """Value of ``f`` at a chosen representative of a projective point."""
    if len(point) != f.nvars:
        raise ValueError("point has wrong number of coordinates")
    point = [coerce(f.field, x) for x in point]
    if not any(point):
        raise ValueError("the zero vector is not a projective point")
    one = f.field.one
    total = f.field.zero
    for m, c in f._terms.items():
        total = total + c * eval_monomial(m, point, one)
    return total


def partial_derivative(f: Form, var: int) -> Form:
    if not 0 <= var < f.nvars:
        raise IndexError("variable index out of range")
    out = {}
    for m, c in f._terms.items():
        k = m[var]
        if k:
            mm = list(m)
            mm[var] = k - 1
            v = c * k
            if v:
                out[tuple(mm)] = v
    return Form._raw(f.nvars, max(f.degree - 1, 0), out, f.field)


def multiply(f: Form, g: Form) -> Form:
    return f * g


# --------------------------------------------------------------------------
# parametrizations


def binary_form_gcd_degree(forms: Sequence[Form]) -> int:
    """Degree of the gcd of binary forms (0 means no common zero on P^1)."""
    if any(f.nvars != 2 for f in forms):
        raise ValueError("binary forms expected")
    nonzero = [f for f in forms if f]
    if not nonzero:
        raise ValueError("all forms are zero")
    field = nonzero[0].field
    # a common zero at (1:0) shows up as a common factor t
    at_infinity = 0
    while all(not f.terms.get((f.degree - at_infinity, at_infinity)) for f in nonzero):
        at_infinity += 1
    # dehomogenize t = 1 and take the gcd of univariate polynomials in s
    polys = []
    for f in nonzero:
        coeffs = [field.zero] * (f.degree + 1)
        for (a, _b), c in f.terms.items():
            coeffs[a] = c
        polys.append(_trim(coeffs))
    g = polys[0]
    for h in polys[1:]:
        g = _poly_gcd(g, h)
    return at_infinity + len(g) - 1


def _trim(p: list) -> list:
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def _poly_gcd(a: list, b: list) -> list:
    while len(b) > 1 or b[0]:
        a, b = b, _poly_mod(a, b)
    return a


def _poly_mod(a: list, b: list) -> list:
    """Remainder of ``a`` by ``b``; coefficient lists run from low to high degree."""
    a = list(a)
    zero = b[-1] * 0
    while len(a) >= len(b):
        if a[-1]:
            q = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] = a[shift + i] - q * c
        a.pop()
    return _trim(a) if a else [zero]


class Parametrization:
    """A map P^w -> P^n given by ``n + 1`` forms of a common degree ``e``.

    ``equation_degree`` records the degree of hypersurfaces cutting out the
    image scheme-theoretically (2 for the twisted cubic); it is metadata used
    by degree formulas, not verified.
    """

    def __init__(self, components: Sequence[Form], name: str = "",
                 equation_degree: int | None = None):
        comps = tuple(components)
        if len(comps) < 2:
            raise ValueError("need at least two components")
        nv = {g.nvars for g in comps}
        degs = {g.degree for g in comps if g}
        fields = {g.field for g in comps}
        if len(nv) != 1 or len(fields) != 1:
            raise ValueError("components must share variables and field")
        if len(degs) != 1:
            raise ValueError("components must be homogeneous of one common degree")
        self.components = comps
        self.name = name
        self.field = comps[0].field
        self.dim = comps[0].nvars - 1
        self.target_dim = len(comps) - 1
        self.degree = degs.pop()
        self.equation_degree = equation_degree
        self.components = tuple(g if g else Form.zero(self.dim + 1, self.degree, self.field)
                                for g in comps)
        if self.dim == 1 and binary_form_gcd_degree(self.components) > 0:
            raise ValueError(f"parametrization {name!r} has a base point")

    def __call__(self, params: Sequence[Any]) -> tuple[Scalar, ...]:
        return tuple(evaluate(g, params) for g in self.components)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Parametrization) and self.components == other.components
                and self.equation_degree == other.equation_degree)

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"Parametrization({self.name or '?'}: P^{self.dim} -> P^{self.target_dim}, deg {self.degree})"

    def sample_parameters(self, count: int = 6) -> list[tuple[Scalar, ...]]:
        """Deterministic parameter points used by immersion checks."""
        f = self.field
        pts = [(f.one,) + (f.zero,) * self.dim]
        for k in range(count - 1):
            pts.append(tuple(f(k + j + 1) ** (j + 1) for j in range(self.dim)) + (f.one,))
        return pts

    def check_immersion(self, count: int = 6) -> list[str]:
        """Necessary smoothness conditions at sample parameters (curves only).

        Returns a list of problems: images of distinct samples coinciding, or
        a rank-deficient Jacobian of the affine cone map.
        """
        if self.dim != 1:
            return []
        problems = []
        samples = self.sample_parameters(count)
        images = [self(t) for t in samples]
        for i in range(len(images)):
            for j in range(i):
                if rank(Matrix([images[i], images[j]], self.field)) < 2:
                    problems.append(f"samples {j} and {i} have the same image")
        grads = [[partial_derivative(g, v) for g in self.components] for v in range(2)]
        for i, t in enumerate(samples):
            jac = Matrix([[evaluate(g, t) if g else self.field.zero for g in row] for row in grads],
                         self.field)
            if rank(jac) < 2:
                problems.append(f"differential degenerates at sample {i}")
        return problems


def compose(f: Form, phi: Parametrization) -> Form:
    """Restriction ``f o phi``: a form of degree ``deg f * e`` in the parameters."""
    if f.nvars != phi.target_dim + 1:
        raise ValueError("form and parametrization dimensions differ")
    if f.field != phi.field:
        raise ConfigurationError("form and parametrization live over different fields")
    cache = _MonomialComposer(phi)
    out = Form.zero(phi.dim + 1, f.degree * phi.degree, f.field)
    for m, c in f.terms.items():
        out = out + cache(m).scale(c)
    return out


class _MonomialComposer:
    """Memoized ``x^a o phi`` built recursively from lower-degree monomials."""

    def __init__(self, phi: Parametrization):
        self.phi = phi
        self._memo: dict[Monomial, Form] = {}

    def __call__(self, m: Monomial) -> Form:
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        phi = self.phi
        if sum(m) == 0:
            out = Form.constant(phi.dim + 1, 1, phi.field)
        else:
            i = next(k for k, e in enumerate(m) if e)
            rest = m[:i] + (m[i] - 1,) + m[i + 1:]
            out = self(rest) * phi.components[i]
        self._memo[m] = out
        return out

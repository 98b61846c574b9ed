"""Exact scalars and dense linear algebra over Q and prime fields.

Every dimension computed elsewhere in the package is reduced to a rank, a
kernel or a particular solution computed here. Nothing is ever rounded.

Over Q the engine works on integer rows: each row is cleared of
denominators, made primitive, and eliminated fraction-free with the pivot of
smallest bit-size chosen in each column. Over F_p rows are held in numpy
``int64`` arrays when ``p < 2**31`` (so products of residues fit), and in
object arrays of Python ints otherwise. By default ranks and echelon forms
are delegated to FLINT (``fmpz_mat`` / ``nmod_mat``); the pure-Python engines
remain available as ``engine="python"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Sequence

import flint
import numpy as np
from sympy import isprime


_WORD = 2 ** 63


class ConfigurationError(ValueError):
    """Raised when values from different fields are mixed or a field is invalid."""


# --------------------------------------------------------------------------
# fields and scalars


class RationalField:
    """The field Q; elements are :class:`fractions.Fraction` in lowest terms."""

    characteristic = 0
    name = "Q"

    def __call__(self, x: Any) -> Fraction:
        if isinstance(x, FpElement):
            raise ConfigurationError(f"cannot coerce {x!r} into Q")
        if isinstance(x, float):
            raise ConfigurationError("floating point values are not exact scalars")
        if isinstance(x, str):
            x = x.strip()
        return Fraction(x)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def contains(self, x: Any) -> bool:
        return isinstance(x, (Fraction, int)) and not isinstance(x, bool)

    def spec(self) -> dict:
        return {"kind": "Q"}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("Q")

    def __repr__(self) -> str:
        return "QQ"


QQ = RationalField()


class PrimeField:
    """The field F_p for an odd prime ``p``."""

    def __init__(self, p: int):
        p = int(p)
        if p <= 2 or not isprime(p):
            raise ConfigurationError(f"F_p needs an odd prime, got {p}")
        self.p = p
        self.characteristic = p
        self.name = f"Fp:{p}"

    def __call__(self, x: Any) -> "FpElement":
        if isinstance(x, FpElement):
            if x.field != self:
                raise ConfigurationError(f"{x!r} does not belong to {self!r}")
            return x
        if isinstance(x, float):
            raise ConfigurationError("floating point values are not exact scalars")
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ConfigurationError(f"denominator of {x} vanishes mod {self.p}")
            return FpElement(x.numerator * pow(x.denominator, -1, self.p) % self.p, self)
        return FpElement(int(x) % self.p, self)

    @property
    def zero(self) -> "FpElement":
        return FpElement(0, self)

    @property
    def one(self) -> "FpElement":
        return FpElement(1, self)

    def contains(self, x: Any) -> bool:
        return isinstance(x, FpElement) and x.field == self

    def spec(self) -> dict:
        return {"kind": "Fp", "p": self.p}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Fp", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


Field = RationalField | PrimeField


def GF(p: int) -> PrimeField:
    return PrimeField(p)


@dataclass(frozen=True, slots=True)
class FpElement:
    """A residue ``0 <= value < p``; arithmetic with plain ints is allowed."""

    value: int
    field: PrimeField

    def _other(self, other: Any) -> int:
        if isinstance(other, FpElement):
            if other.field.p != self.field.p:
                raise ConfigurationError(f"mixed fields {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return self.field(other).value
        return NotImplemented  # type: ignore[return-value]

    def _make(self, v: int) -> "FpElement":
        return FpElement(v % self.field.p, self.field)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._make(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._make(self.value - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._make(o - self.value)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._make(self.value * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        if o % self.field.p == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return self._make(self.value * pow(o, -1, self.field.p))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self._make(o).__truediv__(self)

    def __neg__(self):
        return self._make(-self.value)

    def __pow__(self, k: int):
        return self._make(pow(self.value, k, self.field.p))

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FpElement):
            return self.value == other.value and self.field.p == other.field.p
        if isinstance(other, int):
            return (other - self.value) % self.field.p == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.p))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"

    def __str__(self) -> str:
        return str(self.value)


Scalar = Fraction | FpElement


def field_of(x: Any) -> Field:
    if isinstance(x, FpElement):
        return x.field
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return QQ
    raise ConfigurationError(f"{x!r} is not an exact scalar")


def common_field(values: Iterable[Any], default: Field | None = None) -> Field:
    """Return the unique field of a collection of scalars.

    Plain ints are field-neutral. Raises :class:`ConfigurationError` on a mix.
    """
    found: Field | None = None
    for x in values:
        if isinstance(x, int) and not isinstance(x, bool):
            continue
        f = field_of(x)
        if found is None:
            found = f
        elif f != found:
            raise ConfigurationError(f"mixed fields {found!r} and {f!r}")
    if found is None:
        return default if default is not None else QQ
    return found


def coerce(field: Field, x: Any) -> Scalar:
    """Coerce ``x`` into ``field``; plain ints are neutral, anything else must match."""
    if isinstance(x, int) and not isinstance(x, bool):
        return field(x)
    if field.contains(x):
        return x
    raise ConfigurationError(f"{x!r} does not belong to {field!r}")


def scalar_to_str(x: Scalar) -> str:
    """Serialize a scalar as a decimal integer or ``"p/q"`` string."""
    if isinstance(x, FpElement):
        return str(x.value)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# matrices


class Matrix:
    """Immutable dense matrix over a single field, stored row-major."""

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, rows: Iterable[Sequence[Any]], field: Field | None = None,
                 ncols: int | None = None):
        raw = [list(r) for r in rows]
        if field is None:
            field = common_field(x for r in raw for x in r)
        if ncols is None:
            ncols = len(raw[0]) if raw else 0
        for r in raw:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        self.field = field
        self.nrows = len(raw)
        self.ncols = ncols
        self._rows = tuple(tuple(coerce(field, x) for x in r) for r in raw)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: Field = QQ) -> "Matrix":
        return cls([[0] * ncols for _ in range(nrows)], field, ncols)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], field, n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def rows(self) -> tuple[tuple[Scalar, ...], ...]:
        return self._rows

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self._rows[i][j]

    def transpose(self) -> "Matrix":
        cols = [[self._rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)]
        return Matrix(cols, self.field, self.nrows)

    def stack(self, other: "Matrix") -> "Matrix":
        if other.ncols != self.ncols:
            raise ValueError("column counts differ")
        if other.field != self.field:
            raise ConfigurationError("cannot stack matrices over different fields")
        return Matrix(self._rows + other._rows, self.field, self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        if other.field != self.field:
            raise ConfigurationError("cannot multiply matrices over different fields")
        return matmul(self, other)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Matrix) and self.field == other.field
                and self.shape == other.shape and self._rows == other._rows)

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self._rows))

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols} over {self.field!r})"


# --------------------------------------------------------------------------
# elimination engines


def _primitive(row: list[int]) -> list[int]:
    g = math.gcd(*row)
    if g > 1:
        return [x // g for x in row]
    return row


def _integer_rows(m: Matrix) -> list[list[int]]:
    out = []
    for r in m.rows():
        den = reduce(math.lcm, (x.denominator for x in r), 1)
        ints = [x.numerator * (den // x.denominator) for x in r]
        if any(ints):
            out.append(_primitive(ints))
    return out


def _ff_echelon(rows: list[list[int]], ncols: int, reduced: bool) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of integer rows.

    Rows are kept primitive after every update. Returns the nonzero echelon
    rows and their pivot columns; with ``reduced`` every pivot column is
    cleared above its pivot as well.
    """
    rows = [r for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        cand = [i for i in range(r, len(rows)) if rows[i][c]]
        if not cand:
            continue
        best = min(cand, key=lambda i: (abs(rows[i][c]).bit_length(), i))
        rows[r], rows[best] = rows[best], rows[r]
        prow = rows[r]
        a = prow[c]
        ptail = prow[c:]
        head = [0] * c
        keep = rows[: r + 1]
        for row in rows[r + 1:]:
            b = row[c]
            if b:
                g = math.gcd(a, b)
                a1, b1 = a // g, b // g
                row = head + [a1 * x - b1 * y for x, y in zip(row[c:], ptail)]
                if any(row):
                    keep.append(_primitive(row))
            else:
                keep.append(row)
        rows = keep
        pivots.append(c)
        r += 1
    rows = rows[:r]
    if reduced:
        for k in range(len(rows) - 1, -1, -1):
            c = pivots[k]
            prow = rows[k]
            a = prow[c]
            for i in range(k):
                b = rows[i][c]
                if b:
                    g = math.gcd(a, b)
                    a1, b1 = a // g, b // g
                    rows[i] = _primitive([a1 * x - b1 * y for x, y in zip(rows[i], prow)])
        for k, c in enumerate(pivots):
            if rows[k][c] < 0:
                rows[k] = [-x for x in rows[k]]
    return rows, pivots


def _residue_array(m: Matrix) -> np.ndarray:
    p = m.field.p
    dtype = np.int64 if p < 2 ** 31 else object
    arr = np.array([[x.value for x in r] for r in m.rows()], dtype=dtype)
    return arr.reshape(m.nrows, m.ncols)


def _mod_echelon(arr: np.ndarray, p: int, reduced: bool) -> tuple[np.ndarray, list[int]]:
    """Row echelon form over F_p with monic pivots (first nonzero pivot)."""
    a = arr.copy() % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        if reduced:
            targets = np.flatnonzero(a[:, c])
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(a[r + 1:, c])
        if targets.size:
            f = a[targets, c]
            a[targets, c:] = (a[targets, c:] - (np.outer(f, a[r, c:]) % p)) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


ENGINES = ("flint", "python")


def _check(m: Matrix, engine: str) -> None:
    if not isinstance(m, Matrix):
        raise TypeError("expected a Matrix")
    if engine not in ENGINES:
        raise ConfigurationError(f"unknown elimination engine {engine!r}")


def _flint_modular(m: Matrix):
    return flint.nmod_mat([[x.value for x in r] for r in m.rows()], m.field.p)


def rank(m: Matrix, *, engine: str = "flint") -> int:
    """Rank of ``m`` over its field.

    ``engine="flint"`` delegates to FLINT's exact integer / word-size modular
    matrices; ``engine="python"`` runs the fraction-free elimination above.
    Both are exact and must agree.
    """
    _check(m, engine)
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if isinstance(m.field, RationalField):
        rows = _integer_rows(m)
        if not rows:
            return 0
        if engine == "flint":
            return flint.fmpz_mat(rows).rank()
        return len(_ff_echelon(rows, m.ncols, reduced=False)[1])
    if engine == "flint" and m.field.p < _WORD:
        return _flint_modular(m).rank()
    return len(_mod_echelon(_residue_array(m), m.field.p, reduced=False)[1])


def matmul(a: Matrix, b: Matrix, *, engine: str = "flint") -> Matrix:
    """Exact product ``a @ b``."""
    _check(a, engine)
    _check(b, engine)
    if a.ncols != b.nrows:
        raise ValueError("shape mismatch")
    if a.field != b.field:
        raise ConfigurationError("cannot multiply matrices over different fields")
    f = a.field
    if 0 in (a.nrows, a.ncols, b.ncols):
        return Matrix.zeros(a.nrows, b.ncols, f)
    if engine == "flint" and isinstance(f, RationalField):
        fa = flint.fmpq_mat(a.nrows, a.ncols, [flint.fmpq(x.numerator, x.denominator)
                                               for r in a.rows() for x in r])
        fb = flint.fmpq_mat(b.nrows, b.ncols, [flint.fmpq(x.numerator, x.denominator)
                                               for r in b.rows() for x in r])
        out = [[Fraction(int(x.p), int(x.q)) for x in r] for r in (fa * fb).tolist()]
        return Matrix(out, f, b.ncols)
    if engine == "flint" and f.p < _WORD:
        out = (_flint_modular(a) * _flint_modular(b)).tolist()
        return Matrix([[FpElement(int(x), f) for x in r] for r in out], f, b.ncols)
    cols = list(zip(*b.rows()))
    out = [[sum((x * y for x, y in zip(r, c)), f.zero) for c in cols] for r in a.rows()]
    return Matrix(out, f, b.ncols)


def _pivots(rows: list[list[Any]]) -> list[int]:
    return [next(j for j, x in enumerate(r) if x) for r in rows]


def rref(m: Matrix, *, engine: str = "flint") -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form (monic pivots, zero rows dropped) and pivot columns."""
    _check(m, engine)
    f = m.field
    if m.nrows == 0 or m.ncols == 0:
        return [], []
    if isinstance(f, RationalField):
        rows = _integer_rows(m)
        if not rows:
            return [], []
        if engine == "flint":
            mat, den, r = flint.fmpz_mat(rows).rref()
            ints = [[int(x) for x in row] for row in mat.tolist()[:r]]
            den = int(den)
            return [[Fraction(x, den) for x in row] for row in ints], _pivots(ints)
        rows, piv = _ff_echelon(rows, m.ncols, reduced=True)
        return [[Fraction(x, row[c]) for x in row] for row, c in zip(rows, piv)], piv
    if engine == "flint" and f.p < _WORD:
        mat, r = _flint_modular(m).rref()
        ints = [[int(x) for x in row] for row in mat.tolist()[:r]]
        return [[FpElement(x, f) for x in row] for row in ints], _pivots(ints)
    a, piv = _mod_echelon(_residue_array(m), f.p, reduced=True)
    return [[FpElement(int(x), f) for x in row] for row in a], piv


def kernel_basis(m: Matrix, *, engine: str = "flint") -> list[tuple[Scalar, ...]]:
    """Basis of the right null space in canonical reduced form.

    There is one vector per non-pivot column ``j``: it has a 1 in position
    ``j``, zeros in every other non-pivot position, and its last nonzero
    entry is that 1. The basis is therefore the unique reduced column echelon
    basis of the kernel (read from the bottom) and does not depend on row
    order or engine. Vectors are listed by increasing free column.
    """
    _check(m, engine)
    f = m.field
    rows, piv = rref(m, engine=engine)
    pivset = set(piv)
    basis = []
    for j in range(m.ncols):
        if j in pivset:
            continue
        v = [f.zero] * m.ncols
        v[j] = f.one
        for row, c in zip(rows, piv):
            if row[j]:
                v[c] = -row[j]
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, rhs: Sequence[Any], *, engine: str = "flint") -> tuple[Scalar, ...] | None:
    """One solution of ``m x = rhs``, or ``None`` when the system is inconsistent.

    The solution returned has every free variable set to zero.
    """
    _check(m, engine)
    if len(rhs) != m.nrows:
        raise ValueError("right-hand side length differs from row count")
    f = m.field
    aug = Matrix([list(r) + [f(b)] for r, b in zip(m.rows(), rhs)], f, m.ncols + 1)
    rows, piv = rref(aug, engine=engine)
    if piv and piv[-1] == m.ncols:
        return None
    x = [f.zero] * m.ncols
    for row, c in zip(rows, piv):
        x[c] = row[m.ncols]
    return tuple(x)


def vandermonde(nodes: Sequence[Any], field: Field = QQ) -> Matrix:
    n = len(nodes)
    return Matrix([[field(t) ** k for k in range(n)] for t in nodes], field, n)

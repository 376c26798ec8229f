"""Exact rational scalars, vectors, matrices, and linear-system solving.

Everything downstream (market systems, polytope vertices, lattice pricing)
runs on ``fractions.Fraction``. No floating point enters any decision path:
the verdicts rest on strict inequalities and exact ranks, and a tolerance
would corrupt boundary cases such as measures sitting on a simplex face.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import InputError

Rational = Fraction
Vector = tuple[Fraction, ...]
RationalLike = Union[Fraction, int, str]


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer string, or a finite decimal into canonical form.

    Decimal strings convert exactly ("0.25" -> 1/4), never through binary
    floating point.
    """
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise InputError(f"zero denominator in rational {text!r}") from None
    except (ValueError, TypeError):
        raise InputError(f"malformed rational {text!r}") from None


def format_rational(value: Fraction) -> str:
    """Canonical string form: "p/q", or just "p" when the denominator is 1."""
    return str(value)


def rat(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction, or rational string to an exact Fraction.

    Floats are rejected on purpose; they carry binary rounding error.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InputError(f"cannot interpret {value!r} as an exact rational")


def vector(values: Iterable[RationalLike]) -> Vector:
    return tuple(rat(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise InputError(f"dot product of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def scale(v: Sequence[Fraction], factor: Fraction) -> Vector:
    return tuple(factor * x for x in v)


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    if len(u) != len(v):
        raise InputError(f"adding vectors of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def mean_vector(vs: Sequence[Sequence[Fraction]]) -> Vector:
    """Componentwise average of a nonempty family of equal-length vectors."""
    if not vs:
        raise InputError("mean of an empty family of vectors")
    k = Fraction(len(vs))
    return tuple(sum(col, Fraction(0)) / k for col in zip(*vs))


def unit_vector(index: int, length: int) -> Vector:
    return tuple(Fraction(1 if j == index else 0) for j in range(length))


def zero_vector(length: int) -> Vector:
    return (Fraction(0),) * length


@dataclass(frozen=True)
class Matrix:
    """Immutable rational matrix in row-major layout.

    The column count is stored explicitly so a matrix with zero rows (a market
    with no risky assets) still knows how wide it is.
    """

    entries: tuple[Vector, ...]
    cols: int

    def __post_init__(self) -> None:
        if self.cols < 0:
            raise InputError("negative column count")
        for row in self.entries:
            if len(row) != self.cols:
                raise InputError(
                    f"ragged matrix: expected {self.cols} columns, got {len(row)}"
                )

    @classmethod
    def from_rows(
        cls, rows: Iterable[Iterable[RationalLike]], cols: int | None = None
    ) -> "Matrix":
        converted = tuple(vector(row) for row in rows)
        if cols is None:
            if not converted:
                raise InputError("column count required for a matrix with no rows")
            cols = len(converted[0])
        return cls(converted, cols)

    @property
    def rows(self) -> int:
        return len(self.entries)

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def mul_vec(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise InputError(f"matrix has {self.cols} columns, vector has {len(v)}")
        return tuple(dot(row, v) for row in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(tuple(self.column(j) for j in range(self.cols)), self.rows)

    def with_rows(self, extra: Iterable[Iterable[RationalLike]]) -> "Matrix":
        return Matrix(self.entries + tuple(vector(r) for r in extra), self.cols)

    def select_columns(self, indices: Sequence[int]) -> "Matrix":
        return Matrix(
            tuple(tuple(row[j] for j in indices) for row in self.entries),
            len(indices),
        )

    def to_lists(self) -> list[list[Fraction]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class Echelon:
    """Reduced row echelon form together with its pivot columns."""

    matrix: Matrix
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rref(m: Matrix) -> Echelon:
    """Reduced row echelon form by Gauss-Jordan elimination, exactly.

    The result is the unique RREF of the input; intermediate entries may grow
    well beyond machine integers, which is why everything is a Fraction.
    """
    rows = [list(r) for r in m.entries]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == len(rows):
            break
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][c]
        if pivot != 1:
            rows[r] = [x / pivot for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return Echelon(Matrix.from_rows(rows, m.cols), tuple(pivots))


def rank(m: Matrix) -> int:
    return rref(m).rank


@dataclass(frozen=True)
class SolutionSpace:
    """Exact solution set of a linear system M x = c.

    kind is one of "inconsistent", "unique", "affine". For consistent systems
    every x = particular + sum(t_i * basis_i) solves the system exactly, and
    the basis spans the homogeneous solutions.
    """

    kind: str
    particular: Vector | None
    basis: tuple[Vector, ...]

    @property
    def is_consistent(self) -> bool:
        return self.kind != "inconsistent"

    @property
    def dim(self) -> int:
        """Dimension of the solution set; only meaningful when consistent."""
        return len(self.basis)

    def solution(self, coefficients: Sequence[Fraction]) -> Vector:
        """particular + sum of coefficient * basis vector."""
        if self.particular is None:
            raise InputError("no solutions to combine: system is inconsistent")
        if len(coefficients) != len(self.basis):
            raise InputError("one coefficient per basis vector required")
        out = list(self.particular)
        for t, b in zip(coefficients, self.basis):
            for j, x in enumerate(b):
                out[j] += t * x
        return tuple(out)


def solve(m: Matrix, c: Sequence[RationalLike]) -> SolutionSpace:
    """Classify and solve M x = c exactly.

    Returns the particular solution with all free variables at zero and one
    basis vector per free column (free variable set to one).
    """
    rhs = vector(c)
    if len(rhs) != m.rows:
        raise InputError(f"matrix has {m.rows} rows, right-hand side has {len(rhs)}")
    augmented = Matrix(
        tuple(row + (rhs[i],) for i, row in enumerate(m.entries)), m.cols + 1
    )
    ech = rref(augmented)
    if m.cols in ech.pivots:
        return SolutionSpace("inconsistent", None, ())
    reduced = ech.matrix.entries
    particular = [Fraction(0)] * m.cols
    for i, pc in enumerate(ech.pivots):
        particular[pc] = reduced[i][m.cols]
    pivot_set = set(ech.pivots)
    basis: list[Vector] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for i, pc in enumerate(ech.pivots):
            v[pc] = -reduced[i][free]
        basis.append(tuple(v))
    kind = "affine" if basis else "unique"
    return SolutionSpace(kind, tuple(particular), tuple(basis))

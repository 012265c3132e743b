"""Dense and sparse exact linear algebra over Q and Q(sqrt(d)).

Two elimination engines back everything here:

* a fraction-free (Bareiss/Montante style) reduced-echelon routine for dense
  rational matrices, which keeps intermediate integers small;
* :class:`EchelonSystem`, an incremental sparse reduced-echelon form over any
  of the supported fields, used for the large, very sparse derivation systems
  and for span bookkeeping.

Both produce the (unique) RREF, so they check each other; the naive
normalize-every-step path doubles as the test oracle for the Bareiss code.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from .scalars import (
    RATIONAL,
    Field,
    FieldMismatchError,
    QuadExt,
    QuadraticField,
    RationalField,
    Scalar,
    field_of_value,
)

Vector = tuple[Scalar, ...]


class ShapeError(ValueError):
    """Matrix dimensions do not fit the requested operation."""


class SingularMatrixError(ValueError):
    """Inverse of a singular matrix was requested."""


def _infer_field(entries) -> Field:
    for row in entries:
        for x in row:
            if isinstance(x, QuadExt):
                return QuadraticField(x.d)
    return RATIONAL


class Matrix:
    """Immutable dense matrix with exact entries in one field."""

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, entries: Sequence[Sequence], field: Field | None = None):
        entries = [list(row) for row in entries]
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if any(len(row) != cols for row in entries):
            raise ShapeError("ragged rows")
        if field is None:
            field = _infer_field(entries)
        self.rows = rows
        self.cols = cols
        self.field = field
        self.entries = tuple(tuple(field.of(x) for x in row) for row in entries)

    @classmethod
    def identity(cls, n: int, field: Field = RATIONAL) -> "Matrix":
        one, zero = field.one(), field.zero()
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: Field = RATIONAL) -> "Matrix":
        zero = field.zero()
        return cls([[zero] * cols for _ in range(rows)], field)

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def diagonal(self) -> Vector:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))

    def is_zero(self) -> bool:
        return all(not x for row in self.entries for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> "Matrix":
        return Matrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.field,
        )

    def scale(self, c) -> "Matrix":
        c = self.field.of(c)
        return Matrix([[c * x for x in row] for row in self.entries], self.field)

    def __add__(self, other: "Matrix") -> "Matrix":
        _check_same_shape(self, other)
        return Matrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            self.field,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        _check_same_shape(self, other)
        return Matrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            self.field,
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in row] for row in self.entries], self.field)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return matmul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"Matrix({self.rows}x{self.cols}: {body})"

    def to_json(self):
        return [[self.field.to_json(x) for x in row] for row in self.entries]


def _check_same_shape(a: Matrix, b: Matrix) -> None:
    if a.rows != b.rows or a.cols != b.cols:
        raise ShapeError(f"shape mismatch {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    _check_same_field(a, b)


def _check_same_field(a: Matrix, b: Matrix) -> None:
    if a.field != b.field:
        raise FieldMismatchError(f"matrix fields differ: {a.field} vs {b.field}")


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    _check_same_field(a, b)
    bt = b.transpose().entries
    out = [
        [sum((x * y for x, y in zip(row, col)), a.field.zero()) for col in bt]
        for row in a.entries
    ]
    return Matrix(out, a.field)


def matpow(a: Matrix, k: int) -> Matrix:
    if not a.is_square():
        raise ShapeError("matpow needs a square matrix")
    if k < 0:
        raise ValueError("negative power")
    out = Matrix.identity(a.rows, a.field)
    base = a
    while k:
        if k & 1:
            out = matmul(out, base)
        base = matmul(base, base) if k > 1 else base
        k >>= 1
    return out


def apply_row(v: Sequence, m: Matrix) -> Vector:
    """Row vector times matrix: coordinates of the image of v."""
    if len(v) != m.rows:
        raise ShapeError("vector length does not match matrix rows")
    f = m.field
    v = [f.of(x) for x in v]
    return tuple(
        sum((v[i] * m.entries[i][j] for i in range(m.rows)), f.zero())
        for j in range(m.cols)
    )


# ---------------------------------------------------------------------------
# Dense elimination
# ---------------------------------------------------------------------------


def _rref_bareiss_int(rows: list[list[int]]) -> tuple[list[list[Fraction]], list[int]]:
    """Fraction-free Gauss-Jordan on integer rows; returns (RREF, pivot cols).

    Montante's scheme: every update is (p*a[i][j] - a[i][c]*a[r][j]) / prev
    with an exact integer division (asserted).
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        p = rows[r][c]
        for i in range(nrows):
            if i == r:
                continue
            ric = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(ncols):
                num = p * row_i[j] - ric * row_r[j]
                q, rem = divmod(num, prev)
                assert rem == 0, "Bareiss division not exact"
                row_i[j] = q
        prev = p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    out: list[list[Fraction]] = []
    for i, c in enumerate(pivots):
        p = rows[i][c]
        out.append([Fraction(x, p) for x in rows[i]])
    for i in range(len(pivots), nrows):
        out.append([Fraction(0)] * ncols)
    return out, pivots


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.

    Rational matrices go through the fraction-free path; quadratic ones use
    plain normalized elimination (they stay small in practice).
    """
    if isinstance(m.field, RationalField):
        int_rows = []
        for row in m.entries:
            mult = lcm(*(x.denominator for x in row)) if row else 1
            int_rows.append([int(x * mult) for x in row])
        reduced, pivots = _rref_bareiss_int(int_rows)
        return Matrix(reduced, m.field), tuple(pivots)
    return rref_naive(m)


def rref_naive(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Classic normalize-every-step reduced elimination (test oracle)."""
    rows = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return Matrix(rows, m.field), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def _nullspace_from_rref(reduced: Matrix, pivots: Sequence[int]) -> list[Vector]:
    ncols = reduced.cols
    field = reduced.field
    zero, one = field.zero(), field.one()
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        v = [zero] * ncols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -reduced.entries[r][f]
        basis.append(tuple(v))
    return basis


def nullspace_basis(m: Matrix) -> list[Vector]:
    """Basis of the right kernel {x : m*x = 0}.

    Convention: one basis vector per free column in ascending order, with that
    free variable set to 1.  A 0 x n matrix has the standard basis as kernel.
    """
    reduced, pivots = rref(m)
    return _nullspace_from_rref(reduced, pivots)


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise ShapeError("inverse needs a square matrix")
    n = m.rows
    aug = Matrix(
        [
            list(m.entries[i]) + list(Matrix.identity(n, m.field).entries[i])
            for i in range(n)
        ],
        m.field,
    )
    reduced, pivots = rref(aug)
    if list(pivots[:n]) != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return Matrix([row[n:] for row in reduced.entries], m.field)


def solve_right(m: Matrix, rhs: Sequence) -> Vector | None:
    """One solution x of m*x = rhs, or None when inconsistent."""
    f = m.field
    aug = Matrix(
        [list(m.entries[i]) + [f.of(rhs[i])] for i in range(m.rows)], f
    )
    reduced, pivots = rref(aug)
    if m.cols in pivots:
        return None
    zero = f.zero()
    x = [zero] * m.cols
    for r, c in enumerate(pivots):
        x[c] = reduced.entries[r][m.cols]
    return tuple(x)


# ---------------------------------------------------------------------------
# Nilpotency and the Engel flag decision
# ---------------------------------------------------------------------------


def is_nilpotent_matrix(m: Matrix) -> bool:
    """True iff m^n = 0 for n = size of the square matrix m."""
    if not m.is_square():
        raise ShapeError("nilpotency is defined for square matrices")
    n = m.rows
    if n == 0:
        return True
    power = m
    e = 1
    while e < n:
        if power.is_zero():
            return True
        power = matmul(power, power)
        e *= 2
    return power.is_zero()


def engel_all_nilpotent(basis: Sequence[Matrix]) -> bool:
    """Decide whether every element of span(basis) is nilpotent.

    Requires the span to be closed under the matrix commutator (true for
    derivation algebras).  Recursion: the common kernel K of all basis
    matrices must be nonzero (Engel), the induced action on V/K is handled
    recursively; a zero-dimensional leftover means a full flag was found.
    """
    mats = [m for m in basis if not m.is_zero()]
    if not mats:
        return True
    n = mats[0].rows
    field = mats[0].field
    for m in mats:
        if not m.is_square() or m.rows != n:
            raise ShapeError("engel_all_nilpotent needs same-size square matrices")
    while True:
        if n == 0 or not mats:
            return True
        stacked = Matrix([row for m in mats for row in m.entries], field)
        kernel = nullspace_basis(stacked)
        k = len(kernel)
        if k == 0:
            return False
        # adapted basis: kernel vectors first, then unit vectors on the
        # pivot columns of the kernel's echelon structure
        support = {next(j for j, x in enumerate(v) if x) for v in kernel}
        complement = [c for c in range(n) if c not in support]
        cols = list(kernel) + [
            tuple(field.one() if i == c else field.zero() for i in range(n))
            for c in complement
        ]
        p = Matrix(cols, field).transpose()
        p_inv = inverse(p)
        next_mats = []
        for m in mats:
            b = matmul(matmul(p_inv, m), p)
            sub = Matrix([row[k:] for row in b.entries[k:]], field)
            if not sub.is_zero():
                next_mats.append(sub)
        n -= k
        mats = next_mats


# ---------------------------------------------------------------------------
# Sparse incremental reduced echelon form
# ---------------------------------------------------------------------------


SparseRow = dict[int, Scalar]


class EchelonSystem:
    """Reduced echelon row space built one (sparse) row at a time.

    Rows are dicts column -> nonzero scalar.  The pivot rows are kept fully
    reduced against each other with pivot entry 1, so the stored rows are
    exactly the RREF of everything fed in.
    """

    def __init__(self, ncols: int, field: Field = RATIONAL):
        self.ncols = ncols
        self.field = field
        self.pivot_rows: dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def reduce(self, row: Mapping[int, Scalar]) -> SparseRow:
        """Remainder of row after full reduction by the current pivot rows.

        Pivot rows carry no other pivot columns, so one pass over the pivot
        columns present in the row eliminates them all.
        """
        work: SparseRow = {c: v for c, v in row.items() if v}
        for c in sorted(set(work) & set(self.pivot_rows)):
            factor = work.get(c)
            if not factor:
                continue
            for pc, pv in self.pivot_rows[c].items():
                new = work.get(pc, self.field.zero()) - factor * pv
                if new:
                    work[pc] = new
                else:
                    work.pop(pc, None)
        return work

    def add(self, row: Mapping[int, Scalar]) -> bool:
        """Insert a row; returns True when the rank grew."""
        rem = self.reduce(row)
        if not rem:
            return False
        c = min(rem)
        inv = rem[c]
        normalized = {col: v / inv for col, v in rem.items()}
        for prow in self.pivot_rows.values():
            f = prow.get(c)
            if f:
                for col, v in normalized.items():
                    new = prow.get(col, self.field.zero()) - f * v
                    if new:
                        prow[col] = new
                    else:
                        prow.pop(col, None)
        self.pivot_rows[c] = normalized
        return True

    def add_dense(self, vec: Sequence) -> bool:
        f = self.field
        return self.add({i: f.of(x) for i, x in enumerate(vec) if f.of(x)})

    def contains(self, row: Mapping[int, Scalar]) -> bool:
        return not self.reduce(row)

    def pivot_columns(self) -> list[int]:
        return sorted(self.pivot_rows)

    def dense_rows(self) -> list[Vector]:
        zero = self.field.zero()
        out = []
        for c in self.pivot_columns():
            row = self.pivot_rows[c]
            out.append(tuple(row.get(j, zero) for j in range(self.ncols)))
        return out

    def nullspace_basis(self) -> list[Vector]:
        zero, one = self.field.zero(), self.field.one()
        pivots = self.pivot_columns()
        pivot_set = set(pivots)
        basis = []
        for f in range(self.ncols):
            if f in pivot_set:
                continue
            v = [zero] * self.ncols
            v[f] = one
            for c in pivots:
                coeff = self.pivot_rows[c].get(f)
                if coeff:
                    v[c] = -coeff
            basis.append(tuple(v))
        return basis

    def same_span(self, other: "EchelonSystem") -> bool:
        if self.ncols != other.ncols or self.rank != other.rank:
            return False
        if self.pivot_columns() != other.pivot_columns():
            return False
        return all(
            self.pivot_rows[c] == other.pivot_rows[c] for c in self.pivot_rows
        )


def span_of(vectors: Iterable[Sequence], ncols: int, field: Field = RATIONAL) -> EchelonSystem:
    sys = EchelonSystem(ncols, field)
    for v in vectors:
        sys.add_dense(v)
    return sys

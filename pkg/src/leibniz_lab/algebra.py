"""Structure-constant algebras: brackets, Leibniz identity, central series.

An algebra of dimension N stores the full tensor c[i][j][k] meaning
[e_i, e_j] = sum_k c[i][j][k] e_k over one exact scalar field.  Basis indices
run 0..N-1; the family builders use 0..n with N = n + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .linalg import EchelonSystem, ShapeError, Vector
from .scalars import (
    RATIONAL,
    Field,
    Scalar,
    ScalarParseError,
    field_from_json,
)


class LeibnizViolationError(ValueError):
    """A structure-constant table fails the Leibniz identity."""


@dataclass(frozen=True)
class Subspace:
    """Subspace of the underlying vector space, basis in reduced echelon form."""

    ambient: int
    basis: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class LeibnizReport:
    ok: bool
    triple: tuple[int, int, int] | None = None
    residual: Vector | None = None


class Algebra:
    """Finite-dimensional algebra given by its multiplication table."""

    __slots__ = ("dim", "field", "table")

    def __init__(self, dim: int, table, field: Field = RATIONAL):
        if dim < 0:
            raise ValueError("dimension must be >= 0")
        self.dim = dim
        self.field = field
        zero = field.zero()
        if isinstance(table, Mapping):
            dense = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
            for (i, j), coords in table.items():
                if not (0 <= i < dim and 0 <= j < dim):
                    raise ValueError(f"product index ({i}, {j}) out of range")
                for k, value in coords.items():
                    if not 0 <= k < dim:
                        raise ValueError(f"target index {k} out of range")
                    dense[i][j][k] = field.of(value)
        else:
            dense = [
                [[field.of(x) for x in table[i][j]] for j in range(dim)]
                for i in range(dim)
            ]
            if any(
                len(dense[i][j]) != dim for i in range(dim) for j in range(dim)
            ):
                raise ShapeError("table entries must have length dim")
        self.table = tuple(
            tuple(tuple(row) for row in plane) for plane in dense
        )

    def zero_vector(self) -> Vector:
        return tuple(self.field.zero() for _ in range(self.dim))

    def basis_vector(self, i: int) -> Vector:
        one, zero = self.field.one(), self.field.zero()
        return tuple(one if k == i else zero for k in range(self.dim))

    def product(self, i: int, j: int) -> Vector:
        return self.table[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Algebra):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.field == other.field
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.dim, self.field, self.table))

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim}, field={self.field.kind})"


def bracket(alg: Algebra, x: Sequence, y: Sequence) -> Vector:
    """Bilinear extension of the table to coordinate vectors."""
    if len(x) != alg.dim or len(y) != alg.dim:
        raise ShapeError("vector length must equal the algebra dimension")
    f = alg.field
    zero = f.zero()
    out = [zero] * alg.dim
    for i, xi in enumerate(x):
        if not xi:
            continue
        ti = alg.table[i]
        for j, yj in enumerate(y):
            if not yj:
                continue
            coeff = xi * yj
            for k, c in enumerate(ti[j]):
                if c:
                    out[k] = out[k] + coeff * c
    return tuple(out)


def _bracket_vector_basis(alg: Algebra, x: Sequence, j: int) -> Vector:
    """[x, e_j] for a coordinate vector x."""
    zero = alg.field.zero()
    out = [zero] * alg.dim
    for i, xi in enumerate(x):
        if not xi:
            continue
        for k, c in enumerate(alg.table[i][j]):
            if c:
                out[k] = out[k] + xi * c
    return tuple(out)


def check_leibniz(alg: Algebra) -> LeibnizReport:
    """Exhaustive Leibniz identity check over basis triples.

    [[x,y],z] = [[x,z],y] + [x,[y,z]]; reports the lexicographically first
    failing (i, j, k) with the residual left-minus-right vector.
    """
    n = alg.dim
    for i in range(n):
        for j in range(n):
            t_ij = alg.table[i][j]
            for k in range(n):
                lhs = _bracket_vector_basis(alg, t_ij, k)
                rhs1 = _bracket_vector_basis(alg, alg.table[i][k], j)
                w = alg.table[j][k]
                rhs2 = [alg.field.zero()] * n
                for m, wm in enumerate(w):
                    if wm:
                        for t, c in enumerate(alg.table[i][m]):
                            if c:
                                rhs2[t] = rhs2[t] + wm * c
                residual = tuple(
                    a - b - c for a, b, c in zip(lhs, rhs1, rhs2)
                )
                if any(residual):
                    return LeibnizReport(False, (i, j, k), residual)
    return LeibnizReport(True)


def lower_central_series(alg: Algebra) -> list[Subspace]:
    """Terms of the descending series starting at the whole algebra.

    Each next term is the span of brackets of the previous term with the
    whole algebra; the list stops at the first repeated term (for nilpotent
    algebras the last entry is the zero subspace).
    """
    n = alg.dim
    full = Subspace(n, tuple(alg.basis_vector(i) for i in range(n)))
    series = [full]
    prev = full
    while True:
        span = EchelonSystem(n, alg.field)
        for v in prev.basis:
            for j in range(n):
                w = _bracket_vector_basis(alg, v, j)
                if any(w):
                    span.add_dense(w)
        term = Subspace(n, tuple(span.dense_rows()))
        if term.dim == prev.dim:
            break
        series.append(term)
        prev = term
        if term.dim == 0:
            break
    return series


def is_nilpotent_algebra(alg: Algebra) -> bool:
    return lower_central_series(alg)[-1].dim == 0


def is_filiform(alg: Algebra) -> bool:
    """Slowest-decreasing nilpotent series: dim of term i equals N - i for i >= 2."""
    n = alg.dim
    series = lower_central_series(alg)

    def dim_at(i: int) -> int:  # series stabilizes past its last entry
        return series[min(i - 1, len(series) - 1)].dim

    return all(dim_at(i) == n - i for i in range(2, n + 1))


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------


def store_algebra(alg: Algebra) -> dict:
    """Canonical JSON form; zero products and zero coefficients are omitted."""
    table = []
    for i in range(alg.dim):
        for j in range(alg.dim):
            coords = [
                [k, alg.field.to_json(c)]
                for k, c in enumerate(alg.table[i][j])
                if c
            ]
            if coords:
                table.append({"i": i, "j": j, "c": coords})
    return {"dim": alg.dim, "field": alg.field.descriptor(), "table": table}


def load_algebra(data: dict) -> Algebra:
    if not isinstance(data, dict):
        raise ScalarParseError("algebra JSON must be an object")
    try:
        dim = int(data["dim"])
        field = field_from_json(data.get("field", {"kind": "rational"}))
        raw = data["table"]
    except KeyError as exc:
        raise ScalarParseError(f"algebra JSON missing key {exc}") from None
    products: dict[tuple[int, int], dict[int, Scalar]] = {}
    for entry in raw:
        i, j = int(entry["i"]), int(entry["j"])
        if (i, j) in products:
            raise ScalarParseError(f"duplicate product entry ({i}, {j})")
        coords = {}
        for k, s in entry["c"]:
            coords[int(k)] = field.parse(s)
        products[(i, j)] = coords
    return Algebra(dim, products, field)

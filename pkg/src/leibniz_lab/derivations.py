"""Derivation algebras and the characteristic-nilpotency decision.

Two independent routes are provided for the first two families:

* a generic solver that assembles the (dim^3 x dim^2) linear system of the
  derivation identity on basis pairs and extracts its kernel;
* the closed-form templates for family-1 and family-2 derivations together
  with their linear constraint systems, whose solution spaces generate the
  same span (this equality is part of the acceptance battery).

The verdict itself rests on the Engel-flag decision for the span of the
computed basis.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import Algebra, bracket
from .families import F1Params, F2Params
from .linalg import (
    EchelonSystem,
    Matrix,
    Vector,
    engel_all_nilpotent,
    is_nilpotent_matrix,
)
from .scalars import Field, Scalar

SEED_ENV_VAR = "LEIBNIZ_LAB_SEED"


class ConstraintViolationError(ValueError):
    """A template assignment violates one of its defining equations."""


@dataclass(frozen=True)
class DerivationSpace:
    dim_algebra: int
    basis: tuple[Matrix, ...]
    source: str  # "general-solver" | "f1-template" | "f2-template"

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class CharNilpotencyVerdict:
    is_char_nilpotent: bool
    witness: Matrix | None
    method: str
    der_dim: int
    witness_missing: bool = False

    def to_json(self) -> dict:
        return {
            "der_dim": self.der_dim,
            "char_nilpotent": self.is_char_nilpotent,
            "witness": None if self.witness is None else self.witness.to_json(),
            "method": self.method,
        }


def _accumulate(row: dict[int, Scalar], col: int, value: Scalar) -> None:
    new = row.get(col, 0) + value
    if new:
        row[col] = new
    else:
        row.pop(col, None)


def derivation_system(alg: Algebra) -> EchelonSystem:
    """Echelon form of the derivation equations in the unknowns M[i][k].

    Row convention: M[i][k] is the e_k coefficient of d(e_i); unknown (i, k)
    maps to column i*dim + k.  For each basis pair (i, j) the equation block
    states d([e_i,e_j]) = [d(e_i), e_j] + [e_i, d(e_j)].
    """
    dim = alg.dim
    sys = EchelonSystem(dim * dim, alg.field)
    table = alg.table
    for i in range(dim):
        for j in range(dim):
            rows: list[dict[int, Scalar]] = [dict() for _ in range(dim)]
            cij = table[i][j]
            for k in range(dim):
                s = cij[k]
                if s:
                    for m in range(dim):
                        _accumulate(rows[m], k * dim + m, s)
            for r in range(dim):
                crj = table[r][j]
                for m in range(dim):
                    if crj[m]:
                        _accumulate(rows[m], i * dim + r, -crj[m])
                cir = table[i][r]
                for m in range(dim):
                    if cir[m]:
                        _accumulate(rows[m], j * dim + r, -cir[m])
            for row in rows:
                if row:
                    sys.add(row)
    return sys


def derivation_space(alg: Algebra) -> DerivationSpace:
    """Basis of Der(L) for an arbitrary structure-constant algebra."""
    dim = alg.dim
    sys = derivation_system(alg)
    basis = tuple(
        _vector_to_matrix(v, dim, alg.field) for v in sys.nullspace_basis()
    )
    return DerivationSpace(dim, basis, "general-solver")


def _vector_to_matrix(v: Vector, dim: int, field: Field) -> Matrix:
    return Matrix([list(v[i * dim : (i + 1) * dim]) for i in range(dim)], field)


def matrix_to_vector(m: Matrix) -> Vector:
    return tuple(x for row in m.entries for x in row)


def is_derivation(alg: Algebra, m: Matrix) -> bool:
    """Direct check of d([x,y]) = [dx,y] + [x,dy] on all basis pairs."""
    if m.rows != alg.dim or m.cols != alg.dim:
        return False
    f = alg.field
    for i in range(alg.dim):
        di = m.entries[i]
        for j in range(alg.dim):
            dj = m.entries[j]
            prod = alg.table[i][j]
            lhs = [f.zero()] * alg.dim
            for k, c in enumerate(prod):
                if c:
                    for t in range(alg.dim):
                        if m.entries[k][t]:
                            lhs[t] = lhs[t] + c * m.entries[k][t]
            rhs = bracket(alg, di, alg.basis_vector(j))
            rhs2 = bracket(alg, alg.basis_vector(i), dj)
            if any(l - a - b for l, a, b in zip(lhs, rhs, rhs2)):
                return False
    return True


# ---------------------------------------------------------------------------
# Family-1 template (closed-form derivation matrices)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class F1DerivationAssignment:
    """Free data of a first-family derivation: a_0..a_n, b_{n-1}, b_n."""

    a: tuple[Scalar, ...]
    b_pre_top: Scalar  # b_{n-1}
    b_top: Scalar  # b_n

    @classmethod
    def of(cls, p: F1Params, a: Mapping[int, object] | Sequence, b_pre_top=0, b_top=0):
        f = p.field
        if isinstance(a, Mapping):
            vec = [f.of(a.get(i, 0)) for i in range(p.n + 1)]
        else:
            vec = [f.of(x) for x in a]
            if len(vec) != p.n + 1:
                raise ValueError(f"a must have {p.n + 1} entries")
        return cls(tuple(vec), f.of(b_pre_top), f.of(b_top))


def _f1_constraint_rows(p: F1Params) -> list[tuple[Scalar, Scalar]]:
    """Coefficient pairs (u, v) of the constraints u*a_0 + v*a_1 = 0.

    These are the only equations of the template touching (a_0, a_1):
    a_0 (theta - alpha_n) = 0, alpha_3 (a_1 - a_0) = 0 and, for 4 <= k <= n,
    alpha_k (a_1 - (k-2) a_0) = (k/2) a_1 sum_j alpha_{j-1} alpha_{k-j+3}.
    """
    f = p.field
    half = Fraction(1, 2)
    rows = [(p.theta - p.alpha(p.n), f.zero())]
    rows.append((-p.alpha(3), p.alpha(3)))
    for k in range(4, p.n + 1):
        conv = f.zero()
        for j in range(4, k + 1):
            conv = conv + p.alpha(j - 1) * p.alpha(k - j + 3)
        rows.append((-(k - 2) * p.alpha(k), p.alpha(k) - k * half * conv))
    return rows


@dataclass(frozen=True)
class ConstraintSolutions:
    """Solution set of the homogeneous (a_0, a_1)-constraints.

    kind is "plane" (no constraints bind), "line" (direction spans it) or
    "point" (only the origin).
    """

    kind: str
    direction: tuple[Scalar, Scalar] | None = None

    @property
    def dim(self) -> int:
        return {"plane": 2, "line": 1, "point": 0}[self.kind]


def f1_constraint_solutions(p: F1Params) -> ConstraintSolutions:
    rows = [(u, v) for (u, v) in _f1_constraint_rows(p) if u or v]
    if not rows:
        return ConstraintSolutions("plane")
    u0, v0 = rows[0]
    if all(u0 * v - v0 * u == 0 for u, v in rows):
        direction = (-v0, u0)
        # normalize the leading nonzero coordinate to 1
        lead = direction[0] if direction[0] else direction[1]
        direction = (direction[0] / lead, direction[1] / lead)
        return ConstraintSolutions("line", direction)
    return ConstraintSolutions("point")


def _check_f1_assignment(p: F1Params, asn: F1DerivationAssignment) -> None:
    a = asn.a
    n = p.n
    if a[0] * (p.theta - p.alpha(n)) != 0:
        raise ConstraintViolationError("a0*(theta - alpha_n) = 0 violated")
    if a[1] * (p.alpha(n) - p.theta) != a[n - 1] - asn.b_pre_top:
        raise ConstraintViolationError(
            "a1*(alpha_n - theta) = a_{n-1} - b_{n-1} violated"
        )
    if p.alpha(3) * (a[1] - a[0]) != 0:
        raise ConstraintViolationError("alpha_3*(a1 - a0) = 0 violated")
    half = Fraction(1, 2)
    for k in range(4, n + 1):
        conv = p.field.zero()
        for j in range(4, k + 1):
            conv = conv + p.alpha(j - 1) * p.alpha(k - j + 3)
        if p.alpha(k) * (a[1] - (k - 2) * a[0]) != k * half * a[1] * conv:
            raise ConstraintViolationError(f"k={k} constraint violated")


def f1_derivation_matrix(
    p: F1Params, asn: F1DerivationAssignment, check: bool = True
) -> Matrix:
    """The (n+1)x(n+1) derivation matrix of a first-family algebra.

    Rows are images: row i holds the coordinates of d(e_i).  Row 2 carries
    theta (not alpha_n) on the e_n coefficient; this is forced by
    d(e_2) = d([e_0, e_0]) and matters exactly when theta != alpha_n.
    """
    if check:
        _check_f1_assignment(p, asn)
    n, f = p.n, p.field
    a = asn.a
    zero = f.zero()
    rows = [list(a)]
    row1 = [zero] * (n + 1)
    row1[1] = a[0] + a[1]
    for k in range(2, n - 1):
        row1[k] = a[k]
    row1[n - 1] = asn.b_pre_top
    row1[n] = asn.b_top
    rows.append(row1)
    if n >= 2:
        row2 = [zero] * (n + 1)
        row2[2] = 2 * a[0] + a[1]
        for k in range(3, n):
            row2[k] = a[k - 1] + a[1] * p.alpha(k)
        row2[n] = a[n - 1] + a[1] * p.theta
        rows.append(row2)
    for i in range(3, n + 1):
        row = [zero] * (n + 1)
        row[i] = i * a[0] + a[1]
        for k in range(i + 1, n + 1):
            row[k] = a[k - i + 1] + (i - 1) * a[1] * p.alpha(k - i + 2)
        rows.append(row)
    return Matrix(rows, f)


def f1_template_space(p: F1Params) -> DerivationSpace:
    """Span of the family-1 template over its full assignment solution set.

    Variables ordered (a_0, ..., a_n, b_{n-1}, b_n); the template constraints
    are linear, so the assignment set is a kernel computed exactly.
    """
    n, f = p.n, p.field
    ncols = n + 3
    col_b_pre = n + 1
    sys = EchelonSystem(ncols, f)
    for u, v in _f1_constraint_rows(p):
        row = {}
        if u:
            row[0] = u
        if v:
            row[1] = row.get(1, f.zero()) + v
        if row:
            sys.add(row)
    # a1*(alpha_n - theta) = a_{n-1} - b_{n-1} links a_1, a_{n-1}, b_{n-1}
    link = {}
    coeff = p.alpha(n) - p.theta
    if coeff:
        link[1] = coeff
    link[n - 1] = f.of(-1)
    link[col_b_pre] = f.one()
    sys.add(link)
    basis = []
    for v in sys.nullspace_basis():
        asn = F1DerivationAssignment(tuple(v[: n + 1]), v[n + 1], v[n + 2])
        basis.append(f1_derivation_matrix(p, asn, check=True))
    return DerivationSpace(n + 1, tuple(basis), "f1-template")


# ---------------------------------------------------------------------------
# Family-2 template
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class F2DerivationAssignment:
    """Free data of a second-family derivation: a_0..a_n, b_1, b_n."""

    a: tuple[Scalar, ...]
    b1: Scalar
    b_top: Scalar

    @classmethod
    def of(cls, p: F2Params, a: Mapping[int, object] | Sequence, b1=0, b_top=0):
        f = p.field
        if isinstance(a, Mapping):
            vec = [f.of(a.get(i, 0)) for i in range(p.n + 1)]
        else:
            vec = [f.of(x) for x in a]
            if len(vec) != p.n + 1:
                raise ValueError(f"a must have {p.n + 1} entries")
        return cls(tuple(vec), f.of(b1), f.of(b_top))


def _f2_constraint_rows(p: F2Params) -> list[tuple[Scalar, Scalar, Scalar]]:
    """Triples (u, v, w) meaning u*a_0 + v*a_1 + w*b_1 = 0."""
    f = p.field
    n = p.n
    half = Fraction(1, 2)
    rows = []
    if p.gamma:
        rows.append((-n * p.gamma, f.zero(), 2 * p.gamma))
    b3 = p.beta(3)
    rows.append((-2 * b3, f.zero(), b3))
    for k in range(4, n + 1):
        conv = f.zero()
        for j in range(4, k + 1):
            conv = conv + p.beta(j - 1) * p.beta(k - j + 3)
        v = -(k * half) * conv
        if k == n:
            v = v + p.gamma
        rows.append((-(k - 1) * p.beta(k), v, p.beta(k)))
    return rows


@dataclass(frozen=True)
class ConstraintSolutions3:
    """Kernel of the (a_0, a_1, b_1) constraint system, echelon basis."""

    basis: tuple[tuple[Scalar, Scalar, Scalar], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def projects_beyond(self, nilpotent_coords: Sequence[int]) -> bool:
        """True when some solution is nonzero outside the given coordinates."""
        keep = set(range(3)) - set(nilpotent_coords)
        return any(any(v[i] for i in keep) for v in self.basis)


def f2_constraint_solutions(p: F2Params) -> ConstraintSolutions3:
    sys = EchelonSystem(3, p.field)
    for u, v, w in _f2_constraint_rows(p):
        row = {}
        if u:
            row[0] = u
        if v:
            row[1] = v
        if w:
            row[2] = w
        if row:
            sys.add(row)
    return ConstraintSolutions3(tuple(sys.nullspace_basis()))


def _check_f2_assignment(p: F2Params, asn: F2DerivationAssignment) -> None:
    a, b1 = asn.a, asn.b1
    n = p.n
    half = Fraction(1, 2)
    if p.gamma * (2 * b1 - n * a[0]) != 0:
        raise ConstraintViolationError("gamma*(2*b1 - n*a0) = 0 violated")
    if p.beta(3) * (b1 - 2 * a[0]) != 0:
        raise ConstraintViolationError("beta_3*(b1 - 2*a0) = 0 violated")
    for k in range(4, n + 1):
        conv = p.field.zero()
        for j in range(4, k + 1):
            conv = conv + p.beta(j - 1) * p.beta(k - j + 3)
        rhs = k * half * a[1] * conv
        if k == n:
            rhs = rhs - a[1] * p.gamma
        if p.beta(k) * (b1 - (k - 1) * a[0]) != rhs:
            raise ConstraintViolationError(f"k={k} constraint violated")


def f2_derivation_matrix(
    p: F2Params, asn: F2DerivationAssignment, check: bool = True
) -> Matrix:
    """Second-family derivation matrix; row 1 is (0, b_1, 0, ..., -a_1*gamma, b_n)."""
    if check:
        _check_f2_assignment(p, asn)
    n, f = p.n, p.field
    a = asn.a
    zero = f.zero()
    rows = [list(a)]
    row1 = [zero] * (n + 1)
    row1[1] = asn.b1
    row1[n - 1] = -a[1] * p.gamma
    row1[n] = asn.b_top
    rows.append(row1)
    for i in range(2, n + 1):
        row = [zero] * (n + 1)
        row[i] = i * a[0]
        for k in range(i + 1, n + 1):
            row[k] = a[k + 1 - i] + (i - 1) * a[1] * p.beta(k + 2 - i)
        rows.append(row)
    return Matrix(rows, f)


def f2_template_space(p: F2Params) -> DerivationSpace:
    """Span of the family-2 template over its assignment solution set."""
    n, f = p.n, p.field
    ncols = n + 3  # a_0..a_n, b_1, b_n
    col_b1 = n + 1
    sys = EchelonSystem(ncols, f)
    for u, v, w in _f2_constraint_rows(p):
        row = {}
        if u:
            row[0] = u
        if v:
            row[1] = v
        if w:
            row[col_b1] = w
        if row:
            sys.add(row)
    basis = []
    for vec in sys.nullspace_basis():
        asn = F2DerivationAssignment(tuple(vec[: n + 1]), vec[n + 1], vec[n + 2])
        basis.append(f2_derivation_matrix(p, asn, check=True))
    return DerivationSpace(n + 1, tuple(basis), "f2-template")


# ---------------------------------------------------------------------------
# Characteristic nilpotency
# ---------------------------------------------------------------------------


def _witness_candidates(k: int, bound: int, max_candidates: int):
    """Deterministic lexicographic scan of coefficient vectors in [-bound, bound]^k."""
    count = 0
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=k):
        if not any(coeffs):
            continue
        yield coeffs
        count += 1
        if count >= max_candidates:
            return


def find_non_nilpotent(
    basis: Sequence[Matrix],
    bound: int = 3,
    max_candidates: int = 100_000,
    seed: int | None = None,
) -> Matrix | None:
    """Scan basis matrices, then small integer combinations, for a witness."""
    for m in basis:
        if not is_nilpotent_matrix(m):
            return m
    if not basis:
        return None
    combos = _witness_candidates(len(basis), bound, max_candidates)
    if seed is not None:
        pool = list(combos)
        random.Random(seed).shuffle(pool)
        combos = iter(pool)
    for coeffs in combos:
        if sum(1 for c in coeffs if c) < 2:
            continue  # singletons already checked
        m = None
        for c, b in zip(coeffs, basis):
            if c == 0:
                continue
            term = b.scale(c)
            m = term if m is None else m + term
        if m is not None and not is_nilpotent_matrix(m):
            return m
    return None


def is_characteristically_nilpotent(
    alg: Algebra,
    witness_bound: int = 3,
    max_candidates: int = 100_000,
) -> CharNilpotencyVerdict:
    """Engel verdict over Der(L); negative verdicts come with a witness.

    The witness scan honours the LEIBNIZ_LAB_SEED environment variable for
    shuffling; by default the scan order is deterministic.
    """
    space = derivation_space(alg)
    if engel_all_nilpotent(list(space.basis)):
        return CharNilpotencyVerdict(True, None, "engel", space.dim)
    seed_text = os.environ.get(SEED_ENV_VAR)
    seed = int(seed_text) if seed_text else None
    witness = find_non_nilpotent(space.basis, witness_bound, max_candidates, seed)
    return CharNilpotencyVerdict(
        False, witness, "engel", space.dim, witness_missing=witness is None
    )

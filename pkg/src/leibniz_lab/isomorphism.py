"""Parameter transforms under adapted basis changes, and explicit isomorphisms.

The first two families transform under changes described by scalars (A, B)
resp. (A, B, D); the transformed parameters are nested polynomial sums in the
old ones, evaluated here by direct multi-index enumeration exactly as the
formulas are written (an independent power-series evaluation backs them in
the tests).  The third family transforms by three rational functions in
(A0, A1, B1).

``extend_generators`` realizes an isomorphism concretely from images of the
two generators e_0, e_1, and ``verify_criterion_*`` closes the loop: after a
parameter transform it solves for generator images of the adapted shape and
hands back the explicit matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .algebra import Algebra, bracket
from .families import F1Params, F2Params, F3Params, build_f1, build_f2, build_f3
from .linalg import EchelonSystem, Matrix, Vector, rank
from .scalars import Field, Scalar


class ChangeConstraintError(ValueError):
    """The basis-change scalars violate their non-degeneracy constraint."""


@dataclass(frozen=True)
class BasisChangeF1:
    A: Scalar
    B: Scalar


@dataclass(frozen=True)
class BasisChangeF2:
    A: Scalar
    B: Scalar
    D: Scalar


@dataclass(frozen=True)
class BasisChangeF3:
    A0: Scalar
    A1: Scalar
    B1: Scalar


@dataclass(frozen=True)
class GeneratorImages:
    v0: Vector
    v1: Vector


# ---------------------------------------------------------------------------
# Nested coefficient sums shared by the family-1 and family-2 transforms
# ---------------------------------------------------------------------------


def _chain_sum(param: Callable[[int], Scalar], zero, t: int, k: int, m: int):
    """The m-factor nested sum S_m(t, k).

    m = 1 is the single parameter value at t+2-k.  For m >= 2 the printed
    form sums over ascending chains k+m <= i_1 <= ... <= i_{m-1} <= t with
    the product param(t+3-i_{m-1}) * prod param(i_{nu+1}+3-i_nu) * param(i_1+3-k-m).
    """
    if m == 1:
        return param(t + 2 - k)
    lo = k + m
    total = zero
    for chain in itertools.combinations_with_replacement(range(lo, t + 1), m - 1):
        prod = param(t + 3 - chain[-1])
        if not prod:
            continue
        for nu in range(m - 2, 0, -1):
            prod = prod * param(chain[nu] + 3 - chain[nu - 1])
            if not prod:
                break
        else:
            prod = prod * param(chain[0] + 3 - lo)
            total = total + prod
    return total


def _weight(param, field: Field, A, B, t: int, k: int) -> Scalar:
    """sum_m binom(k-1, m) A^(k-1-m) B^m S_m(t, k) for m = 1..k-1."""
    total = field.zero()
    for m in range(1, k):
        s_m = _chain_sum(param, field.zero(), t, k, m)
        if s_m:
            total = total + comb(k - 1, m) * A ** (k - 1 - m) * B**m * s_m
    return total


def transform_f1(p: F1Params, c: BasisChangeF1) -> F1Params:
    """Transformed (alpha, theta) under the change (A, B); needs A(A+B) != 0."""
    f = p.field
    A, B = f.of(c.A), f.of(c.B)
    if not A or not (A + B):
        raise ChangeConstraintError("need A(A+B) != 0")
    n = p.n
    new = {3: (A + B) / A**2 * p.alpha(3)}
    for t in range(4, n + 1):
        acc = (A + B) * p.alpha(t)
        for k in range(3, t):
            w = _weight(p.alpha, f, A, B, t, k)
            if w and new[k]:
                acc = acc - w * new[k]
        new[t] = acc / A ** (t - 1)
    acc = A * p.theta + B * p.alpha(n)
    for k in range(3, n):
        w = _weight(p.alpha, f, A, B, n, k)
        if w and new[k]:
            acc = acc - w * new[k]
    theta = acc / A ** (n - 1)
    return F1Params(n, new, theta, f)


def transform_f2(p: F2Params, c: BasisChangeF2) -> F2Params:
    """Transformed (beta, gamma) under the change (A, B, D); needs AD != 0.

    The top coefficient beta_n picks up the extra B*D*gamma / A^n term; for
    n = 3 the top formula is the operative one.
    """
    f = p.field
    A, B, D = f.of(c.A), f.of(c.B), f.of(c.D)
    if not A or not D:
        raise ChangeConstraintError("need AD != 0")
    n = p.n
    gamma = D**2 / A**n * p.gamma
    new: dict[int, Scalar] = {}
    if n > 3:
        new[3] = D / A**2 * p.beta(3)
    for t in range(4, n):
        acc = D * p.beta(t)
        for k in range(3, t):
            w = _weight(p.beta, f, A, B, t, k)
            if w and new[k]:
                acc = acc - w * new[k]
        new[t] = acc / A ** (t - 1)
    acc = D * p.beta(n)
    for k in range(3, n):
        w = _weight(p.beta, f, A, B, n, k)
        if w and new[k]:
            acc = acc - w * new[k]
    new[n] = B * D * p.gamma / A**n + acc / A ** (n - 1)
    return F2Params(n, new, gamma, f)


def transform_f3(
    thetas: Sequence, c: BasisChangeF3, n: int, field: Field | None = None
) -> tuple[Scalar, Scalar, Scalar]:
    """The three rational functions taking (theta1, theta2, theta3) along
    (A0, A1, B1); needs A0 != 0 and B1 != 0."""
    if field is None:
        from .scalars import RATIONAL

        field = RATIONAL
    t1, t2, t3 = (field.of(x) for x in thetas)
    A0, A1, B1 = field.of(c.A0), field.of(c.A1), field.of(c.B1)
    if not A0 or not B1:
        raise ChangeConstraintError("need A0 != 0 and B1 != 0")
    denom = A0 ** (n - 1)
    out1 = (A0**2 * t1 + A0 * A1 * t2 + A1**2 * t3) / (denom * B1)
    out2 = (A0 * t2 + 2 * A1 * t3) / denom
    out3 = B1 * t3 / denom
    return out1, out2, out3


def compose_changes_f3(first: BasisChangeF3, second: BasisChangeF3) -> BasisChangeF3:
    """Change whose action equals applying ``first`` then ``second``."""
    return BasisChangeF3(
        first.A0 * second.A0,
        second.A0 * first.A1 + second.A1 * first.B1,
        first.B1 * second.B1,
    )


def inverse_change_f3(c: BasisChangeF3) -> BasisChangeF3:
    one = Fraction(1)
    return BasisChangeF3(one / c.A0, -c.A1 / (c.A0 * c.B1), one / c.B1)


def transform_f3_params(p: F3Params, c: BasisChangeF3) -> F3Params:
    t1, t2, t3 = transform_f3(p.thetas, c, p.n, p.field)
    return F3Params(p.n, t1, t2, t3, p.alpha_flag, p.field)


# ---------------------------------------------------------------------------
# Explicit isomorphisms from generator images
# ---------------------------------------------------------------------------


def is_homomorphism(src: Algebra, dst: Algebra, phi: Matrix) -> bool:
    """phi([x,y]) = [phi(x), phi(y)] on all basis pairs; rows are images."""
    if phi.rows != src.dim or phi.cols != dst.dim:
        return False
    for i in range(src.dim):
        for j in range(src.dim):
            lhs_coords = src.table[i][j]
            lhs = [dst.field.zero()] * dst.dim
            for k, c in enumerate(lhs_coords):
                if c:
                    for t in range(dst.dim):
                        if phi.entries[k][t]:
                            lhs[t] = lhs[t] + c * phi.entries[k][t]
            rhs = bracket(dst, phi.entries[i], phi.entries[j])
            if any(a - b for a, b in zip(lhs, rhs)):
                return False
    return True


def extend_generators(
    src: Algebra, dst: Algebra, images: GeneratorImages, family: int
) -> Matrix | None:
    """Extend e_0 -> v0, e_1 -> v1 along the family's generation scheme.

    Families 1 and 2 generate e_2 as [e_0, e_0], the third as [e_1, e_0];
    all higher e_{i+1} are [e_i, e_0].  Returns the matrix (rows = images)
    when the extension is invertible and a homomorphism, else None.
    """
    if family not in (1, 2, 3):
        raise ValueError("family must be 1, 2 or 3")
    if src.dim != dst.dim:
        raise ValueError("source and target dimensions differ")
    if src.field != dst.field:
        raise ValueError("source and target fields differ")
    f = dst.field
    v0 = tuple(f.of(x) for x in images.v0)
    v1 = tuple(f.of(x) for x in images.v1)
    rows = [v0, v1]
    if family == 3:
        rows.append(bracket(dst, v1, v0))
    else:
        rows.append(bracket(dst, v0, v0))
    for _ in range(3, src.dim):
        rows.append(bracket(dst, rows[-1], v0))
    phi = Matrix(rows, f)
    if rank(phi) < src.dim:
        return None
    if not is_homomorphism(src, dst, phi):
        return None
    return phi


# ---------------------------------------------------------------------------
# Criterion verification: solve for adapted generator images
# ---------------------------------------------------------------------------


class _NonLinear(ValueError):
    pass


class _AForm:
    """Affine form const + sum coeff_u * unknown_u over an exact field."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const, coeffs=None):
        self.const = const
        self.coeffs = coeffs or {}

    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "_AForm") -> "_AForm":
        coeffs = dict(self.coeffs)
        for u, c in other.coeffs.items():
            new = coeffs.get(u, 0) + c
            if new:
                coeffs[u] = new
            else:
                coeffs.pop(u, None)
        return _AForm(self.const + other.const, coeffs)

    def __sub__(self, other: "_AForm") -> "_AForm":
        coeffs = dict(self.coeffs)
        for u, c in other.coeffs.items():
            new = coeffs.get(u, 0) - c
            if new:
                coeffs[u] = new
            else:
                coeffs.pop(u, None)
        return _AForm(self.const - other.const, coeffs)

    def scale(self, c) -> "_AForm":
        if not c:
            return _AForm(self.const * 0)
        return _AForm(self.const * c, {u: v * c for u, v in self.coeffs.items()})


def _amul(f: _AForm, g: _AForm) -> _AForm:
    if f.is_const():
        return g.scale(f.const)
    if g.is_const():
        return f.scale(g.const)
    raise _NonLinear("product of two unknown-bearing forms")


def _affine_bracket(alg: Algebra, xs: list[_AForm], ys: list[_AForm]) -> list[_AForm]:
    zero = alg.field.zero()
    out = [_AForm(zero) for _ in range(alg.dim)]
    for i in range(alg.dim):
        xi = xs[i]
        if xi.is_const() and not xi.const:
            continue
        for j in range(alg.dim):
            yj = ys[j]
            if yj.is_const() and not yj.const:
                continue
            coords = alg.table[i][j]
            if not any(coords):
                continue
            prod = _amul(xi, yj)
            for k, c in enumerate(coords):
                if c:
                    out[k] = out[k] + prod.scale(c)
    return out


def _solve_generator_images(
    src: Algebra,
    dst: Algebra,
    lead0: tuple[Scalar, Scalar],
    lead1: Scalar,
    family: int,
) -> GeneratorImages | None:
    """Solve the homomorphism conditions for tails of the adapted shape
    v0 = lead0[0] e_0 + lead0[1] e_1 + sum x_k e_k,
    v1 = lead1 e_1 + sum y_k e_k (k >= 2).

    The unknowns enter every condition linearly for these families, so one
    exact linear solve either produces the images or certifies none exist
    with this shape.
    """
    f = dst.field
    dim = src.dim
    tail = dim - 2
    nunk = 2 * tail
    zero = f.zero()

    def unknown(u: int) -> _AForm:
        return _AForm(zero, {u: f.one()})

    v0 = [_AForm(f.of(lead0[0])), _AForm(f.of(lead0[1]))]
    v0 += [unknown(k - 2) for k in range(2, dim)]
    v1 = [_AForm(zero), _AForm(f.of(lead1))]
    v1 += [unknown(tail + k - 2) for k in range(2, dim)]

    phi: list[list[_AForm]] = [v0, v1]
    phi.append(_affine_bracket(dst, v1, v0) if family == 3 else _affine_bracket(dst, v0, v0))
    for _ in range(3, dim):
        phi.append(_affine_bracket(dst, phi[-1], v0))

    sys = EchelonSystem(nunk + 1, f)
    const_col = nunk
    for i in range(dim):
        for j in range(dim):
            want = src.table[i][j]
            got = _affine_bracket(dst, phi[i], phi[j])
            for k in range(dim):
                expect = _AForm(zero)
                for t, c in enumerate(want):
                    if c:
                        expect = expect + phi[t].scale(c)
                resid = got[k] - expect
                row = dict(resid.coeffs)
                if resid.const:
                    row[const_col] = resid.const
                if row:
                    sys.add(row)
    if const_col in sys.pivot_rows:
        return None  # inconsistent: no isomorphism of this shape
    solution = [zero] * nunk
    for c, prow in sys.pivot_rows.items():
        solution[c] = -prow.get(const_col, zero)
    xs = solution[:tail]
    ys = solution[tail:]
    img0 = (f.of(lead0[0]), f.of(lead0[1]), *xs)
    img1 = (zero, f.of(lead1), *ys)
    return GeneratorImages(img0, img1)


def verify_criterion_f1(p: F1Params, c: BasisChangeF1) -> tuple[bool, Matrix | None]:
    """Transform the parameters, then exhibit the isomorphism explicitly."""
    f = p.field
    A, B = f.of(c.A), f.of(c.B)
    p2 = transform_f1(p, c)
    src, dst = build_f1(p), build_f1(p2)
    images = _solve_generator_images(src, dst, (A, B), A + B, family=1)
    if images is None:
        return False, None
    phi = extend_generators(src, dst, images, family=1)
    return (phi is not None), phi


def verify_criterion_f2(p: F2Params, c: BasisChangeF2) -> tuple[bool, Matrix | None]:
    f = p.field
    A, B, D = f.of(c.A), f.of(c.B), f.of(c.D)
    p2 = transform_f2(p, c)
    src, dst = build_f2(p), build_f2(p2)
    images = _solve_generator_images(src, dst, (A, B), D, family=2)
    if images is None:
        return False, None
    phi = extend_generators(src, dst, images, family=2)
    return (phi is not None), phi


def verify_criterion_f3(p: F3Params, c: BasisChangeF3) -> tuple[bool, Matrix | None]:
    if p.alpha_flag:
        raise NotImplementedError(
            "criterion verification supports the top-product flag 0 only"
        )
    f = p.field
    A0, A1, B1 = f.of(c.A0), f.of(c.A1), f.of(c.B1)
    p2 = transform_f3_params(p, c)
    src, dst = build_f3(p), build_f3(p2)
    images = _solve_generator_images(src, dst, (A0, A1), B1, family=3)
    if images is None:
        return False, None
    phi = extend_generators(src, dst, images, family=3)
    return (phi is not None), phi

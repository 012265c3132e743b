"""Builders for the three parametric families of filiform Leibniz algebras.

All three tables share the skeleton [e_i, e_0] = e_{i+1}; the deformation
parameters only enter products against e_1 and coefficients on the top basis
vector e_n.  Parameter maps must carry explicit zeros so that index
conventions never drift silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .algebra import Algebra, LeibnizViolationError, check_leibniz
from .scalars import RATIONAL, Field, Scalar


def _normalize_params(n: int, values, name: str, fld: Field) -> tuple[Scalar, ...]:
    """Values for indices 3..n as a tuple, from a mapping or a sequence."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    count = n - 2
    if isinstance(values, Mapping):
        norm = {int(k): v for k, v in values.items()}
        expected = set(range(3, n + 1))
        if set(norm) != expected:
            missing = sorted(expected - set(norm))
            extra = sorted(set(norm) - expected)
            raise ValueError(
                f"{name} must carry explicit entries for 3..{n}"
                f" (missing {missing}, extra {extra})"
            )
        seq = [norm[k] for k in range(3, n + 1)]
    else:
        seq = list(values)
        if len(seq) != count:
            raise ValueError(f"{name} must have {count} entries for n={n}")
    return tuple(fld.of(v) for v in seq)


@dataclass(frozen=True)
class F1Params:
    """First family: parameters alpha_3..alpha_n and theta."""

    n: int
    alphas: tuple[Scalar, ...]
    theta: Scalar
    field: Field = RATIONAL

    def __init__(self, n: int, alpha, theta, field: Field = RATIONAL):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "alphas", _normalize_params(n, alpha, "alpha", field))
        object.__setattr__(self, "theta", field.of(theta))

    def alpha(self, k: int) -> Scalar:
        if 3 <= k <= self.n:
            return self.alphas[k - 3]
        return self.field.zero()

    def alpha_items(self):
        return [(k, self.alphas[k - 3]) for k in range(3, self.n + 1)]

    def to_json(self) -> dict:
        return {
            "family": 1,
            "n": self.n,
            "alpha": {str(k): self.field.to_json(v) for k, v in self.alpha_items()},
            "theta": self.field.to_json(self.theta),
            "field": self.field.descriptor(),
        }


@dataclass(frozen=True)
class F2Params:
    """Second family: parameters beta_3..beta_n and gamma."""

    n: int
    betas: tuple[Scalar, ...]
    gamma: Scalar
    field: Field = RATIONAL

    def __init__(self, n: int, beta, gamma, field: Field = RATIONAL):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "betas", _normalize_params(n, beta, "beta", field))
        object.__setattr__(self, "gamma", field.of(gamma))

    def beta(self, k: int) -> Scalar:
        if 3 <= k <= self.n:
            return self.betas[k - 3]
        return self.field.zero()

    def beta_items(self):
        return [(k, self.betas[k - 3]) for k in range(3, self.n + 1)]

    def to_json(self) -> dict:
        return {
            "family": 2,
            "n": self.n,
            "beta": {str(k): self.field.to_json(v) for k, v in self.beta_items()},
            "gamma": self.field.to_json(self.gamma),
            "field": self.field.descriptor(),
        }


@dataclass(frozen=True)
class F3Params:
    """Third family (reduced table): theta1, theta2, theta3 plus the top-product flag."""

    n: int
    theta1: Scalar
    theta2: Scalar
    theta3: Scalar
    alpha_flag: int = 0
    field: Field = RATIONAL

    def __init__(self, n, theta1, theta2, theta3, alpha_flag=0, field: Field = RATIONAL):
        if n < 3:
            raise ValueError(f"n must be >= 3, got {n}")
        if alpha_flag not in (0, 1):
            raise ValueError("alpha_flag must be 0 or 1")
        if alpha_flag == 1 and n % 2 == 0:
            raise ValueError("alpha_flag must be 0 for even n")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "theta1", field.of(theta1))
        object.__setattr__(self, "theta2", field.of(theta2))
        object.__setattr__(self, "theta3", field.of(theta3))
        object.__setattr__(self, "alpha_flag", alpha_flag)

    @property
    def thetas(self) -> tuple[Scalar, Scalar, Scalar]:
        return (self.theta1, self.theta2, self.theta3)

    def to_json(self) -> dict:
        return {
            "family": 3,
            "n": self.n,
            "theta1": self.field.to_json(self.theta1),
            "theta2": self.field.to_json(self.theta2),
            "theta3": self.field.to_json(self.theta3),
            "alpha_flag": self.alpha_flag,
            "field": self.field.descriptor(),
        }


FamilyParams = F1Params | F2Params | F3Params


def build_f1(p: F1Params) -> Algebra:
    """First-family table on basis e_0..e_n.

    [e_0,e_0] = e_2; [e_i,e_0] = e_{i+1} for 1 <= i <= n-1;
    [e_0,e_1] = sum_{k=3}^{n-1} alpha_k e_k + theta e_n;
    [e_i,e_1] = sum_{k=i+2}^{n} alpha_{k+1-i} e_k for 1 <= i <= n-2.
    """
    n, f = p.n, p.field
    one = f.one()
    products: dict[tuple[int, int], dict[int, Scalar]] = {}
    products[(0, 0)] = {2: one}
    for i in range(1, n):
        products[(i, 0)] = {i + 1: one}
    row01 = {k: p.alpha(k) for k in range(3, n) if p.alpha(k)}
    if p.theta:
        row01[n] = row01.get(n, f.zero()) + p.theta
    if row01:
        products[(0, 1)] = row01
    for i in range(1, n - 1):
        coords = {
            k: p.alpha(k + 1 - i)
            for k in range(i + 2, n + 1)
            if p.alpha(k + 1 - i)
        }
        if coords:
            products[(i, 1)] = coords
    return Algebra(n + 1, products, f)


def build_f2(p: F2Params) -> Algebra:
    """Second-family table; note [e_1, e_0] = 0 and [e_1, e_1] = gamma e_n."""
    n, f = p.n, p.field
    one = f.one()
    products: dict[tuple[int, int], dict[int, Scalar]] = {}
    products[(0, 0)] = {2: one}
    for i in range(2, n):
        products[(i, 0)] = {i + 1: one}
    row01 = {k: p.beta(k) for k in range(3, n + 1) if p.beta(k)}
    if row01:
        products[(0, 1)] = row01
    if p.gamma:
        products[(1, 1)] = {n: p.gamma}
    for i in range(2, n - 1):
        coords = {
            k: p.beta(k + 1 - i)
            for k in range(i + 2, n + 1)
            if p.beta(k + 1 - i)
        }
        if coords:
            products[(i, 1)] = coords
    return Algebra(n + 1, products, f)


def build_f3(p: F3Params) -> Algebra:
    """Third-family reduced table; re-validates the Leibniz identity."""
    n, f = p.n, p.field
    one = f.one()
    products: dict[tuple[int, int], dict[int, Scalar]] = {}
    for i in range(1, n):
        products[(i, 0)] = {i + 1: one}
    for i in range(2, n):
        products[(0, i)] = {i + 1: -one}
    if p.theta1:
        products[(0, 0)] = {n: p.theta1}
    row01: dict[int, Scalar] = {2: -one}
    if p.theta2:
        row01[n] = p.theta2
    products[(0, 1)] = row01
    if p.theta3:
        products[(1, 1)] = {n: p.theta3}
    if p.alpha_flag:
        for i in range(1, n):
            sign = one if i % 2 == 0 else -one
            target = products.setdefault((i, n - i), {})
            target[n] = target.get(n, f.zero()) + sign
    alg = Algebra(n + 1, products, f)
    report = check_leibniz(alg)
    if not report.ok:
        raise LeibnizViolationError(
            f"third-family table with thetas={p.thetas} alpha={p.alpha_flag} "
            f"violates the Leibniz identity at triple {report.triple}"
        )
    return alg


def build_family(p: FamilyParams) -> Algebra:
    if isinstance(p, F1Params):
        return build_f1(p)
    if isinstance(p, F2Params):
        return build_f2(p)
    return build_f3(p)


def dim6_counterexample_params() -> F1Params:
    """The 6-dimensional first-family instance with alpha = (1, -2, 5), theta = 5.

    Two distinct deformation parameters are nonzero, yet the algebra still has
    a non-nilpotent derivation; see the classification module.
    """
    return F1Params(5, {3: 1, 4: -2, 5: 5}, 5)


def dim6_counterexample() -> Algebra:
    return build_f1(dim6_counterexample_params())


def params_from_json(data: dict) -> FamilyParams:
    from .scalars import field_from_json

    family = int(data["family"])
    n = int(data["n"])
    fld = field_from_json(data["field"]) if "field" in data else RATIONAL
    if family == 1:
        alpha = {int(k): fld.parse(v) for k, v in data["alpha"].items()}
        return F1Params(n, alpha, fld.parse(data["theta"]), fld)
    if family == 2:
        beta = {int(k): fld.parse(v) for k, v in data["beta"].items()}
        return F2Params(n, beta, fld.parse(data["gamma"]), fld)
    if family == 3:
        return F3Params(
            n,
            fld.parse(data["theta1"]),
            fld.parse(data["theta2"]),
            fld.parse(data["theta3"]),
            int(data.get("alpha_flag", 0)),
            fld,
        )
    raise ValueError(f"unknown family {family}")

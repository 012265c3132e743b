"""Representative generators and classifiers for the three families.

``classify_*`` walk the exact case splits coming out of the derivation
constraint systems; the Engel verdict on the general solver provides an
independent second path to the same boolean (``engel_agrees``).

One correction is baked in: in the second family with n even and gamma != 0,
the stratum gamma = (n/2) * beta_{(n+2)/2}^2 with beta_n != 0 is
characteristically nilpotent (its constraint system forces a_0 = b_1 = 0 for
every derivation, as the general solver confirms), even though its normal
form is traditionally listed among the non-nilpotent representatives.
``classify_f2`` reports CharNilpotent there and records the normal form in
the payload; ``f2_representatives`` still emits that normal form, tagged, so
the published list stays reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import Algebra
from .combinatorics import p_catalan
from .derivations import (
    f1_constraint_solutions,
    f2_constraint_solutions,
    is_characteristically_nilpotent,
)
from .families import (
    F1Params,
    F2Params,
    F3Params,
    build_f1,
    build_f2,
    build_f3,
)
from .scalars import (
    RATIONAL,
    QuadExt,
    QuadraticField,
    Scalar,
    sqrt_fraction,
)

LABEL_NAT_GRADED = "NatGraded"
LABEL_CHAR_NILPOTENT = "CharNilpotent"
LABEL_F1_S = "F1^s"
LABEL_F2_ODD = "F2-odd"
LABEL_F2_EVEN_1 = "F2-even-1"
LABEL_F2_EVEN_2 = "F2-even-2"
LABEL_F2_J = "F2-j"
LABEL_F3_1 = "F3-1"
LABEL_F3_2 = "F3-2"
LABEL_F3_3 = "F3-3"

# payload keys that are isomorphism invariants (compared by same_class)
_STRUCTURAL_KEYS = ("s", "j", "beta_sq_over_gamma")


@dataclass(frozen=True)
class RepresentativeTag:
    family: int
    label: str
    payload: dict = dc_field(default_factory=dict)

    def same_class(self, other: "RepresentativeTag") -> bool:
        """Equality up to scale-dependent payload entries."""
        if (self.family, self.label) != (other.family, other.label):
            return False
        return all(
            self.payload.get(k) == other.payload.get(k) for k in _STRUCTURAL_KEYS
        )

    def to_json(self) -> dict:
        payload = {}
        for k, v in self.payload.items():
            if isinstance(v, Fraction):
                payload[k] = RATIONAL.to_json(v)
            elif isinstance(v, QuadExt):
                payload[k] = QuadraticField(v.d).to_json(v)
            else:
                payload[k] = v
        return {"family": self.family, "label": self.label, "payload": payload}


def is_char_nilpotent_tag(tag: RepresentativeTag) -> bool:
    return tag.label == LABEL_CHAR_NILPOTENT


def engel_agrees(alg: Algebra, tag: RepresentativeTag) -> bool:
    """Cross-check: Engel verdict against the classification verdict."""
    verdict = is_characteristically_nilpotent(alg)
    return verdict.is_char_nilpotent == is_char_nilpotent_tag(tag)


# ---------------------------------------------------------------------------
# Family 1
# ---------------------------------------------------------------------------


def f1_representative(n: int, s: int) -> F1Params:
    """The first-family representative with leading parameter at slot s.

    alpha_k vanishes off the arithmetic progression k = s (mod s-2); on it,
    with t = (k-s)/(s-2), alpha_k = (-1)^t C^{s-1}_{t+1} (generalized Catalan
    numbers), and theta = alpha_n.
    """
    if not 3 <= s <= n:
        raise ValueError(f"s must satisfy 3 <= s <= n, got s={s}, n={n}")
    alpha = {}
    for k in range(3, n + 1):
        if (k - s) % (s - 2) == 0 and k >= s:
            t = (k - s) // (s - 2)
            alpha[k] = Fraction((-1) ** t * p_catalan(s - 1, t + 1))
        else:
            alpha[k] = Fraction(0)
    return F1Params(n, alpha, alpha[n])


def verify_recurrence_ak(p: F1Params, s: int) -> bool:
    """Check alpha_k = k(s-2)/(2(s-k)) * sum_j alpha_{j-1} alpha_{k-j+3} for k > s."""
    first = next((k for k in range(3, p.n + 1) if p.alpha(k)), None)
    if first != s:
        raise ValueError(f"alpha_{s} must be the first nonzero parameter")
    for k in range(s + 1, p.n + 1):
        conv = p.field.zero()
        for j in range(4, k + 1):
            conv = conv + p.alpha(j - 1) * p.alpha(k - j + 3)
        if p.alpha(k) != Fraction(k * (s - 2), 2 * (s - k)) * conv:
            return False
    return True


def has_nonzero_alpha_pair(p: F1Params) -> bool:
    """True when alpha_i * alpha_j != 0 for some pair of distinct indices.

    This predicate does NOT imply characteristic nilpotency; the
    six-dimensional counterexample satisfies it yet has a non-nilpotent
    derivation.
    """
    nonzero = sum(1 for k in range(3, p.n + 1) if p.alpha(k))
    return nonzero >= 2


def _matches_catalan_pattern(p: F1Params, s: int) -> bool:
    scale = p.alpha(s)
    for k in range(3, p.n + 1):
        if (k - s) % (s - 2) == 0 and k >= s:
            t = (k - s) // (s - 2)
            coeff = (-1) ** t * p_catalan(s - 1, t + 1)
            if p.alpha(k) != coeff * scale ** (t + 1):
                return False
        elif p.alpha(k):
            return False
    return True


def classify_f1(p: F1Params) -> RepresentativeTag:
    """Decision tree for the first family.

    All alpha zero: naturally graded (payload carries theta when nonzero,
    that class normalizes to theta = 1).  Some alpha nonzero: theta must
    equal alpha_n and the alphas must follow the scaled Catalan pattern of
    the first nonzero slot s, else the algebra is characteristically
    nilpotent.
    """
    n = p.n
    s = next((k for k in range(3, n + 1) if p.alpha(k)), None)
    if s is None:
        if not p.theta:
            return RepresentativeTag(1, LABEL_NAT_GRADED)
        return RepresentativeTag(1, LABEL_NAT_GRADED, {"theta": p.theta})
    if p.theta != p.alpha(n):
        return RepresentativeTag(1, LABEL_CHAR_NILPOTENT)
    if _matches_catalan_pattern(p, s):
        return RepresentativeTag(1, LABEL_F1_S, {"s": s, "alpha_s": p.alpha(s)})
    return RepresentativeTag(1, LABEL_CHAR_NILPOTENT)


def classify_f1_checked(p: F1Params) -> tuple[RepresentativeTag, bool]:
    """Classification plus agreement flags from the two independent routes."""
    tag = classify_f1(p)
    agreed = engel_agrees(build_f1(p), tag)
    solutions = f1_constraint_solutions(p)
    agreed = agreed and (
        (solutions.dim == 0) == is_char_nilpotent_tag(tag)
    )
    return tag, agreed


# ---------------------------------------------------------------------------
# Family 2
# ---------------------------------------------------------------------------


def sqrt_two_over_n(n: int) -> tuple[Scalar, int]:
    """sqrt(2/n) as a scalar plus the d of the field it lives in (1 = rational)."""
    r, d = sqrt_fraction(Fraction(2, n))
    if d == 1:
        return r, 1
    return QuadExt(0, r, d), d


def f2_representatives(n: int, samples=(0, 1, 2)) -> list[tuple[F2Params, RepresentativeTag]]:
    """The published list of second-family normal forms for dimension n+1.

    Odd n: the gamma-normalized algebra plus the single-slot gamma = 0 family.
    Even n: the one-parameter family (instantiated at ``samples``), the
    normal form with the extra top coefficient (tagged F2-even-2; see the
    module docstring about its nilpotency status), plus the gamma = 0 family.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    out: list[tuple[F2Params, RepresentativeTag]] = []
    zeros = {k: 0 for k in range(3, n + 1)}
    if n % 2 == 1:
        out.append(
            (F2Params(n, zeros, 1), RepresentativeTag(2, LABEL_F2_ODD))
        )
    else:
        h = (n + 2) // 2
        for b in samples:
            beta = dict(zeros)
            beta[h] = b
            val = Fraction(b)
            out.append(
                (
                    F2Params(n, beta, 1),
                    RepresentativeTag(
                        2,
                        LABEL_F2_EVEN_1,
                        {"beta": val, "beta_sq_over_gamma": val * val},
                    ),
                )
            )
        root, d = sqrt_two_over_n(n)
        fld = RATIONAL if d == 1 else QuadraticField(d)
        beta = {k: fld.zero() for k in range(3, n + 1)}
        beta[h] = fld.of(root)
        beta[n] = fld.one()
        out.append(
            (
                F2Params(n, beta, 1, fld),
                RepresentativeTag(
                    2, LABEL_F2_EVEN_2, {"beta_sq_over_gamma": Fraction(2, n)}
                ),
            )
        )
    for j in range(3, n + 1):
        beta = dict(zeros)
        beta[j] = 1
        out.append(
            (F2Params(n, beta, 0), RepresentativeTag(2, LABEL_F2_J, {"j": j}))
        )
    return out


def classify_f2(p: F2Params) -> RepresentativeTag:
    """Decision tree for the second family (see the module docstring)."""
    n = p.n
    if p.gamma:
        if n % 2 == 1:
            if any(p.beta(i) for i in range(3, n)):
                return RepresentativeTag(2, LABEL_CHAR_NILPOTENT)
            return RepresentativeTag(2, LABEL_F2_ODD)
        h = (n + 2) // 2
        if any(p.beta(k) for k in range(3, n) if k != h):
            return RepresentativeTag(2, LABEL_CHAR_NILPOTENT)
        bh = p.beta(h)
        margin = p.gamma - Fraction(n, 2) * bh * bh
        invariant = bh * bh / p.gamma
        if margin:
            return RepresentativeTag(
                2, LABEL_F2_EVEN_1, {"beta_sq_over_gamma": invariant}
            )
        if not p.beta(n):
            return RepresentativeTag(
                2, LABEL_F2_EVEN_1, {"beta_sq_over_gamma": invariant}
            )
        # normal form F2-even-2: every derivation there has a_0 = b_1 = 0
        return RepresentativeTag(
            2, LABEL_CHAR_NILPOTENT, {"iso_class": LABEL_F2_EVEN_2}
        )
    if not any(p.beta(k) for k in range(3, n + 1)):
        return RepresentativeTag(2, LABEL_NAT_GRADED)
    j = next(k for k in range(3, n + 1) if p.beta(k))
    solutions = f2_constraint_solutions(p)
    if solutions.projects_beyond([1]):  # a_1 alone cannot make a witness
        return RepresentativeTag(2, LABEL_F2_J, {"j": j})
    return RepresentativeTag(2, LABEL_CHAR_NILPOTENT)


def classify_f2_checked(p: F2Params) -> tuple[RepresentativeTag, bool]:
    tag = classify_f2(p)
    return tag, engel_agrees(build_f2(p), tag)


# ---------------------------------------------------------------------------
# Family 3
# ---------------------------------------------------------------------------


def f3_representatives(n: int) -> list[tuple[F3Params, RepresentativeTag]]:
    """The three third-family normal forms (top-product flag 0)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    triples = [
        ((1, 0, 0), LABEL_F3_1),
        ((0, 1, 0), LABEL_F3_2),
        ((0, 0, 1), LABEL_F3_3),
    ]
    return [
        (F3Params(n, *thetas, alpha_flag=0), RepresentativeTag(3, label))
        for thetas, label in triples
    ]


def classify_f3(p: F3Params) -> RepresentativeTag:
    """Decision tree for the (reduced, non-Lie) third family.

    theta3 = theta2 = 0: normalizes to (1,0,0).  theta3 = 0, theta2 != 0:
    normalizes to (0,1,0).  theta3 != 0: non-nilpotent derivations exist only
    on the stratum theta1 = theta2^2 / (4 theta3), which normalizes to
    (0,0,1); off it the algebra is characteristically nilpotent.
    """
    t1, t2, t3 = p.thetas
    if not (t1 or t2 or t3):
        raise ValueError(
            "all-zero parameters give a Lie algebra; that case is out of scope"
        )
    if not t3:
        if not t2:
            return RepresentativeTag(3, LABEL_F3_1)
        return RepresentativeTag(3, LABEL_F3_2)
    if t1 == t2 * t2 / (4 * t3):
        return RepresentativeTag(3, LABEL_F3_3)
    return RepresentativeTag(3, LABEL_CHAR_NILPOTENT)


def classify_f3_checked(p: F3Params) -> tuple[RepresentativeTag, bool]:
    tag = classify_f3(p)
    return tag, engel_agrees(build_f3(p), tag)


def classify(p) -> RepresentativeTag:
    if isinstance(p, F1Params):
        return classify_f1(p)
    if isinstance(p, F2Params):
        return classify_f2(p)
    if isinstance(p, F3Params):
        return classify_f3(p)
    raise TypeError(f"not a family parameter object: {p!r}")

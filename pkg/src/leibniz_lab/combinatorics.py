"""Exact Catalan, generalized Catalan and Rothe numbers plus identity checks.

The two printed convolution identities circulating for these numbers carry
index typos; the corrected forms used here were re-verified against direct
big-rational evaluation (see the tests), and the literal printed forms are
kept as documented-failure checks.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb


class PoleError(ValueError):
    """Evaluation at a pole of the generalized binomial prefactor."""


def catalan(n: int) -> int:
    """C_n = binom(2n, n) / (n + 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    q, r = divmod(comb(2 * n, n), n + 1)
    assert r == 0
    return q


def p_catalan(p: int, n: int) -> int:
    """p-th Catalan number binom(p*n, n) / ((p-1)*n + 1); division is exact."""
    if p < 2:
        raise ValueError("p must be >= 2")
    if n < 0:
        raise ValueError("n must be >= 0")
    q, r = divmod(comb(p * n, n), (p - 1) * n + 1)
    if r:
        raise ArithmeticError(f"non-exact division for p={p}, n={n}")
    return q


def falling_binomial(x: Fraction, n: int) -> Fraction:
    """Generalized binom(x, n) = x (x-1) ... (x-n+1) / n! for rational x."""
    if n < 0:
        raise ValueError("n must be >= 0")
    num = Fraction(1)
    for i in range(n):
        num *= x - i
    for i in range(2, n + 1):
        num /= i
    return num


def rothe(x, z, n: int) -> Fraction:
    """Rothe/Hagen coefficient x / (x + z*n) * binom(x + z*n, n)."""
    x, z = Fraction(x), Fraction(z)
    if n < 0:
        raise ValueError("n must be >= 0")
    w = x + z * n
    if w == 0:
        raise PoleError(f"pole at x + z*n = 0 (x={x}, z={z}, n={n})")
    return x / w * falling_binomial(w, n)


# ---------------------------------------------------------------------------
# Convolution identities
# ---------------------------------------------------------------------------


def rothe_convolution_holds(x, y, z, n: int) -> bool:
    """sum_{k=0}^{n} A_k(x,z) A_{n-k}(y,z) == A_n(x+y,z)  (corrected index)."""
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    lhs = sum(rothe(x, z, k) * rothe(y, z, n - k) for k in range(n + 1))
    return lhs == rothe(x + y, z, n)


def verify_convolution(x, y, z, n_max: int) -> bool:
    return all(rothe_convolution_holds(x, y, z, n) for n in range(n_max + 1))


def rothe_convolution_literal_holds(x, y, z, n: int) -> bool:
    """Literal printed form with A_n(x,z) fixed inside the sum; fails for n >= 2."""
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    lhs = sum(rothe(x, z, n) * rothe(y, z, n - k) for k in range(n + 1))
    return lhs == rothe(x + y, z, n)


def catalan_convolution_holds(p: int, t: int) -> bool:
    """sum_{k=1}^{t} C^p_k C^p_{t+1-k} == 2t / ((p-1)t + p + 1) * C^p_{t+1}."""
    if t < 1:
        raise ValueError("t must be >= 1")
    lhs = sum(p_catalan(p, k) * p_catalan(p, t + 1 - k) for k in range(1, t + 1))
    rhs = Fraction(2 * t, (p - 1) * t + p + 1) * p_catalan(p, t + 1)
    return lhs == rhs


def verify_catalan_convolution(p: int, t_max: int) -> bool:
    return all(catalan_convolution_holds(p, t) for t in range(1, t_max + 1))


def catalan_convolution_literal_holds(p: int, n: int) -> bool:
    """Literal printed form (indices summing to n on the left); fails at p=2, n=2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lhs = sum(p_catalan(p, k) * p_catalan(p, n - k) for k in range(1, n + 1))
    rhs = Fraction(2 * n, (p - 1) * n + p + 1) * p_catalan(p, n + 1)
    return lhs == rhs

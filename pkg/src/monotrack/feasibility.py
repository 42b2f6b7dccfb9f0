"""Feasibility tests for monotonic tracking.

The central object is the transformed numerator obtained by dividing each
numerator coefficient by a factorial, ``b_i -> b_i/(i-1)!``.  Monotonic
tracking with n closed-loop poles is achievable exactly when this
transformed polynomial has no real non-negative roots; demanding a decay
rate faster than ``alpha`` just shifts every plant zero right by ``alpha``
before the same test.  The companion test for a concrete pole location
``sigma`` asks whether a degree-m polynomial built from numerator
derivatives at ``sigma`` is non-negative on the open half-line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateInput
from .polycore import (
    TAU_ROOT,
    Polynomial,
    RootSet,
    cauchy_bound,
    from_roots,
    nonneg_on_halfline,
    real_roots,
    sturm_count,
)


@dataclass(frozen=True)
class FeasibilityReport:
    """Verdict plus witnesses for one (zeros, n, alpha) query."""

    feasible: bool
    btilde: Polynomial
    offending_roots: tuple[float, ...]
    n: int
    alpha: float = 0.0


def btilde(B: Polynomial, n: int) -> Polynomial:
    """Factorial rescaling of a strictly proper numerator.

    With ``b_i`` the coefficient of s^(n-i) in B (zero for i < n-m), the
    result is sum over i of ``b_i/(i-1)! * s^(n-i)``, a degree-m polynomial.
    """
    if B.is_zero:
        raise DegenerateInput("btilde of zero numerator")
    m = B.degree
    if n <= m:
        raise DegenerateInput(f"btilde needs n > deg(B); got n={n}, deg={m}")
    return Polynomial(
        c / math.factorial(n - m + j - 1) for j, c in enumerate(B.coeffs)
    )


def _nonneg_root_threshold(bt: Polynomial) -> float:
    # a root x >= -TAU_ROOT*scale counts as non-negative (conservative)
    return -TAU_ROOT * cauchy_bound(bt)


def feasible_theorem1(zeros: RootSet, K: float, n: int) -> FeasibilityReport:
    """Monotonic tracking verdict for plant zeros and n closed-loop poles.

    Feasible exactly when the rescaled numerator has no real root in
    [0, +inf); a root at the origin counts as offending.
    """
    if not K > 0:
        raise DegenerateInput("closed-loop gain K must be positive")
    m = zeros.total_multiplicity()
    if n <= m:
        raise DegenerateInput(f"need n > m; got n={n}, m={m}")
    B = from_roots(zeros, K)
    bt = btilde(B, n)
    return _verdict(bt, n, 0.0)


def feasible_with_decay(
    zeros: RootSet, K: float, n: int, alpha: float
) -> FeasibilityReport:
    """Verdict for decay rate strictly faster than ``alpha`` (poles left of
    -alpha): shift every zero right by alpha, then run the plain test."""
    if alpha < 0:
        raise DegenerateInput("alpha must be >= 0")
    rep = feasible_theorem1(zeros.shifted(alpha), K, n)
    return FeasibilityReport(rep.feasible, rep.btilde, rep.offending_roots, n, alpha)


def _verdict(bt: Polynomial, n: int, alpha: float) -> FeasibilityReport:
    if bt.degree == 0:
        # constant K/(n-1)! > 0: no roots at all
        return FeasibilityReport(True, bt, (), n, alpha)
    left = _nonneg_root_threshold(bt)
    count = sturm_count(bt, left, math.inf)
    if count == 0:
        return FeasibilityReport(True, bt, (), n, alpha)
    offending = tuple(
        v for v, _ in real_roots(bt).real_roots if v >= left
    )
    return FeasibilityReport(False, bt, offending, n, alpha)


def build_Q(B: Polynomial, sigma: float, n: int) -> Polynomial:
    """Degree-m polynomial in t whose t^(m-j) coefficient is
    C(n-1, j) * B^(j)(sigma)."""
    if B.is_zero:
        raise DegenerateInput("build_Q of zero numerator")
    m = B.degree
    if n <= m:
        raise DegenerateInput(f"build_Q needs n > deg(B); got n={n}, deg={m}")
    coeffs = [
        math.comb(n - 1, j) * B.derivative(j).eval(sigma) for j in range(m + 1)
    ]
    return Polynomial(coeffs)


def pir_equal_poles(B: Polynomial, K: float, sigma: float, n: int) -> bool:
    """True iff B(s)/(s-sigma)^n has a non-negative impulse response.

    Requires K > 0 and the derivative-bundle polynomial non-negative on
    (0, inf).  Touching zero at isolated points with even multiplicity is
    allowed; stability of sigma is the caller's concern.
    """
    if not K > 0:
        return False
    q = build_Q(B, sigma, n)
    if q.is_zero:
        raise DegenerateInput("derivative bundle collapsed to zero")
    return nonneg_on_halfline(q)


def q_coefficients(B: Polynomial, n: int) -> list[Polynomial]:
    """Coefficient polynomials q_i(t), i = n-m .. n, of the sigma-expansion
    Q(sigma, t) = sum_i q_i(t) sigma^(n-i).

    Test oracle for build_Q; the two must satisfy the summation identity
    at every (sigma, t).
    """
    if B.is_zero:
        raise DegenerateInput("q_coefficients of zero numerator")
    m = B.degree
    if n <= m:
        raise DegenerateInput(f"q_coefficients needs n > deg(B); got n={n}")

    def b(k: int) -> float:
        # coefficient of s^(n-k); nonzero only for n-m <= k <= n
        j = k - (n - m)
        return B.coeffs[j] if 0 <= j <= m else 0.0

    out = []
    for i in range(n - m, n + 1):
        coeffs = [0.0] * (m + 1)
        for j in range(0, i - (n - m) + 1):
            if j > m:
                break
            coeffs[j] += (
                math.comb(n - i + j, j)
                * math.comb(n - 1, j)
                * math.factorial(j)
                * b(i - j)
            )
        out.append(Polynomial(coeffs))
    return out

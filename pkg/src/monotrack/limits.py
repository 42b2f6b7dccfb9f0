"""Fundamental limits: minimum order and fastest decay rate.

The minimum closed-loop pole count comes from a downward scan under the
constructive upper bound; the fastest decay rate comes from bisection on
the shift amount ``alpha``, using the fact that feasibility with decay
faster than ``alpha`` is monotone in ``alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import (
    ConvergenceFailure,
    DegenerateInput,
    InfeasibleAtAlphaZero,
    InfeasiblePlant,
)
from .feasibility import feasible_theorem1, feasible_with_decay
from .polycore import TAU_ROOT, RootSet

#: alpha-doubling cap factor: feasibility beyond 1e12*(1+max|z|) reports -inf
UNBOUNDED_CAP = 1e12
#: mixed absolute/relative width target for the alpha bisection
BISECT_TOL = 1e-8


@dataclass(frozen=True)
class LimitsReport:
    """Aggregate of the limit computations for one plant/order query."""

    n_star: Optional[int] = None
    n_c_star: Optional[int] = None
    upper_bound_n: Optional[int] = None
    sigma_star: Optional[float] = None
    sigma_lower_bound: float = -math.inf
    bisection_iterations: int = 0
    attained: Optional[bool] = None


def _check_no_nonneg_real_zero(zeros: RootSet) -> None:
    for v, _ in zeros.real_roots:
        if v >= -TAU_ROOT * (1.0 + abs(v)):
            raise InfeasiblePlant(
                f"real non-negative zero at {v:.12g}: monotonic tracking "
                "is impossible at any order"
            )


def corollary1_bound(zeros: RootSet) -> int:
    """Closed-loop pole count guaranteed sufficient for feasibility:
    1 + (#open-LHP zeros) + (#closed-RHP conjugate zeros)
    + sum over RHP pairs of floor((Re/Im)^2)."""
    _check_no_nonneg_real_zero(zeros)
    m_mp = sum(k for v, k in zeros.real_roots)  # all real zeros are now LHP
    n = 1
    for re, im, k in zeros.complex_pairs:
        if re < 0:
            m_mp += 2 * k
        else:
            n += k * (2 + math.floor((re / im) ** 2))
    return n + m_mp


def min_order(
    zeros: RootSet, K: float, n_o: Optional[int] = None
) -> tuple[int, Optional[int]]:
    """Least closed-loop pole count n* that admits monotonic tracking,
    found by scanning down from the constructive bound; also the least
    admissible controller order when the plant order is supplied."""
    bound = corollary1_bound(zeros)
    m = zeros.total_multiplicity()
    start = max(bound, m + 1)
    if n_o is not None:
        start = max(start, 2 * n_o - 1)
    if not feasible_theorem1(zeros, K, start).feasible:
        raise ConvergenceFailure(
            f"feasibility does not hold at the constructive bound n={start}"
        )
    n_star = start
    for n in range(start - 1, m, -1):
        if not feasible_theorem1(zeros, K, n).feasible:
            break
        n_star = n
    n_c_star = max(n_star - n_o, n_o - 1) if n_o is not None else None
    return n_star, n_c_star


def sigma_lower_bound(zeros: RootSet) -> float:
    """Largest real zero, the hard floor on any achievable decay rate;
    -inf when the plant has no real zeros."""
    return max((v for v, _ in zeros.real_roots), default=-math.inf)


def _sigma_star_search(zeros: RootSet, K: float, n: int) -> tuple[float, int, bool]:
    if not feasible_theorem1(zeros, K, n).feasible:
        raise InfeasibleAtAlphaZero(
            f"monotonic tracking is infeasible at n={n} even without a "
            "decay requirement"
        )
    cap = UNBOUNDED_CAP * (1.0 + zeros.max_abs())
    iterations = 0
    lo, hi = 0.0, 1.0
    while feasible_with_decay(zeros, K, n, hi).feasible:
        lo, hi = hi, 2.0 * hi
        iterations += 1
        if hi > cap:
            return -math.inf, iterations, False
    for _ in range(200):
        if hi - lo <= BISECT_TOL * (1.0 + lo):
            return -lo, iterations, False
        mid = 0.5 * (lo + hi)
        iterations += 1
        if feasible_with_decay(zeros, K, n, mid).feasible:
            lo = mid
        else:
            hi = mid
    raise ConvergenceFailure(
        f"decay-rate bisection failed to converge on [{lo}, {hi}]"
    )


def sigma_star(zeros: RootSet, K: float, n: int) -> float:
    """Fastest decay rate compatible with monotonic tracking at order n.

    Returned as the supremum boundary (not attained); -inf when the
    doubling search exceeds the unbounded-detection cap.
    """
    value, _, _ = _sigma_star_search(zeros, K, n)
    return value


def sigma_star_m2_closed_form(z_pair: tuple[float, float], n: int) -> float:
    """For a single conjugate zero pair: Re(z) - |Im(z)| * sqrt(n-2)."""
    re, im = z_pair
    if im == 0:
        raise DegenerateInput("pair must be non-real (im != 0)")
    if n < 3:
        raise DegenerateInput("closed form needs n >= 3")
    return re - abs(im) * math.sqrt(n - 2)


def decay_report(zeros: RootSet, K: float, n: int) -> LimitsReport:
    """Fastest decay rate plus its lower bound and search metadata."""
    value, iters, attained = _sigma_star_search(zeros, K, n)
    return LimitsReport(
        sigma_star=value,
        sigma_lower_bound=sigma_lower_bound(zeros),
        bisection_iterations=iters,
        attained=attained,
    )


def order_report(zeros: RootSet, K: float, n_o: Optional[int] = None) -> LimitsReport:
    """Minimum order plus the constructive bound it was scanned from."""
    bound = corollary1_bound(zeros)
    n_star, n_c_star = min_order(zeros, K, n_o)
    return LimitsReport(
        n_star=n_star,
        n_c_star=n_c_star,
        upper_bound_n=bound,
        sigma_lower_bound=sigma_lower_bound(zeros),
    )

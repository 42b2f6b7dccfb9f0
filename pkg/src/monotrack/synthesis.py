"""Controller construction: pole placement, gain design, verification.

Placement solves the banded linear system relating controller coefficients
to desired characteristic coefficients; the square case is determined, the
higher-order case keeps the minimum-norm solution.  Pole locations are
always real and equal: that loses neither feasibility nor decay rate, and
reduces the search to one parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ConvergenceFailure,
    DegenerateInput,
    InfeasibleDecay,
    InfeasibleOrder,
    InfeasiblePlant,
    RankDeficient,
    ResidualTooLarge,
)
from .feasibility import feasible_theorem1, feasible_with_decay, pir_equal_poles
from .limits import sigma_star
from .lti import (
    ClosedLoop,
    Controller,
    ControllerStructure,
    Plant,
    _roots_stable,
    close_loop,
    dc_gain,
    is_monotone,
    is_stable,
    simulate_step,
    validate_order,
    validate_plant,
)
from .polycore import Polynomial, RootSet, from_roots, real_roots

#: condition-number ceiling beyond which placement reports rank deficiency
COND_MAX = 1e12
#: relative residual ceiling for an accepted placement solve
RESIDUAL_MAX = 1e-8


@dataclass(frozen=True)
class PlacementSystem:
    """Banded placement matrix and, when known, the target coefficients."""

    M: np.ndarray
    a: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SynthesisChecks:
    stable: bool
    dc_gain_error: float
    monotone_analytic: bool
    monotone_simulated: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.stable
            and self.dc_gain_error <= 1e-9
            and self.monotone_analytic
            and self.monotone_simulated
        )


@dataclass(frozen=True)
class SynthesisReport:
    controller: Controller
    sigma_chosen: float
    closed_loop: ClosedLoop
    checks: SynthesisChecks
    residual: float


def char_poly(poles: RootSet) -> Polynomial:
    """Monic polynomial with the given roots."""
    return from_roots(poles, 1.0)


def build_M(plant: Plant, n_c: int) -> PlacementSystem:
    """Placement matrix: stacked shifted numerator coefficients on the
    left block, shifted denominator coefficients on the right."""
    order_check = validate_order(plant, n_c)
    if not order_check.ok:
        raise DegenerateInput("; ".join(order_check.messages))
    n_o = plant.order
    rows = n_o + n_c + 1
    cols = 2 * (n_c + 1)
    # b[k] is the coefficient of s^(n_o - k) in the numerator (zero-padded)
    b = [0.0] * (n_o + 1)
    for j, c in enumerate(plant.num.coeffs):
        b[n_o - plant.num.degree + j] = c
    a = list(plant.den.coeffs)
    M = np.zeros((rows, cols))
    for j in range(1, n_c + 2):
        for i in range(j, j + n_o + 1):
            M[i - 1, j - 1] = b[i - j]
    for j in range(n_c + 2, 2 * n_c + 3):
        for i in range(j - n_c - 1, j - n_c + n_o):
            M[i - 1, j - 1] = a[i - j + n_c + 1]
    return PlacementSystem(M)


def _frequency_scale(plant: Plant, poles: RootSet) -> float:
    """Geometric-mean root magnitude over plant num/den and target poles,
    read off coefficient ratios (product of |roots| = |p(0)/lc|)."""
    logs: list[float] = []
    for p in (plant.num, plant.den, char_poly(poles)):
        if p.degree >= 1 and p.eval(0.0) != 0.0:
            logs.append(math.log(abs(p.eval(0.0) / p.leading)) / p.degree)
    if not logs:
        return 1.0
    w0 = math.exp(sum(logs) / len(logs))
    return w0 if w0 > 1e-30 else 1.0


def _solve_placement(
    plant: Plant, poles: RootSet, n_c: int
) -> tuple[Polynomial, Polynomial, float, float]:
    n = plant.order + n_c
    if poles.total_multiplicity() != n:
        raise DegenerateInput(
            f"need {n} closed-loop poles, got {poles.total_multiplicity()}"
        )
    system = build_M(plant, n_c)
    target = np.array(char_poly(poles).coeffs)
    M = system.M
    rows, cols = M.shape
    # frequency scaling s = w0*u: root magnitudes far from 1 make the raw
    # monomial-basis system hopelessly conditioned, but the substitution is
    # an exact reparameterization that brings every root to O(1)
    w0 = _frequency_scale(plant, poles)
    row_scale = w0 ** (-np.arange(rows, dtype=float))
    k_col = np.concatenate([np.arange(n_c + 1.0), np.arange(n_c + 1.0)])
    Ms = (M * row_scale[:, None]) * (w0**k_col)[None, :]
    ts = target * row_scale
    y, _, rank, svals = np.linalg.lstsq(Ms, ts, rcond=None)
    if rank < rows:
        raise RankDeficient(
            "placement system does not reach all characteristic polynomials "
            "(common num/den factor, or degenerate coefficients)"
        )
    cond = float(svals[0] / svals[rank - 1]) if svals[rank - 1] > 0 else math.inf
    if cond > COND_MAX:
        raise RankDeficient(
            f"placement system condition estimate {cond:.3e} exceeds {COND_MAX:.0e}"
        )
    x = y * (w0**k_col)
    if cols > rows:
        # project back to the minimum-Euclidean-norm solution in the raw
        # variables: the scaled lstsq minimizes a different metric
        _, _, vt = np.linalg.svd(Ms)
        null_raw = vt[rows:].T * (w0**k_col)[:, None]
        q, _ = np.linalg.qr(null_raw)
        x = x - q @ (q.T @ x)
    residual = float(np.linalg.norm(Ms @ (x * w0**-k_col) - ts) / np.linalg.norm(ts))
    if residual > RESIDUAL_MAX:
        raise ResidualTooLarge(
            f"placement residual {residual:.3e} exceeds {RESIDUAL_MAX:.0e}"
        )
    half = n_c + 1
    F = Polynomial(x[:half])
    G = Polynomial(x[half:])
    if G.is_zero or G.degree < n_c:
        raise RankDeficient("placement produced a degenerate G polynomial")
    return F, G, residual, cond


def place_poles(
    plant: Plant, poles: RootSet, n_c: int
) -> tuple[Polynomial, Polynomial]:
    """Controller polynomials (F, G) realizing the requested closed-loop
    poles; minimum-norm when the system is underdetermined."""
    F, G, _, _ = _solve_placement(plant, poles, n_c)
    return F, G


def design_Kc(plant: Plant, F: Polynomial, G: Polynomial) -> float:
    """Static gain that makes the steady-state gain exactly one."""
    b0 = plant.num.eval(0.0)
    if b0 == 0.0:
        raise DegenerateInput("plant has a zero at the origin; no static gain")
    a_cl = plant.num * F + plant.den * G
    return a_cl.eval(0.0) / b0


def _choose_sigma(sstar: float, alpha: Optional[float], zero_scale: float) -> float:
    if alpha is None:
        if sstar == -math.inf:
            return -1.0 * (1.0 + zero_scale)
        return sstar / 2.0
    margin = math.inf if sstar == -math.inf else (-sstar) - alpha
    return -(alpha + min(margin, 0.1 * alpha + 0.1) / 2.0)


def synthesize(
    plant: Plant, n_c: int, alpha: Optional[float] = None
) -> SynthesisReport:
    """End-to-end design of a monotonic tracking controller.

    Pipeline: feasibility verdict at order n = n_c + n_o (optionally with
    the decay requirement), pole location chosen strictly inside the
    feasible decay interval and certified, placement, static gain, then
    the four closed-loop checks (stability, unit steady-state gain,
    non-negative impulse response, simulated monotone step).
    """
    plant_check = validate_plant(plant)
    if plant_check.zero_gain:
        raise DegenerateInput("plant gain is zero")
    if plant_check.nonneg_real_zeros:
        raise InfeasiblePlant(
            "real non-negative plant zero(s) at "
            + ", ".join(f"{v:.12g}" for v in plant_check.nonneg_real_zeros)
            + " make monotonic tracking impossible at any order"
        )
    if plant_check.non_coprime:
        raise RankDeficient("plant numerator and denominator share a factor")
    order_check = validate_order(plant, n_c)
    if not order_check.ok:
        raise DegenerateInput("; ".join(order_check.messages))

    n = plant.order + n_c
    m = plant.zero_count
    if n <= m:
        raise DegenerateInput(
            "the static boundary case n = m is solvable directly but is "
            "outside this pipeline; increase the controller order"
        )
    zeros = plant.zeros
    if not feasible_theorem1(zeros, 1.0, n).feasible:
        raise InfeasibleOrder(
            f"monotonic tracking is infeasible with n={n} closed-loop poles; "
            "a larger controller order is required"
        )
    if alpha is not None:
        if alpha < 0:
            raise DegenerateInput("alpha must be >= 0")
        if not feasible_with_decay(zeros, 1.0, n, alpha).feasible:
            raise InfeasibleDecay(
                f"decay rate {alpha:.6g} exceeds the fastest rate compatible "
                f"with a monotonic response at n={n}"
            )

    sstar = sigma_star(zeros, 1.0, n)
    sigma = _choose_sigma(sstar, alpha, zeros.max_abs())
    floor = -alpha if alpha is not None else 0.0
    B_unit = from_roots(zeros, 1.0) if m > 0 else Polynomial.one()
    certified = False
    for _ in range(80):
        if pir_equal_poles(B_unit, 1.0, sigma, n):
            certified = True
            break
        sigma = 0.5 * (sigma + floor)
    if not certified:
        raise ConvergenceFailure(
            f"could not certify a pole location in ({sstar:.6g}, {floor:.6g})"
        )

    F, G, residual, _ = _solve_placement(plant, RootSet(((sigma, n),)), n_c)
    Kc = design_Kc(plant, F, G)
    if not Kc * plant.gain > 0:
        raise ConvergenceFailure(
            "internal consistency: designed gain does not give K > 0"
        )
    g_stable = G.degree == 0 or _roots_stable(real_roots(G))
    structure = (
        ControllerStructure.DIRECT_G if g_stable else ControllerStructure.ALTERNATIVE_G
    )
    ctrl = Controller(F, G, Kc, structure)
    cl = close_loop(plant, ctrl)

    stable = is_stable(cl)
    dc_err = abs(dc_gain(cl) - 1.0)
    analytic = pir_equal_poles(cl.num, cl.gain, sigma, n)
    simulated = is_monotone(simulate_step(cl)) if stable else False
    checks = SynthesisChecks(stable, dc_err, analytic, simulated)
    return SynthesisReport(ctrl, sigma, cl, checks, residual)

"""Transfer-function data model, standing-assumption checks, and responses.

Plants are strictly validated only on demand: construction normalizes and
caches, ``validate_plant`` reports everything that rules out monotonic
tracking or breaks the synthesis machinery.  Step responses come from a
fixed-step classical Runge-Kutta integrator on the controllable companion
realization so that traces are reproducible run to run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from .errors import DegenerateInput
from .feasibility import build_Q
from .polycore import Polynomial, RootSet, from_roots, poly_gcd, real_roots

#: relative pole real-part margin below which a loop counts as stable
TAU_STAB = 1e-10
#: relative dip tolerance when declaring a sampled step response monotone
TAU_MONO = 1e-7
#: a plant zero this close (relative) to a plant pole is flagged, not cancelled
TAU_CANCEL = 1e-7


@dataclass(frozen=True)
class Plant:
    """Open-loop transfer function num/den with monic den.

    ``gain`` is the high-frequency gain: leading numerator coefficient
    after den is made monic.  Root locations are in rad/s.
    """

    num: Polynomial
    den: Polynomial
    zeros: RootSet
    gain: float

    @staticmethod
    def from_tf(num: Polynomial, den: Polynomial) -> "Plant":
        if den.is_zero:
            raise DegenerateInput("plant denominator is zero")
        if not num.is_zero and num.degree > den.degree:
            raise DegenerateInput(
                f"improper plant: deg(num)={num.degree} > deg(den)={den.degree}"
            )
        scale = den.leading
        den_m = den.monic()
        num_m = num.scaled(1.0 / scale)
        zeros = real_roots(num_m) if num_m.degree >= 1 else RootSet()
        gain = 0.0 if num_m.is_zero else num_m.leading
        return Plant(num_m, den_m, zeros, gain)

    @staticmethod
    def from_zpk(zeros: RootSet, poles: RootSet, gain: float) -> "Plant":
        num = from_roots(zeros, gain) if gain != 0.0 else Polynomial()
        den = from_roots(poles, 1.0)
        if not num.is_zero and num.degree > den.degree:
            raise DegenerateInput("improper plant: more zeros than poles")
        return Plant(num, den, zeros, gain)

    @property
    def order(self) -> int:
        return self.den.degree

    @property
    def zero_count(self) -> int:
        return max(self.num.degree, 0)

    def poles(self) -> RootSet:
        return real_roots(self.den) if self.den.degree >= 1 else RootSet()


class ControllerStructure(enum.Enum):
    """Which of the two equivalent block diagrams realizes the controller
    with internal stability: the direct one needs a stable G."""

    DIRECT_G = "direct"
    ALTERNATIVE_G = "alternative"


@dataclass(frozen=True)
class Controller:
    """Feedback F/G plus static reference gain Kc; order is deg(G)."""

    F: Polynomial
    G: Polynomial
    Kc: float
    structure: ControllerStructure = ControllerStructure.DIRECT_G

    def __post_init__(self):
        if self.G.is_zero:
            raise DegenerateInput("controller G must be nonzero")
        if not self.F.is_zero and self.F.degree > self.G.degree:
            raise DegenerateInput("deg(F) must not exceed deg(G)")

    @property
    def order(self) -> int:
        return self.G.degree


@dataclass(frozen=True)
class ClosedLoop:
    """Closed loop Kc*B_o / (B_o F + A_o G), normalized monic."""

    num: Polynomial
    den: Polynomial
    gain: float
    zeros: RootSet
    poles: RootSet

    @property
    def order(self) -> int:
        return self.den.degree


class TraceKind(enum.Enum):
    IMPULSE = "impulse"
    STEP = "step"


@dataclass(frozen=True)
class ResponseTrace:
    times: tuple[float, ...]
    values: tuple[float, ...]
    kind: TraceKind

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise DegenerateInput("times/values length mismatch")
        if self.times and self.times[0] < 0:
            raise DegenerateInput("trace must start at t >= 0")

    def write_csv(self, stream: IO[str]) -> None:
        stream.write("t,y\n")
        for t, y in zip(self.times, self.values):
            stream.write(f"{t:.17g},{y:.17g}\n")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    messages: tuple[str, ...] = ()
    nonneg_real_zeros: tuple[float, ...] = ()
    zero_gain: bool = False
    non_coprime: bool = False
    near_cancellations: tuple[tuple[float, float], ...] = ()


def validate_plant(plant: Plant) -> ValidationReport:
    """Check the standing plant assumptions.

    Findings: real non-negative zeros (monotonic tracking impossible for
    any controller), zero gain (degenerate plant), shared num/den factors
    (pole placement would be singular).  Zero-pole pairs closer than
    TAU_CANCEL (relative) are flagged but never cancelled.
    """
    messages: list[str] = []
    zero_gain = plant.gain == 0.0 or plant.num.is_zero
    if zero_gain:
        messages.append("plant gain is zero: transfer function is identically 0")

    offenders: list[float] = []
    for v, _ in plant.zeros.real_roots:
        if v >= -1e-9 * (1.0 + abs(v)):
            offenders.append(v)
    if offenders:
        messages.append(
            "real non-negative zero(s) at "
            + ", ".join(f"{v:.12g}" for v in offenders)
            + ": monotonic tracking is impossible at any controller order"
        )

    non_coprime = False
    if not plant.num.is_zero and plant.num.degree >= 1 and plant.den.degree >= 1:
        g = poly_gcd(plant.num, plant.den)
        if g.degree >= 1:
            non_coprime = True
            shared = ", ".join(f"{v:.12g}" for v, _ in real_roots(g).real_roots)
            messages.append(
                f"numerator and denominator share factor(s) (roots: {shared})"
            )

    near: list[tuple[float, float]] = []
    if not zero_gain and not non_coprime and plant.den.degree >= 1:
        poles = plant.poles()
        for z in plant.zeros.values():
            for p in poles.values():
                scale = 1.0 + max(abs(z), abs(p))
                if abs(z - p) < TAU_CANCEL * scale:
                    near.append((z.real, p.real))
    if near:
        messages.append(
            f"{len(near)} zero-pole pair(s) nearly cancel; kept, not cancelled"
        )

    ok = not (zero_gain or offenders or non_coprime)
    return ValidationReport(
        ok,
        tuple(messages),
        tuple(offenders),
        zero_gain,
        non_coprime,
        tuple(near),
    )


def validate_order(plant: Plant, n_c: int) -> ValidationReport:
    """Check the controller-order assumptions for this plant.

    Requires n_c >= n_o - 1 (full pole-placement freedom) and a strictly
    proper closed loop n > m, except that the n == m boundary is accepted:
    it only arises for static or first-order all-pass-free loops, which are
    always solvable directly.
    """
    n_o = plant.order
    m = plant.zero_count
    msgs: list[str] = []
    if n_c < n_o - 1:
        msgs.append(
            f"controller order {n_c} violates n_c >= n_o - 1 = {n_o - 1}"
        )
    n = n_c + n_o
    if n < m:
        msgs.append(
            f"closed loop would be improper: n = {n} < m = {m}"
        )
    return ValidationReport(not msgs, tuple(msgs))


def close_loop(plant: Plant, ctrl: Controller) -> ClosedLoop:
    """Form Kc*B_o / (B_o F + A_o G), monic-normalized.

    The closed-loop zeros are the plant zeros by construction; poles come
    from the expanded characteristic polynomial.
    """
    bf = plant.num * ctrl.F
    ag = plant.den * ctrl.G
    den_raw = bf + ag
    expected = plant.order + ctrl.order
    degenerate = den_raw.is_zero or den_raw.degree < expected
    if not degenerate and plant.zero_count == plant.order:
        # only a biproper plant can cancel the leading coefficient; judge
        # the survivor against the operand scale, not the result norm
        degenerate = abs(den_raw.leading) <= 1e-12 * max(
            bf.norm_inf(), ag.norm_inf()
        )
    if degenerate:
        raise DegenerateInput(
            "closed-loop characteristic polynomial lost its leading "
            "coefficient (degenerate F, G choice)"
        )
    lead = den_raw.leading
    den = den_raw.monic()
    num = plant.num.scaled(ctrl.Kc / lead)
    gain = 0.0 if num.is_zero else num.leading
    poles = real_roots(den) if den.degree >= 1 else RootSet()
    return ClosedLoop(num, den, gain, plant.zeros, poles)


def _roots_stable(roots: RootSet) -> bool:
    for v, _ in roots.real_roots:
        if not v < -TAU_STAB * (1.0 + abs(v)):
            return False
    for re, im, _ in roots.complex_pairs:
        if not re < -TAU_STAB * (1.0 + math.hypot(re, im)):
            return False
    return True


def is_stable(cl: ClosedLoop) -> bool:
    """Every pole strictly in the open left half-plane (relative margin)."""
    return _roots_stable(cl.poles)


def dc_gain(cl: ClosedLoop) -> float:
    d = cl.den.eval(0.0)
    if d == 0.0:
        raise DegenerateInput("den(0) = 0: no finite steady-state gain")
    return cl.num.eval(0.0) / d


def pole_abscissa(cl: ClosedLoop) -> float:
    """Largest pole real part (the decay rate of the loop)."""
    worst = -math.inf
    for v, _ in cl.poles.real_roots:
        worst = max(worst, v)
    for re, _, _ in cl.poles.complex_pairs:
        worst = max(worst, re)
    return worst


def impulse_equal_poles(B: Polynomial, sigma: float, n: int, t: float) -> float:
    """Closed-form impulse response of B(s)/(s-sigma)^n at time t >= 0:
    exp(sigma t) * t^(n-1-m)/(n-1)! * Q(sigma, t)."""
    if n < 1 or B.is_zero or n <= B.degree:
        raise DegenerateInput("need n >= 1 and n > deg(B)")
    if t < 0:
        raise DegenerateInput("t must be >= 0")
    m = B.degree
    q = build_Q(B, sigma, n)
    return math.exp(sigma * t) * t ** (n - 1 - m) / math.factorial(n - 1) * q.eval(t)


def _companion_system(num: Polynomial, den: Polynomial):
    """Controllable companion realization (A, b, c, d) of num/den (monic den)."""
    n = den.degree
    d = 0.0
    num_sp = num
    if num.degree == n:
        d = num.leading
        num_sp = num - den.scaled(d)
    A = np.zeros((n, n))
    if n > 1:
        A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = [-c for c in den.coeffs[:0:-1]]
    b = np.zeros(n)
    b[-1] = 1.0
    c = np.zeros(n)
    cs = num_sp.coeffs[::-1]  # lowest degree first
    c[: len(cs)] = cs
    return A, b, c, d


def _rk4_maps(A: np.ndarray, b: np.ndarray, h: float):
    """One classical fourth-order step of xdot = Ax + b(u=1) equals the
    affine map x -> Phi x + Gamma; precomputing it keeps long runs cheap."""
    n = A.shape[0]
    eye = np.eye(n)
    A2 = A @ A
    A3 = A2 @ A
    A4 = A3 @ A
    phi = eye + h * A + (h**2 / 2) * A2 + (h**3 / 6) * A3 + (h**4 / 24) * A4
    gamma = h * (eye + (h / 2) * A + (h**2 / 6) * A2 + (h**3 / 24) * A3) @ b
    return phi, gamma


def default_time_grid(cl: ClosedLoop) -> tuple[float, float]:
    """(t_end, dt) heuristics: settle to ~4e-18 of the slowest mode, and
    keep dt * max|pole| <= 0.05."""
    absc = pole_abscissa(cl)
    if not absc < 0:
        raise DegenerateInput("time grid heuristics need a stable loop")
    fastest = max((abs(z) for z in cl.poles.values()), default=abs(absc))
    return 40.0 / abs(absc), 0.05 / fastest


def simulate_step(
    cl: ClosedLoop, t_end: Optional[float] = None, dt: Optional[float] = None
) -> ResponseTrace:
    """Unit-step response on a fixed grid; refuses unstable loops."""
    if cl.den.degree == 0:
        # static loop: constant response
        g = cl.num.eval(0.0) / cl.den.eval(0.0)
        te = t_end if t_end is not None else 1.0
        return ResponseTrace((0.0, te), (g, g), TraceKind.STEP)
    if not is_stable(cl):
        raise DegenerateInput("refusing to integrate an unstable loop")
    te_default, dt_default = default_time_grid(cl)
    te = float(t_end) if t_end is not None else te_default
    h = float(dt) if dt is not None else dt_default
    if not (te > 0 and h > 0):
        raise DegenerateInput("t_end and dt must be positive")
    steps = max(int(math.ceil(te / h)), 1)
    A, b, c, d = _companion_system(cl.num, cl.den)
    phi, gamma = _rk4_maps(A, b, h)
    x = np.zeros(A.shape[0])
    times = [0.0]
    values = [float(c @ x) + d]
    for k in range(1, steps + 1):
        x = phi @ x + gamma
        times.append(k * h)
        values.append(float(c @ x) + d)
    return ResponseTrace(tuple(times), tuple(values), TraceKind.STEP)


def simulate_impulse_equal_poles(
    B: Polynomial, sigma: float, n: int, t_end: float, dt: float
) -> ResponseTrace:
    """Impulse response of B(s)/(s-sigma)^n by zero-input integration from
    x0 = b; independent of the closed-form route, used as its oracle."""
    if n < 1 or B.is_zero or n <= B.degree:
        raise DegenerateInput("need n >= 1 and n > deg(B)")
    den = from_roots(RootSet(((sigma, n),)), 1.0)
    A, b, c, d = _companion_system(B, den)
    phi, _ = _rk4_maps(A, np.zeros(n), dt)
    x = b.copy()
    steps = max(int(math.ceil(t_end / dt)), 1)
    times = [0.0]
    values = [float(c @ x)]
    for k in range(1, steps + 1):
        x = phi @ x
        times.append(k * dt)
        values.append(float(c @ x))
    return ResponseTrace(tuple(times), tuple(values), TraceKind.IMPULSE)


def is_monotone(trace: ResponseTrace) -> bool:
    """Non-decreasing within a relative dip tolerance of the final value."""
    if trace.kind is not TraceKind.STEP:
        raise DegenerateInput("monotonicity is defined for step traces")
    if len(trace.values) < 2:
        return True
    floor = -TAU_MONO * abs(trace.values[-1])
    return all(
        b - a >= floor for a, b in zip(trace.values, trace.values[1:])
    )

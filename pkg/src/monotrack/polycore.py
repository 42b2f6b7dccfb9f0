"""Univariate real polynomial arithmetic and real-root machinery.

Coefficients are double-precision floats, stored highest degree first.
Root counting is exact in the Sturm sense: counts are computed from sign
variations of a numerically normalized Sturm sequence of the square-free
part, so decisions such as "no real root on a half-line" do not depend on
root refinement accuracy.  All tolerances are relative because coefficient
magnitudes in practice span many orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceFailure, DegenerateInput

#: relative threshold for trimming a vanishing leading coefficient
EPS_TRIM = 1e-13
#: relative |imag| threshold classifying a companion eigenvalue as real
TAU_REAL = 1e-8
#: relative boundary width: a root x >= -TAU_ROOT*scale counts as non-negative
TAU_ROOT = 1e-9
#: relative remainder-norm threshold that ends a numerical Euclid run
GCD_TOL = 1e-10
#: relative tolerance used when testing whether a chain factor vanishes at a root
MULT_TOL = 1e-6


def _trim(coeffs: Sequence[float], eps: float = 0.0) -> tuple[float, ...]:
    """Drop leading coefficients at or below eps * max|c|.

    Construction uses eps = 0 (exact zeros only): legitimate leading
    coefficients routinely sit 15 orders of magnitude below the largest
    coefficient in this domain, so magnitude trimming is reserved for the
    unit-normalized polynomials inside the Euclid/Sturm runs.
    """
    cs = [float(c) for c in coeffs]
    if not cs:
        return ()
    top = max(abs(c) for c in cs)
    if top == 0.0:
        return ()
    k = 0
    while k < len(cs) and abs(cs[k]) <= eps * top:
        k += 1
    return tuple(cs[k:])


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial; ``coeffs`` highest degree first, empty when zero."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float] = ()):
        object.__setattr__(self, "coeffs", _trim(tuple(coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> float:
        if self.is_zero:
            raise DegenerateInput("zero polynomial has no leading coefficient")
        return self.coeffs[0]

    def norm_inf(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def eval(self, x: float) -> float:
        """Horner evaluation."""
        acc = 0.0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def eval_complex(self, x: complex) -> complex:
        acc = 0.0 + 0.0j
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def eval_magnitude(self, x: float) -> float:
        """Upper bound sum |c_i| |x|^(deg-i); the natural scale of eval(x)."""
        acc = 0.0
        ax = abs(x)
        for c in self.coeffs:
            acc = acc * ax + abs(c)
        return acc

    def __call__(self, x: float) -> float:
        return self.eval(x)

    def derivative(self, k: int = 1) -> "Polynomial":
        """k-th formal derivative; differentiating past the degree gives zero."""
        if k < 0:
            raise DegenerateInput("derivative order must be >= 0")
        cs = list(self.coeffs)
        for _ in range(k):
            n = len(cs) - 1
            if n <= 0:
                return Polynomial()
            cs = [c * (n - i) for i, c in enumerate(cs[:-1])]
        return Polynomial(cs)

    def scaled(self, s: float) -> "Polynomial":
        return Polynomial(c * s for c in self.coeffs)

    def trimmed(self, eps: float = EPS_TRIM) -> "Polynomial":
        """Copy with leading coefficients below eps * max|c| removed."""
        return Polynomial(_trim(self.coeffs, eps))

    def monic(self) -> "Polynomial":
        return self.scaled(1.0 / self.leading)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        off = len(a) - len(b)
        for i, c in enumerate(b):
            out[off + i] += c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scaled(-1.0)

    def __neg__(self) -> "Polynomial":
        return self.scaled(-1.0)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial()
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def one() -> "Polynomial":
        return Polynomial((1.0,))


@dataclass(frozen=True)
class RootSet:
    """Roots of a real polynomial: real values and conjugate pairs.

    ``real_roots`` holds (value, multiplicity); ``complex_pairs`` holds
    (re, im, multiplicity) with im > 0, each entry standing for the pair
    re +/- im*i.
    """

    real_roots: tuple[tuple[float, int], ...] = ()
    complex_pairs: tuple[tuple[float, float, int], ...] = ()

    def __init__(self, real_roots=(), complex_pairs=()):
        rr = tuple((float(v), int(k)) for v, k in real_roots)
        cp = tuple((float(re), float(im), int(k)) for re, im, k in complex_pairs)
        for _, im, _k in cp:
            if not im > 0.0:
                raise DegenerateInput("complex pairs must have im > 0")
        for _, k in rr:
            if k < 1:
                raise DegenerateInput("multiplicities must be >= 1")
        for _, _, k in cp:
            if k < 1:
                raise DegenerateInput("multiplicities must be >= 1")
        object.__setattr__(self, "real_roots", rr)
        object.__setattr__(self, "complex_pairs", cp)

    def total_multiplicity(self) -> int:
        return sum(k for _, k in self.real_roots) + 2 * sum(
            k for _, _, k in self.complex_pairs
        )

    def values(self) -> list[complex]:
        """Every root, repeated per multiplicity, conjugates included."""
        out: list[complex] = []
        for v, k in self.real_roots:
            out.extend([complex(v, 0.0)] * k)
        for re, im, k in self.complex_pairs:
            out.extend([complex(re, im), complex(re, -im)] * k)
        return out

    def shifted(self, delta: float) -> "RootSet":
        """Every root translated by +delta along the real axis."""
        return RootSet(
            tuple((v + delta, k) for v, k in self.real_roots),
            tuple((re + delta, im, k) for re, im, k in self.complex_pairs),
        )

    def max_abs(self) -> float:
        out = 0.0
        for v, _ in self.real_roots:
            out = max(out, abs(v))
        for re, im, _ in self.complex_pairs:
            out = max(out, math.hypot(re, im))
        return out


def from_roots(roots: RootSet, leading: float) -> Polynomial:
    """Expand a root set into a polynomial with the given leading coefficient.

    Complex pairs expand to the real quadratic s^2 - 2*re*s + re^2 + im^2.
    """
    if leading == 0.0:
        raise DegenerateInput("leading coefficient must be nonzero")
    p = Polynomial((float(leading),))
    for v, k in roots.real_roots:
        lin = Polynomial((1.0, -v))
        for _ in range(k):
            p = p * lin
    for re, im, k in roots.complex_pairs:
        quad = Polynomial((1.0, -2.0 * re, re * re + im * im))
        for _ in range(k):
            p = p * quad
    return p


def _divmod_poly(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Synthetic division; remainder has degree < deg(den)."""
    if den.is_zero:
        raise DegenerateInput("division by zero polynomial")
    if num.degree < den.degree:
        return Polynomial(), num
    rem = list(num.coeffs)
    d = list(den.coeffs)
    lead = d[0]
    qlen = len(rem) - len(d) + 1
    quot = [0.0] * qlen
    for i in range(qlen):
        q = rem[i] / lead
        quot[i] = q
        if q != 0.0:
            for j in range(1, len(d)):
                rem[i + j] -= q * d[j]
    return Polynomial(quot), Polynomial(rem[qlen:])


def root_scale(p: Polynomial) -> float:
    """Geometric-mean magnitude of the nonzero roots, from coefficients.

    Working on p(w0*u) instead of p(s) keeps the Euclid and Sturm runs
    balanced when roots live far from magnitude one; trailing zero
    coefficients (roots at the origin) are excluded from the estimate.
    """
    if p.is_zero or p.degree == 0:
        return 1.0
    cs = list(p.coeffs)
    while cs and cs[-1] == 0.0:
        cs.pop()
    if len(cs) <= 1:
        return 1.0
    w0 = (abs(cs[-1]) / abs(cs[0])) ** (1.0 / (len(cs) - 1))
    if not (1e-150 < w0 < 1e150):
        return 1.0
    return w0


def _rescaled(p: Polynomial, w0: float) -> Polynomial:
    """p(w0*u) as a polynomial in u, normalized to unit max-norm."""
    d = p.degree
    out = [c * w0 ** (d - j) for j, c in enumerate(p.coeffs)]
    top = max(abs(c) for c in out)
    return Polynomial(c / top for c in out)


def _gcd_normalized(p: Polynomial, q: Polynomial) -> Polynomial:
    a = p.scaled(1.0 / p.norm_inf()).trimmed()
    b = q.scaled(1.0 / q.norm_inf()).trimmed()
    if a.degree < b.degree:
        a, b = b, a
    while True:
        if b.degree == 0:
            return Polynomial.one()
        _, r = _divmod_poly(a, b)
        if r.is_zero or r.norm_inf() <= GCD_TOL:
            return b.monic()
        a, b = b, r.scaled(1.0 / r.norm_inf()).trimmed()


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd by the Euclid remainder run with max-norm rescaling.

    A remainder whose norm falls below GCD_TOL (relative to the unit-norm
    operands that produced it) is treated as zero, which merges root
    clusters tighter than roughly that threshold.  Operands are frequency
    scaled to a shared geometric-mean root magnitude first.
    """
    if p.is_zero and q.is_zero:
        raise DegenerateInput("gcd of two zero polynomials")
    if p.is_zero:
        return q.monic()
    if q.is_zero:
        return p.monic()
    w0 = math.sqrt(root_scale(p) * root_scale(q))
    g = _gcd_normalized(_rescaled(p, w0), _rescaled(q, w0))
    # undo the substitution: g(u) monic in u becomes monic g(s/w0)*w0^deg
    return Polynomial(c * w0**j for j, c in enumerate(g.coeffs))


def _square_free_normalized(ph: Polynomial) -> Polynomial:
    if ph.degree <= 1:
        return ph
    g = _gcd_normalized(ph, ph.derivative())
    if g.degree == 0:
        return ph
    quot, _ = _divmod_poly(ph, g)
    return quot


def _gcd_chain_normalized(ph: Polynomial) -> list[Polynomial]:
    chain = [ph]
    while chain[-1].degree >= 1:
        g = _gcd_normalized(chain[-1], chain[-1].derivative())
        if g.degree == 0:
            break
        chain.append(g)
    return chain


def square_free_part(p: Polynomial) -> Polynomial:
    """p divided by gcd(p, p'); shares p's distinct roots, all simple."""
    if p.is_zero:
        raise DegenerateInput("square-free part of zero polynomial")
    if p.degree <= 1:
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p
    quot, _ = _divmod_poly(p, g)
    return quot


def gcd_chain(p: Polynomial) -> list[Polynomial]:
    """[p, gcd(p, p'), gcd(gcd, gcd'), ...] down to a constant.

    A root of multiplicity k in p is a root of exactly the first k chain
    entries, which is how multiplicities are recovered.
    """
    chain = [p]
    while chain[-1].degree >= 1:
        g = poly_gcd(chain[-1], chain[-1].derivative())
        if g.degree == 0:
            break
        chain.append(g)
    return chain


def cauchy_bound(p: Polynomial) -> float:
    """All roots have magnitude below 1 + max|c_i / c_0|."""
    lead = abs(p.leading)
    return 1.0 + max(abs(c) for c in p.coeffs) / lead


def _sturm_sequence(sf: Polynomial) -> list[Polynomial]:
    """Sturm sequence of a square-free polynomial, each entry unit-norm."""
    seq = [sf.scaled(1.0 / sf.norm_inf()).trimmed()]
    d = sf.derivative()
    if d.is_zero:
        return seq
    seq.append(d.scaled(1.0 / d.norm_inf()).trimmed())
    while seq[-1].degree > 0:
        _, r = _divmod_poly(seq[-2], seq[-1])
        if r.is_zero or r.norm_inf() <= GCD_TOL:
            break
        seq.append(r.scaled(-1.0 / r.norm_inf()).trimmed())
    return seq


def _sign_at(p: Polynomial, x: float) -> int:
    if x == math.inf:
        return 1 if p.leading > 0 else -1
    if x == -math.inf:
        s = 1 if p.leading > 0 else -1
        return s if p.degree % 2 == 0 else -s
    v = p.eval(x)
    # zero band = a safety factor over the Horner rounding-error bound
    # ~2*deg*ulp*sum|c_i||x|^i; anything inside is numerically sign-free
    tol = 16.0 * len(p.coeffs) * 2.220446049250313e-16 * p.eval_magnitude(x)
    if abs(v) <= tol:
        return 0
    return 1 if v > 0 else -1


def _variations(seq: list[Polynomial], x: float) -> int:
    signs = [s for s in (_sign_at(p, x) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p: Polynomial, a: float, b: float) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b].

    Endpoints may be -inf/+inf.  Counting runs on the square-free part, so
    a multiple root contributes one.
    """
    if p.is_zero:
        raise DegenerateInput("sturm_count of zero polynomial")
    if p.degree == 0:
        return 0
    if not a < b:
        return 0
    seq = _sturm_sequence(square_free_part(p))
    return max(_variations(seq, a) - _variations(seq, b), 0)


def _refine_root(
    sf: Polynomial, seq: list[Polynomial], lo: float, vlo: int, hi: float, vhi: int
) -> float:
    """Polish the single root of sf in (lo, hi].

    Variation-count bisection stays valid even when sf has the same sign at
    both endpoints (root at an endpoint within rounding), then Newton on the
    square-free polynomial finishes at simple-root accuracy.
    """
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        vmid = _variations(seq, mid)
        if vlo - vmid >= 1:
            hi, vhi = mid, vmid
        else:
            lo, vlo = mid, vmid
        if hi - lo <= 1e-9 * (1.0 + abs(mid)):
            break
    x = 0.5 * (lo + hi)
    # Newton on the square-free part finishes the job; the trust radius is
    # generous because the Sturm sign-tolerance band can park the bracket a
    # few ulps-e-12 away from the root.
    d = sf.derivative()
    trust = 1e-6 * (1.0 + abs(x))
    for _ in range(30):
        dv = d.eval(x)
        if dv == 0.0:
            break
        step = sf.eval(x) / dv
        if not abs(step) <= trust:
            break
        x -= step
        if abs(step) <= 4e-16 * (1.0 + abs(x)):
            break
    return x


def _isolate_real(sf: Polynomial, seq: list[Polynomial]) -> list[float]:
    """Distinct real roots of a square-free polynomial via Sturm bisection."""
    bound = cauchy_bound(sf)
    stack = [(-bound, _variations(seq, -bound), bound, _variations(seq, bound))]
    found: list[float] = []
    splits = 0
    while stack:
        lo, vlo, hi, vhi = stack.pop()
        count = vlo - vhi
        if count <= 0:
            continue
        if count == 1:
            found.append(_refine_root(sf, seq, lo, vlo, hi, vhi))
            continue
        mid = 0.5 * (lo + hi)
        splits += 1
        if mid == lo or mid == hi or splits > 20000:
            raise ConvergenceFailure(
                f"root isolation stalled on [{lo}, {hi}] holding {count} roots"
            )
        vmid = _variations(seq, mid)
        stack.append((lo, vlo, mid, vmid))
        stack.append((mid, vmid, hi, vhi))
    return sorted(found)


def _multiplicity(chain: list[Polynomial], z: complex) -> int:
    """Number of leading chain entries vanishing at z."""
    mult = 1
    for g in chain[1:]:
        val = abs(g.eval_complex(z))
        scale = g.eval_magnitude(abs(z))
        if val <= MULT_TOL * max(scale, 1e-300):
            mult += 1
        else:
            break
    return mult


def _polish_complex(sf: Polynomial, z: complex) -> complex:
    d = sf.derivative()
    for _ in range(4):
        dv = d.eval_complex(z)
        if dv == 0:
            break
        z = z - sf.eval_complex(z) / dv
    return z


def real_roots(p: Polynomial) -> RootSet:
    """Full root set of p with multiplicities.

    Distinct real roots are isolated by Sturm bisection on the square-free
    part and refined there, so originally multiple roots are recovered at
    simple-root accuracy.  The remaining distinct roots come from the
    companion-matrix eigenvalues of the square-free part and are paired as
    conjugates; a root is classified real when |im| <= TAU_REAL*(1+|re|).
    Multiplicities are read off the repeated-gcd chain.
    """
    if p.is_zero:
        raise DegenerateInput("real_roots of zero polynomial")
    if p.degree == 0:
        return RootSet()
    chain = gcd_chain(p)
    if len(chain) > 1:
        sf, _ = _divmod_poly(p, chain[1])
    else:
        sf = p
    seq = _sturm_sequence(sf)
    reals = _isolate_real(sf, seq)

    n_complex = sf.degree - len(reals)
    pairs: list[tuple[float, float]] = []
    if n_complex > 0:
        eig = np.roots(np.array(sf.coeffs))
        # drop the eigenvalues that model the Sturm-isolated real roots:
        # keep the n_complex ones farthest from the real axis (relative).
        order = sorted(eig, key=lambda z: abs(z.imag) / (1.0 + abs(z.real)))
        candidates = [z for z in order[len(reals):] if z.imag > 0]
        if 2 * len(candidates) != n_complex:
            raise ConvergenceFailure(
                "real/complex classification mismatch: "
                f"{len(reals)} real by Sturm, {n_complex} residual eigenvalues"
            )
        for z in candidates:
            zp = _polish_complex(sf, z)
            if zp.imag <= 0.0:
                zp = z  # polish crossed the axis; keep the eigenvalue
            pairs.append((zp.real, zp.imag))

    rr = tuple((v, _multiplicity(chain, complex(v, 0.0))) for v in reals)
    cp = tuple((re, im, _multiplicity(chain, complex(re, im))) for re, im in pairs)
    rs = RootSet(rr, cp)
    if rs.total_multiplicity() != p.degree:
        raise ConvergenceFailure(
            f"multiplicity recovery found {rs.total_multiplicity()} roots "
            f"for a degree-{p.degree} polynomial"
        )
    return rs


def nonneg_on_halfline(p: Polynomial) -> bool:
    """True iff p(t) >= 0 for every t in (0, +inf).

    Exact decision: the leading coefficient must be positive and every
    distinct root in (0, inf) must have even multiplicity (touch points
    are allowed, sign changes are not).
    """
    if p.is_zero:
        raise DegenerateInput("nonneg_on_halfline of zero polynomial")
    if p.leading < 0:
        return False
    if p.degree == 0:
        return True
    sf = square_free_part(p)
    bound = cauchy_bound(sf)
    left = TAU_ROOT * bound
    if sturm_count(sf, left, math.inf) == 0:
        return True
    chain = gcd_chain(p)
    seq = _sturm_sequence(sf)
    for r in _isolate_real(sf, seq):
        if r <= left:
            continue
        if _multiplicity(chain, complex(r, 0.0)) % 2 == 1:
            return False
    return True

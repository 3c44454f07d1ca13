"""Principal-branch arithmetic, log-scale reals, and fundamental-domain quadrature.

Everything downstream leans on three things defined here:

* principal powers w^k = exp(k Log w) with Arg w in (-pi, pi] (the +pi branch is
  chosen on the negative real axis);
* ``LogScaleReal``, a sign/log-magnitude pair so products like k^(-k/2) with k in
  the thousands never overflow or underflow;
* ``integrate_fd``, adaptive Gauss-Legendre quadrature over the standard
  fundamental domain with a certified tail model at the cusp.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, BudgetError

__all__ = [
    "principal_arg",
    "principal_log",
    "principal_pow",
    "principal_pow_array",
    "PrincipalComplex",
    "LogScaleReal",
    "stable_sum",
    "pmap",
    "ExpTail",
    "PolyTail",
    "BoundedTail",
    "FundamentalDomain",
    "integrate_fd",
]


def principal_arg(w) -> float:
    """Argument of w in (-pi, pi]; the negative real axis gets +pi."""
    w = complex(w)
    a = math.atan2(w.imag, w.real)
    # atan2(-0.0, x<0) returns -pi; the principal branch closes at +pi instead.
    if a == -math.pi:
        return math.pi
    return a

def principal_log(w) -> complex:
    """Log w = ln|w| + i Arg w on the principal branch."""
    w = complex(w)
    if w == 0:
        raise ValueError("principal_log(0) is undefined")
    return complex(math.log(abs(w)), principal_arg(w))

def principal_pow(w, k) -> complex:
    """w^k = exp(k Log w) for real k; 0^k is 0 for k > 0 and an error otherwise."""
    w = complex(w)
    if w == 0:
        if k > 0:
            return 0j
        raise ValueError("0 cannot be raised to a non-positive power")
    lg = principal_log(w)
    return _cexp(k * lg.real, k * lg.imag)

def _cexp(log_abs: float, phase: float) -> complex:
    try:
        r = math.exp(log_abs)
    except OverflowError:
        r = math.inf
    return complex(r * math.cos(phase), r * math.sin(phase))

def principal_pow_array(w, k):
    """Vectorized principal power for complex numpy arrays."""
    w = np.asarray(w, dtype=complex)
    ang = np.angle(w)
    # np.angle maps (x<0, -0.0j) to -pi; fold onto the +pi branch.
    ang = np.where(ang == -np.pi, np.pi, ang)
    mag = np.abs(w)
    if np.any(mag == 0):
        raise ValueError("principal power of 0 in array input")
    return np.exp(k * (np.log(mag) + 1j * ang))


@dataclass(frozen=True)
class PrincipalComplex:
    """A nonzero complex value bundled with its principal log.

    ``pow(k)`` stays exact about the branch: the result's log is k times the
    stored log, which in general differs from the principal log of the value.
    """

    value: complex
    log_abs: float
    arg: float

    @classmethod
    def of(cls, w) -> "PrincipalComplex":
        lg = principal_log(w)
        return cls(complex(w), lg.real, lg.imag)

    def pow(self, k) -> "PrincipalComplex":
        la, ar = k * self.log_abs, k * self.arg
        return PrincipalComplex(_cexp(la, ar), la, ar)

    def __mul__(self, other: "PrincipalComplex") -> "PrincipalComplex":
        return PrincipalComplex(
            self.value * other.value,
            self.log_abs + other.log_abs,
            self.arg + other.arg,
        )


@dataclass(frozen=True)
class LogScaleReal:
    """A real number stored as (sign, log|x|); immune to over/underflow.

    sign is -1, 0, or 1; log_abs is -inf when sign is 0.
    """

    sign: int
    log_abs: float

    @classmethod
    def from_float(cls, x: float) -> "LogScaleReal":
        x = float(x)
        if x == 0.0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log_abs: float, sign: int = 1) -> "LogScaleReal":
        if sign == 0:
            return cls(0, -math.inf)
        return cls(1 if sign > 0 else -1, float(log_abs))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            r = math.exp(self.log_abs)
        except OverflowError:
            r = math.inf
        return self.sign * r

    def __mul__(self, other) -> "LogScaleReal":
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogScaleReal(0, -math.inf)
        return LogScaleReal(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogScaleReal":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogScaleReal division by zero")
        if self.sign == 0:
            return self
        return LogScaleReal(self.sign * other.sign, self.log_abs - other.log_abs)

    def __pow__(self, k) -> "LogScaleReal":
        if self.sign == 0:
            if k > 0:
                return self
            raise ValueError("0 cannot be raised to a non-positive power")
        if self.sign < 0:
            if k != int(k):
                raise ValueError("negative base needs an integer exponent")
            sign = -1 if int(k) % 2 else 1
        else:
            sign = 1
        return LogScaleReal(sign, k * self.log_abs)

    def __neg__(self) -> "LogScaleReal":
        return LogScaleReal(-self.sign, self.log_abs)

    def __abs__(self) -> "LogScaleReal":
        return LogScaleReal(abs(self.sign), self.log_abs)

    def __add__(self, other) -> "LogScaleReal":
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.log_abs >= other.log_abs:
            big, small = self, other
        else:
            big, small = other, self
        r = small.log_abs - big.log_abs  # <= 0
        if big.sign == small.sign:
            return LogScaleReal(big.sign, big.log_abs + math.log1p(math.exp(r)))
        if r == 0.0:
            return LogScaleReal(0, -math.inf)
        return LogScaleReal(big.sign, big.log_abs + math.log1p(-math.exp(r)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def _key(self):
        # Orders by real value: split on sign, then log magnitude.
        return (self.sign, self.sign * self.log_abs if self.sign else 0.0)

    def __lt__(self, other):
        return self._key() < _coerce(other)._key()

    def __le__(self, other):
        return self._key() <= _coerce(other)._key()

    @classmethod
    def sum(cls, values) -> "LogScaleReal":
        """Signed log-sum-exp reduction, scaled by the largest magnitude."""
        vals = [_coerce(v) for v in values]
        vals = [v for v in vals if v.sign != 0]
        if not vals:
            return cls(0, -math.inf)
        top = max(v.log_abs for v in vals)
        if top == math.inf:
            raise ValueError("cannot reduce infinite log-scale values")
        acc = math.fsum(v.sign * math.exp(v.log_abs - top) for v in vals)
        if acc == 0.0:
            return cls(0, -math.inf)
        return cls(1 if acc > 0 else -1, top + math.log(abs(acc)))


def _coerce(x) -> LogScaleReal:
    if isinstance(x, LogScaleReal):
        return x
    return LogScaleReal.from_float(x)


def stable_sum(values) -> float:
    """Exactly-rounded float sum; the result does not depend on ordering."""
    return math.fsum(values)

def pmap(fn, items, workers: int = 1) -> list:
    """Order-preserving map, optionally over a thread pool.

    Results are assembled in item order regardless of completion order, so the
    output is identical for any worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Quadrature over the standard fundamental domain.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpTail:
    """Declared decay |h(x+iy)| <~ y^degree e^(-rate y) as y grows."""

    rate: float
    degree: float = 0.0

@dataclass(frozen=True)
class PolyTail:
    """Declared decay |h(x+iy)| <~ y^(-degree); degree must exceed 1."""

    degree: float

@dataclass(frozen=True)
class BoundedTail:
    """Only |h| <= bound is known above the split height."""

    bound: float

@dataclass(frozen=True)
class FundamentalDomain:
    """The region |x| <= 1/2, x^2 + y^2 >= 1 with measure dx dy / y^2.

    ``tail`` declares how the integrand behaves as y -> infinity so the
    quadrature can certify a truncation height.
    """

    tail: ExpTail | PolyTail | BoundedTail
    x_lo: float = -0.5
    x_hi: float = 0.5

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo


@lru_cache(maxsize=None)
def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w

def _cell_nodes(x0, x1, u0, u1, n):
    gx, wx = _gl(n)
    xm, xr = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    um, ur = 0.5 * (u0 + u1), 0.5 * (u1 - u0)
    xs = xm + xr * gx
    us = um + ur * gx
    wts = np.outer(wx, wx) * (xr * ur)
    return xs, us, wts

class _Region:
    """Maps quadrature parameters (x, u) in a rectangle to points of the domain."""

    def points(self, xs, us):
        raise NotImplementedError

class _StripRegion(_Region):
    def __init__(self, y0, y1):
        self.y0, self.y1 = y0, y1

    def points(self, xs, us):
        x = np.broadcast_to(xs[None, :], (len(us), len(xs)))
        y = self.y0 + us[:, None] * (self.y1 - self.y0) + 0.0 * x
        jac = np.full_like(y, self.y1 - self.y0)
        return x, y, jac

class _CurveRegion(_Region):
    """Between the unit-circle boundary y = sqrt(1-x^2) and the line y = y_top."""

    def __init__(self, y_top=1.0):
        self.y_top = y_top

    def points(self, xs, us):
        g = np.sqrt(np.maximum(0.0, 1.0 - xs * xs))
        span = self.y_top - g
        x = np.broadcast_to(xs[None, :], (len(us), len(xs))).copy()
        y = g[None, :] + us[:, None] * span[None, :]
        jac = np.broadcast_to(span[None, :], y.shape).copy()
        return x, y, jac


def _eval_cell(integrand, region, cell, n):
    x0, x1, u0, u1 = cell
    xs, us, wts = _cell_nodes(x0, x1, u0, u1, n)
    x, y, jac = region.points(xs, us)
    vals = integrand(x + 1j * y)
    vals = np.asarray(vals)
    return np.sum(vals * jac * wts / (y * y))

def _tail_height(integrand, domain, tol):
    """Smallest power-of-two height whose tail bound is certified below tol."""
    tail = domain.tail
    width = domain.width
    xs = np.linspace(domain.x_lo, domain.x_hi, 65)
    y = 2.0
    for _ in range(64):
        if isinstance(tail, BoundedTail):
            bound = width * tail.bound / y
        elif isinstance(tail, PolyTail):
            if tail.degree <= 1:
                raise ValueError("PolyTail degree must exceed 1")
            m = float(np.max(np.abs(integrand(xs + 1j * y))))
            bound = 1.5 * m * width / (y * (tail.degree + 1))
        else:
            # integral of M (y'/y)^p e^{-r(y'-y)} / y'^2 over y' >= y, with
            # u^{p-2} <= e^{(p-2)(u-1)} for u >= 1 when p > 2.
            slack = tail.rate * y - max(0.0, tail.degree - 2.0)
            if slack > 0.5:
                m = float(np.max(np.abs(integrand(xs + 1j * y))))
                bound = 1.5 * m * width / (y * slack)
            else:
                bound = math.inf
        if bound <= tol:
            return y, bound
        y *= 2.0
    raise AccuracyError("could not certify a cusp tail height", error_bound=bound)

def integrate_fd(integrand, domain: FundamentalDomain, tol: float = 1e-10,
                 max_cells: int = 40000) -> float | complex:
    """Integrate over the fundamental domain against the hyperbolic measure.

    ``integrand`` receives a complex numpy array and must return values of the
    same shape. The result carries a certified absolute error below ``tol``:
    the declared tail model bounds the cusp region and an adaptive 7x7/5x5
    Gauss-Legendre pair bounds the compact part. Raises AccuracyError if the
    cell budget runs out first.
    """
    y_top, tail_bound = _tail_height(integrand, domain, 0.5 * tol)
    budget = 0.5 * tol

    regions = [(_CurveRegion(1.0), (domain.x_lo, domain.x_hi, 0.0, 1.0))]
    y = 1.0
    while y < y_top:
        regions.append((_StripRegion(y, 2 * y), (domain.x_lo, domain.x_hi, 0.0, 1.0)))
        y *= 2.0

    heap = []
    counter = 0
    complex_mode = False
    total_cells = 0
    err_total = 0.0

    def push(region, cell):
        nonlocal counter, complex_mode, total_cells, err_total
        v7 = _eval_cell(integrand, region, cell, 7)
        v5 = _eval_cell(integrand, region, cell, 5)
        if isinstance(v7, complex) or np.iscomplexobj(v7):
            complex_mode = True
        err = abs(v7 - v5)
        heapq.heappush(heap, (-err, counter, cell, region, complex(v7)))
        counter += 1
        total_cells += 1
        err_total += err

    for region, cell in regions:
        push(region, cell)

    refinements = 0
    while err_total > budget:
        # Incremental err_total drifts; refresh it exactly now and then.
        if refinements % 256 == 0:
            err_total = -math.fsum(item[0] for item in heap)
            if err_total <= budget:
                break
        if total_cells >= max_cells:
            est = complex(math.fsum(it[4].real for it in heap),
                          math.fsum(it[4].imag for it in heap))
            raise AccuracyError(
                "quadrature cell budget exhausted",
                estimate=est if complex_mode else est.real,
                error_bound=err_total + tail_bound,
            )
        neg_err, _, cell, region, _ = heapq.heappop(heap)
        if -neg_err == 0.0:
            raise BudgetError("quadrature stalled with zero error estimates")
        err_total += neg_err
        x0, x1, u0, u1 = cell
        xm, um = 0.5 * (x0 + x1), 0.5 * (u0 + u1)
        for sub in ((x0, xm, u0, um), (xm, x1, u0, um),
                    (x0, xm, um, u1), (xm, x1, um, u1)):
            push(region, sub)
        refinements += 1

    re = math.fsum(it[4].real for it in heap)
    im = math.fsum(it[4].imag for it in heap)
    return complex(re, im) if complex_mode else re

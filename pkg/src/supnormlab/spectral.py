"""Generalized Kloosterman sums, Poincare-series coefficients, and the
orthonormal-basis coefficient square sum.

Conventions that every routine here shares: the sum index c is the positive
lower-left entry of a representative matrix, representatives are normalized
to that positive entry (the minus-identity ambiguity is absorbed by the
multiplier consistency relations), and i^(-k) means exp(-i pi k / 2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_series, series_majorant_log
from .errors import BudgetError, ConsistencyError
from .modgroup import (GroupElement, IDENTITY, Subgroup, _complete_row, u_pow)
from .multiplier import MultiplierSystem, cusp_parameter, sigma
from .numerics import LogScaleReal, principal_pow, principal_pow_array

__all__ = [
    "KloostermanSpec", "PoincareCoefficient", "SquareSumValue", "kloosterman",
    "classical_kloosterman_array", "delta_tau", "poincare_coeff",
    "coeff_square_sum", "poincare_eval", "sl2_tail_bound",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KloostermanSpec:
    """One generalized Kloosterman sum: group, multiplier, scaling, indices."""

    group: Subgroup
    multiplier: MultiplierSystem
    tau: GroupElement
    r: int
    m: int
    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("modulus c must be a positive integer")


def _phase_i_minus_k(k: float) -> complex:
    return cmath.exp(-0.5j * math.pi * k)


def kloosterman(spec: KloostermanSpec) -> complex:
    """Sum over double-coset representatives with lower-left entry c.

    Representatives are enumerated as a in [0, n' c), d in [0, n_I c) with
    ad = 1 mod c, completed to a matrix by b = (ad - 1)/c, and filtered by
    membership of tau^-1 gamma in the group. Empty enumerations return 0.
    """
    grp, sys, tau, c = spec.group, spec.multiplier, spec.tau, spec.c
    k = sys.weight
    tau_inv = tau.inv()
    cp_i = cusp_parameter(sys, IDENTITY)
    cp_p = cusp_parameter(sys, tau_inv)
    n_i, kap_i = cp_i.width, cp_i.kappa
    n_p, kap_p = cp_p.width, cp_p.kappa
    sig_tt = sigma(tau, tau_inv, k)
    identity_scaling = tau == IDENTITY

    total = 0.0 + 0.0j
    for d0 in range(c):
        if math.gcd(d0, c) != 1:
            continue
        a0 = pow(d0, -1, c)
        for ja in range(n_p):
            a = a0 + ja * c
            for jd in range(n_i):
                d = d0 + jd * c
                g = GroupElement(a, (a * d - 1) // c, c, d)
                h = tau_inv @ g
                if not grp.contains(h):
                    continue
                ph = cmath.exp(2j * math.pi / c
                               * ((spec.m + kap_p) * a / n_p
                                  + (spec.r + kap_i) * d / n_i))
                if identity_scaling:
                    total += ph / sys.upsilon(h)
                else:
                    total += ph * sigma(tau_inv, g, k) / (sys.upsilon(h) * sig_tt)
    return total


def _modpow_vec(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    # uint64 is safe: mod <= 1e9 would overflow squares, but callers stay small
    result = np.ones_like(base)
    b = base % mod
    while exp:
        if exp & 1:
            result = (result * b) % mod
        b = (b * b) % mod
        exp >>= 1
    return result


def _totients(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def classical_kloosterman_array(r: int, m: int, c_max: int) -> np.ndarray:
    """S(m, r; c) = sum over units d mod c of e((m d^-1 + r d)/c), c <= c_max.

    Inverses come from d^(phi(c)-1) mod c, vectorized per modulus. The sums
    are real: d and c - d contribute conjugate terms.
    """
    if c_max > 10 ** 6:
        raise ValueError("modulus range too large for the uint64 fast path")
    out = np.zeros(c_max + 1)
    phi = _totients(c_max)
    for c in range(1, c_max + 1):
        if c == 1:
            out[1] = 1.0
            continue
        d = np.arange(1, c, dtype=np.uint64)
        d = d[np.gcd(d, c) == 1]
        dbar = _modpow_vec(d, int(phi[c]) - 1, c)
        ang = (_TWO_PI / c) * (m * dbar.astype(np.float64)
                               + r * d.astype(np.float64))
        out[c] = float(np.cos(ang).sum())
    return out


def delta_tau(group: Subgroup, sys: MultiplierSystem, tau: GroupElement,
              m: int) -> complex:
    """Leading-term coefficient of the Poincare expansion; 0 when the cusp
    tau^-1(infinity) is not the infinite cusp of the group."""
    cp_i = cusp_parameter(sys, IDENTITY)
    n_i, kap_i = cp_i.width, cp_i.kappa
    tau_inv = tau.inv()
    for s in range(n_i * group.index + 1):
        g = tau_inv @ u_pow(s)
        if group.contains(g):
            num = cmath.exp(2j * math.pi * s * (m + kap_i) / n_i)
            return num / (sys.upsilon(g) * sigma(tau, tau_inv, sys.weight))
    return 0.0 + 0.0j


@dataclass(frozen=True)
class PoincareCoefficient:
    value: complex
    case: str
    truncation: int
    tail_bound: float


def _sum_tail_log(k: float, n_p: int, a_over: float, c_max: int) -> float:
    """log of the c > c_max remainder for sums n_p |J_(k-1)(a_over/c)|."""
    lm = series_majorant_log(k - 1.0, a_over / c_max)
    return math.log(n_p) + lm + math.log(c_max) - math.log(k - 2.0)


def poincare_coeff(group: Subgroup, sys: MultiplierSystem, tau: GroupElement,
                   m: int, r: int, c_max: int = 10 ** 4) -> PoincareCoefficient:
    """Fourier coefficient a(r, m; tau), c-sum truncated at c_max.

    The branch follows the sign of m + kappa at the cusp tau^-1(infinity):
    a power-law kernel at zero, the J-Bessel kernel for positive values, the
    I-Bessel kernel for negative ones. The reported tail bound combines the
    counting estimate |W| <= n' n_I c with the kernel's series majorant.
    """
    k = sys.weight
    if k <= 2:
        raise ValueError("coefficient formula needs weight above 2")
    if c_max < 1:
        raise ValueError("c_max must be at least 1")
    tau_inv = tau.inv()
    cp_i = cusp_parameter(sys, IDENTITY)
    cp_p = cusp_parameter(sys, tau_inv)
    n_i, kap_i = cp_i.width, cp_i.kappa
    n_p, kap_p = cp_p.width, cp_p.kappa
    if r + kap_i <= 0:
        raise ValueError("expansion index r + kappa_I must be positive")
    mval = m + kap_p
    phase = _phase_i_minus_k(k)

    def w_at(c):
        return kloosterman(KloostermanSpec(group, sys, tau, r, m, c))

    if mval == 0.0:
        mag = LogScaleReal.from_log(k * math.log(_TWO_PI) - math.lgamma(k)
                                    + (k - 1.0) * math.log(r + kap_i))
        acc = 0.0 + 0.0j
        for c in range(1, c_max + 1):
            acc += w_at(c) * math.exp(-k * math.log(n_i * c))
        value = mag.to_float() * phase * acc
        tail = (mag * LogScaleReal.from_log(
            math.log(n_p) + (1.0 - k) * math.log(n_i)
            + (2.0 - k) * math.log(c_max) - math.log(k - 2.0))).to_float()
        return PoincareCoefficient(value, "KappaZero", c_max, tail)

    a_over = 4.0 * math.pi * math.sqrt((r + kap_i) * abs(mval) / (n_i * n_p))
    log_ratio = (0.5 * (k - 1.0)
                 * (math.log(n_p) - math.log(n_i)
                    + math.log(r + kap_i) - math.log(abs(mval))))
    mag = LogScaleReal.from_log(math.log(_TWO_PI) + log_ratio)
    acc = 0.0 + 0.0j
    if mval > 0.0:
        for c in range(1, c_max + 1):
            acc += w_at(c) / (n_i * c) * bessel_j(k - 1.0, a_over / c)
        case = "Positive"
    else:
        for c in range(1, c_max + 1):
            x = a_over / c
            kern = bessel_series("I", k - 1.0, x, terms=max(80, int(2 * x)))
            acc += w_at(c) / (n_i * c) * kern.value
        case = "Negative"
    value = mag.to_float() * phase * acc
    tail = (mag * LogScaleReal.from_log(
        _sum_tail_log(k, n_p, a_over, c_max) - math.log(n_i))).to_float()
    return PoincareCoefficient(value, case, c_max, tail)


class SquareSumValue(float):
    """A float carrying the truncation metadata of the c-sum behind it."""

    def __new__(cls, value: float, tail_bound: float, c_max: int):
        obj = super().__new__(cls, value)
        obj.tail_bound = float(tail_bound)
        obj.c_max = int(c_max)
        return obj


def coeff_square_sum(group: Subgroup, sys: MultiplierSystem,
                     tau: GroupElement = IDENTITY, m: int = 1,
                     c_max: int = 10 ** 4) -> SquareSumValue:
    """Sum of |m-th coefficients|^2 over an orthonormal basis, at the cusp
    tau^-1(infinity).

    Evaluates the closed form: the measure prefactor times one plus a
    Kloosterman-Bessel c-sum over the conjugated group. The conjugated cusp
    data must reproduce the original (checked), the result must be real and
    nonnegative within the reported tail (checked).
    """
    k = sys.weight
    if k <= 2:
        raise ValueError("square-sum formula needs weight above 2")
    tau_inv = tau.inv()
    cp_p = cusp_parameter(sys, tau_inv)
    n_p, kap_p = cp_p.width, cp_p.kappa
    conj = sys.conjugate(tau_inv)
    cp_c = cusp_parameter(conj, IDENTITY)
    if cp_c.width != n_p or abs(cp_c.kappa - kap_p) > 1e-10:
        raise ConsistencyError(
            "conjugated cusp data (width %s, kappa %.3g) disagrees with the "
            "original (width %s, kappa %.3g)"
            % (cp_c.width, cp_c.kappa, n_p, kap_p))
    mval = m + kap_p
    if mval < 0:
        raise ValueError("index must satisfy m + kappa >= 0")
    if mval == 0.0:
        return SquareSumValue(0.0, 0.0, c_max)

    a_over = 4.0 * math.pi * mval / n_p
    if conj.kind == "trivial" and conj.group.kind == "full":
        w_arr = classical_kloosterman_array(m, m, c_max)
        acc = 0.0 + 0.0j
        for c in range(1, c_max + 1):
            acc += w_arr[c] / (n_p * c) * bessel_j(k - 1.0, a_over / c)
    else:
        acc = 0.0 + 0.0j
        for c in range(1, c_max + 1):
            w = kloosterman(KloostermanSpec(conj.group, conj, IDENTITY, m, m, c))
            acc += w / (n_p * c) * bessel_j(k - 1.0, a_over / c)

    inner = 1.0 + _TWO_PI * _phase_i_minus_k(k) * acc
    pref = LogScaleReal.from_log(math.log(group.mu)
                                 + (k - 1.0) * math.log(4.0 * math.pi * mval)
                                 - k * math.log(n_p) - math.lgamma(k - 1.0))
    tail_inner = math.exp(math.log(_TWO_PI) + _sum_tail_log(k, n_p, a_over, c_max))
    tail_bound = (pref * LogScaleReal.from_float(tail_inner)).to_float()
    scale = pref.to_float()
    if abs(inner.imag) > tail_inner + 1e-8 * (1.0 + abs(inner)):
        raise ConsistencyError(
            "square sum came out non-real (imaginary part %.3g, tail %.3g); "
            "multiplier or Kloosterman conventions are inconsistent"
            % (inner.imag, tail_inner))
    value = scale * inner.real
    if value < -(tail_bound + 1e-9 + 1e-12 * scale):
        raise ConsistencyError("square sum negative beyond its tail bound")
    return SquareSumValue(value, tail_bound, c_max)


def sl2_tail_bound(radius: float, z: complex, k: float) -> float:
    """Upper bound for sums of |cz+d|^(-k) over integer rows beyond radius.

    Valid for radius >= 1 + |z| (cell-diameter argument) and k > 2; counts
    every nonzero integer pair, so it dominates any subgroup or coset sum.
    """
    if k <= 2:
        raise ValueError("lattice tail needs k > 2")
    z = complex(z)
    if radius < 1.0 + abs(z):
        raise ValueError("radius below the validity floor 1 + |z|")
    geo = 1.0 / (1.0 - 2.0 ** (2.0 - k))
    return 60.0 * radius ** (2.0 - k) * geo / z.imag


def _coset_rows(group: Subgroup, tau: GroupElement, n_p: int, radius: float,
                y_min: float, x_lo: float, x_hi: float):
    """One representative tau*gamma per coset row class inside the radius.

    Rows (c, d) are classes of the bottom row of tau*gamma up to sign; the
    U-power completion is searched over a width period. z-independent, so
    callers reuse the list across evaluation points.
    """
    tau_inv = tau.inv()
    reps = []
    c_top = int(math.floor(radius / y_min))
    for c in range(0, c_top + 1):
        if c == 0:
            d_range = [1]
        else:
            # |cx + d| <= radius for some x in the window
            d_lo = int(math.ceil(-c * x_hi - radius))
            d_hi = int(math.floor(-c * x_lo + radius))
            d_range = [d for d in range(d_lo, d_hi + 1) if math.gcd(c, d) == 1]
        for d in d_range:
            g0 = _complete_row(c, d)
            for t in range(n_p):
                g = u_pow(t) @ g0
                if group.contains(tau_inv @ g):
                    reps.append(g)
                    break
    return reps


def poincare_eval(group: Subgroup, sys: MultiplierSystem, tau: GroupElement,
                  m: int, z, tol: float = 1e-9):
    """Direct summation of the Poincare series at one or many points.

    Truncates the coset sum at a row radius chosen so the dropped terms are
    below tol (lattice tail bound; needs m + kappa >= 0 so the exponential
    factor never exceeds one). Accepts a scalar or an array of points.
    """
    k = sys.weight
    if k <= 2:
        raise ValueError("series needs weight above 2")
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    y_min = float(np.min(z_arr.imag))
    if y_min <= 0:
        raise ValueError("points must lie in the upper half plane")
    tau_inv = tau.inv()
    cp_p = cusp_parameter(sys, tau_inv)
    n_p, kap_p = cp_p.width, cp_p.kappa
    mval = m + kap_p
    if mval < 0:
        raise ValueError("tail control needs m + kappa >= 0")

    geo = 1.0 / (1.0 - 2.0 ** (2.0 - k))
    r_max = float(np.max(np.abs(z_arr)))
    radius = max(2.0, 1.0 + r_max, (60.0 * geo / (y_min * tol)) ** (1.0 / (k - 2.0)))
    x_lo = float(np.min(z_arr.real))
    x_hi = float(np.max(z_arr.real))
    # row count grows like radius^2 / y; refuse before allocating anything
    est_rows = (radius / y_min + 1.0) * (x_hi - x_lo + 2.0 * radius + 1.0)
    if est_rows > 2e6:
        raise BudgetError(
            "direct summation would need ~%.2g lattice rows (radius %.3g); "
            "the weight is too close to 2 for this tolerance" % (est_rows, radius))
    reps = _coset_rows(group, tau, n_p, radius, y_min, x_lo, x_hi)

    gammas = [tau_inv @ g for g in reps]
    ups = np.array([sys.upsilon(gm) for gm in gammas])
    ga = np.array([gm.a for gm in gammas], dtype=float)
    gb = np.array([gm.b for gm in gammas], dtype=float)
    gc = np.array([gm.c for gm in gammas], dtype=float)
    gd = np.array([gm.d for gm in gammas], dtype=float)

    z_flat = z_arr.reshape(-1)
    out = np.zeros(z_flat.shape, dtype=complex)
    for i, zi in enumerate(z_flat):
        jg = gc * zi + gd
        gz = (ga * zi + gb) / jg
        w = tau.act(gz)
        num = np.exp(2j * math.pi * mval * w / n_p)
        den = (principal_pow_array(np.asarray(tau.j(gz), dtype=complex), k)
               * ups * principal_pow_array(jg.astype(complex), k))
        out[i] = np.sum(num / den)
    if np.isscalar(z) or np.asarray(z).shape == ():
        return complex(out[0])
    return out.reshape(np.asarray(z).shape)


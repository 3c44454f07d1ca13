"""Cusp forms as explicit Fourier expansions.

Coefficient arrays are built in exact integer arithmetic (pentagonal-number
recurrence for the eta product, divisor-power sieves for the weight 4 and 6
Eisenstein series, truncated integer convolutions for products and powers).
Evaluation is a vectorized polynomial in q with a certified truncation
check, and Petersson norms integrate |f|^2 y^k over the standard fundamental
domain, one coset translate at a time.

The norm route reduces sample points into the standard fundamental domain,
so it needs forms that transform under the full modular group; every
constructor here builds such forms. The subgroup on a form then only sets
the measure normalization and the translate list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, ConsistencyError
from .modgroup import IDENTITY, Subgroup, parse_group, reduce_to_fd
from .multiplier import MultiplierSystem, cusp_parameter
from .numerics import ExpTail, FundamentalDomain, PolyTail, integrate_fd

__all__ = [
    "CuspForm", "delta_coeffs", "eisenstein_coeffs", "eta_product_coeffs",
    "eta_power_coeffs", "delta_form", "eta_power_form", "dim_cusp_forms",
    "monomial_basis", "eval_form", "inner_product", "petersson_norm",
    "orthonormal_basis",
]


# ----------------------------------------------------------------------
# integer q-series builders


@lru_cache(maxsize=None)
def eta_product_coeffs(terms: int) -> tuple:
    """prod_{n>=1} (1 - q^n) up to q^(terms-1); entries are 0 or +-1."""
    out = [0] * terms
    out[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 < terms:
        sign = -1 if k % 2 else 1
        for idx in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if idx < terms:
                out[idx] += sign
        k += 1
    return tuple(out)


def _poly_mul(a, b, terms: int) -> tuple:
    out = [0] * terms
    for i, ai in enumerate(a):
        if ai == 0 or i >= terms:
            continue
        top = min(len(b), terms - i)
        for j in range(top):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return tuple(out)


def _poly_pow(a, e: int, terms: int) -> tuple:
    result = (1,) + (0,) * (terms - 1)
    base = tuple(a[:terms])
    while e > 0:
        if e % 2:
            result = _poly_mul(result, base, terms)
        base = _poly_mul(base, base, terms)
        e //= 2
    return result


@lru_cache(maxsize=None)
def eta_power_coeffs(power: int, terms: int) -> tuple:
    """Coefficients of prod (1-q^n)^power, exact integers."""
    if power < 0:
        raise ValueError("power must be nonnegative")
    return _poly_pow(eta_product_coeffs(terms), power, terms)


@lru_cache(maxsize=None)
def delta_coeffs(terms: int) -> tuple:
    """q prod (1-q^n)^24 as an array indexed by the power of q."""
    c = eta_power_coeffs(24, terms)
    return (0,) + c[: terms - 1]


@lru_cache(maxsize=None)
def eisenstein_coeffs(k: int, terms: int) -> tuple:
    """Weight 4 or 6 Eisenstein series, normalized to constant term 1."""
    if k not in (4, 6):
        raise ValueError("only weights 4 and 6 are built in")
    sig = [0] * terms
    for d in range(1, terms):
        step = d ** (k - 1)
        for m in range(d, terms, d):
            sig[m] += step
    factor = 240 if k == 4 else -504
    return (1,) + tuple(factor * sig[m] for m in range(1, terms))


def dim_cusp_forms(k: int) -> int:
    """Dimension of the cusp space of even integer weight on the full group."""
    if k % 2 or k < 0:
        return 0
    d = k // 12 - (1 if k % 12 == 2 else 0)
    return max(0, d)


# ----------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class CuspForm:
    """f(z) = sum_j coeffs[j] e(2 pi i (m0 + j + kappa) z / width).

    ``full_modular`` records that f transforms under all of SL2(Z) with a
    consistent multiplier (true for everything built here); the norm route
    relies on it when it folds sample points back into the fundamental
    domain.
    """

    group: Subgroup
    system: MultiplierSystem
    weight: float
    kappa: float
    width: int
    m0: int
    coeffs: tuple
    label: str = ""
    full_modular: bool = True


def _check_infinity_data(form: CuspForm) -> None:
    cp = cusp_parameter(form.system, IDENTITY)
    if cp.width != form.width or abs(cp.kappa - form.kappa) > 1e-12:
        raise ConsistencyError(
            "expansion data (width %s, kappa %s) disagrees with the multiplier "
            "system (width %s, kappa %s)"
            % (form.width, form.kappa, cp.width, cp.kappa))


def _spread(coeffs_q, m0_q: int, width: int):
    """Reindex a q-expansion to a width-n cusp: exponent m becomes n m."""
    if width == 1:
        return coeffs_q, m0_q
    out = []
    for j, c in enumerate(coeffs_q):
        out.append(c)
        if j < len(coeffs_q) - 1:
            out.extend([0] * (width - 1))
    return tuple(out), m0_q * width


def delta_form(group: str | Subgroup = "full", terms: int = 120) -> CuspForm:
    """The discriminant form, weight 12, viewed over the given subgroup."""
    grp = parse_group(group) if isinstance(group, str) else group
    sys = MultiplierSystem.trivial(12, grp)
    width = grp.width_of_infinity
    base = delta_coeffs(terms)
    coeffs, m0 = _spread(tuple(base[1:]), 1, width)
    form = CuspForm(grp, sys, 12.0, 0.0, width, m0, coeffs, label="delta")
    _check_infinity_data(form)
    return form


def eta_power_form(power: int, terms: int = 120) -> CuspForm:
    """The eta product with the given number of factors, weight power/2."""
    if power <= 0:
        raise ValueError("power must be positive")
    grp = parse_group("full")
    sys = MultiplierSystem.eta_power(power)
    kappa = Fraction(power, 24)
    m0 = kappa.numerator // kappa.denominator
    frac = kappa - m0
    form = CuspForm(grp, sys, power / 2.0, float(frac), 1, m0,
                    eta_power_coeffs(power, terms), label="eta^%d" % power)
    _check_infinity_data(form)
    return form


def monomial_basis(k: int, terms: int = 140) -> list:
    """Integer-coefficient spanning set of the weight-k cusp space."""
    dim = dim_cusp_forms(k)
    grp = parse_group("full")
    out = []
    if dim == 0:
        return out
    sys = MultiplierSystem.trivial(k, grp)
    delta = delta_coeffs(terms)
    for j in range(1, dim + 1):
        rem = k - 12 * j
        if rem % 4 == 0:
            b, c = rem // 4, 0
        else:
            b, c = (rem - 6) // 4, 1
        poly = _poly_pow(delta, j, terms)
        if b:
            poly = _poly_mul(poly, _poly_pow(eisenstein_coeffs(4, terms), b, terms), terms)
        if c:
            poly = _poly_mul(poly, eisenstein_coeffs(6, terms), terms)
        out.append(CuspForm(grp, sys, float(k), 0.0, 1, j, tuple(poly[j:]),
                            label="delta^%d e4^%d e6^%d" % (j, b, c)))
    return out


# ----------------------------------------------------------------------
# evaluation


def eval_form(form: CuspForm, z, tol: float = 1e-8):
    """Evaluate the expansion; certifies the truncation against a majorant.

    Coefficient growth is dominated by (m0+j+1)^p with p = max(weight, 1),
    which closes the tail geometrically. Raises AccuracyError when the
    available coefficients cannot reach ``tol`` relative to the majorant at
    the lowest sampled height.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    n = form.width
    q = np.exp(2j * np.pi * z_arr / n)
    c = np.asarray(form.coeffs, dtype=float)
    val = np.polynomial.polynomial.polyval(q, c, tensor=False)
    pref = np.exp(2j * np.pi * (form.m0 + form.kappa) * z_arr / n)
    out = pref * val

    qa = float(np.max(np.abs(q)))
    if qa > 0.0:
        j_cut = len(c)
        p = max(form.weight, 1.0)
        idx = np.arange(j_cut) + form.m0 + 1
        with np.errstate(divide="ignore"):
            log_growth = float(np.max(np.log(np.abs(c)) - p * np.log(idx)))
        r = qa * math.exp(p / (j_cut + form.m0 + 1))
        if r >= 1.0:
            raise AccuracyError("expansion truncated too early for height %g"
                                % float(np.min(z_arr.imag)))
        log_tail = (log_growth + p * math.log(j_cut + form.m0 + 1)
                    + j_cut * math.log(qa) - math.log1p(-r))
        maj = float(np.polynomial.polynomial.polyval(qa, np.abs(c)))
        if log_tail > math.log(tol * maj + 1e-300):
            raise AccuracyError("expansion truncated too early for height %g"
                                % float(np.min(z_arr.imag)))
    if np.isscalar(z) or np.asarray(z).shape == ():
        return complex(out[0])
    return out.reshape(np.asarray(z).shape)


# ----------------------------------------------------------------------
# Petersson pairings


def _invariant_square(form: CuspForm, w) -> float:
    """|f|^2 Im^k at a point, computed after folding into the domain."""
    _g, w2 = reduce_to_fd(complex(w))
    return abs(eval_form(form, w2)) ** 2 * w2.imag ** form.weight


def petersson_norm(form: CuspForm, tol: float = 1e-11) -> float:
    """<f, f> as the translate-averaged integral over the standard domain.

    Uses the invariance of |f|^2 y^k under the full group to evaluate each
    coset translate by folding points back into the domain; the subgroup
    contributes its index (measure normalization) and translate list.
    """
    if not form.full_modular:
        raise ValueError("norm quadrature needs a form modular on the full group")
    grp = form.group
    k = form.weight
    rate = 4.0 * math.pi * (form.m0 + form.kappa) / form.width
    total = 0.0
    for rep in grp.coset_reps():
        if rep.c == 0:
            tail = ExpTail(rate, k)
        else:
            tail = PolyTail(k if k > 1.5 else 2.0)

        def integrand(zs, rep=rep):
            flat = np.asarray(zs, dtype=complex).ravel()
            w = rep.act(flat)
            vals = np.array([_invariant_square(form, wi) for wi in w])
            return vals.reshape(np.shape(zs))

        total += integrate_fd(integrand, FundamentalDomain(tail), tol=tol)
    return total / grp.mu


def inner_product(f: CuspForm, g: CuspForm, tol: float = 1e-12) -> complex:
    """<f, g> over the full group, vectorized (no folding needed)."""
    if f.group.index != 1 or g.group.index != 1:
        raise ValueError("direct pairing is for forms over the full group")
    if abs(f.weight - g.weight) > 0:
        raise ValueError("weights must match")
    k = f.weight
    rate = 2.0 * math.pi * ((f.m0 + f.kappa) + (g.m0 + g.kappa))

    def integrand(zs):
        return (eval_form(f, zs) * np.conjugate(eval_form(g, zs))
                * np.asarray(zs).imag ** k)

    return integrate_fd(integrand, FundamentalDomain(ExpTail(rate, k)), tol=tol)


def _log_norm_scale(form: CuspForm) -> float:
    """log of sum_m |a_m|^2 Gamma(k-1) / (4 pi (m+kappa)/n)^(k-1).

    This is the exact squared norm over the full vertical strip, an upper
    scale for the domain norm; it keeps high-weight Gram matrices near unit
    size without overflowing doubles.
    """
    k = form.weight
    lg = math.lgamma(k - 1)
    logs = []
    for j, a in enumerate(form.coeffs):
        if a == 0:
            continue
        m = form.m0 + j + form.kappa
        logs.append(2.0 * math.log(abs(float(a))) + lg
                    - (k - 1) * math.log(4.0 * math.pi * m / form.width))
    best = max(logs)
    acc = sum(math.exp(v - best) for v in logs)
    return best + math.log(acc)


def orthonormal_basis(k: int, terms: int = 140, tol: float = 1e-12) -> list:
    """Orthonormal basis of the weight-k cusp space via a Cholesky Gram.

    Monomials are pre-scaled to near-unit norm (strip estimate) so the Gram
    is a correlation-like matrix; this keeps high weights inside double
    range and the factorization well conditioned.
    """
    mono = monomial_basis(k, terms)
    m = len(mono)
    if m == 0:
        return []
    scaled = []
    for f in mono:
        s = math.exp(-0.5 * _log_norm_scale(f))
        scaled.append(CuspForm(f.group, f.system, f.weight, f.kappa, f.width,
                               f.m0, tuple(float(a) * s for a in f.coeffs),
                               label=f.label))
    gram = np.zeros((m, m))
    for i in range(m):
        for j in range(i, m):
            v = inner_product(scaled[i], scaled[j], tol=tol)
            if abs(v.imag) > 1e-6 * abs(v) + 1e-18:
                raise ConsistencyError("pairing of real-coefficient forms "
                                       "came out non-real: %r" % v)
            gram[i, j] = gram[j, i] = v.real
    chol = np.linalg.cholesky(gram)
    # rows of inv(chol) recombine the monomials into an orthonormal family
    width = max(len(f.coeffs) + f.m0 for f in scaled)
    table = np.zeros((m, width))
    for i, f in enumerate(scaled):
        table[i, f.m0: f.m0 + len(f.coeffs)] = np.asarray(f.coeffs, dtype=float)
    combo = np.linalg.solve(chol, table)
    out = []
    for i in range(m):
        out.append(CuspForm(mono[0].group, mono[0].system, float(k), 0.0, 1, 1,
                            tuple(combo[i, 1:]), label="on%d" % (i + 1)))
    return out

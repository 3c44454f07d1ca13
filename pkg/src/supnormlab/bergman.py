"""Reproducing kernel for spaces of cusp forms and its diagonal sums.

The kernel h(z, w) is a sum over the whole group. Terms sharing a bottom
row (up to sign) form a translation family; each family is resummed into
an exponential series, which is what makes moderate-y evaluation stable:
the raw family members are of size |j(gamma, z)|^(-k) but their sum is
exponentially small, so term-by-term addition would lose every digit.
Residual cancellation across rows is tracked by a rounding term folded
into the reported tail bound, keeping the certificate honest.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ConsistencyError
from .forms import CuspForm, eval_form
from .modgroup import GroupElement, IDENTITY, Subgroup, _complete_row
from .multiplier import MultiplierSystem, cusp_parameter
from .numerics import ExpTail, FundamentalDomain, integrate_fd, principal_pow_array
from .report import ScanReport, ScanRow
from .spectral import _coset_rows, sl2_tail_bound

__all__ = [
    "KernelValue",
    "kernel",
    "reproduce_check",
    "basis_sum_diag",
    "diag_grid",
    "crude_majorant",
    "crude_majorant_scan",
]

_MINUS_I = GroupElement(-1, 0, 0, -1)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    log_mag: float
    truncation_radius: float
    tail_bound: float


def _exp_sum_bound(k: float, kap: float, qa: float) -> float:
    """Upper bound for sum of (m+kap)^(k-1) qa^(m+kap) over m + kap > 0."""
    if qa >= 1.0:
        raise ValueError("decay factor must be below one")
    m = 1 if kap == 0.0 else 0
    total = 0.0
    while True:
        e = m + kap
        term = e ** (k - 1.0) * qa ** e
        total += term
        ratio = ((e + 1.0) / e) ** (k - 1.0) * qa
        if ratio < 1.0 and term / (1.0 - ratio) < 1e-16 * total + 1e-300:
            return total + term / (1.0 - ratio)
        m += 1
        if m > 100000:
            raise BudgetError("exponential sum would need too many terms")


def _m_window(k: float, kap: float, qa: float, target: float):
    """Smallest truncation M with a certified remainder below target."""
    m_lo = 1 if kap == 0.0 else 0
    m = m_lo + 4
    while True:
        e = m + 1.0 + kap
        ratio = ((e + 1.0) / e) ** (k - 1.0) * qa
        if ratio < 1.0:
            rem = e ** (k - 1.0) * qa ** e / (1.0 - ratio)
            if rem <= target:
                return m_lo, m, rem
        m += 1
        if m > 200000:
            raise BudgetError("family series will not reach the tolerance")


def _check_group_system(group: Subgroup, sys: MultiplierSystem):
    if sys.weight <= 2.0:
        raise ValueError("kernel sums need weight above 2")
    if not group.contains(_MINUS_I):
        raise ValueError("kernel sums assume -I lies in the group")
    probe = sys.nu(_MINUS_I, 0.3 + 1.7j)
    if abs(probe - 1.0) > 1e-8:
        raise ConsistencyError(
            "multiplier is inconsistent at -I (nu = %r); the two signs of a "
            "row would not contribute equally" % (probe,))


def _kernel_core(group: Subgroup, sys: MultiplierSystem, zs: np.ndarray,
                 w: complex, tol: float, max_rows: float):
    """Kernel values and certified tails at many points, one row sweep."""
    _check_group_system(group, sys)
    k = sys.weight
    w = complex(w)
    if w.imag <= 0:
        raise ValueError("second argument must lie in the upper half plane")
    zf = zs.reshape(-1)
    y = zf.imag
    if np.min(y) <= 0:
        raise ValueError("points must lie in the upper half plane")

    cp = cusp_parameter(sys, IDENTITY)
    n, kap = cp.width, cp.kappa
    log_pref = k * math.log(4.0 * math.pi / n) - math.lgamma(k)
    pref = math.exp(log_pref)
    qa = math.exp(-2.0 * math.pi * w.imag / n)
    s_qa = _exp_sum_bound(k, kap, qa)

    geo = 1.0 / (1.0 - 2.0 ** (2.0 - k))
    y_min = float(np.min(y))
    r_need = (120.0 * geo * pref * s_qa / (y_min * tol)) ** (1.0 / (k - 2.0))
    radius = max(2.0, 1.0 + float(np.max(np.abs(zf))), r_need)
    x_lo = float(np.min(zf.real))
    x_hi = float(np.max(zf.real))
    est = (radius / y_min + 1.0) * (x_hi - x_lo + 2.0 * radius + 1.0)
    if est > max_rows:
        raise BudgetError(
            "kernel sum would need ~%.2g rows (radius %.3g) before reaching "
            "tol %.2g" % (est, radius, tol))

    reps = _coset_rows(group, IDENTITY, n, radius, y_min, x_lo, x_hi)
    ga = np.array([g.a for g in reps], dtype=float)[:, None]
    gb = np.array([g.b for g in reps], dtype=float)[:, None]
    gc = np.array([g.c for g in reps], dtype=float)[:, None]
    gd = np.array([g.d for g in reps], dtype=float)[:, None]
    ups = np.array([sys.upsilon(g) for g in reps])[:, None]

    jrow = gc * zf[None, :] + gd
    absj = np.abs(jrow)
    lnum = 2.0 * np.sum(absj ** (-k), axis=0)
    target = tol / (4.0 * pref * max(float(np.max(lnum)), 1e-300))
    m_lo, m_hi, rem_m = _m_window(k, kap, qa, target)

    p = (ga * zf[None, :] + gb) / jrow
    ebase = np.exp(2j * math.pi * (w + p) / n)
    acc = np.zeros_like(ebase)
    for m in range(m_hi, m_lo - 1, -1):
        acc = acc * ebase + (m + kap) ** (k - 1.0)
    lead = np.exp(2j * math.pi * (m_lo + kap) * (w + p) / n)
    fam = acc * lead

    den = ups * principal_pow_array(jrow, k)
    terms = fam / den
    vals = 2.0 * pref * np.sum(terms, axis=0)
    abs_acc = 2.0 * pref * np.sum(np.abs(terms), axis=0)

    tails = (pref * s_qa * 60.0 * radius ** (2.0 - k) * geo / y
             + pref * rem_m * lnum
             + 64.0 * np.finfo(float).eps * abs_acc)
    return vals, tails, radius


def kernel(group: Subgroup, sys: MultiplierSystem, z: complex, w: complex,
           tol: float = 1e-9, max_rows: float = 2e6) -> KernelValue:
    """Certified evaluation of the kernel sum at a single point pair."""
    zs = np.array([complex(z)])
    vals, tails, radius = _kernel_core(group, sys, zs, w, tol, max_rows)
    value = complex(vals[0])
    mag = abs(value)
    log_mag = math.log(mag) if mag > 0.0 else -math.inf
    return KernelValue(value, log_mag, radius, float(tails[0]))


def _cusp_decay_rate(group: Subgroup, sys: MultiplierSystem) -> float:
    """Exponential decay rate valid at every cusp of the quotient."""
    rate = math.inf
    for cusp in group.cusp_set():
        cp = cusp_parameter(sys, cusp.scaling)
        eta = cp.kappa if cp.kappa > 0.0 else 1.0
        rate = min(rate, eta / cp.width)
    return 2.0 * math.pi * rate


def reproduce_check(f: CuspForm, w: complex, tol: float = 1e-8):
    """Both sides of the pairing identity: integral against the kernel
    versus 8 pi / (mu (k-1)) times the value at w."""
    group, sys, k = f.group, f.system, f.weight
    if k <= 2.0:
        raise ValueError("reproducing identity needs weight above 2")
    w = complex(w)
    wt = -w.conjugate()
    rhs = 8.0 * math.pi / (group.mu * (k - 1.0)) * eval_form(f, w)
    q_tol = max(abs(rhs), 1e-12) * tol / (2.0 * group.mu)

    rate = _cusp_decay_rate(group, sys)
    dom = FundamentalDomain(ExpTail(rate, k), -0.5, 0.5)
    total = 0.0 + 0.0j
    for rep in group.coset_reps():
        def integrand(zs, rep=rep):
            pts = rep.act(np.asarray(zs, dtype=complex))
            fv = eval_form(f, pts)
            hv, _, _ = _kernel_core(group, sys, pts.reshape(-1), wt,
                                    q_tol * 0.5, 4e6)
            hv = hv.reshape(np.asarray(zs).shape)
            return fv * np.conj(hv) * pts.imag ** k
        total += integrate_fd(integrand, dom, tol=q_tol)
    return total / group.mu, rhs


def basis_sum_diag(group: Subgroup, sys: MultiplierSystem, tau: GroupElement,
                   z: complex, tol: float = 1e-9) -> float:
    """Diagonal sum of |f_j slash tau|^2 over an orthonormal basis, from the
    kernel of the conjugated group at (z, -conj z)."""
    k = sys.weight
    if k <= 2.0:
        raise ValueError("diagonal sums need weight above 2")
    grp_t = group if tau == IDENTITY else group.conjugate(tau)
    sys_t = sys.conjugate(tau)
    scale = group.mu * (k - 1.0) / (8.0 * math.pi)
    z = complex(z)
    kv = kernel(grp_t, sys_t, z, -z.conjugate(), tol=tol / scale)
    value = kv.value * scale
    tail = kv.tail_bound * scale
    if abs(value.imag) > tol + tail:
        raise ConsistencyError(
            "diagonal sum has imaginary residue %.3g beyond tolerance"
            % value.imag)
    if value.real < -(tol + tail):
        raise ConsistencyError("diagonal sum came out negative")
    return value.real


def diag_grid(group: Subgroup, sys: MultiplierSystem, tau: GroupElement,
              zs, tol: float = 1e-9, max_rows: float = 4e6) -> np.ndarray:
    """basis_sum_diag over an array of points with one shared row sweep."""
    k = sys.weight
    if k <= 2.0:
        raise ValueError("diagonal sums need weight above 2")
    grp_t = group if tau == IDENTITY else group.conjugate(tau)
    sys_t = sys.conjugate(tau)
    scale = group.mu * (k - 1.0) / (8.0 * math.pi)
    za = np.asarray(zs, dtype=complex)
    out = np.empty(za.reshape(-1).shape, dtype=float)
    flat = za.reshape(-1)
    for i, zi in enumerate(flat):
        vals, tails, _ = _kernel_core(grp_t, sys_t, np.array([zi]),
                                      -zi.conjugate(), tol / scale, max_rows)
        value = complex(vals[0]) * scale
        tail = float(tails[0]) * scale
        if abs(value.imag) > tol + tail:
            raise ConsistencyError("diagonal grid has an imaginary residue")
        out[i] = value.real
    return out.reshape(za.shape)


def crude_majorant(z: complex, k: float, tol: float = 1e-6,
                   max_rows: float = 4e6) -> tuple:
    """Absolute-value kernel majorant (y y')^(k/2) / |(gz - zbar)/2|^k summed
    over the full modular group; no cancellation, so summed term by term."""
    if k <= 2.0:
        raise ValueError("majorant needs weight above 2")
    z = complex(z)
    x, y = z.real, z.imag
    if y <= 0:
        raise ValueError("point must lie in the upper half plane")
    geo = 1.0 / (1.0 - 2.0 ** (2.0 - k))
    radius = max(2.0, 1.0 + abs(z),
                 (2.0 ** k * (3.0 + 8.0 * y) * 120.0 * geo / (y * tol))
                 ** (1.0 / (k - 2.0)))
    est = (radius / y + 1.0) * (2.0 * radius + 1.0)
    if est > max_rows:
        raise BudgetError("majorant would need ~%.2g rows" % est)

    rows = [(0, 1)]
    c_top = int(math.floor(radius / y))
    for c in range(1, c_top + 1):
        d_lo = int(math.ceil(-c * x - radius))
        d_hi = int(math.floor(-c * x + radius))
        rows.extend((c, d) for d in range(d_lo, d_hi + 1)
                    if math.gcd(c, d) == 1)

    qs = np.empty(len(rows), dtype=complex)
    yy = np.empty(len(rows), dtype=float)
    for i, (c, d) in enumerate(rows):
        g = _complete_row(c, d)
        gz = g.act(z)
        qs[i] = gz - z.conjugate()
        yy[i] = y * gz.imag
    wgt = yy ** (k / 2.0) * 2.0 ** k

    def window(weight):
        half = (16.0 * weight / ((k - 1.0) * tol)) ** (1.0 / (k - 1.0))
        return max(4, int(math.ceil(half + 0.5)))

    def family_sum(sub_q, sub_w):
        big_j = window(float(np.sum(sub_w)))
        offs = np.arange(-big_j, big_j + 1, dtype=float)[None, :]
        centers = np.round(-sub_q.real)[:, None]
        pts = sub_q[:, None] + centers + offs
        part = float(np.sum(sub_w * np.sum(np.abs(pts) ** (-k), axis=1)))
        tail = (4.0 * float(np.sum(sub_w)) * (big_j - 0.5) ** (1.0 - k)
                / (k - 1.0))
        return part, tail

    # the translation family (c = 0) carries weight y^k and needs a much
    # wider window than the rest, so it gets its own
    v0, t0 = family_sum(qs[:1], wgt[:1])
    if len(rows) > 1:
        v1, t1 = family_sum(qs[1:], wgt[1:])
    else:
        v1, t1 = 0.0, 0.0
    value = 2.0 * (v0 + v1)
    row_tail = 2.0 ** k * (3.0 + 8.0 * y) * sl2_tail_bound(radius, z, k)
    return value, t0 + t1 + row_tail


def crude_majorant_scan(ks=(6.0, 12.0, 24.0, 48.0), y_values=None,
                        x_values=(0.0, 0.25, 0.5), tol: float = 1e-4
                        ) -> ScanReport:
    """Ratio scan of the absolute majorant against the linear-in-y envelope."""
    if y_values is None:
        y_values = tuple(float(v) for v in np.geomspace(1.0, 50.0, 10))
    rows = []
    for k in ks:
        for yv in y_values:
            for xv in x_values:
                val, tail = crude_majorant(complex(xv, yv), k, tol=tol)
                env = yv * (1.0 + 1.0 / (k - 2.0))
                rows.append(ScanRow(name="crude_k%g" % k, k=float(k), y=yv,
                                    x=xv, lhs=val + tail, envelope=env,
                                    ratio=(val + tail) / env))
    fitted = max(r.ratio for r in rows)
    return ScanReport(suite="bergman_crude", rows=tuple(rows),
                      fitted_constant=fitted, passed=True)

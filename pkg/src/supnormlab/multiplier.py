"""Multiplier systems of real weight and the associated cocycle bookkeeping.

A multiplier system of weight k on a subgroup Gamma is written as
nu(gamma, z) = upsilon(gamma) j(gamma, z)^k with |upsilon| = 1 and all powers
principal. The consistency cocycle

    sigma(tau, gamma) = j(tau, gamma z)^k j(gamma, z)^k / j(tau gamma, z)^k

is a k-th power of a winding unit: the three principal args differ from the
exact identity j(tau gamma, z) = j(tau, gamma z) j(gamma, z) by 2 pi w for an
integer w, so sigma = e^{2 pi i k w}. All such integers are computed at two
probe points and must agree.

Builtin systems:

* trivial (even integer weight, any subgroup);
* eta powers: the multiplier of the r-th power of the Dedekind eta function,
  weight r/2 on the full group, evaluated through exact Dedekind sums;
* theta: weight 1/2 on gamma0:4, with the classical normalization
  theta(gamma z) = eps_d^{-1} (c|d) (cz+d)^{1/2} theta(z), where (c|d) is the
  Kronecker symbol and eps_d is 1 or i as d = 1 or 3 mod 4. (The square-root
  convention is a documented choice; the q-series tests pin it.)

Sign bookkeeping shared by all systems: upsilon(-I) = e^{-i pi k}; for c < 0,
upsilon(g) = upsilon(-g) e^{+i pi k}; for c = 0, d < 0, upsilon(g) =
upsilon(-g) e^{-i pi k}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ConsistencyError
from .modgroup import Cusp, GroupElement, IDENTITY, Subgroup, parse_group, u_pow
from .numerics import principal_arg, principal_pow

__all__ = [
    "sigma",
    "MultiplierSystem",
    "conjugate_upsilon",
    "CuspParameter",
    "cusp_parameter",
    "parse_multiplier",
    "dedekind_sum",
    "kronecker_symbol",
]

# Probe points for winding-number consistency checks.
_PROBES = (1j, 0.5 + 2j)
_TOL = 1e-10


def _winding(parts_pos, parts_neg, z) -> int:
    """Integer w with sum(arg pos) - sum(arg neg) = 2 pi w, from principal args."""
    total = sum(principal_arg(p(z)) for p in parts_pos)
    total -= sum(principal_arg(p(z)) for p in parts_neg)
    w = round(total / (2 * math.pi))
    if abs(total - 2 * math.pi * w) > _TOL:
        raise ConsistencyError(f"winding number off-integer by {total - 2 * math.pi * w:.3e}")
    return w


def _checked_winding(parts_pos, parts_neg) -> int:
    vals = [_winding(parts_pos, parts_neg, z) for z in _PROBES]
    if vals[0] != vals[1]:
        raise ConsistencyError(f"winding number disagrees across probes: {vals}")
    return vals[0]


def sigma(tau: GroupElement, gamma: GroupElement, k: float) -> complex:
    """The weight-k consistency cocycle sigma(tau, gamma)."""
    tg = tau @ gamma
    w = _checked_winding(
        parts_pos=[lambda z, t=tau, g=gamma: t.j(g.act(z)),
                   lambda z, g=gamma: g.j(z)],
        parts_neg=[lambda z, h=tg: h.j(z)],
    )
    return cmath.exp(2j * math.pi * k * w)


def dedekind_sum(h: int, c: int) -> Fraction:
    """s(h, c) for c > 0, gcd(h, c) = 1, exactly, via the reciprocity law."""
    if c <= 0:
        raise ValueError("modulus must be positive")
    h %= c
    s = Fraction(0)
    sign = 1
    while c > 1:
        if h == 0:
            break
        s += sign * (Fraction(-1, 4) + Fraction(h * h + c * c + 1, 12 * h * c))
        sign = -sign
        h, c = c % h, h
    return s


def _eta_log_phase(g: GroupElement) -> Fraction:
    """phi with upsilon_eta(g) = e^{i pi phi} for the weight-1/2 eta multiplier."""
    a, b, c, d = g.a, g.b, g.c, g.d
    if c == 0:
        if d > 0:
            return Fraction(b, 12)  # g = U^b
        return _eta_log_phase(-g) - Fraction(1, 2)
    if c < 0:
        return _eta_log_phase(-g) + Fraction(1, 2)
    return Fraction(a + d, 12 * c) - dedekind_sum(d % c, c) - Fraction(1, 4)


def kronecker_symbol(a: int, n: int) -> int:
    """The Kronecker symbol (a|n), including the standard n <= 0 extension."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def _theta_upsilon(g: GroupElement) -> complex:
    a, b, c, d = g.a, g.b, g.c, g.d
    if c == 0:
        return 1.0 + 0j if d > 0 else cmath.exp(-0.5j * math.pi)
    if c < 0:
        return _theta_upsilon(-g) * 1j  # e^{+i pi k}, k = 1/2
    eps = 1.0 + 0j if d % 4 == 1 else 1j
    return kronecker_symbol(c, d) / eps


class MultiplierSystem:
    """A weight, a subgroup, and a unitary upsilon on it."""

    def __init__(self, weight: float, group: Subgroup, kind: str, params: tuple,
                 upsilon_fn, name: str):
        self.weight = float(weight)
        self.group = group
        self.kind = kind
        self.params = params
        self._upsilon_fn = upsilon_fn
        self.name = name
        got = upsilon_fn(-IDENTITY)
        want = cmath.exp(-1j * math.pi * self.weight)
        if abs(got - want) > _TOL:
            raise ConsistencyError(
                f"upsilon(-I) = {got}, expected e^(-i pi k) = {want}")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def trivial(weight: int, group: Subgroup | None = None) -> "MultiplierSystem":
        if weight != int(weight) or int(weight) % 2:
            raise ValueError("the trivial system needs an even integer weight")
        group = group or parse_group("full")
        return MultiplierSystem(int(weight), group, "trivial", (int(weight),),
                                lambda g: 1.0 + 0j, f"trivial:k={int(weight)}")

    @staticmethod
    def eta_power(r: int) -> "MultiplierSystem":
        if r < 1:
            raise ValueError("eta power must be a positive integer")

        def ups(g, _r=r):
            ph = _r * _eta_log_phase(g)
            # reduce mod 2 before leaving exact arithmetic
            ph %= 2
            return cmath.exp(1j * math.pi * float(ph))

        return MultiplierSystem(r / 2.0, parse_group("full"), "eta", (r,),
                                ups, f"eta:r={r}")

    @staticmethod
    def theta() -> "MultiplierSystem":
        return MultiplierSystem(0.5, parse_group("gamma0:4"), "theta", (),
                                _theta_upsilon, "theta")

    @staticmethod
    def custom(weight: float, group: Subgroup, fn, name: str = "custom"
               ) -> "MultiplierSystem":
        """Inject an upsilon table/callable; only the -I normalization is checked."""
        return MultiplierSystem(weight, group, "custom", (id(fn),), fn, name)

    # -- evaluation -----------------------------------------------------------

    def upsilon(self, g: GroupElement) -> complex:
        if not self.group.contains(g):
            raise ValueError(f"{g!r} is not in {self.group!r}")
        return self._upsilon_fn(g)

    def nu(self, g: GroupElement, z: complex) -> complex:
        """nu(g, z) = upsilon(g) j(g, z)^k with the principal power."""
        return self.upsilon(g) * principal_pow(g.j(z), self.weight)

    def conjugate(self, tau: GroupElement) -> "MultiplierSystem":
        """The system nu^tau on tau^-1 Gamma tau."""
        if tau == IDENTITY:
            return self
        conj_group = self.group.conjugate(tau)
        base = self

        def ups(gp, _b=base, _t=tau):
            return conjugate_upsilon(_b, _t, gp)

        return MultiplierSystem(self.weight, conj_group, "conjugate",
                                (self.name, tau), ups,
                                f"({self.name})^({tau!r})")

    def __eq__(self, other):
        return (isinstance(other, MultiplierSystem)
                and self.kind == other.kind and self.params == other.params
                and self.weight == other.weight and self.group == other.group)

    def __hash__(self):
        return hash((self.kind, self.params, self.weight, self.group))

    def __repr__(self):
        return f"MultiplierSystem({self.name}, k={self.weight})"


def conjugate_upsilon(sys: MultiplierSystem, tau: GroupElement,
                      gprime: GroupElement) -> complex:
    """upsilon of nu^tau at gprime, for gprime in tau^-1 Gamma tau.

    Uses the exact identity j(gamma, tau z) j(tau, z) = j(tau, gamma' z)
    j(gamma', z) (both products equal j(tau gamma', z)), so the conjugated
    upsilon differs from upsilon(gamma) by e^{2 pi i k w} for an integer
    winding w; no cancellation-prone power arithmetic is involved.
    """
    gamma = tau @ gprime @ tau.inv()
    if not sys.group.contains(gamma):
        raise ValueError("conjugated element does not lie in the base group")
    w = _checked_winding(
        parts_pos=[lambda z, g=gamma, t=tau: g.j(t.act(z)),
                   lambda z, t=tau: t.j(z)],
        parts_neg=[lambda z, t=tau, gp=gprime: t.j(gp.act(z)),
                   lambda z, gp=gprime: gp.j(z)],
    )
    return sys.upsilon(gamma) * cmath.exp(2j * math.pi * sys.weight * w)


@dataclass(frozen=True)
class CuspParameter:
    """Cusp data for a multiplier system: the parameter kappa in [0, 1), the
    positive floor eta (kappa, or 1 when kappa vanishes), and the width."""

    kappa: float
    eta_floor: float
    width: int
    scaling: GroupElement


def cusp_parameter(sys: MultiplierSystem, cusp: Cusp | GroupElement) -> CuspParameter:
    """kappa of a cusp: e^{2 pi i kappa} = upsilon^tau(U^width)."""
    if isinstance(cusp, Cusp):
        tau, width = cusp.scaling, cusp.width
    else:
        tau = cusp
        width = sys.group.width_at_scaling(tau)
    val = conjugate_upsilon(sys, tau, u_pow(width))
    if abs(abs(val) - 1.0) > _TOL:
        raise ConsistencyError("cusp unit has drifted off the circle")
    kappa = principal_arg(val) / (2 * math.pi)
    if kappa < 0:
        kappa += 1.0
    if kappa < 1e-12 or kappa > 1 - 1e-12:
        kappa = 0.0
    eta_floor = kappa if kappa > 0 else 1.0
    return CuspParameter(kappa, eta_floor, width, tau)


@lru_cache(maxsize=None)
def parse_multiplier(descriptor: str) -> MultiplierSystem:
    """Parse 'trivial:k=K', 'eta:r=R', or 'theta'."""
    s = descriptor.strip().lower()
    if s == "theta":
        return MultiplierSystem.theta()
    kind, _, arg = s.partition(":")
    if kind == "trivial" and arg.startswith("k="):
        return MultiplierSystem.trivial(int(arg[2:]))
    if kind == "eta" and arg.startswith("r="):
        return MultiplierSystem.eta_power(int(arg[2:]))
    raise ValueError(f"bad multiplier descriptor {descriptor!r}")

"""Integer matrix group machinery: subgroups of the modular group, cusps, cosets.

Conventions:

* all subgroups contain -I (it is adjoined to gamma1/gamma(N) for N > 2);
* cosets are right cosets (Gamma g), enumerated by breadth-first search on
  canonical labels;
* a cusp is an orbit of cosets under right multiplication by U, its width is
  the orbit size, and the sum of widths equals the index;
* cusp representatives p/q are chosen with minimal denominator q >= 0, ties
  broken by minimal numerator p in [0, q * width_of_infinity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, cached_property

from .errors import BudgetError, ConsistencyError

__all__ = [
    "GroupElement", "IDENTITY", "S", "U", "u_pow", "act", "j_factor",
    "reduce_to_fd", "ball", "Subgroup", "Cusp", "parse_group",
]


@dataclass(frozen=True)
class GroupElement:
    """A determinant-one integer matrix [[a, b], [c, d]]."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1: {self}")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def act(self, z):
        """Mobius action (az + b) / (cz + d); works on scalars and arrays."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def j(self, z):
        """Automorphy denominator cz + d."""
        return self.c * z + self.d

    def apply_infinity(self) -> tuple[int, int]:
        """Image of the infinite cusp as a normalized pair (p, q), q >= 0."""
        p, q = self.a, self.c
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return p, q

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
U = GroupElement(1, 1, 0, 1)


def u_pow(n: int) -> GroupElement:
    return GroupElement(1, n, 0, 1)

def act(gamma: GroupElement, z):
    return gamma.act(z)

def j_factor(gamma: GroupElement, z):
    return gamma.j(z)


def reduce_to_fd(z: complex, max_steps: int = 20000) -> tuple[GroupElement, complex]:
    """Translate z into the standard fundamental domain.

    Returns (gamma, z') with z' = gamma z, |Re z'| <= 1/2 + eps, |z'| >= 1 - eps.
    """
    z0 = complex(z)
    if z0.imag <= 0:
        raise ValueError("point must lie in the upper half plane")
    g = IDENTITY
    w = z0
    for _ in range(max_steps):
        t = round(w.real)
        if t:
            g = u_pow(-t) @ g
            w = complex(w.real - t, w.imag)
        n2 = w.real * w.real + w.imag * w.imag
        if n2 >= 1.0 - 1e-15:
            if abs(w.real) <= 0.5 + 1e-15:
                return g, g.act(z0)
            continue
        g = S @ g
        w = -1.0 / w
    raise BudgetError("fundamental-domain reduction did not terminate")


def _complete_row(c: int, d: int) -> GroupElement:
    """Some integer matrix with bottom row (c, d); requires gcd(c, d) = 1."""
    if c == 0:
        if d not in (1, -1):
            raise ValueError("bottom row (0, d) needs d = +-1")
        return GroupElement(d, 0, 0, d) if d == 1 else GroupElement(-1, 0, 0, -1)
    g, x, y = _ext_gcd(c, d)
    if g != 1:
        raise ValueError("bottom row entries must be coprime")
    # a d - b c = 1 with (a, b) = (y, -x)
    return GroupElement(y, -x, c, d)

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def ball(z: complex, radius: float, budget: int = 200000) -> list[GroupElement]:
    """All +-classes of integer rows (c, d) with |cz + d| <= radius, each as a
    canonical completion (the U-translate minimizing |Re(gamma z)|), both signs
    listed."""
    z = complex(z)
    y = z.imag
    if y <= 0:
        raise ValueError("point must lie in the upper half plane")
    out = []
    if radius >= 1.0:
        g = u_pow(-round(z.real))
        out.extend([g, -g])
    c_max = int(math.floor(radius / y))
    for c in range(1, c_max + 1):
        # |cz + d|^2 = (cx + d)^2 + (cy)^2 <= R^2
        span = radius * radius - (c * y) ** 2
        if span < 0:
            continue
        half = math.sqrt(span)
        d_lo = math.ceil(-c * z.real - half - 1e-12)
        d_hi = math.floor(-c * z.real + half + 1e-12)
        for d in range(d_lo, d_hi + 1):
            if math.gcd(c, d) != 1:
                continue
            if (c * z.real + d) ** 2 + (c * y) ** 2 > radius * radius + 1e-9:
                continue
            g0 = _complete_row(c, d)
            t = -round(g0.act(z).real)
            g = u_pow(t) @ g0
            out.extend([g, -g])
            if len(out) > budget:
                raise BudgetError("ball enumeration budget exhausted")
    return out


@dataclass(frozen=True)
class Cusp:
    """A cusp class: representative p/q (q = 0 means infinity), its width, and
    a scaling matrix sending infinity to the representative."""

    p: int
    q: int
    width: int
    scaling: GroupElement

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def as_fraction(self):
        return None if self.q == 0 else Fraction(self.p, self.q)

    def __repr__(self):
        point = "oo" if self.q == 0 else f"{self.p}/{self.q}"
        return f"Cusp({point}, width={self.width})"


class Subgroup:
    """A finite-index subgroup given by a membership test and a coset label.

    Instances are cheap; coset enumeration is cached per instance and
    ``parse_group`` caches instances per descriptor.
    """

    def __init__(self, kind: str, level: int = 1):
        if kind not in ("full", "gamma0", "gamma1", "gamma"):
            raise ValueError(f"unknown subgroup kind {kind!r}")
        if level < 1:
            raise ValueError("level must be a positive integer")
        self.kind = kind
        self.level = 1 if kind == "full" else level

    def describe(self) -> str:
        return "full" if self.kind == "full" else f"{self.kind}:{self.level}"

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.kind == other.kind
                and self.level == other.level and type(self) is type(other))

    def __hash__(self):
        return hash((type(self).__name__, self.kind, self.level))

    def __repr__(self):
        return f"Subgroup({self.describe()})"

    # -- membership ---------------------------------------------------------

    def contains(self, g: GroupElement) -> bool:
        """Membership with -I always adjoined."""
        return self._contains_raw(g) or self._contains_raw(-g)

    def _contains_raw(self, g: GroupElement) -> bool:
        n = self.level
        if self.kind == "full":
            return True
        if self.kind == "gamma0":
            return g.c % n == 0
        if self.kind == "gamma1":
            return g.c % n == 0 and g.a % n == 1 and g.d % n == 1
        return (g.c % n == 0 and g.b % n == 0
                and g.a % n == 1 and g.d % n == 1)

    # -- coset labels --------------------------------------------------------

    def label(self, g: GroupElement):
        """Canonical identifier of the right coset (Gamma g)."""
        n = self.level
        if self.kind == "full":
            return 0
        if self.kind == "gamma0":
            return _p1_canonical(g.c % n, g.d % n, n)
        if self.kind == "gamma1":
            row = (g.c % n, g.d % n)
            neg = ((-g.c) % n, (-g.d) % n)
            return min(row, neg)
        quad = (g.a % n, g.b % n, g.c % n, g.d % n)
        neg = ((-g.a) % n, (-g.b) % n, (-g.c) % n, (-g.d) % n)
        return min(quad, neg)

    # -- enumeration ---------------------------------------------------------

    @cached_property
    def _coset_table(self):
        """BFS over right cosets; returns (reps in discovery order, label->rep)."""
        gens = (U, U.inv(), S)
        start = IDENTITY
        reps = [start]
        seen = {self.label(start): start}
        frontier = [start]
        while frontier:
            nxt = []
            for g in frontier:
                for h in gens:
                    cand = g @ h
                    lab = self.label(cand)
                    if lab not in seen:
                        seen[lab] = cand
                        reps.append(cand)
                        nxt.append(cand)
            frontier = nxt
            if len(reps) > 2_000_000:
                raise BudgetError("coset enumeration budget exhausted")
        return reps, seen

    @property
    def index(self) -> int:
        return len(self._coset_table[0])

    @property
    def mu(self) -> int:
        """The index; this is the measure normalizer in all spectral formulas."""
        return self.index

    def coset_reps(self) -> list[GroupElement]:
        return list(self._coset_table[0])

    def width_at_scaling(self, tau: GroupElement) -> int:
        """Width of the cusp tau(infinity): least n >= 1 with tau U^n tau^-1 in Gamma."""
        lab0 = self.label(tau)
        g = tau
        for n in range(1, self.index + 1):
            g = g @ U
            if self.label(g) == lab0:
                return n
        raise ConsistencyError("U-orbit did not close within the index")

    @cached_property
    def width_of_infinity(self) -> int:
        return self.width_at_scaling(IDENTITY)

    @cached_property
    def _cusp_list(self):
        reps, _ = self._coset_table
        # partition labels into right-U orbits
        orbit_of = {}
        orbits = []
        for g in reps:
            lab = self.label(g)
            if lab in orbit_of:
                continue
            orbit = []
            cur = g
            while True:
                cur_lab = self.label(cur)
                if cur_lab in orbit_of:
                    break
                orbit_of[cur_lab] = len(orbits)
                orbit.append(cur_lab)
                cur = cur @ U
            orbits.append(orbit)
        n_inf = self.width_of_infinity
        found: dict[int, Cusp] = {}
        # infinity first: the identity coset's orbit
        inf_orbit = orbit_of[self.label(IDENTITY)]
        found[inf_orbit] = Cusp(1, 0, len(orbits[inf_orbit]), IDENTITY)
        q = 1
        q_cap = 4 * self.level + 4
        while len(found) < len(orbits) and q <= q_cap:
            for p in range(0, q * n_inf):
                if math.gcd(p, q) != 1:
                    continue
                h = _scaling_for(p, q)
                oid = orbit_of.get(self.label(h))
                if oid is not None and oid not in found:
                    found[oid] = Cusp(p, q, len(orbits[oid]), h)
                    if len(found) == len(orbits):
                        break
            q += 1
        if len(found) < len(orbits):
            raise ConsistencyError("cusp representative search exhausted its bound")
        return sorted(found.values(), key=lambda cu: (cu.q, cu.p))

    def cusp_set(self) -> list[Cusp]:
        return list(self._cusp_list)

    def conjugate(self, tau: GroupElement) -> "ConjugateSubgroup":
        """The subgroup tau^-1 Gamma tau, with coset data inherited from Gamma."""
        return ConjugateSubgroup(self, tau)


def _scaling_for(p: int, q: int) -> GroupElement:
    """A determinant-one matrix sending infinity to p/q (infinity for q = 0)."""
    if q == 0:
        return IDENTITY
    g, s, t = _ext_gcd(p, q)
    if g != 1:
        raise ValueError("cusp representative must be in lowest terms")
    # (p s) + (q t) = 1, so [[p, -t], [q, s]] has determinant ps + tq = 1
    return GroupElement(p, -t, q, s)


class ConjugateSubgroup(Subgroup):
    """tau^-1 Gamma tau for a base subgroup Gamma; right cosets correspond to
    right cosets of Gamma via g -> tau g."""

    def __init__(self, base: Subgroup, tau: GroupElement):
        self.base = base
        self.tau = tau
        self.kind = base.kind
        self.level = base.level

    def describe(self) -> str:
        return f"{self.base.describe()}^{self.tau!r}"

    def __eq__(self, other):
        return (isinstance(other, ConjugateSubgroup)
                and self.base == other.base and self.tau == other.tau)

    def __hash__(self):
        return hash(("conj", self.base, self.tau))

    def contains(self, g: GroupElement) -> bool:
        return self.base.contains(self.tau @ g @ self.tau.inv())

    def _contains_raw(self, g: GroupElement) -> bool:
        return self.base._contains_raw(self.tau @ g @ self.tau.inv())

    def label(self, g: GroupElement):
        return self.base.label(self.tau @ g)


@lru_cache(maxsize=256)
def _p1_canonical_table(n: int):
    units = [u for u in range(1, n) if math.gcd(u, n) == 1] or [1]
    return tuple(units)

def _p1_canonical(c: int, d: int, n: int):
    """Canonical representative of (c : d) in P^1(Z/n)."""
    if n == 1:
        return (0, 0)
    best = None
    for u in _p1_canonical_table(n):
        cand = ((u * c) % n, (u * d) % n)
        if best is None or cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def parse_group(descriptor: str) -> Subgroup:
    """Parse 'full', 'gamma0:N', 'gamma1:N', or 'gamma:N'."""
    s = descriptor.strip().lower()
    if s == "full":
        return Subgroup("full")
    if ":" not in s:
        raise ValueError(f"bad subgroup descriptor {descriptor!r}")
    kind, _, lev = s.partition(":")
    if kind not in ("gamma0", "gamma1", "gamma"):
        raise ValueError(f"bad subgroup descriptor {descriptor!r}")
    try:
        n = int(lev)
    except ValueError:
        raise ValueError(f"bad level in {descriptor!r}") from None
    return Subgroup(kind, n)

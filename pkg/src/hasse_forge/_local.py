"""l-adic solvability of c*y^k = P(t) with t in Z_l or l*Z_l.

Every curve handled by the library is covered by finitely many such charts.
The engine refines residue classes t = a mod l^j and for each class either
finds a point with a Newton-lemma witness, excludes the class (the value
P(t)/c has a valuation not divisible by k, or a unit part that is not a
k-th power), or splits it into l children.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from sympy.ntheory.residue_ntheory import nthroot_mod

from . import ntkernel as nt
from .errors import InternalContradiction, InvalidArgument

ENUM_LIMIT = 100_000
_BRUTE_ROOT_LIMIT = 5000


# ---------------------------------------------------------------------------
# valuations and k-th powers


def vq(x, l: int) -> float:
    """Valuation of an integer or Fraction (infinity for zero)."""
    if x == 0:
        return math.inf
    if isinstance(x, Fraction):
        return nt.valuation(x.numerator, l) - nt.valuation(x.denominator, l)
    return nt.valuation(int(x), l)


def unit_precision(k: int, l: int) -> int:
    """A unit is a k-th power in Z_l iff it is one modulo l**unit_precision(k, l)."""
    return 2 * nt.valuation(k, l) + 1 if k % l == 0 else 1


@functools.lru_cache(maxsize=256)
def _kth_powers_mod_2(k: int, K: int) -> frozenset:
    mod = 1 << K
    return frozenset(pow(r, k, mod) for r in range(1, mod, 2))


def is_kth_power_unit(u: int, k: int, l: int) -> bool:
    """Whether the l-adic unit u is a k-th power in Z_l."""
    u = int(u)
    if u % l == 0:
        raise InvalidArgument("u must be a unit")
    if k == 1:
        return True
    K = unit_precision(k, l)
    if l == 2:
        return u % (1 << K) in _kth_powers_mod_2(k, K)
    order = (l - 1) * l ** (K - 1)
    return pow(u, order // math.gcd(k, order), l ** K) == 1


def is_kth_power_local(w, k: int, l: int) -> bool:
    """Whether the rational w is a k-th power in Q_l (zero counts)."""
    if w == 0:
        return True
    w = Fraction(w)
    v = vq(w, l)
    if v % k:
        return False
    num, den = w.numerator, w.denominator
    _, un = nt.split_valuation(num, l)
    _, ud = nt.split_valuation(den, l)
    K = unit_precision(k, l)
    mod = l ** K
    return is_kth_power_unit(un * nt.inverse_mod(ud, mod) % mod, k, l)


def kth_root_unit(u: int, k: int, l: int, K: int) -> int | None:
    """An integer r with r**k = u mod l**K, or None when u is not a k-th power in Z_l."""
    u = int(u)
    if not is_kth_power_unit(u, k, l):
        return None
    vk = nt.valuation(k, l)
    K0 = unit_precision(k, l)
    if vk == 0:
        m = l
        if l < _BRUTE_ROOT_LIMIT:
            r = nt.nth_power_residue_test(u, k, l)
        else:
            r = int(nthroot_mod(u % l, k, l))
    else:
        m = l ** K0
        r = next(x for x in range(1, m) if x % l and (pow(x, k, m) - u) % m == 0)
    # r**k = u mod l**prec; each Newton step doubles prec - 2*vk
    prec = K0
    target = max(K, K0)
    while prec < target:
        new = min(2 * prec - 2 * vk, target)
        big = l ** (new + vk)
        num = (pow(r, k, big) - u) % big
        q = num // l ** vk
        d = (k // l ** vk) * pow(r, k - 1, big)
        r = (r - q * nt.inverse_mod(d, l ** new)) % l ** new
        prec = new
    mod = l ** target
    if (pow(r, k, mod) - u) % mod:
        raise InternalContradiction("k-th root lifting failed")
    return r % mod


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class Chart:
    """The affine equation c*y^k = P(t) with t restricted to l**shift * Z_l.

    ``P`` is a tuple of (exponent, coefficient) pairs; ``label`` names the
    chart and ``roles`` records which projective coordinate t and y stand for.
    """
    label: str
    P: tuple
    c: int
    k: int
    shift: int = 0
    roles: tuple = ()

    def P_at(self, t):
        return sum(coef * t ** e for e, coef in self.P)

    def dP_at(self, t):
        return sum(e * coef * t ** (e - 1) for e, coef in self.P if e)

    def F_at(self, t, y):
        return self.c * y ** self.k - self.P_at(t)

    @property
    def degree(self) -> int:
        return max(e for e, _ in self.P)

    def to_json(self) -> dict:
        return {"label": self.label, "c": str(self.c), "k": self.k, "shift": self.shift,
                "P": [[e, str(coef)] for e, coef in self.P], "roles": list(self.roles)}

    @classmethod
    def from_json(cls, d) -> "Chart":
        return cls(d["label"], tuple((int(e), int(c)) for e, c in d["P"]), int(d["c"]),
                   int(d["k"]), int(d["shift"]), tuple(d.get("roles", ())))


@dataclass
class Witness:
    """A point (t, y) on a chart and the Newton-lemma data that lifts it."""
    chart: Chart
    t: int
    y: Fraction
    variable: str          # "t", "y" or "exact"
    value_valuation: float  # v(f(point)) in the lifting variable
    derivative_valuation: int

    def to_json(self) -> dict:
        y = self.y
        return {"chart": self.chart.to_json(), "t": str(self.t),
                "y": str(y.numerator) if y.denominator == 1 else f"{y.numerator}/{y.denominator}",
                "variable": self.variable,
                "value_valuation": "inf" if self.value_valuation == math.inf else int(self.value_valuation),
                "derivative_valuation": self.derivative_valuation}

    @classmethod
    def from_json(cls, d) -> "Witness":
        vv = d["value_valuation"]
        return cls(Chart.from_json(d["chart"]), int(d["t"]), Fraction(d["y"]), d["variable"],
                   math.inf if vv == "inf" else int(vv), int(d["derivative_valuation"]))


def newton_data(chart: Chart, l: int, t: int, y: Fraction, variable: str):
    """(v(f), v(f')) for the one-variable polynomial f obtained by fixing the
    other coordinate; y is rescaled by a power of l so that f is l-integral."""
    y = Fraction(y)
    if variable == "exact":
        if chart.F_at(t, y) != 0:
            return None
        return math.inf, 0
    if variable == "t":
        if vq(y, l) < 0:
            return None
        f = chart.F_at(t, y)
        df = -chart.dP_at(t)
        return vq(f, l), vq(df, l)
    if variable == "y":
        e = min(0, vq(y, l)) if y != 0 else 0
        scale = Fraction(l) ** e
        c2 = chart.c * scale ** chart.k
        if vq(c2, l) < 0:
            return None
        Y = y / scale
        f = c2 * Y ** chart.k - chart.P_at(t)
        df = chart.k * c2 * Y ** (chart.k - 1)
        return vq(f, l), vq(df, l)
    raise InvalidArgument(f"unknown lifting variable {variable!r}")


def check_witness(w: Witness, l: int) -> bool:
    """Recompute the witness valuations exactly and test the lifting inequality."""
    if w.t % l ** w.chart.shift:
        return False
    data = newton_data(w.chart, l, w.t, w.y, w.variable)
    if data is None:
        return False
    vf, vd = data
    if vd == math.inf:
        return False
    if vf != w.value_valuation and not (vf == math.inf and w.value_valuation == math.inf):
        return False
    if vd != w.derivative_valuation and w.variable != "exact":
        return False
    return vf >= 2 * vd + 1


def _make_witness(chart: Chart, l: int, t: int, y, variable: str) -> Witness | None:
    data = newton_data(chart, l, t, Fraction(y), variable)
    if data is None:
        return None
    vf, vd = data
    if vd == math.inf or vf < 2 * vd + 1:
        return None
    return Witness(chart, t, Fraction(y), variable, vf, int(vd))


def point_at(chart: Chart, l: int, t: int) -> Witness | None:
    """A witness for a point with first coordinate t, when c*y^k = P(t) is solvable in Q_l."""
    Pt = chart.P_at(t)
    if Pt == 0:
        return Witness(chart, t, Fraction(0), "exact", math.inf, 0)
    w = Fraction(Pt, chart.c)
    if not is_kth_power_local(w, chart.k, l):
        return None
    vw = int(vq(w, l))
    e = vw // chart.k
    num, den = w.numerator, w.denominator
    _, un = nt.split_valuation(num, l)
    _, ud = nt.split_valuation(den, l)
    vk = nt.valuation(chart.k, l)
    VP = int(vq(Pt, l))
    # v(f) >= 2 v(f') + 1 needs v(r^k - u) >= 2 v(k) + v(P(t)) + 1
    K = 2 * vk + VP + 1
    mod = l ** K
    u = un * nt.inverse_mod(ud, mod) % mod
    r = kth_root_unit(u, chart.k, l, K)
    if r is None:
        raise InternalContradiction("k-th power test and root extraction disagree")
    y = Fraction(r) * Fraction(l) ** e
    wit = _make_witness(chart, l, t, y, "y")
    if wit is None:
        raise InternalContradiction("constructed k-th root does not satisfy the lifting inequality")
    return wit


def hensel_root_at(chart: Chart, l: int, t: int) -> Witness | None:
    """Witness for a root of P near t (a point with y = 0)."""
    return _make_witness(chart, l, t, 0, "t")


# ---------------------------------------------------------------------------
# search


@dataclass
class ChartSearch:
    chart: Chart
    witness: Witness | None = None
    exhausted: bool = False
    depth: int = 0
    classes: int = 0
    excluded_by_depth: dict = field(default_factory=dict)
    reason: str = ""

    def to_json(self) -> dict:
        return {"chart": self.chart.label, "exhausted": self.exhausted, "depth": self.depth,
                "classes": self.classes, "reason": self.reason,
                "excluded_by_depth": {str(k): v for k, v in sorted(self.excluded_by_depth.items())}}


def default_depth(chart: Chart, l: int) -> int:
    """Refutation depth 2*v_l(deg * lead * const * c) + 2*v_l(k) + 3."""
    lead = chart.P[-1][1] if chart.P else 1
    const = next((coef for e, coef in chart.P if e == 0), 1) or 1
    product = chart.degree * lead * const * chart.c
    return 2 * nt.valuation(product, l) + 2 * nt.valuation(chart.k, l) + 3


def search_chart(chart: Chart, l: int, depth: int | None = None,
                 max_classes: int = 200_000) -> ChartSearch:
    """Decide whether the chart has an l-adic point, refining classes breadth first."""
    depth = default_depth(chart, l) if depth is None else depth
    res = ChartSearch(chart)
    vc = nt.valuation(chart.c, l)
    k = chart.k
    K0 = unit_precision(k, l)
    uc = chart.c // l ** vc

    if chart.shift:
        frontier = [(0, chart.shift)]
    else:
        if l > ENUM_LIMIT:
            res.reason = f"residue classes mod {l} too many to enumerate"
            return res
        frontier = [(a, 1) for a in range(l)]
    while frontier:
        nxt = []
        for a, j in frontier:
            res.classes += 1
            res.depth = max(res.depth, j)
            if res.classes > max_classes:
                res.reason = f"class cap {max_classes} reached"
                return res
            wit = point_at(chart, l, a) or hensel_root_at(chart, l, a)
            if wit is not None:
                res.witness = wit
                return res
            Pa = chart.P_at(a)
            v0 = vq(Pa, l)
            if v0 < j:
                excluded = False
                if (v0 - vc) % k:
                    excluded = True
                elif j - v0 >= K0:
                    mod = l ** K0
                    unit = (Pa // l ** int(v0)) * nt.inverse_mod(uc, mod) % mod
                    excluded = not is_kth_power_unit(unit, k, l)
                    if not excluded:
                        raise InternalContradiction("decided class contains a point but none was found")
                if excluded:
                    res.excluded_by_depth[j] = res.excluded_by_depth.get(j, 0) + 1
                    continue
            if j >= depth:
                res.reason = f"depth {depth} reached with undecided classes"
                return res
            step = l ** j
            nxt.extend((a + i * step, j + 1) for i in range(l))
        frontier = nxt
    res.exhausted = True
    return res


def seed_points(charts, l: int, seeds=(0, 1, -1, 2, -2, 3)) -> Witness | None:
    """Try small first coordinates in every chart before any enumeration."""
    for chart in charts:
        step = l ** chart.shift
        for s in seeds:
            t = s * step
            wit = point_at(chart, l, t) or hensel_root_at(chart, l, t)
            if wit is not None:
                return wit
    return None


def random_points(charts, l: int, tries: int, seed: int = 0) -> Witness | None:
    """Sample first coordinates at random (used when l is too large to enumerate)."""
    rng = random.Random(seed * 1_000_003 + l % 1_000_003)
    for _ in range(tries):
        for chart in charts:
            t = rng.randrange(0, 1 << 32) * l ** chart.shift
            wit = point_at(chart, l, t) or hensel_root_at(chart, l, t)
            if wit is not None:
                return wit
    return None

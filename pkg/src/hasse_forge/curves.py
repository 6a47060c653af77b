"""Generalized Mordell and Fermat curves: genus, bad primes, local
solvability certificates, Brauer invariant sampling and counterexample
certificates."""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from . import _kernels
from . import _local as loc
from . import ntkernel as nt
from ._report import SCHEMA, jsonify
from .config import Caps, DEFAULT_CAPS
from .errors import (CertificateRefuted, IncompleteFactorization, InvalidArgument,
                     NeedsMorePrecision, PreconditionError)
from .fm import FmContext, FmReport, verify_fm
from .threefold import Septuple

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"
UNDECIDED = "undecided"

HENSEL = "hensel-witness"
EXPLICIT = "explicit-point"
HASSE_WEIL = "hasse-weil"
REAL = "real-analysis"
REFUTATION = "exhaustive-refutation"

HALF = Fraction(1, 2)


def _primes_of(values, hints=()) -> set[int]:
    out = set()
    for v in values:
        if v:
            out.update(nt.factorize(v, hints=hints).primes)
    return out


# ---------------------------------------------------------------------------
# curve descriptors


@dataclass(frozen=True)
class MordellCurve:
    """p*z^2 = E^2*x^(12n) - G^2, smooth projective model in P(1, 6n, 1)."""
    p: int
    n: int
    E: int
    G: int
    kappa: int | None = None
    hints: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 1 or self.E == 0 or self.G == 0:
            raise InvalidArgument("n must be positive and E, G nonzero")
        if self.kappa is not None and self.E ** 2 != 3 ** 6 * self.kappa ** 6 * self.G ** 2:
            raise InvalidArgument("(E/G)^2 must equal 3^6*kappa^6 in kappa form")

    @classmethod
    def from_kappa(cls, p: int, n: int, kappa: int, hints=()) -> "MordellCurve":
        """p*z^2 = 3^6*kappa^6*x^(12n) - 1."""
        return cls(p, n, 27 * kappa ** 3, 1, kappa, tuple(hints))

    @property
    def degree(self) -> int:
        return 12 * self.n

    @property
    def genus(self) -> int:
        return 6 * self.n - 1

    def charts(self):
        N = self.degree
        E2, G2 = self.E ** 2, self.G ** 2
        return [loc.Chart("affine", ((0, -G2), (N, E2)), self.p, 2, 0, ("x", "z")),
                loc.Chart("infinity", ((0, E2), (N, -G2)), self.p, 2, 1, ("y", "z"))]

    def bad_primes(self) -> list[int]:
        hints = tuple(self.hints)
        if self.kappa is not None:
            found = _primes_of([self.kappa, self.n], hints)
        else:
            found = _primes_of([self.n, self.E, self.G], hints)
        return sorted(found | {2, 3, self.p})

    def to_json(self) -> dict:
        out = {"family": "mordell", "p": self.p, "n": self.n, "E": self.E, "G": self.G,
               "equation": "p*z^2 = E^2*x^(12n) - G^2"}
        if self.kappa is not None:
            out["kappa"] = self.kappa
        if self.hints:
            out["hints"] = list(self.hints)
        return jsonify(out)


@dataclass(frozen=True)
class FermatCurve:
    """cx*x^m + cy*y^m + cz*z^m = 0 in P^2."""
    cx: int
    cy: int
    cz: int
    m: int
    family: tuple | None = None  # (p, n, kappa, chi)
    hints: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if 0 in (self.cx, self.cy, self.cz) or self.m < 3:
            raise InvalidArgument("coefficients must be nonzero and m >= 3")

    @classmethod
    def from_family(cls, p: int, n: int, kappa: int, chi: int, hints=()) -> "FermatCurve":
        """3^6*kappa^6*x^(12n) - y^(12n) - p*chi^2*z^(12n) = 0."""
        if chi % 2 == 0:
            raise InvalidArgument("chi must be odd")
        return cls(3 ** 6 * kappa ** 6, -1, -p * chi * chi, 12 * n, (p, n, kappa, chi),
                   tuple(hints))

    @property
    def genus(self) -> int:
        return (self.m - 1) * (self.m - 2) // 2

    @property
    def coefficients(self) -> dict:
        return {"x": self.cx, "y": self.cy, "z": self.cz}

    def charts_solving(self, var: str):
        """The two charts that cover the curve when ``var`` is solved for."""
        u, v = [w for w in ("x", "y", "z") if w != var]
        cs, cu, cv = self.coefficients[var], self.coefficients[u], self.coefficients[v]
        m = self.m
        return [loc.Chart(f"{v}=1", ((0, -cv), (m, -cu)), cs, m, 0, (u, var)),
                loc.Chart(f"{u}=1", ((0, -cu), (m, -cv)), cs, m, 1, (v, var))]

    def charts(self):
        return self.charts_solving("y")

    def bad_primes(self) -> list[int]:
        hints = tuple(self.hints)
        if self.family is not None:
            p, n, kappa, chi = self.family
            found = _primes_of([kappa, chi, n], hints) | {2, 3, p}
        else:
            found = _primes_of([self.m, self.cx, self.cy, self.cz], hints)
        return sorted(found | {2, 3})

    def to_json(self) -> dict:
        out = {"family": "fermat", "cx": self.cx, "cy": self.cy, "cz": self.cz, "m": self.m,
               "equation": "cx*x^m + cy*y^m + cz*z^m = 0"}
        if self.family is not None:
            out["tag"] = dict(zip(("p", "n", "kappa", "chi"), self.family))
        if self.hints:
            out["hints"] = list(self.hints)
        return jsonify(out)


def curve_from_json(d: dict):
    hints = tuple(int(h) for h in d.get("hints", ()))
    if d["family"] == "mordell":
        kappa = d.get("kappa")
        if kappa is not None:
            return MordellCurve.from_kappa(int(d["p"]), int(d["n"]), int(kappa), hints)
        return MordellCurve(int(d["p"]), int(d["n"]), int(d["E"]), int(d["G"]), None, hints)
    if d["family"] == "fermat":
        tag = d.get("tag")
        if tag is not None:
            return FermatCurve.from_family(int(tag["p"]), int(tag["n"]), int(tag["kappa"]),
                                           int(tag["chi"]), hints)
        return FermatCurve(int(d["cx"]), int(d["cy"]), int(d["cz"]), int(d["m"]), None, hints)
    raise InvalidArgument(f"unknown curve family {d.get('family')!r}")


def genus(curve) -> int:
    return curve.genus


def bad_primes(curve) -> list[int]:
    return curve.bad_primes()


def hasse_weil_bound(curve) -> int:
    """Good primes above this have a smooth point mod l by the Hasse-Weil bound."""
    return 4 * curve.genus ** 2


# ---------------------------------------------------------------------------
# place certificates


@dataclass
class PlaceCertificate:
    place: str
    verdict: str
    method: str
    witness: dict | None = None
    depth: int | None = None
    detail: dict = field(default_factory=dict)

    @property
    def solvable(self) -> bool:
        return self.verdict == SOLVABLE

    def to_json(self) -> dict:
        out = {"place": self.place, "verdict": self.verdict, "method": self.method}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.depth is not None:
            out["depth"] = self.depth
        if self.detail:
            out["detail"] = jsonify(self.detail)
        return out

    @classmethod
    def from_json(cls, d) -> "PlaceCertificate":
        return cls(d["place"], d["verdict"], d["method"], d.get("witness"), d.get("depth"),
                   d.get("detail", {}))


def _place_key(place: str):
    return (0, 0) if place == "inf" else (1, int(place)) if place.isdigit() else (2, 0)


def _projective_point(curve, wit: loc.Witness) -> dict:
    roles = wit.chart.roles
    t, y = wit.t, wit.y
    ystr = str(y.numerator) if y.denominator == 1 else f"{y.numerator}/{y.denominator}"
    if isinstance(curve, MordellCurve):
        if wit.chart.label == "affine":
            return {"x": str(t), "z": ystr, "y": "1"}
        return {"x": "1", "y": str(t), "z": ystr}
    coords = {roles[0]: str(t), roles[1]: ystr}
    fixed = wit.chart.label.split("=")[0]
    coords[fixed] = "1"
    return coords


def _witness_certificate(curve, place: int, wit: loc.Witness, detail=None) -> PlaceCertificate:
    method = EXPLICIT if wit.variable == "exact" else HENSEL
    data = wit.to_json()
    data["point"] = _projective_point(curve, wit)
    return PlaceCertificate(str(place), SOLVABLE, method, data, None, detail or {})


def _real_certificate(curve) -> PlaceCertificate:
    if isinstance(curve, MordellCurve):
        x0 = 1
        while curve.E ** 2 * x0 ** curve.degree <= curve.G ** 2:
            x0 += 1
        return PlaceCertificate("inf", SOLVABLE, REAL, {"x": str(x0)},
                                detail={"reason": "E^2*x^(12n) - G^2 > 0 at x and p > 0"})
    cs = curve.coefficients
    if curve.m % 2:
        return PlaceCertificate("inf", SOLVABLE, REAL, {"x": "1", "z": "0"},
                                detail={"reason": "odd exponent: y is a real m-th root"})
    for a, b, zero in (("x", "y", "z"), ("x", "z", "y"), ("y", "z", "x")):
        if cs[a] * cs[b] < 0:
            return PlaceCertificate("inf", SOLVABLE, REAL, {a: "1", zero: "0"},
                                    detail={"reason": f"c_{a}*c_{b} < 0 gives a real {b}"})
    return PlaceCertificate("inf", UNSOLVABLE, REAL,
                            detail={"reason": "even exponent and all coefficients share a sign"})


def _bfs_charts(curve, l: int):
    if isinstance(curve, MordellCurve):
        return curve.charts()
    vals = {v: nt.valuation(c, l) for v, c in curve.coefficients.items()}
    var = min(("y", "x", "z"), key=lambda v: vals[v])
    return curve.charts_solving(var)


def _seed_charts(curve):
    if isinstance(curve, MordellCurve):
        return curve.charts()
    return curve.charts_solving("y") + curve.charts_solving("x") + curve.charts_solving("z")


def local_solvable_at(curve, place, depth: int | None = None, caps: Caps = DEFAULT_CAPS,
                      seed: int = 0) -> PlaceCertificate:
    """Certificate of solvability (or its refutation) of the curve over Q_place."""
    if nt.is_place_infinite(place):
        return _real_certificate(curve)
    l = int(place)
    if not nt.is_prime(l):
        raise InvalidArgument(f"place must be a prime or inf, got {place}")
    depth = depth if depth is not None else caps.depth

    wit = loc.seed_points(_seed_charts(curve), l)
    if wit is not None:
        return _witness_certificate(curve, l, wit, {"search": "seed"})

    searches = []
    for chart in _bfs_charts(curve, l):
        res = loc.search_chart(chart, l, depth, caps.max_classes)
        searches.append(res)
        if res.witness is not None:
            return _witness_certificate(curve, l, res.witness,
                                        {"search": "class-refinement", "classes": res.classes})
    if all(r.exhausted for r in searches):
        return PlaceCertificate(str(l), UNSOLVABLE, REFUTATION, None,
                                max(r.depth for r in searches),
                                {"charts": [r.to_json() for r in searches]})
    wit = loc.random_points(_bfs_charts(curve, l), l, 200, seed)
    if wit is not None:
        return _witness_certificate(curve, l, wit, {"search": "random"})
    return PlaceCertificate(str(l), UNDECIDED, REFUTATION, None,
                            max((r.depth for r in searches), default=0),
                            {"charts": [r.to_json() for r in searches]})


def _kernel_first_points(curve, primes):
    if isinstance(curve, MordellCurve):
        a = [curve.E ** 2 % l for l in primes]
        b = [curve.G ** 2 % l for l in primes]
        pinv = [nt.inverse_mod(curve.p, l) for l in primes]
        xs, _ = _kernels.mordell_first_points(primes, a, b, pinv, curve.degree)
        return xs, curve.charts()[0]
    cx = [curve.cx % l for l in primes]
    cyinv = [nt.inverse_mod(curve.cy, l) for l in primes]
    cz = [curve.cz % l for l in primes]
    xs, _ = _kernels.fermat_first_points(primes, cx, cyinv, cz, curve.m)
    return xs, curve.charts_solving("y")[0]


def _sweep_good_primes(curve_json: dict, primes: list[int], depth, caps_dict) -> list[dict]:
    curve = curve_from_json(curve_json)
    caps = Caps(**caps_dict)
    small = [l for l in primes if l < _kernels.WORD_LIMIT]
    out = []
    xs, chart = _kernel_first_points(curve, small) if small else ([], None)
    for l, x in zip(small, xs):
        wit = None
        if x >= 0:
            wit = loc.point_at(chart, l, int(x)) or loc.hensel_root_at(chart, l, int(x))
        if wit is not None:
            out.append(_witness_certificate(curve, l, wit, {"search": "kernel"}).to_json())
        else:
            out.append(local_solvable_at(curve, l, depth, caps).to_json())
    for l in primes[len(small):]:
        out.append(local_solvable_at(curve, l, depth, caps).to_json())
    return out


@dataclass
class LocalCertification:
    places: list
    bound: int
    bad: list

    @property
    def verdict(self) -> str:
        verdicts = [c.verdict for c in self.places]
        if UNSOLVABLE in verdicts:
            return UNSOLVABLE
        if UNDECIDED in verdicts:
            return UNDECIDED
        return SOLVABLE

    @property
    def offending(self) -> list[str]:
        return [c.place for c in self.places if c.verdict != SOLVABLE]

    def __iter__(self):
        return iter(self.places)

    def __len__(self):
        return len(self.places)

    def place(self, name) -> PlaceCertificate:
        name = "inf" if nt.is_place_infinite(name) else str(name)
        return next(c for c in self.places if c.place == name)


def certify_everywhere_local(curve, caps: Caps = DEFAULT_CAPS, jobs: int = 1,
                             depth: int | None = None) -> LocalCertification:
    """Certificates for inf, every bad prime and every good prime up to 4*g^2,
    plus one Hasse-Weil record covering all larger good primes."""
    if jobs < 1:
        raise InvalidArgument("jobs must be at least 1")
    bad = curve.bad_primes()
    bound = hasse_weil_bound(curve)
    certs = [_real_certificate(curve)]
    for l in bad:
        certs.append(local_solvable_at(curve, l, depth, caps))
    bad_set = set(bad)
    good = [int(l) for l in nt.primes_up_to(bound) if int(l) not in bad_set]
    curve_json = curve.to_json()
    if jobs == 1 or len(good) < 64:
        swept = _sweep_good_primes(curve_json, good, depth, caps.as_dict())
    else:
        size = max(1, -(-len(good) // (4 * jobs)))
        chunks = [good[i:i + size] for i in range(0, len(good), size)]
        swept = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_sweep_good_primes, [curve_json] * len(chunks), chunks,
                                 [depth] * len(chunks), [caps.as_dict()] * len(chunks)):
                swept.extend(part)
    certs.extend(PlaceCertificate.from_json(d) for d in swept)
    certs.append(PlaceCertificate(f">{bound}", SOLVABLE, HASSE_WEIL, None, None,
                                  {"genus": curve.genus, "bound": bound,
                                   "bad_primes": bad,
                                   "reason": "good reduction and l + 1 - 2g*sqrt(l) > 0"}))
    certs.sort(key=lambda c: _place_key(c.place))
    return LocalCertification(certs, bound, bad)


def verify_place_certificate(curve, cert: PlaceCertificate) -> bool:
    """Offline re-check of a single place certificate."""
    if cert.method == REAL:
        return _real_certificate(curve).verdict == cert.verdict
    if cert.method == HASSE_WEIL:
        return cert.verdict == SOLVABLE and int(cert.detail["bound"]) == hasse_weil_bound(curve)
    l = int(cert.place)
    if cert.method in (HENSEL, EXPLICIT):
        wit = loc.Witness.from_json(cert.witness)
        allowed = {(c.label, c.P, c.c, c.k, c.shift) for c in _seed_charts(curve)}
        ch = wit.chart
        if (ch.label, ch.P, ch.c, ch.k, ch.shift) not in allowed:
            return False
        return cert.verdict == SOLVABLE and loc.check_witness(wit, l)
    if cert.method == REFUTATION:
        again = local_solvable_at(curve, l, depth=cert.depth)
        return again.verdict == cert.verdict
    return False


# ---------------------------------------------------------------------------
# Brauer invariants


@dataclass
class LocalPoint:
    """Weighted integral coordinates on the Mordell model, one of them
    known only modulo l**precision (``approx``)."""
    place: str
    X: int
    Y: int
    Z: int
    approx: str = "Z"
    precision: float = math.inf

    def to_json(self) -> dict:
        return {"place": self.place, "X": str(self.X), "Y": str(self.Y), "Z": str(self.Z),
                "approx": self.approx,
                "precision": "inf" if self.precision == math.inf else int(self.precision)}

    @classmethod
    def from_json(cls, d) -> "LocalPoint":
        prec = d["precision"]
        return cls(d["place"], int(d["X"]), int(d["Y"]), int(d["Z"]), d["approx"],
                   math.inf if prec == "inf" else int(prec))


def _check_ratio(s: Septuple, curve: MordellCurve):
    if s.E ** 2 * curve.G ** 2 != curve.E ** 2 * s.G ** 2:
        raise InvalidArgument("septuple and curve have different (E/G)^2")


def brauer_representatives(ctx: FmContext, s: Septuple, curve: MordellCurve, pt: LocalPoint):
    """The two integer representatives G^2*t1 and G^2*t2 at the point, scaled into
    the same square classes as A + B*x^(4n) +- p*z on the septuple's curve."""
    n = ctx.n
    A, B, G_s, G = s.A, s.B, s.G, curve.G
    base = G * G * (A * pt.Y ** (6 * n) + B * pt.X ** (4 * n) * pt.Y ** (2 * n))
    tail = ctx.p * pt.Z * G_s * G
    return base + tail, base - tail


def brauer_invariant_at(ctx: FmContext, s: Septuple, curve: MordellCurve, place,
                        point: LocalPoint) -> Fraction:
    """Local invariant (0 or 1/2) of the quaternion class at the point."""
    _check_ratio(s, curve)
    if nt.is_place_infinite(place):
        return Fraction(0) if ctx.p > 0 else HALF
    l = int(place)
    if point.approx == "Z":
        err = point.precision + nt.valuation(ctx.p * s.G * curve.G, l)
    else:
        err = point.precision
    margin = 3 if l == 2 else 1
    reps = brauer_representatives(ctx, s, curve, point)
    usable = []
    for T in reps:
        if T == 0:
            continue
        vT = nt.valuation(T, l)
        if vT + margin <= err:
            usable.append((vT, T))
    if not usable:
        raise NeedsMorePrecision(f"no representative has a determined class at {l}")
    usable.sort(key=lambda item: item[0])
    values = {nt.hilbert_symbol(ctx.p, T, l) for _, T in usable}
    if len(values) != 1:
        raise CertificateRefuted(f"representatives disagree at {l}")
    return Fraction(0) if values.pop() == 1 else HALF


def _mordell_point(curve: MordellCurve, chart: loc.Chart, l: int, t: int, K: int):
    """A LocalPoint with first chart coordinate t and z known to K digits past its valuation."""
    w = Fraction(chart.P_at(t), chart.c)
    if w == 0:
        X, Y = (t, 1) if chart.label == "affine" else (1, t)
        return LocalPoint(str(l), X, Y, 0, "Z", math.inf)
    if not loc.is_kth_power_local(w, 2, l):
        return None
    vw = int(loc.vq(w, l))
    if vw < 0:
        return None
    _, un = nt.split_valuation(w.numerator, l)
    _, ud = nt.split_valuation(w.denominator, l)
    mod = l ** K
    r = loc.kth_root_unit(un * nt.inverse_mod(ud, mod) % mod, 2, l, K)
    Z = r * l ** (vw // 2)
    X, Y = (t, 1) if chart.label == "affine" else (1, t)
    return LocalPoint(str(l), X, Y, Z, "Z", K + vw // 2)


def _fermat_point(curve: "FermatCurve", chart: loc.Chart, l: int, t: int, K: int):
    """A point (x, y, z) of the Fermat curve with y approximated, as a dict."""
    w = Fraction(chart.P_at(t), chart.c)
    coords = {}
    fixed = chart.label.split("=")[0]
    coords[fixed] = 1
    coords[chart.roles[0]] = t
    if w == 0:
        coords[chart.roles[1]] = 0
        return coords, math.inf
    if not loc.is_kth_power_local(w, curve.m, l):
        return None
    vw = int(loc.vq(w, l))
    if vw < 0:
        return None
    _, un = nt.split_valuation(w.numerator, l)
    _, ud = nt.split_valuation(w.denominator, l)
    mod = l ** K
    r = loc.kth_root_unit(un * nt.inverse_mod(ud, mod) % mod, curve.m, l, K)
    coords[chart.roles[1]] = r * l ** (vw // curve.m)
    return coords, K + vw // curve.m


def fermat_to_mordell_point(curve: "FermatCurve", coords: dict, precision, place) -> LocalPoint:
    """Image of a Fermat point under (x : y : z) -> (x : y : chi*z^(6n))."""
    p, n, kappa, chi = curve.family
    return LocalPoint(str(place), coords["x"], coords["y"], chi * coords["z"] ** (6 * n),
                      "Y", precision)


def sample_local_points(curve, place, count: int, seed: int = 0, precision: int = 40,
                        max_tries: int = 20000) -> list:
    """Up to ``count`` distinct local points, as Mordell-model LocalPoints.

    Fermat family points are pushed to the associated Mordell curve.
    """
    if nt.is_place_infinite(place):
        return _real_points(curve, count)
    l = int(place)
    rng = random.Random(f"{seed}:{l}")
    if isinstance(curve, MordellCurve):
        charts = curve.charts()
    else:
        charts = curve.charts_solving("y")
    points, seen = [], set()
    candidates = [0, 1, 2, 3]
    tries = 0
    while len(points) < count and tries < max_tries:
        tries += 1
        for chart in charts:
            if candidates:
                t = candidates[0]
            else:
                t = rng.randrange(0, l ** rng.randint(1, 6) * 16)
            t *= l ** chart.shift
            if (chart.label, t) in seen:
                continue
            seen.add((chart.label, t))
            if isinstance(curve, MordellCurve):
                pt = _mordell_point(curve, chart, l, t, precision)
            else:
                got = _fermat_point(curve, chart, l, t, precision)
                pt = None if got is None else fermat_to_mordell_point(curve, got[0], got[1], l)
            if pt is not None:
                points.append(pt)
                if len(points) >= count:
                    break
        if candidates:
            candidates.pop(0)
    return points


def _real_points(curve, count: int) -> list:
    """Real points (X, 1, Z) on the Mordell model with Z the floor of the real root."""
    mordell = curve if isinstance(curve, MordellCurve) else _associated_mordell(curve)
    N = 12 * mordell.n
    x0 = 1
    while mordell.E ** 2 * x0 ** N < mordell.G ** 2:
        x0 += 1
    pts = []
    for i in range(count):
        X = x0 + i
        Z = math.isqrt((mordell.E ** 2 * X ** N - mordell.G ** 2) // mordell.p)
        pts.append(LocalPoint("inf", X, 1, Z, "real", 0))
    return pts


@dataclass
class BrauerSample:
    place: str
    point: LocalPoint
    invariant: Fraction

    def to_json(self) -> dict:
        return {"place": self.place, "point": self.point.to_json(),
                "invariant": "1/2" if self.invariant == HALF else "0"}


def expected_invariant(ctx: FmContext, place) -> Fraction:
    return HALF if not nt.is_place_infinite(place) and int(place) == ctx.p else Fraction(0)


def _sample_invariants(ctx, s, curve, place, count, seed):
    mordell = curve if isinstance(curve, MordellCurve) else \
        MordellCurve.from_kappa(curve.family[0], curve.family[1], curve.family[2])
    out = []
    precision = 40
    for pt in sample_local_points(curve, place, count, seed, precision):
        prec_pt = pt
        for _ in range(4):
            try:
                inv = brauer_invariant_at(ctx, s, mordell, place, prec_pt)
                break
            except NeedsMorePrecision:
                precision *= 2
                again = sample_local_points(curve, place, count, seed, precision)
                prec_pt = next((q for q in again if (q.X, q.Y) == (pt.X, pt.Y)), prec_pt)
        else:
            continue
        out.append(BrauerSample("inf" if nt.is_place_infinite(place) else str(place),
                                prec_pt, inv))
    return out


# ---------------------------------------------------------------------------
# counterexample certificate


@dataclass
class CounterexampleCertificate:
    curve: object
    fm: FmReport
    places: LocalCertification
    brauer_samples: list
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "curve": self.curve.to_json(), "fm": self.fm.to_json(),
                "places": [c.to_json() for c in self.places.places],
                "brauer_samples": [b.to_json() for b in self.brauer_samples],
                "metadata": jsonify(self.metadata)}


def _associated_mordell(curve):
    if isinstance(curve, MordellCurve):
        return curve
    if curve.family is None:
        raise InvalidArgument("only family Fermat curves map to a Mordell curve")
    p, n, kappa, _ = curve.family
    return MordellCurve.from_kappa(p, n, kappa)


def certify_counterexample(ctx: FmContext, s: Septuple, curve, caps: Caps = DEFAULT_CAPS,
                           seed: int = 0, jobs: int = 1, brauer_places=None,
                           metadata=None, hints=()) -> CounterexampleCertificate:
    """FM report, local certificates at every place and sampled invariants."""
    mordell = _associated_mordell(curve)
    if (mordell.p, mordell.n) != (ctx.p, ctx.n):
        raise PreconditionError("curve and context disagree on (p, n)")
    _check_ratio(s, mordell)
    report = verify_fm(ctx, s, hints=hints)
    if not report.passed:
        raise PreconditionError("septuple fails the FM conditions",
                                {"failures": report.report.failures()})
    local = certify_everywhere_local(curve, caps, jobs)
    if local.verdict != SOLVABLE:
        raise PreconditionError(f"curve is not locally solvable at {', '.join(local.offending)}",
                                {"places": local.offending})
    places = brauer_places or [ctx.p, 2, 3, 5, nt.INF]
    samples = []
    for place in places:
        got = _sample_invariants(ctx, s, curve, place, caps.brauer_samples, seed)
        if len(got) < caps.brauer_samples:
            raise PreconditionError(f"only {len(got)} local points sampled at {place}")
        want = expected_invariant(ctx, place)
        for smp in got:
            if smp.invariant != want:
                raise CertificateRefuted(
                    f"invariant {smp.invariant} at {place} contradicts the expected {want}")
        samples.extend(got)
    meta = {"caps": caps.as_dict(), "seed": seed}
    meta.update(metadata or {})
    return CounterexampleCertificate(curve, report, local, samples, meta)


def invariant_sum(samples) -> Fraction:
    """Sum of one sampled invariant per place, modulo 1."""
    first = {}
    for smp in samples:
        first.setdefault(smp.place, smp.invariant)
    return sum(first.values(), Fraction(0)) % 1


def check_certificate(data: dict) -> dict:
    """Re-verify a serialized counterexample certificate without trusting it.

    Returns a dict with per-part verdicts and ``ok``.
    """
    problems = []
    if data.get("schema") != SCHEMA:
        problems.append(f"schema {data.get('schema')!r} is not {SCHEMA!r}")
    curve = curve_from_json(data["curve"])
    mordell = _associated_mordell(curve)
    fm = data["fm"]
    ctx = FmContext(int(fm["p"]), int(fm["n"]))
    s = Septuple.from_json(fm["septuple"])
    if (ctx.p, ctx.n) != (mordell.p, mordell.n):
        problems.append("fm context does not match the curve")
    rerun = verify_fm(ctx, s, hints=curve.hints)
    if not rerun.passed:
        problems.append(f"FM conditions fail on rerun: {rerun.report.failures()}")
    if rerun.overall != fm.get("overall"):
        problems.append("recorded FM verdict differs from the rerun")

    certs = [PlaceCertificate.from_json(d) for d in data["places"]]
    bad_places = [c.place for c in certs
                  if c.verdict != SOLVABLE or not verify_place_certificate(curve, c)]
    if bad_places:
        problems.append(f"place certificates rejected: {bad_places[:10]}")
    names = {c.place for c in certs}
    bound = hasse_weil_bound(curve)
    needed = {"inf", f">{bound}"} | {str(l) for l in curve.bad_primes()}
    needed |= {str(l) for l in nt.primes_up_to(bound)}
    missing = sorted(needed - names, key=_place_key)
    if missing:
        problems.append(f"places not covered: {missing[:10]}")

    per_place = {}
    for d in data.get("brauer_samples", []):
        place = d["place"]
        point = LocalPoint.from_json(d["point"])
        try:
            inv = brauer_invariant_at(ctx, s, mordell, place, point)
        except (NeedsMorePrecision, CertificateRefuted) as exc:
            problems.append(f"Brauer sample at {place}: {exc}")
            continue
        recorded = HALF if d["invariant"] == "1/2" else Fraction(0)
        if inv != recorded:
            problems.append(f"Brauer invariant at {place} recomputes to {inv}")
        per_place.setdefault(place, set()).add(inv)
    for place, invs in per_place.items():
        if invs != {expected_invariant(ctx, place)}:
            problems.append(f"invariants at {place} are {sorted(map(str, invs))}")
    total = sum((min(v) for v in per_place.values()), Fraction(0)) % 1
    if per_place and total != HALF:
        problems.append(f"sampled invariants sum to {total}, not 1/2")
    return {"ok": not problems, "problems": problems, "places_checked": len(certs),
            "brauer_samples_checked": len(data.get("brauer_samples", [])),
            "fm": rerun.overall}


# ---------------------------------------------------------------------------
# other curve operations


def curves_distinct(kappa1: int, kappa2: int, n: int, hints=()) -> bool | None:
    """Whether (kappa1/kappa2)^6 is not a 12n-th power in Q; None when undecided."""
    if kappa1 == 0 or kappa2 == 0:
        raise InvalidArgument("kappa values must be nonzero")
    try:
        f1 = nt.factorize(kappa1, hints=hints)
        f2 = nt.factorize(kappa2, hints=hints)
    except IncompleteFactorization:
        return None
    for q in sorted(set(f1.primes) | set(f2.primes)):
        if (6 * (f1.exponent(q) - f2.exponent(q))) % (12 * n):
            return True
    return False


def fermat_to_mordell_morphism_check(f: FermatCurve, d: MordellCurve, samples: int = 100,
                                     seed: int = 0, primes=None) -> bool:
    """Check that sampled F_l points of f land on d under (x : y : z) -> (x : y : chi*z^(6n))."""
    if f.family is None or d.kappa is None:
        raise InvalidArgument("both curves must be in family form")
    p, n, kappa, chi = f.family
    if (p, n, kappa) != (d.p, d.n, d.kappa) or d.G != 1:
        raise InvalidArgument("Fermat and Mordell family parameters differ")
    bad = set(f.bad_primes())
    if primes is None:
        primes = [l for l in nt.primes_up_to(400) if l not in bad][:12]
    rng = random.Random(seed)
    found = 0
    attempts = 0
    while found < samples and attempts < 50 * samples:
        attempts += 1
        l = primes[attempts % len(primes)]
        x, z = rng.randrange(l), rng.randrange(l)
        t = (-(f.cx * pow(x, f.m, l) + f.cz * pow(z, f.m, l)) * nt.inverse_mod(f.cy, l)) % l
        y = nt.nth_power_residue_test(t, f.m, l)
        if y is None or (x, y, z) == (0, 0, 0):
            continue
        X, Y, Z = x, y, chi * pow(z, 6 * n, l)
        if (p * Z * Z - d.E ** 2 * pow(X, d.degree, l) + d.G ** 2 * pow(Y, d.degree, l)) % l:
            return False
        found += 1
    return found > 0


def hyperelliptic_point_count(coeffs, q: int, backend=None) -> int:
    """Points over F_q on the smooth projective model of y^2 = f(x)."""
    coeffs = [int(c) % q for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    d = len(coeffs) - 1
    if d < 1:
        raise InvalidArgument("f must be nonconstant mod q")
    affine = _kernels.hyperelliptic_affine_count(coeffs, q, backend)
    if d % 2:
        return affine + 1
    return affine + 1 + nt.legendre(coeffs[0], q)


def hyperelliptic_genus(degree: int) -> int:
    return (degree - 1) // 2

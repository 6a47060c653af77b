"""Sequences of curves linked by power morphisms, and the descending chain condition.

A sequence X_1 <- X_2 <- ... satisfies the DCC of length h when X_1..X_{h-1}
have rational points, X_h is a Brauer-Manin counterexample and the genus
strictly increases.  Only levels 1..h+1 are materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from ._report import FAIL, NOT_APPLICABLE, PASS, jsonify
from .config import DEFAULT_CAPS, Caps
from .curves import (FermatCurve, MordellCurve, certify_counterexample,
                     hyperelliptic_genus)
from .errors import HasseForgeError, InvalidArgument
from .fm import FmContext
from .generators import gen_kappa, gen_kappa_chi
from .threefold import FamilyOneParams, family_one

MORDELL = "mordell"
FERMAT = "fermat"
GENERIC = "generic-hyperelliptic"

# primes used to spot-check morphisms over finite fields
_MORPHISM_PRIMES = (5, 7, 11, 13)


@dataclass
class CurveSequence:
    family: str
    p: int | None
    params: dict
    exponents: list[int]
    morphisms: list[int]
    h: int | None
    kappa: int | None = None
    kappa_star: int | None = None
    chi: int | None = None
    poly: tuple | None = None
    recipe: object = None

    @property
    def levels(self) -> int:
        return len(self.exponents)

    def exponent(self, i: int) -> int:
        return self.exponents[i - 1]

    def curve(self, i: int):
        e = self.exponent(i)
        if self.family == MORDELL:
            return MordellCurve.from_kappa(self.p, e // 12, self.kappa, hints=(self.kappa_star,))
        if self.family == FERMAT:
            return FermatCurve.from_family(self.p, e // 12, self.kappa, self.chi,
                                           hints=(self.kappa_star, self.chi))
        raise InvalidArgument("generic sequences have no curve object; use level_poly")

    def level_poly(self, i: int) -> list[int]:
        """Coefficients (high to low) of F(x^(m^i)) for a generic sequence."""
        e = self.exponent(i)
        d = len(self.poly) - 1
        out = [0] * (d * e + 1)
        for k, c in enumerate(self.poly):
            out[k * e] = c
        return out

    def genus(self, i: int) -> int:
        e = self.exponent(i)
        if self.family == MORDELL:
            return e // 2 - 1
        if self.family == FERMAT:
            return (e - 1) * (e - 2) // 2
        return hyperelliptic_genus((len(self.poly) - 1) * e)

    def witnesses(self, i: int) -> list[tuple]:
        """Rational points guaranteed by the construction at level i (may be empty)."""
        if self.family == GENERIC:
            return [(Fraction(1), Fraction(0))]
        if self.h is None or i > self.h - 1:
            return []
        x0 = Fraction(1, 9 * self.kappa_star)
        k = self.h - 1 - i
        if self.family == MORDELL:
            base = [(x0, Fraction(0)), (-x0, Fraction(0))]
            return [(x ** (self.params["n0"] ** k), z) for x, z in base]
        base = [(sx * x0, Fraction(sy), Fraction(0)) for sx in (1, -1) for sy in (1, -1)]
        return [tuple(c ** (self.params["n0"] ** k) for c in pt) for pt in base]

    def on_level(self, i: int, pt) -> bool:
        """Exact substitution of a rational point into the level-i equation."""
        e = self.exponent(i)
        if self.family == MORDELL:
            x, z = pt
            return self.p * z * z == 3 ** 6 * self.kappa ** 6 * x ** e - 1
        if self.family == FERMAT:
            x, y, z = pt
            return 3 ** 6 * self.kappa ** 6 * x ** e - y ** e - self.p * self.chi ** 2 * z ** e == 0
        x, z = pt
        return z * z == _eval(self.level_poly(i), x)

    def to_json(self) -> dict:
        return jsonify({
            "family": self.family, "p": self.p, "params": self.params,
            "exponents": self.exponents, "morphisms": self.morphisms, "h": self.h,
            "kappa": self.kappa, "kappa_star": self.kappa_star, "chi": self.chi,
            "poly": None if self.poly is None else list(self.poly),
            "genera": [self.genus(i) for i in range(1, self.levels + 1)],
        })


def _eval(coeffs, x):
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _caps_for(n: int, caps: Caps) -> Caps:
    return caps if n <= caps.max_n else caps.replace(max_n=n)


def build_mordell_sequence(p: int, n0: int, n1: int, h: int, eps: int,
                           caps: Caps = DEFAULT_CAPS) -> CurveSequence:
    """Levels p*z^2 = 3^6*kappa^6*x^(e_i) - 1 with a counterexample at level h."""
    if n0 < 2 or n1 < 1 or h < 1 or eps < 1:
        raise InvalidArgument("need n0 >= 2, n1 >= 1, h >= 1, eps >= 1")
    if n0 ** eps <= 2:
        raise InvalidArgument("need n0^eps > 2")
    n = n0 ** (h + eps) * n1
    m = n0 ** h * n1
    recipe = gen_kappa(p, n, 2 * m, 2 * m, _caps_for(n, caps), max_n=n)
    exps = [12 * n0 ** (i + 1) * n1 if i <= h - 1 else 12 * n0 ** (i + eps) * n1
            for i in range(1, h + 2)]
    morph = [exps[i] // exps[i - 1] for i in range(1, len(exps))]
    return CurveSequence(MORDELL, p, {"n0": n0, "n1": n1, "eps": eps, "n": n, "m": m},
                         exps, morph, h, recipe.kappa, recipe.kappa_star, recipe=recipe)


def build_fermat_sequence(p: int, n0: int, n1: int, h: int,
                          caps: Caps = DEFAULT_CAPS) -> CurveSequence:
    """Levels 3^6*kappa^6*x^e - y^e - p*chi^2*z^e = 0 with e = 12*n0^i*n1."""
    if n0 < 3 or n1 < 1 or h < 1:
        raise InvalidArgument("need n0 >= 3, n1 >= 1, h >= 1")
    n = n0 ** h * n1
    m = n0 ** (h - 1) * n1
    recipe = gen_kappa_chi(p, n, 2 * m, 2 * m, _caps_for(n, caps), max_n=n)
    exps = [12 * n0 ** i * n1 for i in range(1, h + 2)]
    morph = [n0] * h
    return CurveSequence(FERMAT, p, {"n0": n0, "n1": n1, "n": n, "m": m}, exps, morph, h,
                         recipe.kappa, recipe.kappa_star, recipe.chi, recipe=recipe)


def build_non_dcc(n: int, m: int, F, levels: int = 3) -> CurveSequence:
    """Levels z^2 = F(x^(m^i)); every level carries (1, 0)."""
    if n < 2 or m < 2 or levels < 1:
        raise InvalidArgument("need n >= 2, m >= 2 and at least one level")
    x = sympy.Symbol("x")
    if isinstance(F, str):
        poly = sympy.Poly(sympy.sympify(F), x)
    else:
        poly = sympy.Poly([int(c) for c in F], x)
    if not all(c.is_integer for c in poly.all_coeffs()):
        raise InvalidArgument("F must have integer coefficients")
    coeffs = tuple(int(c) for c in poly.all_coeffs())
    if poly.degree() != n:
        raise InvalidArgument(f"F has degree {poly.degree()}, expected {n}")
    if coeffs[-1] == 0:
        raise InvalidArgument("F(0) must be nonzero")
    if sum(coeffs) != 0:
        raise InvalidArgument("F(1) must be zero")
    if sympy.gcd(poly, poly.diff(x)).degree() != 0:
        raise InvalidArgument("F must be separable")
    exps = [m ** i for i in range(1, levels + 1)]
    return CurveSequence(GENERIC, None, {"n": n, "m": m}, exps, [m] * (levels - 1), None,
                         poly=coeffs)


# ---------------------------------------------------------------------------
# verification


@dataclass
class DccReport:
    family: str
    h: int | None
    levels: list[dict]
    checks: dict
    verdict: str
    failure: dict | None = None
    certificate: object = None

    @property
    def satisfied(self) -> bool:
        return (self.failure is None and self.h is not None
                and self.checks.get("DCC2") == PASS
                and all(v in (PASS, NOT_APPLICABLE) for v in self.checks.values()))

    def to_json(self) -> dict:
        out = {"family": self.family, "h": self.h, "levels": self.levels,
               "checks": self.checks, "verdict": self.verdict, "failure": self.failure}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return jsonify(out)


def _point_json(pt) -> list[str]:
    return [str(c) for c in pt]


def _morphism_check(seq: CurveSequence, i: int) -> bool:
    """Sampled F_q points of level i+1 map to level i under the power morphism."""
    e_hi, e_lo = seq.exponent(i + 1), seq.exponent(i)
    s = seq.morphisms[i - 1]
    checked = 0
    for q in _MORPHISM_PRIMES:
        if seq.p is not None and q == seq.p:
            continue
        if seq.family == MORDELL:
            a = 3 ** 6 * pow(seq.kappa, 6, q) % q
            if a == 0:
                continue
            pts = [(x, z) for x in range(q) for z in range(q)
                   if (seq.p * z * z - a * pow(x, e_hi, q) + 1) % q == 0]
            for x, z in pts:
                if (seq.p * z * z - a * pow(pow(x, s, q), e_lo, q) + 1) % q:
                    return False
            checked += len(pts)
        elif seq.family == FERMAT:
            a = 3 ** 6 * pow(seq.kappa, 6, q) % q
            c = seq.p * seq.chi * seq.chi % q
            if a == 0 or c == 0:
                continue
            for x in range(q):
                for y in range(q):
                    for z in (0, 1):
                        if (a * pow(x, e_hi, q) - pow(y, e_hi, q) - c * pow(z, e_hi, q)) % q:
                            continue
                        img = [pow(w, s, q) for w in (x, y, z)]
                        if (a * pow(img[0], e_lo, q) - pow(img[1], e_lo, q)
                                - c * pow(img[2], e_lo, q)) % q:
                            return False
                        checked += 1
        else:
            hi, lo = seq.level_poly(i + 1), seq.level_poly(i)
            for x in range(q):
                for z in range(q):
                    if (z * z - int(_eval([c % q for c in hi], x))) % q:
                        continue
                    if (z * z - int(_eval([c % q for c in lo], pow(x, s, q)))) % q:
                        return False
                    checked += 1
    return checked > 0


def verify_dcc(seq: CurveSequence, h: int | None = None, caps: Caps = DEFAULT_CAPS,
               certify: bool = True, seed: int = 0, jobs: int = 1) -> DccReport:
    """Check (DCC1)-(DCC3) for the sequence with the claimed length h.

    With ``certify`` false the level-h counterexample certificate is skipped
    and (DCC2) is reported as not applicable.
    """
    h = seq.h if h is None else h
    rows = []
    checks = {}
    failure = None

    genera = [seq.genus(i) for i in range(1, seq.levels + 1)]
    checks["DCC3"] = PASS if all(a < b for a, b in zip(genera, genera[1:])) else FAIL
    if checks["DCC3"] == FAIL:
        failure = {"level": None, "reason": "genus is not strictly increasing"}

    morph_ok = all(_morphism_check(seq, i) for i in range(1, seq.levels))
    checks["morphisms"] = PASS if morph_ok else FAIL
    if not morph_ok and failure is None:
        failure = {"level": None, "reason": "a power morphism does not map level to level"}

    for i in range(1, seq.levels + 1):
        row = {"level": i, "exponent": seq.exponent(i), "genus": seq.genus(i)}
        wits = seq.witnesses(i)
        good = [w for w in wits if seq.on_level(i, w)]
        if wits:
            row["witnesses"] = [_point_json(w) for w in good]
            row["status"] = "rational-point" if len(good) == len(wits) else "bad-witness"
            if len(good) != len(wits) and failure is None:
                failure = {"level": i, "reason": "a constructed witness does not satisfy the equation"}
        elif h is not None and i == h:
            row["status"] = "counterexample" if certify else "not-certified"
        elif h is not None and i > h:
            row["status"] = "no-rational-point (inherited from level h)"
        else:
            row["status"] = "no-witness"
            if failure is None:
                failure = {"level": i, "reason": "no rational point recorded below level h"}
        rows.append(row)

    if seq.family == GENERIC:
        checks["DCC1"] = PASS
        checks["DCC2"] = FAIL
        verdict = "does not satisfy the DCC: every materialized level has a rational point"
        return DccReport(seq.family, None, rows, checks, verdict, None)

    if h is None or h < 1:
        raise InvalidArgument("a DCC length h >= 1 is required")
    need = 2 if seq.family == MORDELL else 4
    if h == 1:
        checks["DCC1"] = NOT_APPLICABLE
    else:
        ok = all(r.get("status") == "rational-point" for r in rows[:h - 1])
        ok = ok and len(rows[h - 2].get("witnesses", [])) >= need
        checks["DCC1"] = PASS if ok else FAIL
        if not ok and failure is None:
            failure = {"level": h - 1, "reason": f"fewer than {need} witnesses"}
        prop_ok = True
        top = seq.witnesses(h - 1)
        n0 = seq.params["n0"]
        for i in range(1, h - 1):
            for w in top:
                img = (w[0] ** (n0 ** (h - 1 - i)),) + tuple(
                    c ** (n0 ** (h - 1 - i)) if seq.family == FERMAT else c for c in w[1:])
                prop_ok = prop_ok and seq.on_level(i, img)
        checks["propagation"] = PASS if prop_ok else FAIL

    cert = None
    if certify:
        curve = seq.curve(h)
        n_h = seq.exponent(h) // 12
        s = family_one(FamilyOneParams(seq.p, 1, 1, seq.kappa))
        try:
            cert = certify_counterexample(FmContext(seq.p, n_h), s, curve, caps, seed, jobs,
                                          hints=(seq.kappa_star,) + ((seq.chi,) if seq.chi else ()))
            checks["DCC2"] = PASS
        except HasseForgeError as exc:
            checks["DCC2"] = FAIL
            rows[h - 1]["status"] = "failed"
            rows[h - 1]["reason"] = str(exc)
            if failure is None:
                failure = {"level": h, "reason": f"{type(exc).__name__}: {exc}"}
    else:
        checks["DCC2"] = NOT_APPLICABLE

    if failure is not None:
        verdict = f"fails at level {failure['level']}: {failure['reason']}"
    elif checks["DCC2"] == PASS:
        verdict = f"satisfies the DCC of length {h}"
    else:
        verdict = f"consistent with the DCC of length {h} (level {h} not certified)"
    return DccReport(seq.family, h, rows, checks, verdict, failure, cert)

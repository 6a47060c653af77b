"""End-to-end acceptance checks; each prints one ``criterion N: PASS/FAIL`` line."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import numpy as np
import sympy

from hasse_forge import curves as cv
from hasse_forge import dcc, generators
from hasse_forge import ntkernel as nt
from hasse_forge.config import DEFAULT_CAPS
from hasse_forge.errors import HasseForgeError
from hasse_forge.fm import FmContext, verify_fm
from hasse_forge.threefold import FamilyOneParams, family_one, on_threefold


def _report(capsys, n: int, ok: bool, detail: str = ""):
    with capsys.disabled():
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        print(f"\n{line}" + (f" ({detail})" if detail else ""))


# ---------------------------------------------------------------------------
# 1


def test_criterion_1_family_one(capsys):
    start = time.perf_counter()
    s = family_one(FamilyOneParams(17, 1, 1, 3))
    rep = verify_fm(FmContext(17, 2), s)
    elapsed = time.perf_counter() - start
    ok = (tuple(s) == (4, 648, 2106, 13, 2187, 54, 3) and on_threefold(17, s)
          and rep.passed and all(rep.status(f"A{i}") == "pass" for i in range(1, 8))
          and rep.H == 6 and elapsed < 1.0)
    _report(capsys, 1, ok, f"H={rep.H}, {elapsed:.3f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2


def test_criterion_2_mordell_counterexample(capsys):
    start = time.perf_counter()
    recipe = generators.gen_kappa(17, 2, 1, 1)
    conds = recipe.conditions
    cond_ok = all(conds.status(c) == "pass" for c in ("B3", "B4", "B5", "C1", "C2", "C3"))
    curve = cv.MordellCurve.from_kappa(17, 2, recipe.kappa, hints=(recipe.kappa_star,))
    s = family_one(FamilyOneParams(17, 1, 1, recipe.kappa))
    cert = cv.certify_counterexample(FmContext(17, 2), s, curve, hints=(recipe.kappa_star,))
    elapsed = time.perf_counter() - start

    by_place = {c.place: c for c in cert.places.places}
    bound = generators.c3_bound(2)
    needed = {"inf", "2", "3", "17"} | {str(l) for l in curve.bad_primes()}
    needed |= {str(l) for l in nt.primes_up_to(bound)}
    places_ok = (bound == 484 and needed <= set(by_place)
                 and all(by_place[k].verdict == cv.SOLVABLE for k in needed)
                 and all(cv.verify_place_certificate(curve, by_place[k]) for k in needed)
                 and by_place[f">{bound}"].verdict == cv.SOLVABLE)

    per_place = {}
    for smp in cert.brauer_samples:
        per_place.setdefault(smp.place, []).append(smp.invariant)
    others = [k for k in per_place if k != "17"]
    brauer_ok = (len(per_place.get("17", [])) >= 5
                 and all(v == Fraction(1, 2) for v in per_place["17"])
                 and len(others) >= 3
                 and all(len(per_place[k]) >= 5 and all(v == 0 for v in per_place[k])
                         for k in others)
                 and cv.invariant_sum(cert.brauer_samples) == Fraction(1, 2))
    ok = cond_ok and places_ok and brauer_ok and elapsed < 300
    _report(capsys, 2, ok, f"kappa_*={recipe.kappa_star}, {len(by_place)} places, {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 3


def test_criterion_3_fermat_counterexample(capsys):
    start = time.perf_counter()
    detail = ""
    ok = False
    try:
        recipe = generators.gen_kappa_chi(17, 2, 1, 1)
        cond_ok = all(recipe.conditions.status(f"D{i}") == "pass" for i in range(1, 8))
        hints = (recipe.kappa_star, recipe.chi)
        curve = cv.FermatCurve.from_family(17, 2, recipe.kappa, recipe.chi, hints=hints)
        s = family_one(FamilyOneParams(17, 1, 1, recipe.kappa))
        cert = cv.certify_counterexample(FmContext(17, 2), s, curve, jobs=4, hints=hints)
        swept = {c.place for c in cert.places.places}
        sweep_ok = {str(l) for l in nt.primes_up_to(generators.d7_bound(2))} <= swept
        elapsed = time.perf_counter() - start
        ok = cond_ok and sweep_ok and elapsed < 1800
        detail = f"{elapsed:.1f}s"
    except HasseForgeError as exc:
        detail = f"{type(exc).__name__}: {exc}"
    _report(capsys, 3, ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# 4


def _squarefree_part(a: int) -> int:
    sign = -1 if a < 0 else 1
    out = 1
    for q, e in sympy.factorint(abs(a)).items():
        if e % 2:
            out *= q
    return sign * out


_SQUARES: dict = {}


def _square_table(l: int, k: int) -> np.ndarray:
    key = (l, k)
    if key not in _SQUARES:
        mod = l ** k
        table = np.zeros(mod, dtype=bool)
        z = np.arange(mod, dtype=np.int64)
        table[(z * z) % mod] = True
        _SQUARES[key] = table
    return _SQUARES[key]


def _brute_hilbert(a: int, b: int, l: int) -> int:
    """+1 iff z^2 = a x^2 + b y^2 has a primitive solution mod l^(2 v_l(ab) + 3).

    Primitive triples are scaled so x = 1, or l | x and y = 1; z cannot be
    the only unit coordinate since z^2 would then vanish mod l.
    """
    k = 2 * nt.valuation(a * b, l) + 3
    mod = l ** k
    sq = _square_table(l, k)
    y = np.arange(mod, dtype=np.int64)
    if sq[(a + b * (y * y % mod)) % mod].any():
        return 1
    x = np.arange(0, mod, l, dtype=np.int64)
    if sq[(a * (x * x % mod) + b) % mod].any():
        return 1
    return -1


def test_criterion_4_hilbert_oracle(capsys):
    values = [v for v in range(-30, 31) if v]
    cache = {}
    mismatches = []
    formula_bad = []
    for a in values:
        for b in values:
            key = (_squarefree_part(a), _squarefree_part(b))
            for place in (2, 3, 5, 7, nt.INF):
                got = nt.hilbert_symbol(a, b, place)
                if place == nt.INF:
                    want = -1 if (a < 0 and b < 0) else 1
                else:
                    ck = key + (place,)
                    if ck not in cache:
                        cache[ck] = _brute_hilbert(key[0], key[1], place)
                    want = cache[ck]
                if got != want:
                    mismatches.append((a, b, place))
            places = set(nt.prime_factors(2 * abs(a * b)))
            prod = nt.hilbert_symbol(a, b, nt.INF)
            for l in places:
                prod *= nt.hilbert_symbol(a, b, l)
            if prod != 1:
                formula_bad.append((a, b))
    ok = not mismatches and not formula_bad
    _report(capsys, 4, ok, f"{len(values) ** 2} pairs, {len(mismatches)} mismatches, "
                           f"{len(formula_bad)} product-formula failures")
    assert ok


# ---------------------------------------------------------------------------
# 5


def _euler(v, q):
    return 1 if pow(v, (q - 1) // 2, q) == 1 else -1


def _brute_count(coeffs, q):
    f = [c % q for c in coeffs]
    d = len(f) - 1
    total = 0
    for x in range(q):
        v = 0
        for c in f:
            v = (v * x + c) % q
        total += 1 if v == 0 else 1 + _euler(v, q)
    if d % 2:
        return total + 1
    return total + 1 + _euler(f[0], q)


def test_criterion_5_hasse_weil(capsys):
    rng = random.Random(2024)
    primes = [q for q in nt.primes_up_to(101) if q > 2]
    violations = []
    disagreements = []
    done = 0
    X = sympy.Symbol("x")
    while done < 50:
        q = rng.choice(primes)
        d = rng.randint(3, 12)
        coeffs = [rng.randrange(1, q)] + [rng.randrange(q) for _ in range(d)]
        poly = sympy.Poly(coeffs, X, modulus=q)
        if sympy.degree(sympy.gcd(poly, poly.diff(X))) > 0:
            continue
        g = cv.hyperelliptic_genus(d)
        brute = _brute_count(coeffs, q)
        fast = cv.hyperelliptic_point_count(coeffs, q)
        if fast != brute:
            disagreements.append((q, coeffs))
        if abs(brute - (q + 1)) > 2 * g * math.sqrt(q):
            violations.append((q, coeffs, brute))
        done += 1
    ok = not violations and not disagreements
    _report(capsys, 5, ok, f"{done} curves, {len(violations)} violations")
    assert ok


# ---------------------------------------------------------------------------
# 6


def test_criterion_6_power_lemmas(capsys):
    bad = []
    for s in (3, 5, 7, 9):
        for q in nt.primes_up_to(999):
            if q < 3:
                continue
            surjective = len({pow(h, s, q) for h in range(q)}) == q
            if nt.universal_power_prime(s, q) != surjective:
                bad.append(("plain", s, q))
            S, r = divmod(q, s)
            if math.gcd(r - 1, s) == 1 and nt.universal_power_prime(s, q, r, S) != surjective:
                bad.append(("constructive", s, q))
    rng = random.Random(7)
    small = [l for l in nt.primes_up_to(499) if l % 4 == 3]
    for _ in range(500):
        l = rng.choice(small)
        n = rng.randint(1, 6)
        x = pow(rng.randrange(1, l), 2, l)
        w = nt.iterated_sqrt_3mod4(x, n, l)
        if pow(w, 2 ** n, l) != x:
            bad.append(("sqrt", x, n, l))
    ok = not bad
    _report(capsys, 6, ok, f"{len(bad)} failures")
    assert ok


# ---------------------------------------------------------------------------
# 7


def test_criterion_7_negative_control(capsys):
    curve = cv.MordellCurve.from_kappa(17, 2, 3)
    cert = cv.local_solvable_at(curve, 17)
    eighth = {pow(x, 8, 17) for x in range(1, 17)}
    ok = (cert.verdict == cv.UNSOLVABLE and cert.method == cv.REFUTATION
          and eighth == {1, 16} and 13 not in eighth
          and cv.verify_place_certificate(curve, cert))
    _report(capsys, 7, ok, f"verdict {cert.verdict} by {cert.method}")
    assert ok


# ---------------------------------------------------------------------------
# 8


def _dcc_family(builder, need):
    seq = builder()
    rep = dcc.verify_dcc(seq)
    level1 = rep.levels[0]
    genera = [seq.genus(i) for i in range(1, seq.levels + 1)]
    return (rep.satisfied and level1.get("status") == "rational-point"
            and len(level1.get("witnesses", [])) >= need
            and rep.certificate is not None
            and all(a < b for a, b in zip(genera, genera[1:])))


def test_criterion_8_dcc_sequences(capsys):
    parts = {}
    notes = []
    for name, builder, need in (
            ("mordell", lambda: dcc.build_mordell_sequence(17, 3, 1, 2, 1), 2),
            ("fermat", lambda: dcc.build_fermat_sequence(17, 3, 1, 2), 4)):
        try:
            parts[name] = _dcc_family(builder, need)
        except HasseForgeError as exc:
            parts[name] = False
            notes.append(f"{name}: {type(exc).__name__}")
    seq = dcc.build_non_dcc(2, 2, "x**2 - 1", levels=3)
    rep = dcc.verify_dcc(seq)
    parts["generic"] = (not rep.satisfied and all(
        r["witnesses"] == [["1", "0"]] for r in rep.levels)
        and all(seq.on_level(i, (Fraction(1), Fraction(0))) for i in range(1, 4)))
    ok = all(parts.values())
    _report(capsys, 8, ok, ", ".join(f"{k}={'ok' if v else 'no'}" for k, v in parts.items())
            + (f"; {'; '.join(notes)}" if notes else ""))
    assert ok


# ---------------------------------------------------------------------------
# 9


def test_criterion_9_family_two(capsys):
    ok = False
    try:
        recipe = generators.gen_family_two(17, schinzel=True)
        s = recipe.septuple
        primes_ok = all(nt.is_prime(int(v)) for v in recipe.primes.values())
        fm_ok = all(verify_fm(FmContext(17, n), s).passed for n in (1, 2, 3))
        gap_ok = all(v <= 2 for v in recipe.n_eg_detail["set"].values())
        ok = (primes_ok and fm_ok and gap_ok and recipe.n_eg <= 1
              and recipe.scanned <= DEFAULT_CAPS.schinzel_scan)
        detail = f"mu1={recipe.mu1}, n_EG={recipe.n_eg}"
    except HasseForgeError as exc:
        detail = f"{type(exc).__name__}: {exc}"
    _report(capsys, 9, ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# 10


def test_criterion_10_non_isomorphism(capsys):
    first = generators.gen_kappa(17, 2, 1, 1)
    second = generators.gen_kappa(17, 2, 1, 1, exclusions=(first.kappa_star,))
    distinct = cv.curves_distinct(first.kappa, second.kappa, 2,
                                  hints=(first.kappa_star, second.kappa_star))
    ok = first.kappa_star != second.kappa_star and distinct is True
    _report(capsys, 10, ok, f"kappa_* {first.kappa_star} vs {second.kappa_star}")
    assert ok

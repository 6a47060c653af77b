from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from hasse_forge import curves as cv
from hasse_forge import generators
from hasse_forge.errors import InvalidArgument
from hasse_forge.fm import FmContext
from hasse_forge.threefold import FamilyOneParams, family_one

# ---------------------------------------------------------------------------
# independent local-solvability oracle for p*z^2 = E^2*x^N - G^2*y^N
#
# A primitive (x, y) scales to x = 1 or (y = 1, l | x); N is even so the
# scaling keeps squares.  A class u mod l^j fixes f(u) mod l^j, which decides
# whether p*f(u) is a square in Q_l once the unit part is known far enough.


def _square_decision(t: int, j: int, l: int, p: int):
    """True/False when p*t (t known mod l^j) is decided a square/non-square; None otherwise."""
    t %= l ** j
    if t == 0:
        return None
    v = 0
    while t % l == 0:
        t //= l
        v += 1
    known = j - v
    w = p
    while w % l == 0:
        w //= l
        v += 1
    if v % 2:
        return False
    u = t * w
    if l == 2:
        if known < 3:
            return None
        return u % 8 == 1
    return pow(u % l, (l - 1) // 2, l) == 1


def _oracle(curve: cv.MordellCurve, l: int, max_j: int = 14, max_classes: int = 200_000):
    N, E2, G2 = curve.degree, curve.E ** 2, curve.G ** 2
    charts = [(lambda u: E2 - G2 * u ** N, [(u, 1) for u in range(l)]),
              (lambda u: E2 * u ** N - G2, [(0, 1)])]
    undecided = False
    seen = 0
    for f, start in charts:
        stack = list(start)
        while stack:
            u, j = stack.pop()
            seen += 1
            if seen > max_classes:
                return None
            got = _square_decision(f(u), j, l, curve.p)
            if got is True:
                return True
            if got is False:
                continue
            if j >= max_j:
                undecided = True
                continue
            stack.extend((u + k * l ** j, j + 1) for k in range(l))
    return None if undecided else False


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(1, 40), st.sampled_from([2, 3, 5, 7, 11, 13, 17]))
def test_mordell_family_matches_oracle(kappa, l):
    curve = cv.MordellCurve.from_kappa(17, 1, kappa)
    want = _oracle(curve, l)
    cert = cv.local_solvable_at(curve, l)
    if want is not None:
        assert cert.verdict == (cv.SOLVABLE if want else cv.UNSOLVABLE)
    assert cv.verify_place_certificate(curve, cert)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(1, 300), st.integers(1, 50), st.sampled_from([2, 3, 5, 7, 13, 17]),
       st.sampled_from([17, 41]))
def test_raw_mordell_matches_oracle(E, G, l, p):
    curve = cv.MordellCurve(p, 1, E, G)
    want = _oracle(curve, l)
    cert = cv.local_solvable_at(curve, l)
    if want is not None:
        assert cert.verdict == (cv.SOLVABLE if want else cv.UNSOLVABLE)


def test_kappa_three_is_refuted_at_seventeen():
    curve = cv.MordellCurve.from_kappa(17, 2, 3)
    cert = cv.local_solvable_at(curve, 17)
    assert cert.verdict == cv.UNSOLVABLE and cert.method == cv.REFUTATION
    assert _oracle(curve, 17) is False


def test_real_place_and_place_validation():
    curve = cv.MordellCurve.from_kappa(17, 1, 5)
    assert cv.local_solvable_at(curve, "inf").verdict == cv.SOLVABLE
    with pytest.raises(InvalidArgument):
        cv.local_solvable_at(curve, 15)


# ---------------------------------------------------------------------------
# descriptors


def test_curve_descriptors():
    m = cv.MordellCurve.from_kappa(17, 2, 5)
    assert m.degree == 24 and m.genus == 11 and cv.hasse_weil_bound(m) == 484
    assert m.bad_primes() == [2, 3, 5, 17]
    f = cv.FermatCurve.from_family(17, 2, 5, 7)
    assert f.m == 24 and f.genus == 253
    assert f.bad_primes() == [2, 3, 5, 7, 17]
    for c in (m, f):
        assert cv.curve_from_json(json.loads(json.dumps(c.to_json()))) == c
    with pytest.raises(InvalidArgument):
        cv.FermatCurve.from_family(17, 2, 5, 4)
    with pytest.raises(InvalidArgument):
        cv.MordellCurve(17, 1, 27, 2, kappa=1)


def test_curves_distinct():
    assert cv.curves_distinct(3 * 5, 3 * 7, 2) is True
    assert cv.curves_distinct(15, 15, 2) is False
    # kappa ratio q^(2n) gives (ratio)^6 = q^(12n), a 12n-th power
    assert cv.curves_distinct(3 * 5 ** 4, 3, 2) is False
    with pytest.raises(InvalidArgument):
        cv.curves_distinct(0, 3, 2)


def test_fermat_maps_to_mordell():
    f = cv.FermatCurve.from_family(17, 1, 5, 7)
    d = cv.MordellCurve.from_kappa(17, 1, 5)
    assert cv.fermat_to_mordell_morphism_check(f, d, samples=30)


# ---------------------------------------------------------------------------
# point counting


def _brute_count(coeffs, q):
    total = 0
    for x in range(q):
        v = 0
        for c in coeffs:
            v = (v * x + c) % q
        for z in range(q):
            total += (z * z - v) % q == 0
    lead = coeffs[0] % q
    d = len(coeffs) - 1
    if d % 2:
        return total + 1
    return total + 1 + sum((z * z - lead) % q == 0 for z in range(q)) - 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13, 31, 53]), st.data())
def test_point_count_matches_brute(q, data):
    d = data.draw(st.integers(1, 9))
    coeffs = [data.draw(st.integers(1, q - 1))] + \
        [data.draw(st.integers(0, q - 1)) for _ in range(d)]
    want = _brute_count(coeffs, q)
    assert cv.hyperelliptic_point_count(coeffs, q, backend="numpy") == want
    assert cv.hyperelliptic_point_count(coeffs, q, backend="numba") == want


def test_hyperelliptic_genus():
    assert [cv.hyperelliptic_genus(d) for d in range(3, 13)] == [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]


# ---------------------------------------------------------------------------
# counterexample certificates


@pytest.fixture(scope="module")
def mordell_certificate():
    recipe = generators.gen_kappa(17, 2, 1, 1)
    curve = cv.MordellCurve.from_kappa(17, 2, recipe.kappa, hints=(recipe.kappa_star,))
    s = family_one(FamilyOneParams(17, 1, 1, recipe.kappa))
    return cv.certify_counterexample(FmContext(17, 2), s, curve, hints=(recipe.kappa_star,))


def test_certificate_invariants(mordell_certificate):
    cert = mordell_certificate
    assert cert.places.verdict == cv.SOLVABLE
    assert cv.invariant_sum(cert.brauer_samples) == Fraction(1, 2)
    for smp in cert.brauer_samples:
        assert smp.invariant == (Fraction(1, 2) if smp.place == "17" else 0)


def test_certificate_round_trip(mordell_certificate):
    data = json.loads(json.dumps(mordell_certificate.to_json()))
    result = cv.check_certificate(data)
    assert result["ok"], result["problems"]


def test_certificate_tampering_detected(mordell_certificate):
    data = json.loads(json.dumps(mordell_certificate.to_json()))
    data["brauer_samples"][0]["invariant"] = "0"
    assert not cv.check_certificate(data)["ok"]
    data = json.loads(json.dumps(mordell_certificate.to_json()))
    data["places"] = [c for c in data["places"] if c["place"] != "101"]
    assert not cv.check_certificate(data)["ok"]


def test_certificate_is_deterministic(mordell_certificate):
    again = cv.certify_counterexample(
        mordell_certificate.fm.ctx, mordell_certificate.fm.septuple,
        mordell_certificate.curve, hints=mordell_certificate.curve.hints)
    assert json.dumps(again.to_json()) == json.dumps(mordell_certificate.to_json())

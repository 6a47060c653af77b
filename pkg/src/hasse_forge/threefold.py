"""Rational points on the threefold X_p in P^6 and two explicit parameterizations.

X_p is cut out by
    b^2 - c^2 + 2pef = 0,  2ab - 2cd + pf^2 = 0,  a^2 - d^2 + pg^2 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from . import ntkernel as nt
from ._report import FAIL, PASS, UNDECIDED, ConditionReport
from .errors import IncompleteFactorization, InternalContradiction, InvalidArgument


class Septuple(NamedTuple):
    A: int
    B: int
    C: int
    D: int
    E: int
    F: int
    G: int

    def to_json(self) -> list:
        return [str(v) for v in self]

    @classmethod
    def from_json(cls, data) -> "Septuple":
        if isinstance(data, str):
            data = data.split(",")
        values = [int(v) for v in data]
        if len(values) != 7:
            raise InvalidArgument(f"a septuple has seven entries, got {len(values)}")
        return cls(*values)

    def normalized(self) -> "Septuple":
        """Divide out the content so the coordinates are coprime."""
        g = 0
        for v in self:
            g = math.gcd(g, v)
        if g == 0:
            raise InvalidArgument("the zero septuple is not a projective point")
        return Septuple(*(v // g for v in self))


def threefold_residuals(p: int, s: Septuple) -> tuple[int, int, int]:
    A, B, C, D, E, F, G = s
    return (B * B - C * C + 2 * p * E * F,
            2 * A * B - 2 * C * D + p * F * F,
            A * A - D * D + p * G * G)


def on_threefold(p: int, s: Septuple) -> bool:
    """Exact membership of the septuple in X_p(Q)."""
    s = Septuple(*s)
    if not any(s):
        raise InvalidArgument("the zero septuple is not a projective point")
    return threefold_residuals(p, s) == (0, 0, 0)


# ---------------------------------------------------------------------------
# first family


@dataclass(frozen=True)
class FamilyOneParams:
    p: int
    alpha: int
    beta: int
    kappa: int


def family_one(params: FamilyOneParams) -> Septuple:
    """The septuple attached to (p, alpha, beta, kappa)."""
    p, a, b, k = params.p, params.alpha, params.beta, params.kappa
    if a == 0 or b == 0 or k == 0:
        raise InvalidArgument("alpha, beta and kappa must be nonzero")
    minus = p * a * a - 9 * b * b
    plus = p * a * a + 9 * b * b
    if minus % 2:
        raise InvalidArgument(f"p*alpha^2 - 9*beta^2 = {minus} is odd")
    A, D = minus // 2, plus // 2
    s = Septuple(A, 9 * minus * k * k, 9 * plus * k * k, D,
                 81 * a * b * k ** 3, 18 * a * b * k, 3 * a * b)
    if not on_threefold(p, s):
        raise InternalContradiction("family-one septuple left the threefold")
    if (s.B, s.C, s.E, s.F) != (18 * k * k * A, 18 * k * k * D, 27 * k ** 3 * s.G, 6 * k * s.G):
        raise InternalContradiction("family-one relations violated")
    return s


def _odd_primes_prime_to_3(n: int) -> list[int]:
    return [q for q in nt.factorize(n).primes if q > 3]


def check_family_one_conditions(p: int, n: int, params: FamilyOneParams) -> ConditionReport:
    """Evaluate B1..B5 for (alpha, beta, kappa) with respect to (p, n)."""
    a, b, k = params.alpha, params.beta, params.kappa
    rep = ConditionReport()

    bad = []
    if a % 2 == 0:
        bad.append("alpha even")
    if b % 2 == 0:
        bad.append("beta even")
    for label, x, y in (("alpha,3", a, 3), ("alpha,p", a, p), ("alpha,beta", a, b), ("beta,p", b, p)):
        if math.gcd(x, y) != 1:
            bad.append(f"gcd({label}) != 1")
    rep.add("B1", FAIL if bad else PASS, reasons=bad)

    for name, value in (("B2", a * b), ("B5", k)):
        try:
            offenders = [q for q in _odd_primes_prime_to_3(value)
                         if not nt.is_square_in_local_field(p, q)]
        except IncompleteFactorization as exc:
            rep.add(name, UNDECIDED, reason=str(exc))
            continue
        rep.add(name, FAIL if offenders else PASS, offending_primes=offenders)
        if name == "B2":
            v3 = nt.valuation(k, 3) if k else 0
            rep.add("B3", PASS if (v3 % 2 == 1 and v3 < 2 * n - 1) else FAIL,
                    v3=v3, bound=2 * n - 1)
            rep.add("B4", FAIL if k % p == 0 else PASS, kappa_mod_p=k % p)
    rep.conditions = {key: rep.conditions[key] for key in sorted(rep.conditions)}
    return rep


# ---------------------------------------------------------------------------
# second family


@dataclass(frozen=True)
class FamilyTwoParams:
    p: int
    lam: int
    gamma: int
    epsilon0: int
    delta0: int
    mu: int
    t0: int
    F0: int
    provenance: dict = field(default_factory=dict, compare=False)


def family_two(params: FamilyTwoParams) -> Septuple:
    """The septuple attached to the second parameterization."""
    p, lam, gam = params.p, params.lam, params.gamma
    e0, d0, mu, t0, F0 = params.epsilon0, params.delta0, params.mu, params.t0, params.F0
    if p * lam * lam * e0 + 9 * gam * gam * d0 != 1:
        raise InvalidArgument("Bezout relation p*lam^2*eps0 + 9*gamma^2*delta0 = 1 fails")
    two_a = p * lam * lam - 9 * gam * gam
    two_d = p * lam * lam + 9 * gam * gam
    if two_a % 2:
        raise InvalidArgument("p*lam^2 - 9*gamma^2 must be even")
    A, D = two_a // 2, two_d // 2
    B = 2 * p * F0 * F0 * (d0 - e0 - mu * two_d) + two_d * t0 * F0
    C = 2 * p * F0 * F0 * (d0 + e0 - mu * two_a) + two_a * t0 * F0
    E = F0 * (2 * p * F0 * (e0 + 9 * mu * gam * gam) - 9 * gam * gam * t0) \
        * (2 * F0 * (d0 - p * mu * lam * lam) + lam * lam * t0)
    s = Septuple(A, B, C, D, E, 2 * F0, 3 * lam * gam)
    if not on_threefold(p, s):
        raise InternalContradiction("family-two septuple left the threefold")
    prov = params.provenance
    if "E1" in prov and "E2" in prov:
        if E != -4 * F0 ** 3 * prov["E1"] * prov["E2"]:
            raise InternalContradiction("E does not factor as -4*F0^3*E1*E2")
    return s

"""Verifier for the seven FM conditions A1..A7 of a septuple relative to (p, n)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import ntkernel as nt
from ._report import FAIL, NOT_APPLICABLE, PASS, UNDECIDED, ConditionReport, jsonify
from .errors import IncompleteFactorization, InternalContradiction, InvalidArgument
from .threefold import Septuple, on_threefold


@dataclass(frozen=True)
class FmContext:
    p: int
    n: int

    def __post_init__(self):
        if self.p % 8 != 1 or not nt.is_prime(self.p):
            raise InvalidArgument(f"p must be a prime congruent to 1 mod 8, got {self.p}")
        if self.n < 1:
            raise InvalidArgument(f"n must be positive, got {self.n}")


@dataclass
class FmReport:
    ctx: FmContext
    septuple: Septuple
    report: ConditionReport
    H: int | None = None
    hints: tuple = field(default=())

    @property
    def overall(self) -> str:
        return self.report.overall

    @property
    def passed(self) -> bool:
        return self.report.passed

    def status(self, name: str) -> str:
        return self.report.status(name)

    def to_json(self) -> dict:
        out = self.report.to_json()
        out.update({"p": self.ctx.p, "n": self.ctx.n, "septuple": self.septuple.to_json(),
                    "H": self.H})
        return jsonify(out)


def cube_roots_of_unity(p: int) -> list[int]:
    """All cube roots of unity in F_p, smallest first."""
    if p % 3 != 1:
        return [1]
    roots = {1}
    g = 2
    while len(roots) < 3:
        z = pow(g, (p - 1) // 3, p)
        roots.add(z)
        roots.add(z * z % p)
        g += 1
    return sorted(roots)


def find_a5_witness(ctx: FmContext, s: Septuple) -> int | None:
    """Smallest H in [1, p-1] with E*H^6 = G mod p and A + zeta*B*H^4 a
    non-residue mod p for every cube root of unity zeta."""
    p = ctx.p
    A, B, _, _, E, _, G = s
    if E % p == 0:
        raise InvalidArgument("E must be a unit mod p")
    zetas = cube_roots_of_unity(p)
    for H in range(1, p):
        if (E * pow(H, 6, p) - G) % p:
            continue
        h4 = pow(H, 4, p)
        if all(nt.legendre(A + z * B * h4, p) == -1 for z in zetas):
            return H
    return None


def _offending(value: int, p: int, keep, hints=()) -> list[int]:
    return [l for l in nt.factorize(value, hints=hints).primes
            if l % 2 and l != 3 and l != p and keep(l)]


def verify_fm(ctx: FmContext, s: Septuple, hints=()) -> FmReport:
    """Evaluate A1..A7.  ``hints`` are known prime factors that speed up factoring."""
    s = Septuple(*s)
    if not any(s):
        raise InvalidArgument("the zero septuple is not a projective point")
    p, n = ctx.p, ctx.n
    A, B, C, D, E, F, G = s
    rep = ConditionReport()

    rep.add("A1", PASS if on_threefold(p, s) else FAIL)

    if E == 0:
        rep.add("A2", FAIL, reason="E = 0 is divisible by every prime")
    else:
        try:
            def a2_bad(l):
                if nt.is_square_in_local_field(p, l):
                    return False
                vg = nt.valuation(G, l) if G else math.inf
                return not nt.valuation(E, l) - vg < 6 * n
            bad = _offending(E, p, a2_bad, hints)
            rep.add("A2", FAIL if bad else PASS, offending_primes=bad)
        except IncompleteFactorization as exc:
            rep.add("A2", UNDECIDED, reason=str(exc))

    reasons = []
    if math.gcd(math.gcd(A, D), G) != 1:
        reasons.append("gcd(A, D, G) != 1")
    if E % p == 0:
        reasons.append("E = 0 mod p")
    if G % p == 0:
        reasons.append("G = 0 mod p")
    rep.add("A3", FAIL if reasons else PASS, reasons=reasons)

    g = math.gcd(math.gcd(A * C - B * D, D * E - C * F), A * E - B * F)
    if g == 0:
        rep.add("A4", FAIL, gcd="0",
                reason="all three minors vanish, so every prime divides the gcd")
    else:
        try:
            bad = _offending(g, p, lambda l: not nt.is_square_in_local_field(p, l), hints)
            rep.add("A4", FAIL if bad else PASS, gcd=g, offending_primes=bad)
        except IncompleteFactorization as exc:
            rep.add("A4", UNDECIDED, reason=str(exc))

    H = None
    if E % p == 0:
        rep.add("A5", FAIL, reason="E = 0 mod p")
    else:
        H = find_a5_witness(ctx, s)
        rep.add("A5", PASS if H is not None else FAIL, H=H)

    three_nonresidue = nt.legendre(3, p) == -1
    if three_nonresidue != (p % 3 == 2):
        raise InternalContradiction("reciprocity cross-check for (3/p) failed")
    if three_nonresidue:
        if E == 0 or G == 0:
            rep.add("A6", FAIL, reason="E or G is zero")
        else:
            diff = nt.valuation(E, 3) - nt.valuation(G, 3)
            rep.add("A6", PASS if diff < 6 * n else FAIL, difference=diff, bound=6 * n)
        ok7 = (A + B) % 3 != 0 and G % 3 == 0
        rep.add("A7", PASS if ok7 else FAIL, a_plus_b_mod_3=(A + B) % 3, g_mod_3=G % 3)
    else:
        rep.add("A6", NOT_APPLICABLE, reason="3 is a square mod p")
        rep.add("A7", NOT_APPLICABLE, reason="3 is a square mod p")

    out = FmReport(ctx, s, rep, H, tuple(hints))
    if out.passed and A * D * E * G == 0:
        raise InternalContradiction("an FM septuple must have A, D, E, G nonzero")
    return out

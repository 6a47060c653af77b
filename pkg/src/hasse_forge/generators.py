"""Constructive recipes for kappa, (kappa, chi) and second-family septuples.

Each recipe records every intermediate (prime sets, congruence targets,
sign choices, scan statistics) so a run can be replayed and audited.  The
outputs are re-checked against the condition systems before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import _local as loc
from . import ntkernel as nt
from ._report import FAIL, PASS, UNDECIDED, ConditionReport
from .config import DEFAULT_CAPS, Caps
from .errors import (IncompleteFactorization, InternalContradiction, InvalidArgument,
                     NoPrimePossible, SearchBudgetError)
from .threefold import (FamilyOneParams, FamilyTwoParams, Septuple,
                        check_family_one_conditions, family_two)

# Above this sieve bound the prime set is sized by the prime number theorem
# before anything is enumerated.
_SIEVE_PRECHECK = 10_000_000


def c3_bound(n: int) -> int:
    return 4 * (6 * n - 1) ** 2


def d7_bound(n: int) -> int:
    return 4 * (6 * n - 1) ** 2 * (12 * n - 1) ** 2


def _check_prime_p(p: int):
    if not nt.is_prime(p) or p % 8 != 1 or p % 3 != 2:
        raise InvalidArgument(f"p = {p} must be a prime with p = 1 mod 8 and p = 2 mod 3")


def _check_nmr(n: int, m: int, r: int, caps: Caps, max_n: int | None):
    limit = caps.max_n if max_n is None else max_n
    if n < 2:
        raise InvalidArgument("n must be at least 2")
    if n > limit:
        raise InvalidArgument(f"n = {n} exceeds the configured cap max_n = {limit}")
    if not 1 <= m < n:
        raise InvalidArgument("m must satisfy 1 <= m < n")
    if r < 1 or m % r:
        raise InvalidArgument(f"r = {r} must be a positive divisor of m = {m}")


def _both_symbols_minus(p: int, l: int) -> bool:
    return nt.legendre(p, l) == -1 and nt.legendre(-p, l) == -1


def _odd_prime_divisors(n: int) -> list[int]:
    return [q for q in nt.factorize(n).primes if q > 2]


def _budget_precheck(bound: int, density: float, caps: Caps, what: str):
    """Refuse a prime set whose CRT modulus is hopeless before sieving it."""
    if bound <= _SIEVE_PRECHECK:
        return
    bits = int(density * bound / math.log(2))
    est = nt.estimate_progression_cost(bits)
    if est["expected_seconds"] > caps.prime_scan_seconds:
        raise SearchBudgetError(
            f"{what}: primes up to {bound} give a modulus of about {bits} bits; "
            f"expected {est['expected_seconds']:.3g}s exceeds {caps.prime_scan_seconds:.0f}s",
            progress={"offsets": 0, "tests": 0, "sieve_bound": bound}, estimate=est)


def _scan(modulus: int, residue: int, exclusions, caps: Caps, what: str) -> nt.ProgressionScan:
    try:
        return nt.scan_progression(modulus, residue, exclusions, cap=caps.prime_scan,
                                   seconds=caps.prime_scan_seconds)
    except SearchBudgetError as exc:
        exc.progress.setdefault("stage", what)
        exc.progress.setdefault("modulus_bits", int(gmpy2.bit_length(modulus)))
        raise


# ---------------------------------------------------------------------------
# kappa for the Mordell family


@dataclass
class KappaRecipe:
    p: int
    n: int
    m: int
    r: int
    set_a_star: list[int]
    set_b_star: list[int]
    targets: list[tuple[int, int]]
    kappa_star_0: int
    modulus: int
    scan: nt.ProgressionScan
    kappa_star: int
    kappa: int
    conditions: ConditionReport | None = None

    @property
    def s(self) -> int:
        return self.m // self.r

    def to_json(self) -> dict:
        return {
            "inputs": {"p": self.p, "n": self.n, "m": self.m, "r": self.r},
            "set_a_star": self.set_a_star,
            "set_b_star_size": len(self.set_b_star),
            "set_b_star": self.set_b_star,
            "targets": [{"modulus": str(md), "residue": str(rs)} for md, rs in self.targets],
            "kappa_star_0": str(self.kappa_star_0),
            "progression": {"slope": str(self.modulus), "intercept": str(self.kappa_star_0)},
            "scan": self.scan.to_json(),
            "kappa_star": str(self.kappa_star),
            "kappa": str(self.kappa),
            "conditions": None if self.conditions is None else self.conditions.to_json(),
        }


def gen_kappa(p: int, n: int, m: int, r: int, caps: Caps = DEFAULT_CAPS,
              exclusions=(), max_n: int | None = None) -> KappaRecipe:
    """kappa = 3^(2m-1) * kappa_*^r with kappa_* prime, satisfying B3..B5 and C1..C3.

    ``exclusions`` lists values of kappa_* to skip, which yields further
    outputs from the same progression.
    """
    _check_prime_p(p)
    _check_nmr(n, m, r, caps, max_n)
    s = m // r
    bound = c3_bound(n)
    _budget_precheck(bound, 0.25, caps, "gen_kappa")

    a_star = [l for l in _odd_prime_divisors(n)
              if l != 3 and l != p and _both_symbols_minus(p, l)]
    b_star = [l for l in nt.primes_up_to(bound)
              if l > 3 and l != p and n % l and _both_symbols_minus(p, l)]

    targets = []
    kp = p ** (2 * nt.valuation(n, p) + 1) if n % p == 0 else p
    targets.append((kp, nt.inverse_mod(pow(3, 2 * s, kp), kp)))
    for l in a_star:
        md = l ** (2 * nt.valuation(n, l) + 1)
        targets.append((md, nt.inverse_mod(pow(3, 2 * s, md), md)))
    for l in b_star:
        targets.append((l, nt.inverse_mod(pow(3, 2 * s, l), l)))
    k0, M = nt.crt_product(targets)

    excl = {2, 3, p} | {int(e) for e in exclusions}
    scan = _scan(M, k0, excl, caps, "kappa_star")
    ks = scan.prime
    kappa = 3 ** (2 * m - 1) * ks ** r
    recipe = KappaRecipe(p, n, m, r, a_star, b_star, targets, k0, M, scan, ks, kappa)

    b_rep = check_family_one_conditions(p, n, FamilyOneParams(p, 1, 1, kappa))
    c_rep = check_C(p, n, kappa, hints=(ks,))
    rep = ConditionReport()
    for name in ("B3", "B4", "B5"):
        rep.conditions[name] = b_rep[name]
    rep.conditions.update(c_rep.conditions)
    if not rep.passed:
        raise InternalContradiction(f"gen_kappa output fails {rep.failures()}")
    recipe.conditions = rep
    return recipe


def check_C(p: int, n: int, kappa: int, hints=()) -> ConditionReport:
    """Evaluate C1..C3 for kappa with respect to (p, n)."""
    if kappa == 0:
        raise InvalidArgument("kappa must be nonzero")
    rep = ConditionReport()
    k1 = 2 * nt.valuation(n, p) + 1 if n % p == 0 else 1
    rep.add("C1", PASS if (3 * kappa - 1) % p ** k1 == 0 else FAIL,
            modulus=p ** k1, kappa_mod=kappa % p ** k1)

    def ok_at(l: int, mod: int) -> bool:
        w = (3 ** 6 * pow(kappa, 6, l) - 1) % l
        return (w != 0 and nt.legendre(w, l) == -1) or (3 * kappa - 1) % mod == 0

    set_a = [l for l in _odd_prime_divisors(n)
             if l != 3 and l != p and kappa % l and _both_symbols_minus(p, l)]
    bad_a = [l for l in set_a if not ok_at(l, l ** (2 * nt.valuation(n, l) + 1))]
    rep.add("C2", FAIL if bad_a else PASS, set=set_a, offending_primes=bad_a)

    bound = c3_bound(n)
    set_b = [l for l in nt.primes_up_to(bound)
             if l > 3 and l != p and kappa % l and n % l and _both_symbols_minus(p, l)]
    bad_b = [l for l in set_b if not ok_at(l, l)]
    rep.add("C3", FAIL if bad_b else PASS, bound=bound, set_size=len(set_b),
            offending_primes=bad_b)
    return rep


# ---------------------------------------------------------------------------
# (kappa, chi) for the Fermat family


@dataclass
class ChiHalf:
    gamma: dict
    deltas: dict
    thetas: dict
    set_h: list[int]
    upsilon: int
    chi_star: int
    scan: nt.ProgressionScan
    chi: int
    n_star: int
    sigma: int

    def to_json(self) -> dict:
        return {
            "gamma": {k: v.to_json() for k, v in self.gamma.items()},
            "deltas": self.deltas,
            "thetas": {k: str(v) for k, v in self.thetas.items()},
            "set_h": self.set_h,
            "upsilon": str(self.upsilon),
            "chi_star": str(self.chi_star),
            "progression": {"slope": str(self.upsilon), "intercept": str(self.chi_star)},
            "scan": self.scan.to_json(),
            "chi": str(self.chi),
            "n_star": self.n_star,
            "sigma": str(self.sigma),
        }


@dataclass
class KappaChiRecipe:
    p: int
    n: int
    m: int
    r: int
    set_f_star: list[int]
    set_g_star_size: int
    sweep_bound: int
    targets: list[tuple[int, int]]
    kappa_star_0: int
    modulus: int
    scan: nt.ProgressionScan
    kappa_star: int
    kappa: int
    chi_half: ChiHalf
    conditions: ConditionReport | None = None

    @property
    def chi(self) -> int:
        return self.chi_half.chi

    @property
    def complete(self) -> bool:
        return self.sweep_bound >= d7_bound(self.n)

    def to_json(self) -> dict:
        return {
            "inputs": {"p": self.p, "n": self.n, "m": self.m, "r": self.r},
            "set_f_star": self.set_f_star,
            "set_g_star_size": self.set_g_star_size,
            "sweep_bound": self.sweep_bound,
            "complete": self.complete,
            "targets": [{"modulus": str(md), "residue": str(rs)} for md, rs in self.targets],
            "kappa_star_0": str(self.kappa_star_0),
            "progression": {"slope": str(self.modulus), "intercept": str(self.kappa_star_0)},
            "scan": self.scan.to_json(),
            "kappa_star": str(self.kappa_star),
            "kappa": str(self.kappa),
            "chi_half": self.chi_half.to_json(),
            "conditions": None if self.conditions is None else self.conditions.to_json(),
        }


def _root(a: int, l: int, k: int, label: str) -> nt.PadicApprox:
    root = nt.sqrt_mod_prime_power(a % l ** k, l, k)
    if root is None:
        raise InternalContradiction(f"{label} has no square root modulo {l}^{k}")
    return root


def build_chi(p: int, n: int, kappa_star: int, kappa: int, caps: Caps = DEFAULT_CAPS) -> ChiHalf:
    """The prime chi attached to a prime kappa_* = 1 mod 4 with (p/kappa_*) = 1."""
    ks = int(kappa_star)
    k2 = 2 * nt.valuation(n, 2) + 5
    k3 = 2 * nt.valuation(n, 3) + 3
    kk = 2 * nt.valuation(n, ks) + 1 if n % ks == 0 else 1
    m2, m3, mk = 2 ** k2, 3 ** k3, ks ** kk
    if nt.jacobi_symbol(-p % ks, ks) != 1:
        raise InternalContradiction(f"-p is not a square modulo kappa_* = {ks}")
    g2 = _root(nt.inverse_mod(p, m2), 2, k2, "1/p")
    g3 = _root(-nt.inverse_mod(p, m3), 3, k3, "-1/p")
    gk = _root(-nt.inverse_mod(p, mk), ks, kk, "-1/p")

    c2 = 27 * pow(kappa, 3, m2) % m2
    d2 = 1 if (g2.residue * c2) % 4 == 3 else -1
    t2 = d2 * g2.residue * c2 % m2
    d3 = 1 if g3.residue % 3 == 2 else -1
    t3 = d3 * g3.residue % m3
    dk = nt.unit_sign_choice(gk.residue, ks)
    tk = dk * gk.residue % mk
    if t2 % 4 != 3 or t3 % 3 != 2 or math.gcd(tk - 1, ks) != 1:
        raise InternalContradiction("sign choices for the chi congruences failed")

    set_h = [l for l in _odd_prime_divisors(n) if l != 3 and l != ks]
    pairs = [(m2, t2), (m3, t3), (mk, tk)]
    thetas = {"2": t2, "3": t3, "kappa_star": tk}
    for l in set_h:
        md = l ** nt.valuation(n, l)
        pairs.append((md, 2 % md))
        thetas[str(l)] = 2
    chi_star, upsilon = nt.crt_product(pairs)
    scan = _scan(upsilon, chi_star, {2}, caps, "chi")
    chi = scan.prime

    n_star = n >> nt.valuation(n, 2)
    if (chi - chi_star) % n_star:
        raise InternalContradiction("n_* does not divide chi - chi_*")
    if math.gcd(chi, n) != 1 or math.gcd(chi_star - 1, n_star) != 1:
        raise InternalContradiction("chi fails the coprimality invariants")
    return ChiHalf({"2": g2, "3": g3, "kappa_star": gk},
                   {"2": d2, "3": d3, "kappa_star": dk},
                   thetas, set_h, upsilon, chi_star, scan, chi, n_star,
                   (chi - chi_star) // n_star)


def gen_kappa_chi(p: int, n: int, m: int, r: int, caps: Caps = DEFAULT_CAPS,
                  exclusions=(), max_n: int | None = None,
                  sweep_bound: int | None = None) -> KappaChiRecipe:
    """(kappa, chi) satisfying D1..D7 with respect to (p, n).

    ``sweep_bound`` truncates the set of primes forced to kappa = 1/3 mod l;
    below the full bound only D1..D6 are guaranteed and D7 is reported as
    checked.
    """
    _check_prime_p(p)
    _check_nmr(n, m, r, caps, max_n)
    s = m // r
    full = d7_bound(n)
    bound = full if sweep_bound is None else min(int(sweep_bound), full)
    _budget_precheck(bound, 1.0, caps, "gen_kappa_chi")

    f_star = [l for l in _odd_prime_divisors(n) if l != 3 and l != p]
    g_star = [l for l in nt.primes_up_to(bound) if l > 3 and l != p and n % l]

    targets = [(4, 1)]
    kp = p ** (2 * nt.valuation(n, p) + 1) if n % p == 0 else p
    targets.append((kp, nt.inverse_mod(pow(3, 2 * s, kp), kp)))
    for l in f_star:
        md = l ** (2 * nt.valuation(n, l) + 1)
        targets.append((md, nt.inverse_mod(pow(3, 2 * s, md), md)))
    for l in g_star:
        targets.append((l, nt.inverse_mod(pow(3, 2 * s, l), l)))
    k0, M = nt.crt_product(targets)

    excl = {3, p} | {int(e) for e in exclusions}
    scan = _scan(M, k0, excl, caps, "kappa_star")
    ks = scan.prime
    kappa = 3 ** (2 * m - 1) * ks ** r
    half = build_chi(p, n, ks, kappa, caps)
    recipe = KappaChiRecipe(p, n, m, r, f_star, len(g_star), bound, targets, k0, M,
                            scan, ks, kappa, half)

    rep = check_D(p, n, kappa, half.chi, hints=(ks, half.chi))
    required = [f"D{i}" for i in range(1, 8 if recipe.complete else 7)]
    bad = [name for name in required if rep.status(name) != PASS]
    if bad:
        raise InternalContradiction(f"gen_kappa_chi output fails {bad}")
    recipe.conditions = rep
    return recipe


def _zeta_witness(u: int, k: int, l: int, K: int) -> int | None:
    if l.bit_length() > 256:
        return None
    return loc.kth_root_unit(u, k, l, K)


def check_D(p: int, n: int, kappa: int, chi: int, hints=()) -> ConditionReport:
    """Evaluate D1..D7 for (kappa, chi) with respect to (p, n)."""
    if kappa == 0 or chi == 0:
        raise InvalidArgument("kappa and chi must be nonzero")
    if chi % 2 == 0:
        raise InvalidArgument("chi must be odd")
    rep = ConditionReport()
    pc2 = p * chi * chi

    def prec(l: int) -> int:
        return 2 * nt.valuation(n, l) + 1 if n % l == 0 else 1

    mp = p ** prec(p)
    rep.add("D1", PASS if (3 * kappa - 1) % mp == 0 else FAIL, modulus=mp)
    m2 = 2 ** (2 * nt.valuation(n, 2) + 5)
    rep.add("D2", PASS if (pc2 - 3 ** 6 * kappa ** 6) % m2 == 0 else FAIL, modulus=m2)
    m3 = 3 ** (2 * nt.valuation(n, 3) + 3)
    rep.add("D3", PASS if (pc2 + 1) % m3 == 0 else FAIL, modulus=m3)

    try:
        kf = nt.factorize(kappa, hints=hints)
    except IncompleteFactorization as exc:
        kf = None
        for name in ("D4", "D5", "D6", "D7"):
            rep.add(name, UNDECIDED, reason=f"kappa: {exc}")
    try:
        cf = nt.factorize(chi, hints=hints)
    except IncompleteFactorization as exc:
        cf = None
        for name in ("D5", "D6", "D7"):
            rep.add(name, UNDECIDED, reason=f"chi: {exc}")

    if kf is not None:
        set_d = [l for l in kf.primes if l > 3 and l != p]
        bad = [l for l in set_d
               if l % 4 != 1 or (pc2 + 1) % l ** prec(l)]
        rep.add("D4", FAIL if bad else PASS, set=set_d, offending_primes=bad)

    if kf is not None and cf is not None:
        set_e = [l for l in cf.primes if l > 3 and l != p and kappa % l]
        witnesses, bad = {}, []
        for l in set_e:
            K = prec(l)
            mod = l ** K
            u = 3 * kappa % mod
            for sign in (1, -1):
                if loc.is_kth_power_unit(sign * u % mod, 2 * n, l):
                    z = _zeta_witness(sign * u % mod, 2 * n, l, K)
                    witnesses[str(l)] = {"sign": sign, "zeta": None if z is None else str(z)}
                    break
            else:
                bad.append(l)
        rep.add("D5", FAIL if bad else PASS, set=[str(l) for l in set_e],
                witnesses=witnesses, offending_primes=[str(l) for l in bad])

        set_f = [l for l in _odd_prime_divisors(n)
                 if l != 3 and l != p and kappa % l and chi % l]
        bad = [l for l in set_f if (3 * kappa - 1) % l ** prec(l)]
        rep.add("D6", FAIL if bad else PASS, set=set_f, offending_primes=bad)

        bound = d7_bound(n)
        set_g = [l for l in nt.primes_up_to(bound)
                 if l > 3 and l != p and kappa % l and chi % l and n % l]
        bad = [l for l in set_g if (3 * kappa - 1) % l]
        rep.add("D7", FAIL if bad else PASS, bound=bound, set_size=len(set_g),
                offending_count=len(bad), offending_primes=bad[:20])
    return rep


# ---------------------------------------------------------------------------
# second-family septuples


@dataclass
class FamilyTwoRecipe:
    p: int
    lam: int
    gamma: int
    bezout: dict
    t: dict
    pi: int
    u: int
    F0: int
    H: int
    mu1: int
    mu: int
    primes: dict
    septuple: Septuple
    n_eg: Fraction
    n_eg_detail: dict
    schinzel: bool
    scanned: int

    def to_json(self) -> dict:
        return {
            "p": self.p, "lambda": self.lam, "gamma": self.gamma,
            "bezout": {k: str(v) for k, v in self.bezout.items()},
            "t": {k: str(v) for k, v in self.t.items()},
            "pi": self.pi, "u": self.u, "F0": self.F0, "H": self.H,
            "mu1": self.mu1, "mu": str(self.mu),
            "primes": {k: str(v) for k, v in self.primes.items()},
            "septuple": self.septuple.to_json(),
            "n_EG": str(self.n_eg), "n_EG_detail": self.n_eg_detail,
            "schinzel": self.schinzel, "scanned": self.scanned,
        }


def n_EG(p: int, s: Septuple, hints=()) -> tuple[Fraction, dict]:
    """max(1, n*) where n* bounds (v_l(E) - v_l(G))/6 over odd l not in {3, p}
    dividing E at which p is not a square."""
    f = nt.factorize(s.E, hints=hints)
    offending = {}
    for l in f.primes:
        if l in (2, 3, p) or nt.is_square_in_local_field(p, l):
            continue
        diff = f.exponent(l) - nt.valuation(s.G, l)
        offending[str(l)] = diff
    if not offending:
        return Fraction(1), {"set": {}, "n_star": "1"}
    n_star = max(Fraction(d, 6) for d in offending.values())
    return max(Fraction(1), n_star), {"set": offending, "n_star": str(n_star)}


def _fixed_prime_divisor(polys) -> int | None:
    """A prime q dividing the product of the linear forms at every mu1, when the
    forms all exceed q from mu1 = 1 on (so no factor can equal q)."""
    for q in (2, 3):
        if all(math.prod(polys(x)) % q == 0 for x in range(q)):
            if all(w > q for w in polys(1)) and all(
                    b >= a for a, b in zip(polys(1), polys(2))):
                return q
    return None


def gen_family_two(p: int, caps: Caps = DEFAULT_CAPS, schinzel: bool = False,
                   lam: int = 1, gamma: int = 1, pi: int | None = None) -> FamilyTwoRecipe:
    """A second-family septuple, with mu chosen so Q*_1 (and E1, E2 if requested) are prime."""
    _check_prime_p(p)
    if lam % 2 == 0 or gamma % 2 == 0:
        raise InvalidArgument("lambda and gamma must be odd")
    if math.gcd(lam, 3 * gamma) != 1 or math.gcd(p, 3 * gamma) != 1 or math.gcd(p, lam) != 1:
        raise InvalidArgument("need gcd(lambda, 3 gamma) = gcd(p, 3 gamma) = gcd(p, lambda) = 1")

    a, b = p * lam * lam, 9 * gamma * gamma
    _, e_star, d_star = (int(v) for v in gmpy2.gcdext(a, b))
    s_star = (2 - d_star) % 3
    e0, d0 = e_star + b * s_star, d_star - a * s_star
    if a * e0 + b * d0 != 1 or d0 % 3 != 2:
        raise InternalContradiction("Bezout pair for (epsilon0, delta0) is wrong")

    c = 27 * lam ** 3 * gamma ** 3
    _, x, y = (int(v) for v in gmpy2.gcdext(c, p))
    t2, t3 = x, -y
    if c * t2 - p * t3 != 1:
        raise InternalContradiction("Bezout pair (t2, t3) is wrong")

    if pi is None:
        pi = next(w for w in range(2, p) if nt.legendre(w, p) == 1)
    elif pi % p == 0 or nt.legendre(pi, p) != 1:
        raise InvalidArgument(f"pi = {pi} is not a quadratic residue mod {p}")
    t5_p = (pi - 2 * lam * lam * e0 - t3) * nt.inverse_mod(c, p) % p
    t5, _ = nt.crt_solve([(p, t5_p), (2, (1 - t3) % 2)])
    if t5 == 0:
        t5 = 2 * p
    t1 = t2 + p * t5
    t4 = t3 + c * t5
    if c * t1 - p * t4 != 1 or t1 % 2:
        raise InternalContradiction("t1 / t4 relations fail")

    u = 1 if nt.legendre(lam * gamma, p) == 1 else 0
    F0 = 3 ** u
    t0 = -3 * lam * gamma * F0 * t1
    h2 = 3 * lam * gamma * nt.inverse_mod(F0, p) % p
    H = nt.sqrt_mod_prime_power(h2, p, 1)
    if H is None:
        raise InternalContradiction("3*lambda*gamma/F0 is not a square mod p")
    H = H.residue

    P2 = 18 * lam * lam * gamma * gamma
    R2 = 2 * lam * lam * e0 + t4
    if math.gcd(3 * p * P2, R2) != 1:
        raise InternalContradiction("gcd(3 p P*_2, R*_2) != 1")
    v = nt.valuation(t1, 2)
    t1s = t1 >> v
    half = 2 ** (v - 1) * t1s

    def polys(mu1):
        q1 = 3 * p * P2 * mu1 + R2
        e1 = 27 * p * p * gamma ** 2 * mu1 + p * e0 + 27 * lam * gamma ** 3 * half
        e2 = 3 * p * p * lam ** 2 * mu1 - d0 + 3 * lam ** 3 * gamma * half
        return q1, e1, e2

    mu1 = None
    scanned = 0
    if schinzel:
        fixed = _fixed_prime_divisor(polys)
        if fixed is not None:
            raise NoPrimePossible(
                f"E1*E2*Q*_1 is divisible by {fixed} for every mu1, and each factor "
                f"exceeds {fixed} for mu1 >= 1")
        for cand in range(1, caps.schinzel_scan + 1):
            scanned = cand
            q1, e1, e2 = polys(cand)
            if all(w > 2 and nt.is_prime(w) for w in (q1, e1, e2)):
                mu1 = cand
                break
        if mu1 is None:
            raise SearchBudgetError(
                f"no mu1 <= {caps.schinzel_scan} makes E1, E2, Q*_1 simultaneously prime",
                progress={"mu1_range": [1, caps.schinzel_scan]})
    else:
        scan = _scan(3 * p * P2, R2, {2}, caps, "Q*_1")
        q1 = scan.prime
        mu1 = (q1 - R2) // (3 * p * P2)
        scanned = scan.candidates
    q1, e1, e2 = polys(mu1)
    mu = 3 * p * mu1
    primes = {"Q1": q1}
    prov = {}
    if schinzel:
        primes.update({"E1": e1, "E2": e2})
        prov = {"E1": e1, "E2": e2}

    params = FamilyTwoParams(p, lam, gamma, e0, d0, mu, t0, F0, prov)
    sep = family_two(params)
    if math.gcd(math.gcd(sep.A, sep.D), sep.G) != 1 or sep.G != 3 * lam * gamma:
        raise InternalContradiction("family-two septuple fails gcd(A, D, G) = 1")
    hints = tuple(primes.values()) + (F0,)
    n_eg, detail = n_EG(p, sep, hints=hints)
    return FamilyTwoRecipe(
        p, lam, gamma,
        {"epsilon_star": e_star, "delta_star": d_star, "s_star": s_star,
         "epsilon0": e0, "delta0": d0},
        {"t0": t0, "t1": t1, "t2": t2, "t3": t3, "t4": t4, "t5": t5, "v": v, "t1_star": t1s},
        pi, u, F0, H, mu1, mu, primes, sep, n_eg, detail, schinzel, scanned)

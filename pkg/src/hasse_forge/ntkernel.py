"""Arbitrary-precision number theory: symbols, local squares, roots, CRT,
factorization and prime search in arithmetic progressions."""

from __future__ import annotations

import functools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2
import numpy as np
from sympy.ntheory.residue_ntheory import nthroot_mod, sqrt_mod

from . import _kernels
from .errors import (IncompleteFactorization, InternalContradiction, InvalidArgument,
                     NoPrimePossible, NoSolution, ReduceFirst, SearchBudgetError)

INF = "inf"

# Strong-probable-prime bases that make the test deterministic below this bound.
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
TRIAL_LIMIT = 1_000_000


def is_place_infinite(place) -> bool:
    return isinstance(place, str) and place.lower() in ("inf", "oo", "infinity", "∞")


# ---------------------------------------------------------------------------
# primality


@functools.lru_cache(maxsize=65536)
def _primality(n: int) -> str:
    if n < 2:
        return "composite"
    if n < 4:
        return "proven"
    if n % 2 == 0:
        return "composite"
    mpz = gmpy2.mpz(n)
    if n < DETERMINISTIC_LIMIT:
        for b in _DETERMINISTIC_BASES:
            if b % n == 0:
                continue
            if not gmpy2.is_strong_prp(mpz, b):
                return "composite"
        return "proven"
    if not gmpy2.is_strong_prp(mpz, 2):
        return "composite"
    if not gmpy2.is_strong_bpsw_prp(mpz):
        return "composite"
    for b in (3, 5, 7):
        if not gmpy2.is_strong_prp(mpz, b):
            return "composite"
    return "probable"


def primality_status(n: int) -> str:
    """``"proven"``, ``"probable"`` or ``"composite"``.

    Below about 3.3e24 the strong test over the first 13 prime bases is a
    proof; above that a pass of BPSW plus extra Miller-Rabin rounds is
    reported as probable.
    """
    return _primality(int(n))


def is_prime(n: int) -> bool:
    return _primality(int(n)) != "composite"


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    n = int(n)
    if n < 2:
        return 2
    c = n + 1 if n % 2 == 0 else n + 2
    while not is_prime(c):
        c += 2
    return c


@functools.lru_cache(maxsize=8)
def _small_primes_list(limit: int) -> tuple:
    # a fixed small table; the numpy sieve avoids paying jit start-up for it
    return tuple(int(q) for q in _kernels.sieve(limit, backend="numpy"))


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit (sieved by the configured kernel backend)."""
    return [int(q) for q in _kernels.sieve(int(limit))]


# ---------------------------------------------------------------------------
# symbols and valuations


def jacobi_symbol(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd positive m."""
    a, m = int(a), int(m)
    if m <= 0 or m % 2 == 0:
        raise InvalidArgument(f"jacobi symbol needs an odd positive modulus, got {m}")
    return int(gmpy2.jacobi(a, m))


def legendre(a: int, l: int) -> int:
    """Legendre symbol for an odd prime l."""
    return jacobi_symbol(a, l)


def valuation(n: int, l: int) -> int:
    """Exponent of the prime l in the nonzero integer n."""
    n, l = int(n), int(l)
    if n == 0:
        raise InvalidArgument("valuation of zero is infinite")
    if l < 2:
        raise InvalidArgument(f"valuation base must be a prime, got {l}")
    if n % l:
        return 0
    return int(gmpy2.remove(n, l)[1])


def split_valuation(n: int, l: int) -> tuple[int, int]:
    """Return (v, u) with n = l**v * u and l not dividing u."""
    n, l = int(n), int(l)
    if n == 0:
        raise InvalidArgument("valuation of zero is infinite")
    if n % l:
        return 0, n
    u, v = gmpy2.remove(n, l)
    return int(v), int(u)


def inverse_mod(a: int, m: int) -> int:
    """Modular inverse of a modulo m (raises InvalidArgument if not a unit)."""
    try:
        return int(gmpy2.invert(int(a), int(m)))
    except ZeroDivisionError as exc:
        raise InvalidArgument(f"{a} is not invertible modulo {m}") from exc


# ---------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class FactoredInteger:
    value: int
    factors: tuple[tuple[int, int], ...]
    sign: int = 1

    def __post_init__(self):
        prod = self.sign
        last = 1
        for q, e in self.factors:
            if q <= last or e <= 0:
                raise InvalidArgument("factors must be increasing primes with positive exponents")
            last = q
            prod *= q ** e
        if prod != self.value:
            raise InvalidArgument("factors do not multiply back to the value")

    @property
    def primes(self) -> list[int]:
        return [q for q, _ in self.factors]

    def exponent(self, q: int) -> int:
        for r, e in self.factors:
            if r == q:
                return e
        return 0

    def to_json(self) -> dict:
        return {"value": str(self.value), "sign": self.sign,
                "factors": [[str(q), e] for q, e in self.factors]}


def _brent_rho(n: int, budget: int, seed: int) -> int | None:
    """One nontrivial factor of the odd composite n, or None when the budget runs out."""
    rng = random.Random(seed)
    n = gmpy2.mpz(n)
    spent = 0
    while spent < budget:
        y = gmpy2.mpz(rng.randrange(1, n))
        c = gmpy2.mpz(rng.randrange(1, n))
        m = 128
        g = r = q = gmpy2.mpz(1)
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gmpy2.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = gmpy2.mpz(1)
            while g == 1:
                ys = (ys * ys + c) % n
                g = gmpy2.gcd(abs(x - ys), n)
        if 1 < g < n:
            return int(g)
    return None


def _perfect_power(n: int) -> tuple[int, int] | None:
    if not gmpy2.is_power(n):
        return None
    for k in range(gmpy2.bit_length(n), 1, -1):
        root, exact = gmpy2.iroot(n, k)
        if exact:
            return int(root), k
    return None


def factorize(n: int, budget: int = 2_000_000, hints: Iterable[int] = ()) -> FactoredInteger:
    """Complete factorization of a nonzero integer.

    Trial division to 1e6 (after dividing out any ``hints`` primes), then
    Brent's rho with ``budget`` iterations per cofactor.  A composite
    cofactor left over raises IncompleteFactorization.
    """
    n = int(n)
    if n == 0:
        raise InvalidArgument("cannot factor zero")
    sign = -1 if n < 0 else 1
    rest = abs(n)
    found: dict[int, int] = {}

    for h in sorted(set(int(h) for h in hints)):
        if h > 1 and rest % h == 0 and is_prime(h):
            rest, e = gmpy2.remove(rest, h)
            rest = int(rest)
            found[h] = found.get(h, 0) + int(e)

    if rest > 1 and not is_prime(rest):
        for q in _small_primes_list(TRIAL_LIMIT):
            if q * q > rest:
                break
            if rest % q == 0:
                rest, e = gmpy2.remove(rest, q)
                rest = int(rest)
                found[q] = found.get(q, 0) + int(e)
        if 1 < rest < TRIAL_LIMIT * TRIAL_LIMIT:
            # no prime below 1e6 divides rest, so it is prime
            found[rest] = found.get(rest, 0) + 1
            rest = 1

    stack = [(rest, 1)] if rest > 1 else []
    while stack:
        m, mult = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + mult
            continue
        pp = _perfect_power(m)
        if pp is not None:
            stack.append((pp[0], mult * pp[1]))
            continue
        d = _brent_rho(m, budget, seed=m % 1_000_003)
        if d is None:
            partial = sorted(found.items())
            raise IncompleteFactorization(
                f"composite cofactor with {int(gmpy2.bit_length(m))} bits left after rho budget",
                cofactor=m, partial=partial)
        stack.append((d, mult))
        stack.append((m // d, mult))

    return FactoredInteger(n, tuple(sorted(found.items())), sign)


def prime_factors(n: int, **kwargs) -> list[int]:
    return factorize(n, **kwargs).primes


# ---------------------------------------------------------------------------
# congruences


@dataclass
class CongruenceSystem:
    congruences: list[tuple[int, int]] = field(default_factory=list)

    def add(self, modulus: int, residue: int) -> "CongruenceSystem":
        self.congruences.append((int(modulus), int(residue)))
        return self

    def to_json(self) -> list:
        return [[str(m), str(r % m)] for m, r in self.congruences]


def crt_solve(system) -> tuple[int, int]:
    """Solve x = r_i mod m_i.  Returns (residue, modulus) with 0 <= residue < modulus.

    Non-coprime moduli are merged when consistent; NoSolution otherwise.
    """
    pairs = system.congruences if isinstance(system, CongruenceSystem) else list(system)
    x, mod = 0, 1
    for m, r in pairs:
        m, r = int(m), int(r)
        if m <= 0:
            raise InvalidArgument(f"moduli must be positive, got {m}")
        g = math.gcd(mod, m)
        if (r - x) % g:
            raise NoSolution(f"x = {x} mod {mod} contradicts x = {r} mod {m}")
        if g == 1:
            # fast coprime step
            t = ((r - x) * int(gmpy2.invert(mod, m))) % m
        else:
            t = ((r - x) // g * inverse_mod(mod // g, m // g)) % (m // g)
        x = x + mod * t
        mod = mod // g * m
        x %= mod
    return x, mod


def crt_product(pairs: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """CRT over many pairwise coprime moduli using a product tree."""
    items = [(int(r) % int(m), int(m)) for m, r in pairs]
    if not items:
        return 0, 1
    while len(items) > 1:
        merged = []
        for i in range(0, len(items) - 1, 2):
            (r1, m1), (r2, m2) = items[i], items[i + 1]
            if math.gcd(m1, m2) != 1:
                r, m = crt_solve([(m1, r1), (m2, r2)])
            else:
                t = ((r2 - r1) * int(gmpy2.invert(m1, m2))) % m2
                r, m = r1 + m1 * t, m1 * m2
            merged.append((r, m))
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


# ---------------------------------------------------------------------------
# local squares and roots


@dataclass(frozen=True)
class PadicApprox:
    prime: int
    precision: int
    residue: int

    def __post_init__(self):
        if not 0 <= self.residue < self.prime ** self.precision:
            raise InvalidArgument("residue out of range for the precision")

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def truncate(self, k: int) -> "PadicApprox":
        return PadicApprox(self.prime, k, self.residue % self.prime ** k)

    def to_json(self) -> dict:
        return {"prime": str(self.prime), "precision": self.precision,
                "residue": str(self.residue)}


def _lift_odd_sqrt(a: int, r: int, l: int, k: int) -> int:
    """Newton-lift a square root r of a mod l to precision k."""
    prec = 1
    while prec < k:
        prec = min(2 * prec, k)
        mod = l ** prec
        r = (r - (r * r - a) * int(gmpy2.invert(2 * r, mod))) % mod
    return r % l ** k


def sqrt_mod_prime_power(a: int, l: int, k: int) -> PadicApprox | None:
    """Canonical (smallest) square root of the unit a modulo l**k.

    Returns None when a is not a square in Q_l.  Raises ReduceFirst when l
    divides a.
    """
    a, l, k = int(a), int(l), int(k)
    if k < 1:
        raise InvalidArgument("precision must be positive")
    if a % l == 0:
        raise ReduceFirst(f"{l} divides {a}; strip even powers of {l} first")
    mod = l ** k
    if l == 2:
        if a % 8 != 1:
            return None
        r = 1
        j = 3
        while j < k:
            if ((r * r - a) >> j) & 1:
                r += 1 << (j - 1)
            j += 1
        r %= mod
        roots = {r, (-r) % mod, (r + mod // 2) % mod, (-r + mod // 2) % mod} if k >= 3 else {1 % mod, (-1) % mod}
        roots = {x for x in roots if (x * x - a) % mod == 0}
        return PadicApprox(2, k, min(roots))
    if legendre(a, l) != 1:
        return None
    r0 = int(sqrt_mod(a % l, l))
    r = _lift_odd_sqrt(a, r0, l, k)
    return PadicApprox(l, k, min(r, mod - r))


def is_square_in_local_field(a: int, place) -> bool:
    """Whether the nonzero rational integer a is a square in Q_place (or R)."""
    a = int(a)
    if a == 0:
        raise InvalidArgument("zero is excluded")
    if is_place_infinite(place):
        return a > 0
    l = int(place)
    v, u = split_valuation(a, l)
    if v % 2:
        return False
    if l == 2:
        return u % 8 == 1
    return legendre(u, l) == 1


def hilbert_symbol(a: int, b: int, place) -> int:
    """Hilbert symbol (a, b) over Q_place, place a prime or INF."""
    a, b = int(a), int(b)
    if a == 0 or b == 0:
        raise InvalidArgument("hilbert symbol needs nonzero arguments")
    if is_place_infinite(place):
        return -1 if (a < 0 and b < 0) else 1
    l = int(place)
    alpha, u = split_valuation(a, l)
    beta, v = split_valuation(b, l)
    if l == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_v = ((v - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_v = ((v * v - 1) // 8) % 2
        e = (eps_u * eps_v + alpha * om_v + beta * om_u) % 2
        return -1 if e else 1
    sign = -1 if (alpha * beta * ((l - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre(u, l)
    if alpha % 2:
        sign *= legendre(v, l)
    return sign


def nth_power_residue_test(a: int, e: int, l: int) -> int | None:
    """Smallest w in [0, l) with w**e = a mod l, or None."""
    a, e, l = int(a) % int(l), int(e), int(l)
    if e < 1:
        raise InvalidArgument("exponent must be positive")
    if a == 0:
        return 0
    if pow(a, (l - 1) // math.gcd(e, l - 1), l) != 1:
        return None
    if l < 200_000:
        w = np.arange(1, l, dtype=np.int64)
        hits = np.flatnonzero(_kernels._powmod_vec(w, e % (l - 1) or (l - 1), l) == a)
        return int(w[hits[0]])
    roots = nthroot_mod(a, e, l, all_roots=True)
    if not roots:
        raise InternalContradiction(f"power-residue test passed but no root of {a} found mod {l}")
    return int(min(roots))


def universal_power_prime(s: int, q: int, r: int | None = None, S: int | None = None) -> bool:
    """Whether every residue mod the odd prime q is an s-th power.

    With ``r`` and ``S`` supplied and q = s*S + r, the constructive route is
    taken: an explicit exponent P with (h**P)**s = h is derived from the
    Bezout relation s*P + (1 - r)*R = 1 and checked.
    """
    s, q = int(s), int(q)
    if s < 1 or s % 2 == 0:
        raise InvalidArgument("s must be a positive odd integer")
    if q < 3 or not is_prime(q):
        raise InvalidArgument("q must be an odd prime")
    answer = math.gcd(s, q - 1) == 1
    if r is not None and S is not None:
        r, S = int(r), int(S)
        if s * S + r != q:
            raise InvalidArgument("q must equal s*S + r")
        if math.gcd(r - 1, s) == 1:
            if r == 1:
                P, R = 1, 0
            else:
                g, P, R = gmpy2.gcdext(s, 1 - r)
                P, R = int(P), int(R)
            if not answer:
                raise InternalContradiction("constructive route disagrees with the gcd test")
            # (h**(R*S + P))**s = h for every h; check on a generator-free sample
            expo = (R * S + P) % (q - 1)
            for h in (2, 3, q - 1):
                if pow(pow(h, expo, q), s, q) != h % q:
                    raise InternalContradiction("constructed exponent fails")
    return answer


def iterated_sqrt_3mod4(x: int, n: int, l: int) -> int:
    """A residue w with w**(2**n) = x mod l, for l = 3 mod 4 and x a nonzero square.

    Each step takes the square root that is itself a square, which is the
    sign-flip induction made explicit.
    """
    x, n, l = int(x), int(n), int(l)
    if l % 4 != 3 or not is_prime(l):
        raise InvalidArgument("l must be a prime congruent to 3 mod 4")
    if n < 1:
        raise InvalidArgument("n must be positive")
    if x % l == 0 or legendre(x, l) != 1:
        raise InvalidArgument(f"{x} is not a nonzero square mod {l}")
    h = x % l
    for _ in range(n):
        r = pow(h, (l + 1) // 4, l)
        h = r if legendre(r, l) == 1 else l - r
    return h


def unit_sign_choice(r: int, l: int) -> int:
    """Sign D with D*r - 1 prime to l, preferring +1."""
    r, l = int(r), int(l)
    if r % l == 0:
        raise InvalidArgument(f"{r} is not a unit mod {l}")
    if (r - 1) % l:
        return 1
    if (-r - 1) % l:
        return -1
    raise InternalContradiction("both r - 1 and -r - 1 divisible by an odd prime")


# ---------------------------------------------------------------------------
# primes in progressions


@dataclass
class ProgressionScan:
    prime: int
    offset: int
    candidates: int
    tests: int
    seconds: float
    status: str

    def to_json(self) -> dict:
        return {"prime": str(self.prime), "offset": str(self.offset),
                "candidates": self.candidates, "tests": self.tests,
                "primality": self.status}


_SIEVE_BOUND = 1 << 16
_CALIBRATION: dict[int, float] = {}


def _test_seconds(bits: int) -> float:
    """Calibrated time of one probable-prime test at the given size."""
    cal = min(max(bits, 256), 8192)
    cal = 1 << (cal.bit_length() - 1)
    if cal not in _CALIBRATION:
        rng = random.Random(cal)
        n = gmpy2.mpz(rng.getrandbits(cal) | (1 << (cal - 1)) | 1)
        start = time.perf_counter()
        reps = 0
        while True:
            gmpy2.is_strong_prp(n, 2)
            reps += 1
            if time.perf_counter() - start > 0.02 or reps >= 50:
                break
        _CALIBRATION[cal] = (time.perf_counter() - start) / reps
    # multiplication cost grows a little faster than quadratically at these sizes
    return _CALIBRATION[cal] * max(1.0, bits / cal) ** 2.4


def estimate_progression_cost(bits: int, sieve_bound: int = _SIEVE_BOUND) -> dict:
    """Projected sieve survivors tested, and seconds, before a prime of this size is hit.

    Uses the prime number theorem in progressions: about ln(N) * prod(1 - 1/q)
    tests over the sieve primes q, independent of the modulus.
    """
    log_n = bits * math.log(2)
    mertens = 1.0
    for q in _small_primes_list(sieve_bound):
        mertens *= 1 - 1 / q
    tests = log_n * mertens
    per = _test_seconds(bits)
    return {"bits": bits, "expected_tests": round(tests, 1),
            "seconds_per_test": per, "expected_seconds": tests * per}


def scan_progression(modulus: int, residue: int, exclusions: Iterable[int] = (),
                     cap: int = 10_000_000, seconds: float | None = None,
                     chunk: int = 4096) -> ProgressionScan:
    """First prime in residue + k*modulus (k = 0, 1, ...) not in ``exclusions``.

    Offsets are pre-sieved by small primes with the kernel backend; survivors
    are tested smallest first, so the result is deterministic.  ``cap``
    bounds the number of offsets and ``seconds`` the wall clock; for large
    candidates the projected cost is checked against ``seconds`` before any
    testing starts.
    """
    M = int(modulus)
    if M <= 0:
        raise InvalidArgument("modulus must be positive")
    a = int(residue) % M
    excl = set(int(e) for e in exclusions)
    g = math.gcd(a, M)
    if g > 1:
        raise NoPrimePossible(f"gcd({a}, {M}) = {g}")
    start_time = time.perf_counter()
    bits = int(gmpy2.bit_length(a + M))
    if seconds is not None and bits > 4096:
        est = estimate_progression_cost(bits)
        if est["expected_seconds"] > seconds:
            raise SearchBudgetError(
                f"expected {est['expected_seconds']:.0f}s to find a {bits}-bit prime exceeds "
                f"the {seconds:.0f}s budget",
                progress={"offsets": 0, "tests": 0}, estimate=est)

    qs = np.asarray(_small_primes_list(_SIEVE_BOUND), dtype=np.int64)
    m_res = [M % q for q in qs.tolist()]
    a_res = [a % q for q in qs.tolist()]
    tests = 0
    base = 0
    while base < cap:
        count = min(chunk, cap - base)
        k0s = []
        for q, mq, aq in zip(qs.tolist(), m_res, a_res):
            if mq == 0:
                k0s.append(-1)
            else:
                # a + (base + k) M = 0 mod q
                k0s.append(((-aq - base * mq) * pow(mq, -1, q)) % q)
        keep = _kernels.progression_survivors(qs, np.asarray(k0s, dtype=np.int64), count)
        for k in range(count):
            cand = a + (base + k) * M
            if cand <= _SIEVE_BOUND:
                ok = True
            else:
                ok = bool(keep[k])
            if not ok or cand < 2 or cand in excl:
                continue
            tests += 1
            status = primality_status(cand)
            if status != "composite":
                return ProgressionScan(cand, base + k, base + k + 1, tests,
                                       time.perf_counter() - start_time, status)
            if seconds is not None and time.perf_counter() - start_time > seconds:
                raise SearchBudgetError(
                    f"progression scan exceeded {seconds:.0f}s",
                    progress={"offsets": base + k + 1, "tests": tests})
        base += count
    raise SearchBudgetError(f"no prime within {cap} candidates",
                            progress={"offsets": base, "tests": tests})


def prime_in_progression(modulus: int, residue: int, exclusions: Iterable[int] = (),
                         cap: int = 10_000_000) -> int:
    """Smallest prime congruent to residue mod modulus outside ``exclusions``.

    When gcd(residue, modulus) > 1 the only possible prime is residue itself.
    """
    M, a = int(modulus), int(residue)
    if M <= 0:
        raise InvalidArgument("modulus must be positive")
    if math.gcd(a % M, M) > 1:
        if a > 1 and is_prime(a) and a not in set(exclusions):
            return a
        raise NoPrimePossible(f"gcd({a}, {M}) > 1")
    return scan_progression(M, a, exclusions, cap).prime

"""Hot loops over machine-word primes.

Each kernel has a numba ``@njit`` implementation and an independent pure
numpy implementation.  ``HASSE_FORGE_BACKEND`` (``numba`` or ``numpy``)
picks the default; every public function also takes an explicit
``backend`` argument so the two can be compared.  All moduli must be below
2**31 so that products of residues fit in int64.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

WORD_LIMIT = 1 << 31
BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    name = os.environ.get("HASSE_FORGE_BACKEND", "numba").strip().lower()
    if name not in BACKENDS:
        raise ValueError(f"HASSE_FORGE_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and not HAS_NUMBA:
        return "numpy"
    return name


def _pick(backend):
    name = default_backend() if backend is None else backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        name = "numpy"
    return name


# --------------------------------------------------------------------------
# scalar helpers shared by the jitted kernels

def _powmod_scalar(b, e, m):
    r = 1 % m
    b %= m
    while e > 0:
        if e & 1:
            r = (r * b) % m
        b = (b * b) % m
        e >>= 1
    return r


def _gcd_scalar(a, b):
    while b:
        a, b = b, a % b
    return a


def _sieve_loop(limit):
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[0] = False
    if limit >= 1:
        flags[1] = False
    i = 2
    while i * i <= limit:
        if flags[i]:
            j = i * i
            while j <= limit:
                flags[j] = False
                j += i
        i += 1
    count = 0
    for k in range(limit + 1):
        if flags[k]:
            count += 1
    out = np.empty(count, dtype=np.int64)
    c = 0
    for k in range(limit + 1):
        if flags[k]:
            out[c] = k
            c += 1
    return out


def _mordell_loop(ls, a, b, pinv, e):
    n = ls.shape[0]
    xs = np.full(n, -1, dtype=np.int64)
    ws = np.zeros(n, dtype=np.int64)
    for i in range(n):
        l = ls[i]
        half = (l - 1) // 2
        for x in range(l):
            w = ((a[i] * _powmod(x, e, l)) % l - b[i]) % l
            w = (w * pinv[i]) % l
            if w == 0 or _powmod(w, half, l) == 1:
                xs[i] = x
                ws[i] = w
                break
    return xs, ws


def _fermat_loop(ls, cx, cyinv, cz, m):
    n = ls.shape[0]
    xs = np.full(n, -1, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        l = ls[i]
        expo = (l - 1) // _gcd(m, l - 1)
        for x in range(l):
            t = (cx[i] * _powmod(x, m, l) + cz[i]) % l
            t = (l - t) % l
            t = (t * cyinv[i]) % l
            if t == 0 or _powmod(t, expo, l) == 1:
                xs[i] = x
                ts[i] = t
                break
    return xs, ts


def _hyper_loop(coeffs, q):
    # coeffs are highest degree first, reduced mod q
    is_sq = np.zeros(q, dtype=np.bool_)
    for y in range(q):
        is_sq[(y * y) % q] = True
    total = 0
    for x in range(q):
        v = 0
        for c in coeffs:
            v = (v * x + c) % q
        if v == 0:
            total += 1
        elif is_sq[v]:
            total += 2
    return total


def _progression_loop(qs, k0s, count):
    keep = np.ones(count, dtype=np.bool_)
    for i in range(qs.shape[0]):
        k0 = k0s[i]
        if k0 < 0:
            continue
        q = qs[i]
        k = k0
        while k < count:
            keep[k] = False
            k += q
    return keep


if HAS_NUMBA:
    _powmod = njit(cache=True)(_powmod_scalar)
    _gcd = njit(cache=True)(_gcd_scalar)
    _sieve_nb = njit(cache=True)(_sieve_loop)
    _mordell_nb = njit(cache=True)(_mordell_loop)
    _fermat_nb = njit(cache=True)(_fermat_loop)
    _hyper_nb = njit(cache=True)(_hyper_loop)
    _progression_nb = njit(cache=True)(_progression_loop)
else:  # pragma: no cover
    _powmod = _powmod_scalar
    _gcd = _gcd_scalar


# --------------------------------------------------------------------------
# numpy implementations

def _powmod_vec(base, e, m):
    """Elementwise base**e mod m for int64 arrays (m may be an array)."""
    r = np.ones_like(base) % m
    b = base % m
    while e > 0:
        if e & 1:
            r = (r * b) % m
        b = (b * b) % m
        e >>= 1
    return r


def _powmod_vec_exps(base, exps, m):
    """Elementwise base**exps mod m with per-element exponents."""
    r = np.ones_like(base) % m
    b = base % m
    e = exps.copy()
    while np.any(e > 0):
        odd = (e & 1) == 1
        r = np.where(odd, (r * b) % m, r)
        b = (b * b) % m
        e >>= 1
    return r


def _sieve_np(limit):
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = False
    return np.flatnonzero(flags).astype(np.int64)


_CHUNK = 256


def _mordell_np(ls, a, b, pinv, e):
    n = ls.shape[0]
    xs = np.full(n, -1, dtype=np.int64)
    ws = np.zeros(n, dtype=np.int64)
    for i in range(n):
        l = int(ls[i])
        for lo in range(0, l, _CHUNK):
            x = np.arange(lo, min(l, lo + _CHUNK), dtype=np.int64)
            w = ((a[i] * _powmod_vec(x, e, l)) % l - b[i]) % l
            w = (w * pinv[i]) % l
            ok = (w == 0) | (_powmod_vec(w, (l - 1) // 2, l) == 1)
            hits = np.flatnonzero(ok)
            if hits.size:
                xs[i] = x[hits[0]]
                ws[i] = w[hits[0]]
                break
    return xs, ws


def _fermat_np(ls, cx, cyinv, cz, m):
    n = ls.shape[0]
    xs = np.full(n, -1, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        l = int(ls[i])
        expo = (l - 1) // int(np.gcd(m, l - 1))
        for lo in range(0, l, _CHUNK):
            x = np.arange(lo, min(l, lo + _CHUNK), dtype=np.int64)
            t = (cx[i] * _powmod_vec(x, m, l) + cz[i]) % l
            t = ((l - t) % l * cyinv[i]) % l
            ok = (t == 0) | (_powmod_vec(t, expo, l) == 1)
            hits = np.flatnonzero(ok)
            if hits.size:
                xs[i] = x[hits[0]]
                ts[i] = t[hits[0]]
                break
    return xs, ts


def _hyper_np(coeffs, q):
    x = np.arange(q, dtype=np.int64)
    v = np.zeros(q, dtype=np.int64)
    for c in coeffs:
        v = (v * x + int(c)) % q
    is_sq = np.zeros(q, dtype=bool)
    is_sq[(x * x) % q] = True
    return int(np.count_nonzero(v == 0) + 2 * np.count_nonzero((v != 0) & is_sq[v]))


def _progression_np(qs, k0s, count):
    keep = np.ones(count, dtype=bool)
    for q, k0 in zip(qs.tolist(), k0s.tolist()):
        if k0 >= 0:
            keep[k0::q] = False
    return keep


# --------------------------------------------------------------------------
# public entry points

def _as_i64(values):
    return np.ascontiguousarray(np.asarray(values, dtype=np.int64))


def _check_word(ls):
    if ls.size and (ls.max() >= WORD_LIMIT or ls.min() < 2):
        raise ValueError("kernel moduli must lie in [2, 2**31)")


def sieve(limit: int, backend: str | None = None) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    limit = int(limit)
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if _pick(backend) == "numba":
        return _sieve_nb(limit)
    return _sieve_np(limit)


def mordell_first_points(ls, a, b, pinv, e: int, backend: str | None = None):
    """For each prime l find the least x with (a*x**e - b)*pinv a square mod l.

    Returns ``(xs, ws)``; ``xs[i] == -1`` when no residue works.
    """
    ls = _as_i64(ls)
    _check_word(ls)
    args = (ls, _as_i64(a), _as_i64(b), _as_i64(pinv), int(e))
    if _pick(backend) == "numba":
        return _mordell_nb(*args)
    return _mordell_np(*args)


def fermat_first_points(ls, cx, cyinv, cz, m: int, backend: str | None = None):
    """For each prime l find the least x with -(cx*x**m + cz)*cyinv an m-th power mod l."""
    ls = _as_i64(ls)
    _check_word(ls)
    args = (ls, _as_i64(cx), _as_i64(cyinv), _as_i64(cz), int(m))
    if _pick(backend) == "numba":
        return _fermat_nb(*args)
    return _fermat_np(*args)


def hyperelliptic_affine_count(coeffs, q: int, backend: str | None = None) -> int:
    """Number of affine solutions of y**2 = f(x) over F_q, q an odd prime.

    ``coeffs`` lists f from the leading coefficient down.
    """
    q = int(q)
    if not 3 <= q < WORD_LIMIT:
        raise ValueError("q must be an odd prime below 2**31")
    c = _as_i64([int(v) % q for v in coeffs])
    if _pick(backend) == "numba":
        return int(_hyper_nb(c, q))
    return _hyper_np(c, q)


def progression_survivors(qs, k0s, count: int, backend: str | None = None) -> np.ndarray:
    """Boolean mask over offsets k < count not struck by any (q, k0 + j*q)."""
    qs = _as_i64(qs)
    k0s = _as_i64(k0s)
    if _pick(backend) == "numba":
        return _progression_nb(qs, k0s, int(count))
    return _progression_np(qs, k0s, int(count))

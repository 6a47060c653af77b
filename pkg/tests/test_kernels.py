"""The numba kernels and the numpy fallback must agree exactly."""

from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hasse_forge import _kernels as K

PRIMES = [int(q) for q in sympy.primerange(5, 3000)]


def test_default_backend_from_env(monkeypatch):
    monkeypatch.setenv("HASSE_FORGE_BACKEND", "numpy")
    assert K.default_backend() == "numpy"
    monkeypatch.setenv("HASSE_FORGE_BACKEND", "fortran")
    with pytest.raises(ValueError):
        K.default_backend()


@pytest.mark.parametrize("limit", [0, 1, 2, 3, 100, 65_536, 1_000_003])
def test_sieve_agreement(limit):
    a = K.sieve(limit, backend="numba")
    b = K.sieve(limit, backend="numpy")
    assert np.array_equal(a, b)
    assert a.tolist() == list(sympy.primerange(2, limit + 1))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(PRIMES), min_size=1, max_size=20), st.integers(1, 10 ** 6),
       st.integers(1, 10 ** 6), st.sampled_from([12, 24, 36, 108]))
def test_mordell_agreement(ls, E2, G2, e):
    a = [E2 % l for l in ls]
    b = [G2 % l for l in ls]
    pinv = [pow(17, -1, l) if l != 17 else 1 for l in ls]
    x1, w1 = K.mordell_first_points(ls, a, b, pinv, e, backend="numba")
    x2, w2 = K.mordell_first_points(ls, a, b, pinv, e, backend="numpy")
    assert np.array_equal(x1, x2) and np.array_equal(w1, w2)
    for l, x, w, ai, bi, pi in zip(ls, x1.tolist(), w1.tolist(), a, b, pinv):
        if x >= 0:
            assert w == (ai * pow(x, e, l) - bi) * pi % l
            assert w == 0 or pow(w, (l - 1) // 2, l) == 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(PRIMES), min_size=1, max_size=20), st.integers(1, 10 ** 6),
       st.integers(1, 10 ** 6), st.sampled_from([12, 24, 36]))
def test_fermat_agreement(ls, cx, cz, m):
    cxs = [cx % l for l in ls]
    czs = [cz % l for l in ls]
    cyinv = [l - 1 for l in ls]
    r1 = K.fermat_first_points(ls, cxs, cyinv, czs, m, backend="numba")
    r2 = K.fermat_first_points(ls, cxs, cyinv, czs, m, backend="numpy")
    assert all(np.array_equal(u, v) for u, v in zip(r1, r2))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7, 101, 1009, 4099]), st.lists(st.integers(0, 10 ** 6),
                                                            min_size=2, max_size=13))
def test_hyperelliptic_agreement(q, coeffs):
    assert K.hyperelliptic_affine_count(coeffs, q, backend="numba") == \
        K.hyperelliptic_affine_count(coeffs, q, backend="numpy")


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5000), st.integers(0, 10 ** 9))
def test_progression_agreement(count, seed):
    rng = np.random.default_rng(seed)
    qs = np.array(PRIMES[:200], dtype=np.int64)
    k0s = np.array([int(rng.integers(-1, q)) for q in qs.tolist()], dtype=np.int64)
    a = K.progression_survivors(qs, k0s, count, backend="numba")
    b = K.progression_survivors(qs, k0s, count, backend="numpy")
    assert np.array_equal(a, b)
    struck = np.zeros(count, dtype=bool)
    for q, k0 in zip(qs.tolist(), k0s.tolist()):
        if k0 >= 0:
            struck[k0::q] = True
    assert np.array_equal(a, ~struck)


def test_word_limit_enforced():
    with pytest.raises(ValueError):
        K.mordell_first_points([2 ** 31 + 11], [1], [1], [1], 12)
    with pytest.raises(ValueError):
        K.hyperelliptic_affine_count([1, 0, 1], 2)

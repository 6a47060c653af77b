from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.ntheory.modular import crt

from hasse_forge import generators
from hasse_forge import ntkernel as nt
from hasse_forge.config import DEFAULT_CAPS
from hasse_forge.errors import InvalidArgument, NoPrimePossible, SearchBudgetError
from hasse_forge.fm import FmContext, verify_fm
from hasse_forge.threefold import on_threefold

KAPPA_STAR_2 = 1473823033760340245449934959273636595559937891849969
KAPPA_STAR_2_NEXT = 12369586176202855631454811265332307141306621592312239


def test_bounds():
    assert generators.c3_bound(2) == 484
    assert generators.d7_bound(2) == 256_036
    assert generators.c3_bound(1) == 100


@pytest.fixture(scope="module")
def kappa_recipe():
    return generators.gen_kappa(17, 2, 1, 1)


def test_gen_kappa_frozen(kappa_recipe):
    r = kappa_recipe
    assert r.kappa_star == KAPPA_STAR_2
    assert r.kappa == 3 * KAPPA_STAR_2
    assert r.conditions.passed
    assert r.modulus.bit_length() == 168


def test_gen_kappa_against_independent_scan(kappa_recipe):
    moduli = [m for m, _ in kappa_recipe.targets]
    residues = [r for _, r in kappa_recipe.targets]
    assert all((9 * r - 1) % m == 0 for m, r in kappa_recipe.targets)
    k0, M = (int(v) for v in crt(moduli, residues))
    cand = k0
    while cand in (2, 3, 17) or not sympy.isprime(cand):
        cand += M
    assert cand == kappa_recipe.kappa_star


def test_gen_kappa_target_primes(kappa_recipe):
    forced = {m for m, _ in kappa_recipe.targets}
    assert kappa_recipe.set_b_star
    for l in list(kappa_recipe.set_b_star) + list(kappa_recipe.set_a_star):
        assert any(m % l == 0 for m in forced), l
        assert (9 * kappa_recipe.kappa_star - 1) % l == 0


def test_gen_kappa_exclusion_gives_next():
    r = generators.gen_kappa(17, 2, 1, 1, exclusions=(KAPPA_STAR_2,))
    assert r.kappa_star == KAPPA_STAR_2_NEXT


def test_check_C_flags_bad_kappa():
    rep = generators.check_C(17, 2, 3 * 5)
    assert not rep.passed


@pytest.mark.parametrize("args", [(13, 2, 1, 1), (17, 1, 1, 1), (17, 2, 2, 1),
                                  (17, 4, 3, 2), (17, 99, 1, 1)])
def test_gen_kappa_argument_checks(args):
    with pytest.raises(InvalidArgument):
        generators.gen_kappa(*args)


def test_cap_message_for_large_n():
    with pytest.raises(InvalidArgument, match="cap"):
        generators.gen_kappa(17, 9, 1, 1)


# ---------------------------------------------------------------------------
# kappa and chi


def test_gen_kappa_chi_truncated_sweep():
    r = generators.gen_kappa_chi(17, 2, 1, 1, sweep_bound=50)
    assert r.kappa_star == 3598243912925246029
    assert r.chi == 425755064025081165975227
    assert r.chi % 4 == 3 and not r.complete
    rep = r.conditions
    assert all(rep.status(f"D{i}") == "pass" for i in range(1, 7))
    assert rep.status("D7") == "fail"
    assert rep["D7"].detail["offending_count"] == 22513


def test_check_D_rejects_even_chi():
    with pytest.raises(InvalidArgument):
        generators.check_D(17, 2, 3, 4)


def test_gen_kappa_chi_full_is_over_budget():
    with pytest.raises(SearchBudgetError) as err:
        generators.gen_kappa_chi(17, 2, 1, 1)
    est = err.value.estimate
    assert est["bits"] > 300_000
    assert est["expected_seconds"] > DEFAULT_CAPS.prime_scan_seconds


def test_large_bound_refused_before_sieving():
    with pytest.raises(SearchBudgetError) as err:
        generators.gen_kappa_chi(17, 5, 1, 1, max_n=5)
    assert err.value.progress["sieve_bound"] == generators.d7_bound(5)


# ---------------------------------------------------------------------------
# second family


@pytest.fixture(scope="module")
def family_two_recipe():
    return generators.gen_family_two(17)


def _linear_forms(rec, mu1):
    p, lam, gam = rec.p, rec.lam, rec.gamma
    e0, d0 = rec.bezout["epsilon0"], rec.bezout["delta0"]
    half = rec.t["t1"] // 2
    e1 = 27 * p * p * gam ** 2 * mu1 + p * e0 + 27 * lam * gam ** 3 * half
    e2 = 3 * p * p * lam ** 2 * mu1 - d0 + 3 * lam ** 3 * gam * half
    q1 = 3 * p * 18 * lam ** 2 * gam ** 2 * mu1 + 2 * lam ** 2 * e0 + rec.t["t4"]
    return q1, e1, e2


def test_family_two_frozen(family_two_recipe):
    r = family_two_recipe
    assert tuple(r.septuple) == (4, -699678, -215262, 13, -2172605760, 6, 3)
    assert (r.mu1, r.H, r.F0, r.n_eg) == (1, 1, 3, Fraction(1))
    assert on_threefold(17, r.septuple)
    q1, e1, e2 = _linear_forms(r, r.mu1)
    assert r.primes["Q1"] == q1 and sympy.isprime(q1)
    assert r.septuple.E == -4 * r.F0 ** 3 * e1 * e2


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_family_two_fm_every_n(family_two_recipe, n):
    assert verify_fm(FmContext(17, n), family_two_recipe.septuple).passed


def test_family_two_bezout(family_two_recipe):
    b = family_two_recipe.bezout
    assert 17 * b["epsilon0"] + 9 * b["delta0"] == 1 and b["delta0"] % 3 == 2


def test_schinzel_mode_reports_fixed_divisor():
    with pytest.raises(NoPrimePossible, match="divisible by 2"):
        generators.gen_family_two(17, schinzel=True)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(1, 1), (1, 5), (5, 1), (7, 5), (1, 7)]), st.integers(1, 10 ** 6))
def test_linear_forms_always_have_an_even_member(lg, mu1):
    lam, gam = lg
    rec = generators.gen_family_two(17, lam=lam, gamma=gam)
    _, e1, e2 = _linear_forms(rec, mu1)
    assert (e1 + e2) % 2 == 1 and (e1 * e2) % 2 == 0


def test_family_two_argument_checks():
    with pytest.raises(InvalidArgument):
        generators.gen_family_two(17, lam=2)
    with pytest.raises(InvalidArgument):
        generators.gen_family_two(17, pi=3)


def test_n_eg_is_rational():
    rec = generators.gen_family_two(17)
    value, detail = generators.n_EG(17, rec.septuple, hints=(rec.primes["Q1"],))
    assert value == rec.n_eg and isinstance(value, Fraction)
    assert Fraction(detail["n_star"]) <= value


def test_primality_of_frozen_values():
    for v in (KAPPA_STAR_2, KAPPA_STAR_2_NEXT, 3598243912925246029):
        assert nt.is_prime(v) and sympy.isprime(v)

"""Coefficient-ring arithmetic: Witt vectors with Frobenius, the truncated
divided-power ring, troncation, and the valuations."""

import random

import pytest
from fractions import Fraction

from padicpolygons import (DivisibilityError, PrecisionError, RingConfig,
                           frobenius_w, monodromy_s, phi_s, tronc, val_E,
                           val_p_K)
from conftest import random_k_elem, random_strunc, random_witt


# ---------------------------------------------------------------------------
# W(F_{p^m}) and sigma


def test_frobenius_identity_on_zp(cfg7m1):
    x = cfg7m1.w(5)
    assert frobenius_w(x) == x


def test_frobenius_of_zero(cfg7):
    assert frobenius_w(cfg7.witt.zero()).is_zero()


def test_frobenius_is_other_hensel_root(cfg7):
    # sigma(teich(w)) must be a root of the modulus at full precision,
    # congruent to w^p mod p, and distinct from teich(w) itself
    w = cfg7.witt.teichmuller(cfg7.witt.gen())
    s = frobenius_w(w)
    hval = cfg7.witt._eval_intpoly(cfg7.witt.modulus, s.coords)
    assert all(c % cfg7.p ** cfg7.prec == 0 for c in hval)
    assert s.residue() == w.residue().frobenius()
    assert not (s - w).is_zero()


def test_frobenius_order_m(cfg7, rng):
    for _ in range(20):
        x = random_witt(cfg7, rng)
        y = x
        for _ in range(cfg7.m):
            y = frobenius_w(y)
        assert y == x


def test_frobenius_ring_homomorphism(cfg7, rng):
    for _ in range(20):
        x, y = random_witt(cfg7, rng), random_witt(cfg7, rng)
        assert frobenius_w(x * y) == frobenius_w(x) * frobenius_w(y)
        assert frobenius_w(x + y) == frobenius_w(x) + frobenius_w(y)


def test_inseparable_modulus_rejected():
    # x^2 reducible mod 7
    with pytest.raises(Exception):
        RingConfig(7, 2, 2, [-7, 0, 1], prec=7, r=2, modulus=[0, 0, 1])


def test_witt_precision_ledger(cfg7):
    x = cfg7.w(49)
    y = x.div_exact_p(1)
    assert y.prec == cfg7.prec - 1
    assert y == cfg7.w(7)
    with pytest.raises(DivisibilityError):
        cfg7.w(3).div_exact_p(1)
    dead = cfg7.w(1, prec=1)
    with pytest.raises(PrecisionError):
        dead.div_exact_p(1)


def test_unit_inverse(cfg7, rng):
    for _ in range(10):
        x = random_witt(cfg7, rng)
        if not x.is_unit():
            continue
        assert x * x.unit_inverse() == cfg7.witt.one()


# ---------------------------------------------------------------------------
# S/Fil^p S


def test_phi_defining_relation(cfg7):
    assert phi_s(cfg7.s_u(1)) == cfg7.s_u(cfg7.p)


def test_phi_of_E_is_p_times_unit(cfg7):
    phiE = phi_s(cfg7.s_E())
    assert phiE.val_p() == 1
    c = phiE.div_exact_p(1)
    assert c.is_unit()
    assert c == cfg7.c
    # E^2 -> p^2 c^2 by multiplicativity
    E2 = cfg7.s_E() * cfg7.s_E()
    assert phi_s(E2) == (c * c).scale_p(2)


def test_phi_semilinear_and_multiplicative(cfg7, rng):
    for _ in range(25):
        a = random_witt(cfg7, rng)
        x = random_strunc(cfg7, rng, 6)
        y = random_strunc(cfg7, rng, 6)
        assert phi_s(x.mul_w(a)) == phi_s(x).mul_w(frobenius_w(a))
        assert phi_s(x * y) == phi_s(x) * phi_s(y)


def test_phi_intertwines_E_multiplication(cfg7, rng):
    pc = cfg7.c.scale_p(1)
    for _ in range(10):
        x = random_strunc(cfg7, rng, 8)
        assert phi_s(cfg7.s_E() * x) == pc * phi_s(x)


def test_monodromy_defining_relations(cfg7):
    u = cfg7.s_u(1)
    assert monodromy_s(u) == -u
    u3 = cfg7.s_u(3)
    assert monodromy_s(u3) == u3.mul_w(-3)
    assert monodromy_s(cfg7.s([cfg7.w(11)])).is_zero()


def test_monodromy_leibniz(cfg7, rng):
    for _ in range(100):
        x = random_strunc(cfg7, rng, 6)
        y = random_strunc(cfg7, rng, 6)
        assert monodromy_s(x * y) == monodromy_s(x) * y + x * monodromy_s(y)


# ---------------------------------------------------------------------------
# tronc


def test_tronc_kills_E_power(cfg7):
    E2 = cfg7.s_E() * cfg7.s_E()
    assert tronc(E2, 2).is_zero()
    assert tronc(cfg7.s_E(), 1).is_zero()


def test_tronc_fixes_low_degree(cfg7, rng):
    t = random_strunc(cfg7, rng, cfg7.e)
    x = cfg7.s([cfg7.p]) + t * cfg7.s_E()
    assert tronc(x, 2) == x


def _longdiv_remainder(cfg, x, divisor):
    """Independent synthetic division: remainder of x by the monic divisor."""
    work = list(x.coeffs)
    d = len(divisor) - 1
    for k in range(len(work) - 1, d - 1, -1):
        c = work[k]
        for i in range(d + 1):
            work[k - d + i] = work[k - d + i] - c * divisor[i]
    return work[:d]


def test_tronc_difference_divisible(cfg7, rng):
    # oracle: subtracting the troncation leaves an exact E^2-multiple,
    # checked by an independent synthetic division
    E2 = list(cfg7._E_power(2))
    for _ in range(25):
        x = random_strunc(cfg7, rng)
        diff = x - tronc(x, 2)
        rem = _longdiv_remainder(cfg7, diff, E2)
        assert all(c.is_zero() for c in rem)


def test_tronc_idempotent_and_linear(cfg7, rng):
    for _ in range(100):
        x = random_strunc(cfg7, rng)
        y = random_strunc(cfg7, rng)
        a = random_witt(cfg7, rng)
        s = rng.choice([1, 2])
        t = tronc(x, s)
        assert tronc(t, s) == t
        assert tronc(x + y, s) == tronc(x, s) + tronc(y, s)
        assert tronc(x.mul_w(a), s) == tronc(x, s).mul_w(a)


def test_phi_tronc_congruence(cfg7, rng):
    # phi(x) = phi(tronc_r(x)) mod p^r
    r = cfg7.r
    for _ in range(25):
        x = random_strunc(cfg7, rng)
        diff = phi_s(x) - phi_s(tronc(x, r))
        assert diff.val_p() >= r


# ---------------------------------------------------------------------------
# valuations


def test_val_p_K_uniformizer_and_p(cfg7):
    assert val_p_K(cfg7.pi()) == Fraction(1, cfg7.e)
    assert val_p_K(cfg7.k_elem([cfg7.p])) == 1


def _sylvester_resultant(E_ints, A_ints):
    """Resultant of monic E (degree e) and A (degree < e) over Z, via the
    Sylvester determinant with exact integer arithmetic."""
    import itertools
    e = len(E_ints) - 1
    da = len(A_ints) - 1
    n = e + da
    rows = []
    for i in range(da):
        row = [0] * n
        for k, c in enumerate(reversed(E_ints)):
            row[i + k] = c
        rows.append(row)
    for i in range(e):
        row = [0] * n
        for k, c in enumerate(reversed(A_ints)):
            row[i + k] = c
        rows.append(row)
    det = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for s in range(n):
            if not seen[s]:
                t, ln = s, 0
                while not seen[t]:
                    seen[t] = True
                    t = perm[t]
                    ln += 1
                if ln % 2 == 0:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= rows[i][perm[i]]
        det += term
    return det


def test_val_p_K_resultant_oracle(cfg7m1):
    # x = p/(2 pi) for e = 2, p = 7 has valuation 1/2
    x = cfg7m1.k_elem([cfg7m1.p]) * cfg7m1.pi().inverse() * \
        cfg7m1.k_elem([2]).inverse()
    assert val_p_K(x) == Fraction(1, 2)
    # independent check on random integral elements via the resultant
    rng = random.Random(7)
    for _ in range(15):
        ints = [rng.randrange(1, 7 ** 5) * 7 ** rng.randrange(0, 2)
                for _ in range(2)]
        k = cfg7m1.k_elem(ints)
        res = _sylvester_resultant([-7, 0, 1], ints)
        v = 0
        while res % 7 == 0:
            res //= 7
            v += 1
        assert val_p_K(k) == Fraction(v, 2)


def test_val_p_K_multiplicative(cfg7, rng):
    for _ in range(25):
        x = random_k_elem(cfg7, rng)
        y = random_k_elem(cfg7, rng)
        if x.is_zero() or y.is_zero():
            continue
        vx, vy, vxy = val_p_K(x), val_p_K(y), val_p_K(x * y)
        assert vxy == vx + vy


def test_val_E_examples(cfg7, rng):
    E3 = cfg7.s_E() * cfg7.s_E() * cfg7.s_E()
    unit = cfg7.s([3, 1])
    assert val_E(E3 * unit) == 3
    assert val_E(cfg7.s_zero()) == cfg7.p
    t = random_strunc(cfg7, rng, cfg7.e)
    x = cfg7.s([cfg7.w(1 + cfg7.p)]) + t * cfg7.s_E()
    assert val_E(x) == 0


def test_k_inverse(cfg7, rng):
    for _ in range(15):
        x = random_k_elem(cfg7, rng)
        if x.is_zero():
            continue
        y = x.inverse()
        assert (x * y - cfg7.k_one()).is_zero()

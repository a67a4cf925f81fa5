import random

import pytest

from padicpolygons import RingConfig


@pytest.fixture(scope="session")
def cfg7():
    """p = 7, k = F_49, e = 2, E = u^2 - 7, prec 7: the main family ring."""
    return RingConfig(7, 2, 2, [-7, 0, 1], prec=7, r=2)


@pytest.fixture(scope="session")
def cfg7m1():
    """p = 7, k = F_7, e = 2, E = u^2 - 7."""
    return RingConfig(7, 1, 2, [-7, 0, 1], prec=7, r=2)


@pytest.fixture(scope="session")
def cfg7e1():
    """p = 7, k = F_49, e = 1, E = u - 7."""
    return RingConfig(7, 2, 1, [-7, 1], prec=7, r=2)


@pytest.fixture(scope="session")
def cfg13():
    """p = 13, k = F_13, e = 5, E = u^5 - 13 (for the mod-p solver)."""
    return RingConfig(13, 1, 5, [-13, 0, 0, 0, 0, 1], prec=8, r=2)


@pytest.fixture()
def rng():
    return random.Random(20240)


def random_witt(cfg, rng, prec=None):
    q = cfg.p ** cfg.prec
    return cfg.w(tuple(rng.randrange(q) for _ in range(cfg.m)), prec)


def random_strunc(cfg, rng, max_deg=None):
    max_deg = cfg.e * cfg.p if max_deg is None else max_deg
    deg = rng.randrange(1, max_deg + 1)
    return cfg.s([random_witt(cfg, rng) for _ in range(deg)])


def random_tilde(cfg, rng, max_deg=None):
    max_deg = cfg.e * cfg.p if max_deg is None else max_deg
    deg = rng.randrange(1, max_deg + 1)
    return cfg.tilde([tuple(rng.randrange(cfg.p) for _ in range(cfg.m))
                      for _ in range(deg)])


def random_tilde_unit(cfg, rng, max_deg=None):
    x = random_tilde(cfg, rng, max_deg)
    coeffs = list(x.coeffs)
    while coeffs[0].is_zero():
        coeffs[0] = cfg.gf.elem(tuple(rng.randrange(cfg.p)
                                      for _ in range(cfg.m)))
    return cfg.tilde(coeffs)


def random_k_elem(cfg, rng, pexp_max=1):
    coeffs = [random_witt(cfg, rng) for _ in range(cfg.e)]
    return cfg.k_elem(coeffs, rng.randrange(pexp_max + 1))

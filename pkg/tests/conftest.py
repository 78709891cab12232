import math
import random

import pytest

from chemostat import ChemostatModel, PolyFn, monod_species, normalize


def central_diff(f, x, h=1e-5):
    """Independent derivative oracle: central finite difference."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def two_species_reference(c2=5.0):
    """Two Monod species with linear yields; the winner breaks even at 0.15,
    the rival at 0.18333..., and the rival's yield slope c2 decides whether
    the comparison-constant gap survives (feasible for 5 and 30, not 80)."""
    return normalize(ChemostatModel(1.0, 1.0, (
        monod_species(1.0, 0.1, 0.6, PolyFn((1.0, 4.0)), label="winner"),
        monod_species(1.0, 0.15, 0.55, PolyFn((1.0, float(c2))), label="rival"),
    )))


def quadratic_yield_model(D_i=1.0):
    """Single species, Monod uptake rate over yield 1 + 46 S^2. At D_i = 1
    the nullcline has two humps and the equilibrium sits just past the
    second crest, surrounded by two limit cycles."""
    return normalize(ChemostatModel(1.0, 1.0, (
        monod_species(2.0, 0.58, float(D_i), PolyFn((1.0, 0.0, 46.0)), label="pw"),
    )))


def focus_gas_model():
    """Single Monod species with constant yield whose equilibrium is a
    stable focus, so section returns exist and spiral monotonically in."""
    return normalize(ChemostatModel(1.0, 1.0, (
        monod_species(5.0, 0.3, 2.5, 1.0, label="g"),
    )))


def random_constant_yield_model(rng: random.Random, n=3):
    """Monod species with constant yields and well-separated break-evens
    strictly inside (0, 1), ordered so species 1 wins. Rivals keep a real
    decay margin at the winner's break-even point so trajectories settle
    well before t = 500."""
    while True:
        lams = sorted(rng.uniform(0.08, 0.8) for _ in range(n))
        if not all(b - a >= 0.06 for a, b in zip(lams, lams[1:])):
            continue
        species = []
        for k, lam in enumerate(lams, start=1):
            d = rng.uniform(0.4, 1.5)
            a = d * rng.uniform(1.4, 3.0)
            b = lam * (a - d) / d
            y = rng.uniform(0.5, 2.0)
            species.append(monod_species(a, b, d, y, label=f"s{k}"))
        lam1 = lams[0]
        if all(sp.growth(lam1) <= -0.03 for sp in species[1:]):
            return normalize(ChemostatModel(1.0, 1.0, tuple(species)))


def monod_params(sp):
    """(a, b, D, Y) of a constant-yield Monod species built by monod_species."""
    rate = sp.growth.left
    d = sp.growth.right.coeffs[0]
    y = sp.uptake.den.coeffs[0]
    return rate.a, rate.b, d, y


@pytest.fixture(scope="session")
def fig_two_species():
    return two_species_reference()


@pytest.fixture(scope="session")
def fig_quadratic():
    return quadratic_yield_model()


@pytest.fixture(scope="session")
def gas_single():
    return focus_gas_model()

"""Seeded random elements for property tests and randomized checks.

Coefficients are drawn from {-3..3} minus 0 and divided by 1, 2 or 3;
exponents are geometric with mean 1.5 (success probability 0.4), and a
term is redrawn until it fits under the degree bound.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .coefficients import CommPoly
from .pbw import AlgebraPresentation, CrossedElement

GEOMETRIC_P = 0.4


def trial_rng(seed, trial) -> random.Random:
    """Independent stream per trial so results do not depend on evaluation order."""
    return random.Random(f"{seed}:{trial}")


def geometric(rng: random.Random, p: float = GEOMETRIC_P) -> int:
    k = 0
    while rng.random() > p:
        k += 1
    return k


def coefficient(rng: random.Random) -> Fraction:
    c = rng.choice((-3, -2, -1, 1, 2, 3))
    return Fraction(c, rng.randint(1, 3))


def random_exponent(rng, slots: int, bound: int) -> tuple:
    for _ in range(50):
        exp = tuple(geometric(rng) for _ in range(slots))
        if sum(exp) <= bound:
            return exp
    return (0,) * slots


def random_poly(rng, nvars: int, degree_bound: int, terms: int = 3) -> CommPoly:
    out = CommPoly.zero(nvars)
    for _ in range(rng.randint(1, terms)):
        out = out + CommPoly.monomial(random_exponent(rng, nvars, degree_bound), coefficient(rng))
    return out


def random_element(
    pres: AlgebraPresentation,
    rng: random.Random,
    degree_bound: int,
    terms: int = 3,
    generators: Optional[Sequence[int]] = None,
    nonzero: bool = True,
) -> CrossedElement:
    """Random normal-form element using only the listed generators (default all)."""
    gens = range(pres.n) if generators is None else list(generators)
    slots = pres.m + len(gens)
    for _ in range(50):
        terms_out: dict = {}
        for _ in range(rng.randint(1, terms)):
            exp = random_exponent(rng, slots, degree_bound)
            mu, sub = exp[: pres.m], exp[pres.m:]
            pbw = [0] * pres.n
            for g, e in zip(gens, sub):
                pbw[g] = e
            mono = pres.base.reduce(CommPoly.monomial(mu, coefficient(rng)))
            key = tuple(pbw)
            terms_out[key] = terms_out[key] + mono if key in terms_out else mono
        e = CrossedElement(pres, terms_out)
        if e or not nonzero:
            return e
    return pres.one()

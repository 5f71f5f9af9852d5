"""Randomized and exhaustive testers for primality and filtration properties.

A "pass" here means no violation was found at the stated bounds.  Every
trial draws from its own RNG stream seeded by ``f"{seed}:{trial}"`` so a
report never depends on evaluation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .coefficients import CommPoly
from .linalg import Echelon, right_combination_solve, sparse_vector
from .pbw import (
    AlgebraPresentation,
    CrossedElement,
    filtration_index,
    leading_filtration_index,
    pbw_basis,
    total_degree,
)
from .sampling import random_element, trial_rng
from .semigroup import OrderRule, builtin_sample, check_ordered_like, order_key

KEEP_WITNESSES = 5


@dataclass
class PropertyReport:
    name: str
    trials: int
    verdict: str  # pass | fail | inconclusive
    violations: list = field(default_factory=list)
    violation_count: int = 0
    examined: int = 0
    unknown: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def as_dict(self) -> dict:
        return {
            "name": self.name, "trials": self.trials, "verdict": self.verdict,
            "violation_count": self.violation_count, "examined": self.examined,
            "unknown": self.unknown, "violations": self.violations, "detail": self.detail,
        }


class SubalgebraSpec:
    """A subset of B with a bounded membership test.

    kinds:
      ``A1``           elements built from the base and g1 only
      ``degree-zero``  weight-zero part for nonnegative weights on (vars, gens)
      ``user``         span of products of the given elements up to a degree
      ``ideal``        two-sided ideal generated by the given elements
                       (membership is exact only in a polynomial ring for
                       principal or monomial ideals)

    ``contains`` answers True, False or None (undecided at the bound).
    """

    KINDS = ("A1", "degree-zero", "user", "ideal")

    def __init__(self, kind: str, pres: AlgebraPresentation, *, elements: Sequence = (),
                 weights: Optional[Sequence[int]] = None, degree_bound: int = 6):
        if kind not in self.KINDS:
            raise ValueError(f"unknown subalgebra kind {kind!r}")
        self.kind = kind
        self.pres = pres
        self.elements = [pres.element(e) if isinstance(e, str) else e for e in elements]
        self.degree_bound = degree_bound
        self.weights = None
        if kind == "A1" and pres.n < 1:
            raise ValueError("A1 needs at least one generator")
        if kind == "degree-zero":
            w = tuple(weights) if weights is not None else (1,) * (pres.m + pres.n)
            if len(w) != pres.m + pres.n or any(x < 0 for x in w):
                raise ValueError("need one nonnegative weight per variable and generator")
            self.weights = w
        if kind in ("user", "ideal") and not self.elements:
            raise ValueError(f"{kind} subalgebra needs elements")
        self._span = None
        if kind == "user":
            self._span = self._build_span()

    def describe(self) -> str:
        if self.kind in ("user", "ideal"):
            return f"{self.kind}({', '.join(map(str, self.elements))})"
        if self.kind == "degree-zero":
            return f"degree-zero{self.weights}"
        return self.kind

    def weight(self, coef_exp, pbw) -> int:
        w = self.weights
        return sum(a * b for a, b in zip(w[: self.pres.m], coef_exp)) + \
            sum(a * b for a, b in zip(w[self.pres.m:], pbw))

    def _build_span(self):
        bound = self.degree_bound
        layer = [self.pres.one()]
        pool = [self.pres.one()]
        while layer:
            nxt = []
            for x in layer:
                for g in self.elements:
                    y = x * g
                    if not y.is_zero() and total_degree(y) <= bound:
                        nxt.append(y)
            ech = Echelon(track=False)
            for p in pool:
                ech.insert(sparse_vector(p))
            layer = [y for y in nxt if ech.insert(sparse_vector(y)) is None]
            pool.extend(layer)
        ech = Echelon(track=False)
        for p in pool:
            ech.insert(sparse_vector(p))
        return ech

    def contains(self, e: CrossedElement) -> Optional[bool]:
        if e.is_zero():
            return True
        if self.kind == "A1":
            return e.generator_support() <= {0}
        if self.kind == "degree-zero":
            return all(self.weight(mu, pbw) == 0 for pbw, p in e.terms.items() for mu in p.terms)
        if self.kind == "user":
            if total_degree(e) > self.degree_bound:
                return None
            rest, _ = self._span.reduce(sparse_vector(e))
            return not rest
        # ideal
        pres = self.pres
        deg = total_degree(e)
        rep = right_combination_solve(self.elements, e, deg, pres)
        if rep.solved:
            return True
        exact = (pres.n == 0 and pres.base.quotient is None
                 and (len(self.elements) == 1
                      or all(len(g.labels()) == 1 for g in self.elements)))
        return False if exact else None

    def sample(self, rng, degree_bound: int) -> CrossedElement:
        """A random nonzero member."""
        pres = self.pres
        if self.kind == "A1":
            return random_element(pres, rng, degree_bound, generators=[0])
        if self.kind == "degree-zero":
            e = random_element(pres, rng, degree_bound)
            keep = {}
            for pbw, p in e.terms.items():
                q = CommPoly(pres.m, {mu: c for mu, c in p.terms.items() if self.weight(mu, pbw) == 0})
                if not q.is_zero():
                    keep[pbw] = q
            out = CrossedElement(pres, keep)
            return out if out else pres.scalar(rng.choice((1, 2, -1)))
        if self.kind == "user":
            rows = list(self._span.rows.values())
            acc = pres.zero()
            from .linalg import element_from_sparse
            for _ in range(rng.randint(1, 3)):
                acc = acc + element_from_sparse(rng.choice(rows)[0], pres).scale(rng.randint(1, 3))
            return acc if acc else pres.one()
        g = rng.choice(self.elements)
        left = random_element(pres, rng, max(0, degree_bound - 1))
        right = random_element(pres, rng, max(0, degree_bound - 1))
        return left * g * right


def _label_elements(pres, bound):
    return [pres.label_element(lab) for lab in pbw_basis(pres, bound)]


def _pairs_by_level(items):
    """(a, b) pairs ordered by index sum, larger first index first."""
    n = len(items)
    for s in range(2 * n - 1):
        for i in range(min(s, n - 1), max(-1, s - n), -1):
            yield items[i], items[s - i]


def _scan(name, sub, pres, trials, seed, degree_bound, violated: Callable, exhaustive_bound=None):
    """Shared sampler: exhaustive monomial pairs, then seeded random pairs.

    ``violated(in_a, in_b, in_ab)`` decides whether a fully decided triple
    of memberships is a counterexample.
    """
    violations, count, unknown, examined = [], 0, 0, 0

    def consider(a, b):
        nonlocal count, unknown, examined
        examined += 1
        ab = a * b
        if ab.is_zero():
            return
        in_ab = sub.contains(ab)
        if in_ab is False:
            return
        in_a, in_b = sub.contains(a), sub.contains(b)
        if None in (in_a, in_b, in_ab):
            if in_ab is not False:
                unknown += 1
            return
        if violated(in_a, in_b, in_ab):
            count += 1
            if len(violations) < KEEP_WITNESSES:
                violations.append({"a": str(a), "b": str(b), "ab": str(ab),
                                   "a_in": in_a, "b_in": in_b, "ab_in": in_ab})

    ebound = min(degree_bound, 2) if exhaustive_bound is None else exhaustive_bound
    for a, b in _pairs_by_level(_label_elements(pres, ebound)):
        consider(a, b)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mode = rng.randrange(3)
        a = sub.sample(rng, degree_bound) if mode == 0 else random_element(pres, rng, degree_bound)
        b = sub.sample(rng, degree_bound) if mode == 1 else random_element(pres, rng, degree_bound)
        consider(a, b)
    verdict = "fail" if count else "pass"
    return PropertyReport(name, trials, verdict, violations, count, examined, unknown,
                          {"subalgebra": sub.describe(), "degree_bound": degree_bound, "seed": seed})


def check_completely_prime(sub: SubalgebraSpec, pres: AlgebraPresentation, trials: int = 1000,
                           seed: int = 0, degree_bound: int = 3) -> PropertyReport:
    """Look for ab in sub with neither a nor b in sub."""
    return _scan("completely-prime", sub, pres, trials, seed, degree_bound,
                 lambda ia, ib, iab: iab and not ia and not ib)


def check_scp(sub: SubalgebraSpec, pres: AlgebraPresentation, trials: int = 1000,
              seed: int = 0, degree_bound: int = 3) -> PropertyReport:
    """Look for ab in sub with a or b outside sub."""
    return _scan("strongly-completely-prime", sub, pres, trials, seed, degree_bound,
                 lambda ia, ib, iab: iab and not (ia and ib))


def verify_witness(witness: dict, sub: SubalgebraSpec, pres: AlgebraPresentation) -> bool:
    """Recompute a*b and every membership from the printed witness."""
    a, b = pres.element(witness["a"]), pres.element(witness["b"])
    ab = a * b
    return (
        ab == pres.element(witness["ab"])
        and sub.contains(ab) == witness["ab_in"]
        and sub.contains(a) == witness["a_in"]
        and sub.contains(b) == witness["b_in"]
    )


def _homogeneous(p: CommPoly, pbw, sub, target) -> bool:
    return all(sub.weight(mu, pbw) == target for mu in p.terms)


def grading_problems(pres: AlgebraPresentation, weights: Sequence[int], probe_bound: int = 2) -> list:
    """Reasons the weights do not give a graded domain (empty list if none found)."""
    sub = SubalgebraSpec("degree-zero", pres, weights=weights)
    m = pres.m
    wx, wg = weights[:m], weights[m:]
    zero_pbw = (0,) * pres.n
    problems = []
    q = pres.base.quotient
    if q is not None:
        lead = wx[q.eliminated_variable] * q.leading_exponent
        if not _homogeneous(q.relation, zero_pbw, sub, lead):
            problems.append("relation is not homogeneous")
    for i, d in enumerate(pres.derivations):
        for k, im in enumerate(d.images):
            if not im.is_zero() and not _homogeneous(im, zero_pbw, sub, wg[i] + wx[k]):
                problems.append(f"delta of g{i + 1} on variable {k + 1} is not homogeneous")
    for (i, j), vec in pres.lie.structure_constants.items():
        for k, _ in vec:
            if wg[k] != wg[i] + wg[j]:
                problems.append(f"bracket [g{i + 1}, g{j + 1}] is not homogeneous")
    for (i, j), a in pres.lie.cocycles.items():
        if not _homogeneous(a, zero_pbw, sub, wg[i] + wg[j]):
            problems.append(f"cocycle ({i + 1},{j + 1}) is not homogeneous")
    labels = _label_elements(pres, probe_bound)
    for a, b in itertools.product(labels, repeat=2):
        if (a * b).is_zero():
            problems.append(f"homogeneous zero divisors: ({a}) * ({b}) = 0")
            break
    return problems


def check_graded_lemma_chain(pres: AlgebraPresentation, weights: Optional[Sequence[int]] = None,
                             trials: int = 1000, seed: int = 0, degree_bound: int = 3,
                             semigroup_bound: int = 12, subset_size: int = 3) -> PropertyReport:
    """Completely prime and then s.c.p. for the weight-zero part of a graded domain."""
    weights = tuple(weights) if weights is not None else (1,) * (pres.m + pres.n)
    grading = check_ordered_like(builtin_sample(f"nat-plus:{semigroup_bound}"), subset_size, True)
    problems = grading_problems(pres, weights)
    if not grading.passed:
        problems.append("grading semigroup sample is not ordered-like")
    if problems:
        return PropertyReport("graded-lemma-chain", trials, "inconclusive",
                              detail={"refused": problems, "weights": list(weights)})
    sub = SubalgebraSpec("degree-zero", pres, weights=weights)
    cp = check_completely_prime(sub, pres, trials, seed, degree_bound)
    scp = check_scp(sub, pres, trials, seed, degree_bound)
    verdict = "pass" if cp.passed and scp.passed else "fail"
    return PropertyReport(
        "graded-lemma-chain", trials, verdict, cp.violations + scp.violations,
        cp.violation_count + scp.violation_count, cp.examined + scp.examined,
        cp.unknown + scp.unknown,
        {"weights": list(weights), "completely_prime": cp.verdict, "scp": scp.verdict,
         "chain_consistent": not (scp.passed and not cp.passed)},
    )


FILTRATION_MODES = ("componentwise", "deglex")


def check_filtration_multiplicative(pres: AlgebraPresentation, trials: int = 1000, seed: int = 0,
                                    degree_bound: int = 3, mode: str = "componentwise") -> PropertyReport:
    """Random pairs against index(e1*e2) <= index(e1) + index(e2).

    ``componentwise`` uses the componentwise maximum of (g2..gn)-exponents
    and the componentwise order; ``deglex`` uses the order-maximal exponent
    and the degree-lexicographic order.
    """
    if mode not in FILTRATION_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    key = order_key(OrderRule.DEGLEX)
    violations, count, equal = [], 0, 0

    def index(e):
        return filtration_index(e) if mode == "componentwise" else leading_filtration_index(e)

    def leq(x, y):
        if mode == "componentwise":
            return all(a <= b for a, b in zip(x, y))
        return key(x) <= key(y)

    def consider(e1, e2):
        nonlocal count, equal
        prod = e1 * e2
        if prod.is_zero():
            return
        bound = tuple(a + b for a, b in zip(index(e1), index(e2)))
        got = index(prod)
        if got == bound:
            equal += 1
        if not leq(got, bound):
            count += 1
            if len(violations) < KEEP_WITNESSES:
                violations.append({"a": str(e1), "b": str(e2), "ab": str(prod),
                                   "index_ab": list(got), "bound": list(bound)})

    examined = 0
    for e1, e2 in _pairs_by_level(_label_elements(pres, min(degree_bound, 2))):
        consider(e1, e2)
        examined += 1
    for t in range(trials):
        rng = trial_rng(seed, t)
        consider(random_element(pres, rng, degree_bound), random_element(pres, rng, degree_bound))
        examined += 1
    return PropertyReport(f"filtration-{mode}", trials, "fail" if count else "pass", violations,
                          count, examined, 0, {"equalities": equal, "degree_bound": degree_bound,
                                               "seed": seed})


def verify_filtration_witness(witness: dict, pres: AlgebraPresentation, mode: str) -> bool:
    a, b = pres.element(witness["a"]), pres.element(witness["b"])
    prod = a * b
    idx = filtration_index if mode == "componentwise" else leading_filtration_index
    bound = tuple(x + y for x, y in zip(idx(a), idx(b)))
    if mode == "componentwise":
        ok = all(x <= y for x, y in zip(idx(prod), bound))
    else:
        key = order_key(OrderRule.DEGLEX)
        ok = key(idx(prod)) <= key(bound)
    return prod == pres.element(witness["ab"]) and not ok

"""Acceptance suite: one test per criterion, each with its runtime budget.

The terminal summary (see conftest.py) prints one PASS/FAIL line per
criterion.
"""

import random
import time
from math import comb

import pytest

from crossprod.cli import OK, run
from crossprod.pbw import STRATEGIES, check_A1_freeness, normal_form, parse_word, pbw_basis, preset
from crossprod.properties import (
    SubalgebraSpec,
    check_graded_lemma_chain,
    check_scp,
    verify_witness,
)
from crossprod.semigroup import builtin_sample, check_ordered_like
from crossprod.stably_free import (
    Inconclusive,
    NonCyclicityCertificate,
    UnimodularRow,
    build_intersection_ideal,
    certificate_for,
    certify_noncyclic,
    certify_stably_free,
    cokernel_presentation,
    derivation_stability,
    find_cofactors,
    lift_ideal,
    sphere_column,
    verify_certificate,
)

from oracles import WEYL_LETTERS, action_of_text, f, x
from test_pbw import WEYL_CORPUS, random_word

CERT_CAP = 10
LIFT_EXTRA = 4


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def x2_row():
    W = preset("weyl")
    return W, find_cofactors(W.element("x^2"), W.element("1+x*d"), 2, W)


@pytest.mark.criterion(1, "Weyl normal-form corpus and confluence")
def test_weyl_normal_forms_and_confluence(capsys):
    W = preset("weyl")
    with Budget(5):
        assert len(WEYL_CORPUS) == 20
        for text, expected in WEYL_CORPUS:
            assert run(["nf", "--pres", "weyl", text]) == OK
            assert capsys.readouterr().out.strip() == expected, text
        mismatches = 0
        rng = random.Random(1)
        presets = [preset(n) for n in ("weyl", "heisenberg", "weyl-ext-heisenberg")]
        for t in range(1000):
            pres = presets[t % 3]
            word = parse_word(random_word(pres, rng, 5), pres)
            forms = [normal_form(word, pres, s) for s in STRATEGIES]
            mismatches += any(fm != forms[0] for fm in forms)
        assert mismatches == 0
    assert W.element("d*x") == W.element("x*d + 1")


@pytest.mark.criterion(2, "PBW dimension counts")
def test_pbw_dimension_counts():
    with Budget(5):
        W, H = preset("weyl"), preset("heisenberg")
        for d in range(11):
            assert len(pbw_basis(W, d)) == (d + 1) * (d + 2) // 2
            assert len(pbw_basis(H, d)) == comb(d + 3, 3)


@pytest.mark.criterion(3, "freeness over A1 up to degree 6")
def test_freeness_over_A1():
    with Budget(30):
        for name in ("weyl-ext-abelian", "heisenberg"):
            rep = check_A1_freeness(preset(name), 6)
            assert rep.passed, name
            assert [r["d"] for r in rep.rows] == list(range(7))


@pytest.mark.criterion(4, "unimodular row (x^2, 1 + x d)")
def test_unimodular_row():
    with Budget(5):
        W, row = x2_row()
        assert isinstance(row, UnimodularRow)
        text = f"x^2*({row.u}) + (1+x*d)*({row.v})".replace("g1", "d")
        assert action_of_text(text, ["x", "d"], WEYL_LETTERS, f(x)) == f(x)


@pytest.mark.criterion(5, "non-cyclicity certificate for x^2 A1 & (1 + x d) A1")
def test_noncyclic_certificate_for_x2_row():
    with Budget(300):
        W, row = x2_row()
        K = build_intersection_ideal(row, CERT_CAP)
        result = None
        for cap in range(1, CERT_CAP + 1):
            result = certify_noncyclic(K, degree_cap=cap, cofactor_bound=cap)
            if isinstance(result, NonCyclicityCertificate):
                break
        # This ideal equals y A1 with y = (1 + x d) x^2; see
        # test_stably_free.py::test_x2_row_intersection_is_principal.
        assert isinstance(result, NonCyclicityCertificate), (
            f"no certificate up to cap {CERT_CAP}: {result.reason}; K is principal, generated by "
            "(1 + x d) x^2"
        )
        assert verify_certificate(certificate_for(result)).ok


@pytest.mark.criterion(6, "lifted ideal keeps a non-cyclicity certificate")
def test_lifted_certificate_for_x2_row():
    with Budget(900):
        W, row = x2_row()
        K = build_intersection_ideal(row, CERT_CAP)
        failures = []
        for target in ("weyl-ext-abelian", "weyl-ext-heisenberg"):
            L = lift_ideal(K, preset(target))
            cap = CERT_CAP + LIFT_EXTRA
            result = certify_noncyclic(L, degree_cap=cap, cofactor_bound=cap)
            if not isinstance(result, NonCyclicityCertificate):
                failures.append(f"{target}: {result.reason}")
            else:
                assert verify_certificate(certificate_for(result)).ok
        assert not failures, "; ".join(failures) + " (the lift of a principal ideal stays principal)"


@pytest.mark.criterion(7, "negative control in Q[x]")
def test_commutative_negative_control():
    with Budget(10):
        P = preset("poly:1")
        row = find_cofactors(P.element("x"), P.element("x+1"), 2, P)
        K = build_intersection_ideal(row, 12)
        assert len(K.generators) == 1
        g = K.generators[0]
        target = P.element("x*(x+1)")
        ratios = {c / target.labels()[lab] for lab, c in g.labels().items()}
        assert set(g.labels()) == set(target.labels()) and len(ratios) == 1
        for cap in range(1, 13):
            assert isinstance(certify_noncyclic(K, degree_cap=cap, cofactor_bound=cap), Inconclusive)


@pytest.mark.criterion(8, "strongly completely prime suites")
def test_scp_suites():
    with Budget(60):
        for name in ("weyl-ext-abelian", "weyl-ext-heisenberg"):
            pres = preset(name)
            rep = check_scp(SubalgebraSpec("A1", pres), pres, trials=10_000, seed=0)
            assert rep.verdict == "pass" and rep.violation_count == 0, name
        for name, weights in (("weyl-ext-abelian", (0, 0, 1)), ("heisenberg", (0, 1, 1)), ("poly:2", (1, 1))):
            rep = check_graded_lemma_chain(preset(name), weights, trials=10_000, seed=0)
            assert rep.verdict == "pass" and rep.violation_count == 0, name
        P = preset("poly:1")
        ideal = SubalgebraSpec("ideal", P, elements=["x"])
        rep = check_scp(ideal, P, trials=1000, seed=0)
        assert rep.verdict == "fail"
        w = rep.violations[0]
        assert w["a_in"] and not w["b_in"] and verify_witness(w, ideal, P)


@pytest.mark.criterion(9, "ordered-like checker")
def test_ordered_like():
    with Budget(30):
        for spec in ("nat-plus:20", "natk-plus:2:3"):
            rep = check_ordered_like(builtin_sample(spec), 4, strict=True)
            assert rep.verdict == "pass" and rep.violations == 0, spec
        rep = check_ordered_like(builtin_sample("nat-max:5"), 4, strict=True)
        assert rep.verdict == "fail" and rep.witness == ((0, 1), (0, 1))


@pytest.mark.criterion(10, "sphere column and cokernel idempotent")
def test_sphere_instances():
    with Budget(10):
        for n in (3, 4, 5):
            inst = sphere_column(n)
            assert inst.verify()
            w = cokernel_presentation(inst)
            assert w.checks["E*E=E"] and w.verified
            assert w.trace == inst.pres.scalar(n - 1)


@pytest.mark.criterion(11, "derivation stability examples")
def test_derivation_stability():
    with Budget(5):
        base = preset("poly:1").base
        m = [base.parse("x")]
        unstable = derivation_stability(m, base.derivation(["1"]), 2, base)
        assert unstable.status == "unstable"
        assert unstable.witness == base.parse("x") and unstable.image == base.one
        assert derivation_stability(m, base.derivation(["x"]), 2, base).status == "stable"


def emitted_certificates():
    W, row = x2_row()
    alt = find_cofactors(W.element("x"), W.element("d+1"), 6, W)
    noncyclic = certify_noncyclic(build_intersection_ideal(alt, 8), degree_cap=8)
    lifted = certify_noncyclic(lift_ideal(build_intersection_ideal(alt, 8), preset("weyl-ext-heisenberg")),
                               degree_cap=8)
    return {
        "unimodular-row": certificate_for(row),
        "stably-free": certificate_for(certify_stably_free(row)),
        "noncyclic": certificate_for(noncyclic),
        "noncyclic-lifted": certificate_for(lifted),
        "sphere": certificate_for(sphere_column(3)),
    }


@pytest.mark.criterion(12, "certificate closed loop")
def test_certificate_closed_loop():
    for name, text in emitted_certificates().items():
        assert verify_certificate(text).ok, name
        for i, ch in enumerate(text):
            if not ch.isdigit():
                continue
            bad = text[:i] + str((int(ch) + 1) % 10) + text[i + 1:]
            assert not verify_certificate(bad).ok, (name, i)

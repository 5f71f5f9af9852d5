import pytest

from crossprod.pbw import load_presentation, preset
from crossprod.properties import (
    FILTRATION_MODES,
    SubalgebraSpec,
    check_completely_prime,
    check_filtration_multiplicative,
    check_graded_lemma_chain,
    check_scp,
    grading_problems,
    verify_filtration_witness,
    verify_witness,
)
from crossprod.sampling import trial_rng

GRADED = [
    ("weyl-ext-abelian", (0, 0, 1)),
    ("heisenberg", (0, 1, 1)),
    ("heisenberg", (1, 1, 2)),
    ("weyl-ext-heisenberg", (0, 0, 1, 1)),
    ("poly:2", (1, 1)),
]


# -- membership -----------------------------------------------------------------------


def test_A1_membership():
    pres = preset("weyl-ext-abelian")
    sub = SubalgebraSpec("A1", pres)
    assert sub.contains(pres.element("x^2*d + 1"))
    assert not sub.contains(pres.element("x*e"))
    assert sub.contains(pres.zero())


def test_degree_zero_membership():
    pres = preset("heisenberg")
    sub = SubalgebraSpec("degree-zero", pres, weights=(0, 1, 1))
    assert sub.contains(pres.element("g1^3 - 2"))
    assert not sub.contains(pres.element("g1 + g3"))


def test_user_span_membership():
    pres = preset("poly:1")
    sub = SubalgebraSpec("user", pres, elements=["x^2"], degree_bound=6)
    assert sub.contains(pres.element("x^4 - 3"))
    assert sub.contains(pres.element("x^3")) is False
    assert sub.contains(pres.element("x^8")) is None


def test_ideal_membership():
    pres = preset("poly:2")
    sub = SubalgebraSpec("ideal", pres, elements=["x"])
    assert sub.contains(pres.element("x*y + x^2"))
    assert sub.contains(pres.element("y")) is False
    non_exact = SubalgebraSpec("ideal", preset("weyl"), elements=["x"])
    assert non_exact.contains(preset("weyl").one()) is None


@pytest.mark.parametrize("kind,kw", [
    ("other", {}), ("user", {}), ("degree-zero", {"weights": (1,)}), ("degree-zero", {"weights": (-1, 1, 1)}),
])
def test_bad_subalgebra_specs(kind, kw):
    with pytest.raises(ValueError):
        SubalgebraSpec(kind, preset("heisenberg") if kind == "degree-zero" else preset("weyl"), **kw)


@pytest.mark.parametrize("kind,kw", [
    ("A1", {}), ("degree-zero", {"weights": (0, 0, 1)}), ("user", {"elements": ["x*d", "x"]}),
])
def test_samples_are_members(kind, kw):
    pres = preset("weyl-ext-abelian")
    sub = SubalgebraSpec(kind, pres, **kw)
    for t in range(100):
        e = sub.sample(trial_rng(3, t), 3)
        assert e and sub.contains(e)


# -- primality testers ---------------------------------------------------------------------


@pytest.mark.parametrize("name", ["weyl-ext-abelian", "weyl-ext-heisenberg", "heisenberg"])
def test_A1_is_scp(name):
    pres = preset(name)
    rep = check_scp(SubalgebraSpec("A1", pres), pres, trials=1500, seed=1)
    assert rep.passed and rep.violation_count == 0 and rep.examined > 1500


def test_two_sided_ideal_is_not_scp():
    pres = preset("poly:1")
    sub = SubalgebraSpec("ideal", pres, elements=["x"])
    rep = check_scp(sub, pres, trials=200)
    assert rep.verdict == "fail"
    w = rep.violations[0]
    assert (w["a"], w["b"]) == ("x", "1")
    assert verify_witness(w, sub, pres)
    # (x) is prime, so only the strong property fails
    assert check_completely_prime(sub, pres, trials=200).passed


def test_even_span_is_not_completely_prime():
    pres = preset("poly:1")
    sub = SubalgebraSpec("user", pres, elements=["x^2"], degree_bound=6)
    rep = check_completely_prime(sub, pres, trials=300)
    assert rep.verdict == "fail"
    assert (rep.violations[0]["a"], rep.violations[0]["b"]) == ("x", "x")
    assert all(verify_witness(w, sub, pres) for w in rep.violations)


def test_tampered_witness_rejected():
    pres = preset("poly:1")
    sub = SubalgebraSpec("ideal", pres, elements=["x"])
    w = dict(check_scp(sub, pres, trials=50).violations[0], b="x")
    assert not verify_witness(w, sub, pres)


@pytest.mark.parametrize("kind,kw", [("A1", {}), ("user", {"elements": ["x^2", "d"]})])
def test_scp_implies_completely_prime(kind, kw):
    pres = preset("weyl-ext-abelian")
    sub = SubalgebraSpec(kind, pres, **kw)
    scp = check_scp(sub, pres, trials=300)
    cp = check_completely_prime(sub, pres, trials=300)
    assert cp.violation_count <= scp.violation_count
    if scp.passed:
        assert cp.passed


def test_reports_are_deterministic():
    pres = preset("weyl-ext-heisenberg")
    sub = SubalgebraSpec("A1", pres)
    r1 = check_scp(sub, pres, trials=200, seed=5)
    r2 = check_scp(sub, pres, trials=200, seed=5)
    assert r1.as_dict() == r2.as_dict()


# -- graded chain --------------------------------------------------------------------------


@pytest.mark.parametrize("name,weights", GRADED)
def test_graded_chain_passes(name, weights):
    rep = check_graded_lemma_chain(preset(name), weights, trials=500)
    assert rep.passed
    assert rep.detail["chain_consistent"]


def test_graded_chain_refuses_nonhomogeneous_weights():
    rep = check_graded_lemma_chain(preset("weyl"), (1, 1), trials=10)
    assert rep.verdict == "inconclusive"
    assert any("not homogeneous" in p for p in rep.detail["refused"])


def test_graded_chain_refuses_zero_divisors():
    text = '[base]\nvariables = ["x"]\nrelation = "x^2"\n'
    pres = load_presentation(text)
    assert any("zero divisors" in p for p in grading_problems(pres, (1,)))
    assert check_graded_lemma_chain(pres, (1,), trials=10).verdict == "inconclusive"


# -- filtration --------------------------------------------------------------------------------


def test_componentwise_filtration_fails_on_heisenberg():
    pres = preset("heisenberg")
    rep = check_filtration_multiplicative(pres, trials=500, mode="componentwise")
    assert rep.verdict == "fail"
    w = rep.violations[0]
    assert (w["a"], w["b"]) == ("g2", "g1")
    assert verify_filtration_witness(w, pres, "componentwise")


@pytest.mark.parametrize("name", ["heisenberg", "weyl-ext-abelian", "weyl-ext-heisenberg"])
def test_deglex_filtration_multiplicative(name):
    rep = check_filtration_multiplicative(preset(name), trials=800, mode="deglex")
    assert rep.passed and rep.detail["equalities"] > 0


def test_abelian_extension_componentwise_passes():
    assert check_filtration_multiplicative(preset("weyl-ext-abelian"), trials=500).passed


def test_filtration_mode_validated():
    assert FILTRATION_MODES == ("componentwise", "deglex")
    with pytest.raises(ValueError):
        check_filtration_multiplicative(preset("heisenberg"), trials=1, mode="lex")

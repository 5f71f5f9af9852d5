"""Command-line front end.

Exit codes: 0 pass / solved / certificate emitted, 1 property violated or
certificate rejected, 2 input error, 3 inconclusive at the given bounds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import _parse
from .pbw import (
    STRATEGIES,
    PresentationError,
    check_A1_freeness,
    consistency_check,
    load_presentation,
    normal_form,
    parse_word,
    preset,
    total_degree,
    type_of,
)
from .properties import (
    FILTRATION_MODES,
    SubalgebraSpec,
    check_completely_prime,
    check_filtration_multiplicative,
    check_scp,
)
from .semigroup import OrderRule, builtin_sample, check_ordered_like, load_table
from .stably_free import (
    DEFAULT_COFACTOR_BOUND,
    DEFAULT_DEGREE_CAP,
    Inconclusive,
    PreconditionError,
    build_intersection_ideal,
    certificate_for,
    certify_noncyclic,
    certify_stably_free,
    derivation_stability,
    find_cofactors,
    lift_consistency,
    lift_ideal,
    sphere_column,
    verify_certificate,
)

OK, VIOLATED, INPUT_ERROR, INCONCLUSIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _positive(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("bounds must be nonnegative")
    return v


def load_pres(spec: str, check: bool = True):
    """A file path, or a preset name when no such file exists."""
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            pres = load_presentation(fh.read(), name=os.path.basename(spec))
        if check:
            rep = consistency_check(pres, trials=20, seed=0)
            if not rep.passed:
                raise InputError(f"inconsistent presentation: {rep.detail}; witness {rep.witness}")
        return pres
    try:
        return preset(spec)
    except PresentationError:
        raise InputError(f"no presentation file or preset named {spec!r}") from None


def _emit(args, payload: dict, text_lines):
    if args.machine:
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        for line in text_lines:
            print(line)


def _order(args):
    return OrderRule.parse(args.order)


# -- subcommands ---------------------------------------------------------------


def cmd_nf(args):
    pres = load_pres(args.pres)
    if args.strategy == "multiply":
        e = pres.element(args.expr)
    else:
        e = normal_form(parse_word(args.expr, pres), pres, args.strategy)
    text = e.to_str(_order(args))
    _emit(args, {"normal_form": text}, [text])
    return OK


def cmd_mul(args):
    pres = load_pres(args.pres)
    e = pres.one()
    for x in args.exprs:
        e = e * pres.element(x)
    text = e.to_str(_order(args))
    _emit(args, {"product": text}, [text])
    return OK


def cmd_type(args):
    pres = load_pres(args.pres)
    e = pres.element(args.expr)
    if e.is_zero():
        raise InputError("the zero element has no type")
    t = type_of(e, _order(args))
    deg = total_degree(e)
    _emit(args, {"type": list(t), "total_degree": deg},
          [f"type {t}", f"total degree {deg}"])
    return OK


def cmd_check_consistency(args):
    pres = load_pres(args.pres, check=False)
    rep = consistency_check(pres, args.trials, args.seed)
    lines = ["PASS" if rep.passed else f"FAIL: {rep.detail}"]
    if rep.witness:
        lines.append(f"witness {rep.witness}")
    _emit(args, {"passed": rep.passed, "checked": rep.checked, "witness": rep.witness,
                 "detail": rep.detail}, lines)
    return OK if rep.passed else VIOLATED


def _subalgebra(args, pres):
    weights = [int(w) for w in args.weights.split(",")] if args.weights else None
    return SubalgebraSpec(args.sub, pres, elements=args.elements or (), weights=weights,
                          degree_bound=args.degree_cap)


def _report_out(args, rep):
    lines = [f"{rep.name}: {rep.verdict.upper()} ({rep.violation_count} violations, "
             f"{rep.examined} pairs examined, {rep.unknown} undecided)"]
    for w in rep.violations:
        lines.append(f"witness a={w['a']} b={w['b']} ab={w['ab']}")
    _emit(args, rep.as_dict(), lines)
    return {"pass": OK, "fail": VIOLATED}.get(rep.verdict, INCONCLUSIVE)


def cmd_check_scp(args):
    pres = load_pres(args.pres)
    rep = check_scp(_subalgebra(args, pres), pres, args.trials, args.seed, args.bound)
    return _report_out(args, rep)


def cmd_check_prime(args):
    pres = load_pres(args.pres)
    rep = check_completely_prime(_subalgebra(args, pres), pres, args.trials, args.seed, args.bound)
    return _report_out(args, rep)


def cmd_check_ordered_like(args):
    if args.table:
        with open(args.table, encoding="utf-8") as fh:
            sample = load_table(fh.read(), name=args.table)
    else:
        try:
            sample = builtin_sample(args.sample)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    strict = not args.non_strict
    rep = check_ordered_like(sample, args.subset_size, strict)
    lines = [f"{sample.name}: {rep.verdict.upper()} ({'strict' if strict else 'non-strict'}, "
             f"subsets of size <= {args.subset_size}, {rep.pairs_checked} pairs)"]
    if rep.invertibles:
        lines.append(f"nonzero invertible elements: {rep.invertibles}")
    if rep.witness:
        s1, s2 = rep.witness
        lines.append(f"counterexample S1={{{', '.join(map(str, s1))}}} S2={{{', '.join(map(str, s2))}}}")
    payload = {"sample": sample.name, "verdict": rep.verdict, "strict": strict,
               "pairs_checked": rep.pairs_checked, "violations": rep.violations,
               "inconclusive_pairs": rep.inconclusive_pairs,
               "invertibles": [str(x) for x in rep.invertibles],
               "witness": [list(map(str, s)) for s in rep.witness] if rep.witness else None}
    _emit(args, payload, lines)
    return {"pass": OK, "fail": VIOLATED}.get(rep.verdict, INCONCLUSIVE)


def cmd_check_freeness(args):
    pres = load_pres(args.pres)
    try:
        rep = check_A1_freeness(pres, args.degree_cap)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    lines = [f"d={r['d']}: dim B={r['dim_B']} predicted={r['predicted']} rank={r['rank']}"
             for r in rep.rows]
    lines.append("PASS" if rep.passed else "FAIL")
    _emit(args, {"passed": rep.passed, "rows": rep.rows}, lines)
    return OK if rep.passed else VIOLATED


def cmd_check_filtration(args):
    pres = load_pres(args.pres)
    rep = check_filtration_multiplicative(pres, args.trials, args.seed, args.bound, args.mode)
    return _report_out(args, rep)


def _row(args, pres):
    a, b = pres.element(args.a), pres.element(args.b)
    if a.is_zero() or b.is_zero():
        raise InputError("row entries must be nonzero")
    return find_cofactors(a, b, args.cofactor_bound, pres)


def cmd_unimodular(args):
    pres = load_pres(args.pres)
    row = _row(args, pres)
    if isinstance(row, Inconclusive):
        _emit(args, {"status": "inconclusive", "reason": row.reason}, [f"INCONCLUSIVE: {row.reason}"])
        return INCONCLUSIVE
    if args.machine:
        sys.stdout.write(certificate_for(row))
    else:
        print(f"u = {row.u}")
        print(f"v = {row.v}")
        print("VERIFIED")
    return OK


def cmd_ideal(args):
    pres = load_pres(args.pres)
    row = _row(args, pres)
    if isinstance(row, Inconclusive):
        _emit(args, {"status": "inconclusive", "reason": row.reason}, [f"INCONCLUSIVE: {row.reason}"])
        return INCONCLUSIVE
    K = build_intersection_ideal(row, args.degree_cap, pres)
    if isinstance(K, Inconclusive):
        _emit(args, {"status": "inconclusive", "reason": K.reason}, [f"INCONCLUSIVE: {K.reason}"])
        return INCONCLUSIVE
    w = certify_stably_free(row)
    if args.machine:
        sys.stdout.write(certificate_for(w, pres))
    else:
        print(f"row ({row.a}, {row.b}) with cofactors ({row.u}, {row.v})")
        print(f"K generators up to degree {args.degree_cap}:")
        for g in K.generators:
            print(f"  {g}")
        print("splitting E = I - (u, v)^T (a, b):")
        for r in w.E:
            print("  [" + ", ".join(map(str, r)) + "]")
        print("VERIFIED" if w.verified else "FAILED")
    return OK


def _certify(args, K, pres):
    try:
        res = certify_noncyclic(K, args.degree_cap, args.cofactor_bound, pres)
    except PreconditionError as exc:
        raise InputError(str(exc)) from None
    if isinstance(res, Inconclusive):
        _emit(args, {"status": "inconclusive", "reason": res.reason},
              [f"INCONCLUSIVE: {res.reason}"])
        return INCONCLUSIVE
    if args.machine:
        sys.stdout.write(certificate_for(res))
    else:
        print(f"d0 = {res.d0}")
        print(f"d_witness = {res.d_witness}: dim K = {res.dim_K}, dim B_<=(d-d0) = {res.dim_B}")
        print("NOT PRINCIPAL (certificate emitted)")
    return OK


def _ideal_from_args(args, pres):
    row = _row(args, pres)
    if isinstance(row, Inconclusive):
        return row
    K = build_intersection_ideal(row, args.degree_cap, pres)
    return K


def cmd_certify_noncyclic(args):
    pres = load_pres(args.pres)
    K = _ideal_from_args(args, pres)
    if isinstance(K, Inconclusive):
        _emit(args, {"status": "inconclusive", "reason": K.reason}, [f"INCONCLUSIVE: {K.reason}"])
        return INCONCLUSIVE
    return _certify(args, K, pres)


def cmd_lift(args):
    pres = load_pres(args.pres)
    target = load_pres(args.into)
    K = _ideal_from_args(args, pres)
    if isinstance(K, Inconclusive):
        _emit(args, {"status": "inconclusive", "reason": K.reason}, [f"INCONCLUSIVE: {K.reason}"])
        return INCONCLUSIVE
    try:
        L = lift_ideal(K, target)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not args.machine:
        rep = lift_consistency(K, L, min(args.degree_cap, 7))
        print(f"flatness dimension prediction up to degree {rep.cap}: "
              f"{'matches' if rep.flat_ok else 'MISMATCH'}")
        print(f"contraction KB & A1 = K up to degree {rep.cap}: "
              f"{'matches' if rep.contraction_ok else 'MISMATCH'}")
    return _certify(args, L, target)


def cmd_stafford(args):
    pres = load_pres(args.pres)
    if pres.n:
        raise InputError("stafford needs a commutative presentation (no generators)")
    base = pres.base
    gens = [base.parse(g) for g in args.ideal]
    if len(args.delta) != base.nvars:
        raise InputError(f"need {base.nvars} derivation images, got {len(args.delta)}")
    d = base.derivation(args.delta)
    rep = derivation_stability(gens, d, args.cofactor_bound, base)
    lines = [rep.status.upper() + f" (membership bound {rep.bound})"]
    if rep.witness is not None:
        lines.append(f"witness m = {base.format(rep.witness)}, delta(m) = {base.format(rep.image)}")
    _emit(args, {"status": rep.status, "bound": rep.bound,
                 "witness": base.format(rep.witness) if rep.witness is not None else None,
                 "image": base.format(rep.image) if rep.image is not None else None}, lines)
    return {"stable": OK, "unstable": VIOLATED}.get(rep.status, INCONCLUSIVE)


def cmd_sphere(args):
    try:
        inst = sphere_column(args.n)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.machine:
        sys.stdout.write(certificate_for(inst))
        return OK
    from .stably_free import cokernel_presentation

    w = cokernel_presentation(inst)
    print(f"column ({', '.join(map(str, inst.column))}), sum of squares = 1 VERIFIED")
    print("E = I - column * row:")
    for r in w.E:
        print("  [" + ", ".join(map(str, r)) + "]")
    for name, ok in w.checks.items():
        print(f"{name}: {'ok' if ok else 'FAILED'}")
    print(f"trace E = {w.trace}")
    return OK if w.verified else VIOLATED


def cmd_verify(args):
    if args.file == "-":
        text = sys.stdin.read()
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    rep = verify_certificate(text)
    lines = [f"{name}: {'ok' if ok else 'FAILED'}" for name, ok in rep.checks.items()]
    if rep.error:
        lines.append(f"error: {rep.error}")
    lines.append("ACCEPTED" if rep.ok else "REJECTED")
    _emit(args, {"ok": rep.ok, "kind": rep.kind, "checks": rep.checks, "error": rep.error}, lines)
    return OK if rep.ok else VIOLATED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", help="JSON output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive, default=1000)
    common.add_argument("--degree-cap", type=_positive, default=DEFAULT_DEGREE_CAP)
    common.add_argument("--cofactor-bound", type=_positive, default=DEFAULT_COFACTOR_BOUND)
    common.add_argument("--order", choices=["deglex", "paper"], default="deglex")

    pres_arg = argparse.ArgumentParser(add_help=False)
    pres_arg.add_argument("--pres", required=True, help="presentation file or preset name")

    p = argparse.ArgumentParser(prog="crossprod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *parents, help=None):
        sp = sub.add_parser(name, parents=[common, *parents], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("nf", cmd_nf, pres_arg, help="normal form of an expression")
    sp.add_argument("expr")
    sp.add_argument("--strategy", choices=STRATEGIES, default="multiply")
    sp = add("mul", cmd_mul, pres_arg, help="product of expressions, left to right")
    sp.add_argument("exprs", nargs="+")
    sp = add("type", cmd_type, pres_arg, help="type and total degree of an element")
    sp.add_argument("expr")
    add("check-consistency", cmd_check_consistency, pres_arg,
        help="Jacobi and associativity checks")

    for name, func in (("check-scp", cmd_check_scp), ("check-prime", cmd_check_prime)):
        sp = add(name, func, pres_arg)
        sp.add_argument("--sub", choices=SubalgebraSpec.KINDS, default="A1")
        sp.add_argument("--elements", nargs="*", help="generators for user or ideal kinds")
        sp.add_argument("--weights", help="comma separated weights for degree-zero")
        sp.add_argument("--bound", type=_positive, default=3, help="sampling degree bound")

    sp = add("check-ordered-like", cmd_check_ordered_like)
    sp.add_argument("sample", nargs="?", default="nat-plus:20")
    sp.add_argument("--table", help="semigroup table file instead of a built-in sample")
    sp.add_argument("--subset-size", type=_positive, default=4)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--strict", action="store_true", help="require c != 0 (default)")
    mode.add_argument("--non-strict", action="store_true")

    add("check-freeness", cmd_check_freeness, pres_arg)
    sp = add("check-filtration", cmd_check_filtration, pres_arg)
    sp.add_argument("--mode", choices=FILTRATION_MODES, default="componentwise")
    sp.add_argument("--bound", type=_positive, default=3)

    for name, func in (("unimodular", cmd_unimodular), ("ideal", cmd_ideal),
                       ("certify-noncyclic", cmd_certify_noncyclic), ("lift", cmd_lift)):
        sp = add(name, func, pres_arg)
        sp.add_argument("a")
        sp.add_argument("b")
        if name == "lift":
            sp.add_argument("--into", required=True, help="target presentation or preset")

    sp = add("stafford", cmd_stafford, pres_arg)
    sp.add_argument("--ideal", nargs="+", required=True)
    sp.add_argument("--delta", nargs="+", required=True, help="image of each base variable")
    sp = add("sphere", cmd_sphere)
    sp.add_argument("n", type=int)
    sp = add("verify", cmd_verify)
    sp.add_argument("file", help="certificate file, or - for stdin")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except _parse.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (InputError, PresentationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return INPUT_ERROR


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

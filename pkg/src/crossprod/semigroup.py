"""Exponent tuples, term orders and the ordered-like semigroup checker.

Exponent tuples are plain Python tuples of nonnegative ints.  Two orders are
shipped: standard degree-lexicographic, and a trimmed-length order (selected
as ``paper-literal``) that compares the length of the tuple after dropping
trailing zeros before falling back to lexicographic comparison.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Optional, Sequence, Union

import numpy as np

LESS, EQUAL, GREATER = -1, 0, 1


class OrderRule(enum.Enum):
    DEGLEX = "deglex"
    TRIMMED = "paper-literal"

    @classmethod
    def parse(cls, text: Union[str, "OrderRule"]) -> "OrderRule":
        if isinstance(text, OrderRule):
            return text
        aliases = {"deglex": cls.DEGLEX, "paper": cls.TRIMMED, "paper-literal": cls.TRIMMED,
                   "trimmed": cls.TRIMMED}
        try:
            return aliases[text]
        except KeyError:
            raise ValueError(f"unknown order rule {text!r} (use deglex or paper-literal)") from None


def add(a: tuple, b: tuple) -> tuple:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def trimmed_length(a: Sequence[int]) -> int:
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return n


def deglex_key(a):
    return (sum(a), tuple(a))


def trimmed_key(a):
    return (trimmed_length(a), tuple(a))


def order_key(rule: OrderRule) -> Callable:
    return deglex_key if OrderRule.parse(rule) is OrderRule.DEGLEX else trimmed_key


def compare(a: tuple, b: tuple, rule: OrderRule = OrderRule.DEGLEX) -> int:
    """Return LESS, EQUAL or GREATER."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    key = order_key(rule)
    ka, kb = key(a), key(b)
    return (ka > kb) - (ka < kb)


Comparator = Callable[[tuple, tuple], int]


def _as_comparator(rule) -> Comparator:
    if callable(rule) and not isinstance(rule, OrderRule):
        return rule
    r = OrderRule.parse(rule)
    return lambda a, b: compare(a, b, r)


@dataclass
class CompatibilityReport:
    passed: bool
    trials: int
    witness: Optional[dict] = None


def well_order_compatibility_check(
    rule, length: int, trials: int, seed: int, max_entry: int = 4
) -> CompatibilityReport:
    """Randomized check that the comparator is total, antisymmetric and translation invariant.

    Entries are drawn from ``0..max_entry`` with extra weight on zero so that
    trailing-zero cases are exercised.
    """
    cmp = _as_comparator(rule)
    rng = random.Random(seed)

    def draw():
        return tuple(0 if rng.random() < 0.35 else rng.randint(0, max_entry) for _ in range(length))

    for t in range(trials):
        a, b, c = draw(), draw(), draw()
        ab, ba = cmp(a, b), cmp(b, a)
        if ab not in (LESS, EQUAL, GREATER) or ab != -ba or (ab == EQUAL) != (a == b):
            return CompatibilityReport(False, t + 1, {"kind": "totality", "a": a, "b": b})
        shifted = cmp(add(a, c), add(b, c))
        if shifted != ab:
            return CompatibilityReport(
                False, t + 1, {"kind": "translation", "a": a, "b": b, "c": c,
                               "before": ab, "after": shifted}
            )
    return CompatibilityReport(True, trials)


@dataclass
class FiniteSemigroupSample:
    """A finite pool of semigroup elements with a rule for the operation.

    ``op`` returns ``None`` when the result falls outside the truncation the
    caller can vouch for (only table-loaded samples do this).
    """

    name: str
    elements: tuple
    op: Callable[[Hashable, Hashable], Optional[Hashable]]
    zero: Hashable
    commutative: bool = True

    def validate(self) -> list[str]:
        problems = []
        pool = set(self.elements)
        if self.zero not in pool:
            problems.append(f"zero {self.zero!r} not in sample")
        for a in self.elements:
            if self.op(self.zero, a) not in (a, None) or self.op(a, self.zero) not in (a, None):
                problems.append(f"zero is not neutral for {a!r}")
        for a, b in itertools.product(self.elements, repeat=2):
            ab, ba = self.op(a, b), self.op(b, a)
            if self.commutative and ab is not None and ba is not None and ab != ba:
                problems.append(f"not commutative on {a!r}, {b!r}")
        for a, b, c in itertools.product(self.elements, repeat=3):
            ab, bc = self.op(a, b), self.op(b, c)
            if ab in pool and bc in pool:
                left, right = self.op(ab, c), self.op(a, bc)
                if left is not None and right is not None and left != right:
                    problems.append(f"not associative on {a!r}, {b!r}, {c!r}")
        return problems

    def invertible_elements(self) -> list:
        out = []
        for a in self.elements:
            if a == self.zero:
                continue
            if any(self.op(a, b) == self.zero for b in self.elements):
                out.append(a)
        return out


def _nat_plus(bound):
    return FiniteSemigroupSample(f"nat-plus:{bound}", tuple(range(bound + 1)),
                                 lambda a, b: a + b, 0)


def _nat_max(bound):
    return FiniteSemigroupSample(f"nat-max:{bound}", tuple(range(bound + 1)),
                                 lambda a, b: max(a, b), 0)


def _natk_plus(k, bound):
    elems = tuple(itertools.product(range(bound + 1), repeat=k))
    return FiniteSemigroupSample(f"natk-plus:{k}:{bound}", elems,
                                 lambda a, b: tuple(x + y for x, y in zip(a, b)), (0,) * k)


def builtin_sample(spec: str) -> FiniteSemigroupSample:
    """Construct ``nat-plus:<bound>``, ``nat-max:<bound>`` or ``natk-plus:<k>:<bound>``."""
    parts = spec.split(":")
    try:
        if parts[0] == "nat-plus" and len(parts) == 2:
            return _nat_plus(int(parts[1]))
        if parts[0] == "nat-max" and len(parts) == 2:
            return _nat_max(int(parts[1]))
        if parts[0] == "natk-plus" and len(parts) == 3:
            return _natk_plus(int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise ValueError(f"unknown semigroup sample {spec!r}")


def load_table(text: str, name: str = "table") -> FiniteSemigroupSample:
    """Parse a whitespace table: header of elements, then ``elem: r1 r2 ...`` rows.

    A ``-`` entry marks a product outside the truncation.  The neutral
    element is located from the table itself.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty semigroup table")
    header = lines[0].split()
    table = {}
    for ln in lines[1:]:
        label, sep, rest = ln.partition(":")
        if not sep:
            raise ValueError(f"row needs 'element:' prefix: {ln!r}")
        label = label.strip()
        cells = rest.split()
        if label not in header or len(cells) != len(header):
            raise ValueError(f"bad row for {label!r}")
        for b, cell in zip(header, cells):
            table[(label, b)] = None if cell == "-" else cell
    if len(table) != len(header) ** 2:
        raise ValueError("table must have one row per element")
    zeros = [z for z in header if all(table[(z, b)] == b and table[(b, z)] == b for b in header)]
    if not zeros:
        raise ValueError("table has no neutral element")
    commutative = all(table[(a, b)] == table[(b, a)] for a in header for b in header)
    return FiniteSemigroupSample(name, tuple(header), lambda a, b: table[(a, b)], zeros[0],
                                 commutative)


def nu_count(S1, S2, c, sample: FiniteSemigroupSample) -> int:
    """Number of ordered pairs (a, b) in S1 x S2 with a + b = c."""
    return sum(1 for a in S1 for b in S2 if sample.op(a, b) == c)


@dataclass
class OrderedLikeReport:
    verdict: str  # pass | fail | inconclusive
    strict: bool
    subset_size_bound: int
    pairs_checked: int
    violations: int = 0
    inconclusive_pairs: int = 0
    invertibles: list = field(default_factory=list)
    witness: Optional[tuple] = None
    problems: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "pass"


def _subsets(n, k):
    out = []
    for size in range(1, k + 1):
        out.extend(itertools.combinations(range(n), size))
    return out


def check_ordered_like(
    sample: FiniteSemigroupSample, subset_size_bound: int, strict: bool = True
) -> OrderedLikeReport:
    """Exhaustively test the ordered-like property on all subsets up to a size.

    For every pair (S1, S2) with S1 + S2 not equal to {0} some c in the sumset
    must have exactly one decomposition; ``strict`` additionally demands c != 0.
    Pairs with S1 == S2 are examined first, so a sumset witness S + S is
    reported in preference to an asymmetric one.
    """
    problems = sample.validate()
    invertibles = sample.invertible_elements()
    pool = list(sample.elements)
    n = len(pool)
    subsets = _subsets(n, subset_size_bound)
    m = len(subsets)

    results = {}
    universe: list = []
    for a in pool:
        for b in pool:
            r = sample.op(a, b)
            if r is not None and r not in results:
                results[r] = len(universe)
                universe.append(r)
    undefined_col = len(universe)
    zero_col = results.get(sample.zero)

    membership = np.zeros((m, n), dtype=np.int16)
    for i, s in enumerate(subsets):
        membership[i, list(s)] = 1
    # contrib[a] : for every S2, how often a + b lands on each result
    contrib = []
    for a in pool:
        scatter = np.zeros((n, undefined_col + 1), dtype=np.int16)
        for jb, b in enumerate(pool):
            r = sample.op(a, b)
            scatter[jb, undefined_col if r is None else results[r]] = 1
        contrib.append(membership @ scatter)

    nonzero_mask = np.ones(undefined_col, dtype=bool)
    if zero_col is not None:
        nonzero_mask[zero_col] = False
    unique_mask = nonzero_mask if strict else np.ones(undefined_col, dtype=bool)

    violations = 0
    inconclusive = 0
    diag_witness = None
    first_witness = None
    for i, s1 in enumerate(subsets):
        counts = contrib[s1[0]].copy()
        for a in s1[1:]:
            counts += contrib[a]
        undefined = counts[:, undefined_col] > 0
        defined = counts[:, :undefined_col]
        nontrivial = (defined[:, nonzero_mask] > 0).any(axis=1)
        has_unique = (defined[:, unique_mask] == 1).any(axis=1)
        bad = nontrivial & ~has_unique & ~undefined
        inconclusive += int((undefined & nontrivial).sum())
        nbad = int(bad.sum())
        if nbad:
            violations += nbad
            if diag_witness is None and bad[i]:
                diag_witness = (i, i)
            if first_witness is None:
                first_witness = (i, int(np.argmax(bad)))

    chosen = diag_witness or first_witness
    witness = None
    if chosen is not None:
        witness = (tuple(pool[k] for k in subsets[chosen[0]]),
                   tuple(pool[k] for k in subsets[chosen[1]]))
    if invertibles or violations:
        verdict = "fail"
    elif inconclusive or problems:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return OrderedLikeReport(verdict, strict, subset_size_bound, m * m, violations, inconclusive,
                             invertibles, witness, problems)

"""Fork enumeration, convergence checking, and bounded completion.

Forks are the critical overlaps of the rewriting graph: (C1)/(C2) between
algebra rules, (CM1)-(CM3) where module rules are involved.  Enumeration is
bounded: every mode index of an overlap instance lies in [-window, window]
and wildcard tails run over letters with modes in [-window, -1] up to a
length cap.  Convergence of a fork means both one-step reducts share the
same terminal form; completion orients each divergence difference by the
word order into a new concrete rule and repeats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import FuelExhausted, UnorientableDifference, UnorientableRelation
from .presentations import orient_relation
from .rewrite import reduce
from .rules import DynamicLocalityRule, RuleSystem, SchematicRule
from .terms import Letter, LinComb, Word, is_t


@dataclass
class Fork:
    kind: str                 # C1 | C2 | CM1 | CM2 | CM3
    h: Word
    rule1: str
    pos1: int
    rule2: str
    pos2: int
    h1: LinComb
    h2: LinComb

    def __repr__(self):
        return "Fork(%s at %r via %s@%d / %s@%d)" % (
            self.kind, self.h, self.rule1, self.pos1, self.rule2, self.pos2)


@dataclass
class CheckResult:
    converges: bool
    common: Optional[LinComb] = None
    difference: Optional[LinComb] = None


@dataclass
class _AlgInstance:
    rule_name: str
    lhs: Tuple[Letter, ...]
    repl: List[Tuple[object, Tuple[Letter, ...]]]


@dataclass
class _ModOccurrence:
    rule_name: str
    letters: Tuple[Letter, ...]        # pattern + tail
    repl: List[Tuple[object, Tuple[Letter, ...]]]
    pattern_len: int


def _enumerate_schematic_instances(rule: SchematicRule, window: int):
    """All substitutions keeping every lhs mode inside the window."""
    hi, lo = window, -window
    bounds: Dict[str, Tuple[int, int]] = {}
    for p in rule.lhs:
        if is_t(p):
            continue
        _, expr = p
        if expr.is_constant():
            if not (lo <= expr.const <= hi):
                return
            continue
        if len(expr.coeffs) != 1:
            raise ValueError("multi-variable lhs pattern in %s" % rule.name)
        (v, a), = expr.coeffs.items()
        c = expr.const
        if a > 0:
            vlo = _ceil_div(lo - c, a)
            vhi = _floor_div(hi - c, a)
        else:
            vlo = _ceil_div(hi - c, a)
            vhi = _floor_div(lo - c, a)
        cur = bounds.get(v)
        if cur is None:
            bounds[v] = (vlo, vhi)
        else:
            bounds[v] = (max(cur[0], vlo), min(cur[1], vhi))
    vars_ = sorted(bounds)
    ranges = [range(bounds[v][0], bounds[v][1] + 1) for v in vars_]
    for combo in product(*ranges):
        subst = dict(zip(vars_, combo))
        ok = True
        for g in rule.guards:
            if not g.holds(subst):
                ok = False
                break
        if not ok:
            continue
        lhs = rule.lhs_letters(subst)
        if any(not is_t(l) and not (lo <= l[1] <= hi) for l in lhs):
            continue
        yield subst, lhs


def _ceil_div(a, b):
    return -((-a) // b)


def _floor_div(a, b):
    return a // b


def _tail_words(sys: RuleSystem, window: int, max_tail: int, alphabet=None):
    letters = []
    for g in sys.order.generators:
        for n in range(-window, 0):
            l = (g.name, n)
            if alphabet is not None and l not in alphabet:
                continue
            letters.append(l)
    tails = [()]
    for length in range(1, max_tail + 1):
        tails.extend(product(letters, repeat=length))
    return tails


def _collect_instances(sys: RuleSystem, window: int, max_tail: int):
    alg: List[_AlgInstance] = []
    mod: List[_ModOccurrence] = []
    for rule in sys.rules:
        if isinstance(rule, DynamicLocalityRule):
            for lhs, repl in rule.concrete_instances(window, sys.order):
                alg.append(_AlgInstance(rule.name, lhs, [(c, p) for c, p in repl]))
            continue
        if rule.kind == "algebra":
            for subst, lhs in _enumerate_schematic_instances(rule, window):
                repl = [(c, ls) for c, ls in rule.instantiate_rhs(subst)]
                alg.append(_AlgInstance(rule.name, lhs, repl))
            continue
        # module rule
        tails = [()]
        if rule.tail:
            tails = _tail_words(sys, window, max_tail, rule.tail_alphabet)
        for subst, lhs in _enumerate_schematic_instances(rule, window):
            for tail in tails:
                repl = [(c, ls) for c, ls in rule.instantiate_rhs(subst, tuple(tail))]
                mod.append(_ModOccurrence(rule.name, lhs + tuple(tail), repl,
                                          len(lhs)))
    return alg, mod


def enumerate_forks(sys: RuleSystem, window: int = 6, max_tail: int = 2,
                    only_involving=None) -> List[Fork]:
    """All bounded overlap forks; with ``only_involving`` (a set of rule
    names) restricted to forks touching at least one of those rules."""
    if window < 1:
        raise ValueError("window must be >= 1")
    alg, mod = _collect_instances(sys, window, max_tail)
    forks: List[Fork] = []
    seen = set()

    def emit(kind, h, name1, pos1, repl1_words, name2, pos2, repl2_words):
        if only_involving is not None and \
                name1 not in only_involving and name2 not in only_involving:
            return
        key = (h, name1, pos1, name2, pos2)
        if key in seen:
            return
        seen.add(key)
        forks.append(Fork(kind, h, name1, pos1, name2, pos2,
                          LinComb([(w, c) for c, w in repl1_words]),
                          LinComb([(w, c) for c, w in repl2_words])))

    # index algebra instances
    by_lhs: Dict[Tuple[Letter, ...], List[_AlgInstance]] = {}
    by_first: Dict[Letter, List[_AlgInstance]] = {}
    alg_lens = set()
    for inst in alg:
        by_lhs.setdefault(inst.lhs, []).append(inst)
        by_first.setdefault(inst.lhs[0], []).append(inst)
        alg_lens.add(len(inst.lhs))

    # C1: lhs2 contained in lhs1
    for i1 in alg:
        n1 = len(i1.lhs)
        for L in alg_lens:
            if L > n1:
                continue
            for p in range(n1 - L + 1):
                seg = i1.lhs[p:p + L]
                for i2 in by_lhs.get(seg, ()):
                    if i2 is i1 or (p == 0 and L == n1 and i2.rule_name == i1.rule_name):
                        continue
                    h = Word(i1.lhs, False)
                    h1 = [(c, Word(ls, False)) for c, ls in i1.repl]
                    h2 = [(c, Word(i1.lhs[:p] + ls + i1.lhs[p + L:], False))
                          for c, ls in i2.repl]
                    emit("C1", h, i1.rule_name, 0, h1, i2.rule_name, p, h2)

    # C2: proper overlap, suffix of lhs1 = prefix of lhs2
    for i1 in alg:
        n1 = len(i1.lhs)
        for t in range(1, n1):
            suffix = i1.lhs[n1 - t:]
            for i2 in by_first.get(suffix[0], ()):
                n2 = len(i2.lhs)
                if t >= n2 or i2.lhs[:t] != suffix:
                    continue
                ext = i2.lhs[t:]
                h = Word(i1.lhs + ext, False)
                h1 = [(c, Word(ls + ext, False)) for c, ls in i1.repl]
                h2 = [(c, Word(i1.lhs[:n1 - t] + ls, False)) for c, ls in i2.repl]
                emit("C2", h, i1.rule_name, 0, h1, i2.rule_name, n1 - t, h2)

    # module occurrence index: by full letters and by first letter
    mod_by_letters: Dict[Tuple[Letter, ...], List[_ModOccurrence]] = {}
    mod_by_first: Dict[Letter, List[_ModOccurrence]] = {}
    for occ in mod:
        mod_by_letters.setdefault(occ.letters, []).append(occ)
        if occ.letters:
            mod_by_first.setdefault(occ.letters[0], []).append(occ)

    # CM1: algebra lhs wholly inside the module word's letter part
    for occ in mod:
        letters = occ.letters
        n = len(letters)
        h = Word(letters, True)
        h1 = [(c, Word(ls, True)) for c, ls in occ.repl]
        for L in alg_lens:
            for p in range(n - L + 1):
                seg = letters[p:p + L]
                for i2 in by_lhs.get(seg, ()):
                    h2 = [(c, Word(letters[:p] + ls + letters[p + L:], True))
                          for c, ls in i2.repl]
                    emit("CM1", h, occ.rule_name, 0, h1, i2.rule_name, p, h2)

    # CM2: algebra lhs sticks out to the left of the module word
    for i2 in alg:
        n2 = len(i2.lhs)
        for t in range(1, n2):
            overhang = i2.lhs[:n2 - t]
            suffix = i2.lhs[n2 - t:]
            for occ in mod_by_first.get(suffix[0], ()):
                if len(occ.letters) < t or occ.letters[:t] != suffix:
                    continue
                h = Word(overhang + occ.letters, True)
                h1 = [(c, Word(overhang + ls, True)) for c, ls in occ.repl]
                h2 = [(c, Word(ls + occ.letters[t:], True)) for c, ls in i2.repl]
                emit("CM2", h, occ.rule_name, n2 - t, h1, i2.rule_name, 0, h2)

    # CM3: one module word a suffix of another
    for occ in mod:
        letters = occ.letters
        n = len(letters)
        h = Word(letters, True)
        h1 = [(c, Word(ls, True)) for c, ls in occ.repl]
        for p in range(n + 1):
            if p == 0:
                candidates = [o for o in mod_by_letters.get(letters, ())
                              if o.rule_name != occ.rule_name]
            else:
                candidates = mod_by_letters.get(letters[p:], ())
            for o2 in candidates:
                if p == 0 and o2.rule_name == occ.rule_name:
                    continue
                h2 = [(c, Word(letters[:p] + ls, True)) for c, ls in o2.repl]
                emit("CM3", h, occ.rule_name, 0, h1, o2.rule_name, p, h2)

    forks.sort(key=lambda f: (sys.order.word_key(f.h), f.rule1, f.pos1, f.rule2, f.pos2))
    return forks


def check_fork(f: Fork, sys: RuleSystem, fuel: Optional[int] = None) -> CheckResult:
    g1 = reduce(f.h1, sys, fuel)
    g2 = reduce(f.h2, sys, fuel)
    if g1 == g2:
        return CheckResult(True, common=g1)
    return CheckResult(False, difference=g1 - g2)


def check_all_forks(sys: RuleSystem, window: int = 6, max_tail: int = 2,
                    fuel: Optional[int] = None):
    """(forks, divergent list of (fork, difference))."""
    forks = enumerate_forks(sys, window, max_tail)
    divergent = []
    for f in forks:
        res = check_fork(f, sys, fuel)
        if not res.converges:
            divergent.append((f, res.difference))
    return forks, divergent


@dataclass
class CompletionReport:
    rounds: int
    added: List[str] = field(default_factory=list)
    confluent: bool = False
    forks_checked: int = 0


def _rule_key(rule: SchematicRule):
    return repr(rule).split(": ", 1)[-1]


def complete(sys: RuleSystem, window: int = 6, max_rounds: int = 10,
             fuel: Optional[int] = None, max_tail: int = 2):
    """Bounded completion: orient fork differences until confluent or capped.

    Returns (extended system, CompletionReport).  Added rules are concrete;
    schematic generalization of discovered families is out of scope.
    Convergence survives rule additions, so after the first full round only
    forks involving freshly added rules are re-examined.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    current = sys
    report = CompletionReport(rounds=0)
    existing = {_rule_key(r) for r in current.rules if isinstance(r, SchematicRule)}
    fresh = None  # None: check everything (first round)
    for round_no in range(1, max_rounds + 1):
        report.rounds = round_no
        forks = enumerate_forks(current, window, max_tail, only_involving=fresh)
        report.forks_checked += len(forks)
        divergent = []
        for f in forks:
            res = check_fork(f, current, fuel)
            if not res.converges:
                divergent.append((f, res.difference))
        if not divergent:
            report.confluent = True
            return current, report
        new_rules = []
        for f, diff in divergent:
            try:
                rule = orient_relation(diff, current.order,
                                       "cmpl:%d" % (len(existing) + len(new_rules)))
            except UnorientableRelation as e:
                raise UnorientableDifference(
                    "cannot orient difference of %r: %s" % (f, e)) from None
            key = _rule_key(rule)
            if key in existing:
                continue
            existing.add(key)
            new_rules.append(rule)
        if not new_rules:
            report.confluent = False
            return current, report
        current = current.extended(new_rules)
        report.added.extend(repr(r) for r in new_rules)
        fresh = {r.name for r in new_rules}
    return current, report

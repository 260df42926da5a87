"""Vertex algebra presentations and their compiled rule systems.

A presentation is a generator list with a symmetric locality function and a
set of module relations.  ``coefficient_rules`` compiles it: schematic
T-rules and vacuum rules for every generator, locality orientations (the
shipped schematic forms for N in {0,1} between distinct generators,
instance-wise dynamic rules otherwise), and the presentation's relations
oriented by the word order.

``envelope_pbw_system`` builds the universal vertex envelope of a conformal
algebra: the same coefficient rules plus central-letter commutation, torsion
vacuum rules, annihilation rules with central tails, and the schematic swap
rule carrying the bracket, derived from the coefficient-algebra identity
[x(n), y(m)] = sum_s binom(n,s) (x o_s y)(n+m-s).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .conformal import ConformalAlgebra, TPoly
from .errors import UnorientableRelation, VgsbError
from .rules import (
    AffineExpr,
    CoeffFn,
    DynamicLocalityRule,
    Guard,
    RhsTerm,
    RuleSystem,
    SchematicRule,
    parse_affine,
)
from .scalars import Scalar, is_zero
from .terms import (
    Generator,
    Letter,
    LinComb,
    OrderSpec,
    T,
    VACUUM,
    Word,
    is_t,
    module_word,
)

_N = AffineExpr.var("n")
_M = AffineExpr.var("m")


class VertexPresentation:
    def __init__(self, order: OrderSpec, locality: Dict[Tuple[str, str], int],
                 relations: Iterable[LinComb] = (), name: str = ""):
        self.order = order
        self.name = name
        names = [g.name for g in order.generators]
        self.locality = {}
        for x in names:
            for y in names:
                n = locality.get((x, y), locality.get((y, x)))
                if n is None:
                    raise VgsbError("locality undefined on (%s, %s)" % (x, y))
                if locality.get((x, y), n) != n or locality.get((y, x), n) != n:
                    raise VgsbError("asymmetric locality on (%s, %s)" % (x, y))
                self.locality[(x, y)] = n
        self.relations = list(relations)
        for rel in self.relations:
            for w, _ in rel:
                if not w.module:
                    raise VgsbError("relation term is not a module word")
        if self.graded():
            for rel in self.relations:
                weights = {self.order.word_weight(w) for w, _ in rel}
                if len(weights) > 1:
                    raise VgsbError("relation is not weight-homogeneous")

    def graded(self) -> bool:
        return self.order.graded()

    def generator_names(self):
        return [g.name for g in self.order.generators]


def t_rules(order: OrderSpec) -> List[SchematicRule]:
    out = []
    for g in order.generators:
        out.append(SchematicRule(
            "T:%s" % g.name,
            [T, (g.name, _N)],
            [RhsTerm(CoeffFn(), [(g.name, _N), T]),
             RhsTerm(CoeffFn(Fraction(-1), binoms=[(_N, AffineExpr.constant(1))]),
                     [(g.name, _N.shift(-1))])],
        ))
    return out


def vacuum_rules(order: OrderSpec) -> List[SchematicRule]:
    out = [SchematicRule("vac:T", [T], [], kind="module")]
    for g in order.generators:
        out.append(SchematicRule(
            "vac:%s+" % g.name,
            [(g.name, _N)], [],
            guards=[Guard(_N, ">=", AffineExpr.constant(0))],
            kind="module",
        ))
        if g.torsion is not None:
            out.append(SchematicRule(
                "vac:%s-torsion" % g.name,
                [(g.name, _N)], [],
                guards=[Guard(_N, "<=", AffineExpr.constant(-g.torsion - 1))],
                kind="module",
            ))
    return out


def _commutation_rules_n0(x: str, y: str, order: OrderSpec) -> List[SchematicRule]:
    """Locality 0 between distinct generators: sort by the letter order."""
    rx, ry = order.generator(x).rank, order.generator(y).rank
    lo, hi = (x, y) if rx < ry else (y, x)
    return [
        SchematicRule(
            "loc0:%s%s" % (hi, lo),
            [(hi, _N), (lo, _M)],
            [RhsTerm(CoeffFn(), [(lo, _M), (hi, _N)])],
            guards=[Guard(_N, ">=", _M)],
        ),
        SchematicRule(
            "loc0:%s%s" % (lo, hi),
            [(lo, _N), (hi, _M)],
            [RhsTerm(CoeffFn(), [(hi, _M), (lo, _N)])],
            guards=[Guard(_N, ">", _M)],
        ),
    ]


def _locality_rules_n1(x: str, y: str, order: OrderSpec) -> List[SchematicRule]:
    """Locality 1 between distinct generators: the Weyl-style orientations.

    With lo the lower-rank generator and hi the higher:
      lo(n) hi(m) -> hi(m) lo(n) + lo(n-1) hi(m+1) - hi(m+1) lo(n-1),  n > m+1
      hi(m) lo(n) -> lo(n) hi(m) + hi(m-1) lo(n+1) - lo(n+1) hi(m-1),  m >= n+1
    """
    rx, ry = order.generator(x).rank, order.generator(y).rank
    lo, hi = (x, y) if rx < ry else (y, x)
    one = CoeffFn()
    neg = CoeffFn(Fraction(-1))
    return [
        SchematicRule(
            "loc1:%s%s" % (lo, hi),
            [(lo, _N), (hi, _M)],
            [RhsTerm(one, [(hi, _M), (lo, _N)]),
             RhsTerm(one, [(lo, _N.shift(-1)), (hi, _M.shift(1))]),
             RhsTerm(neg, [(hi, _M.shift(1)), (lo, _N.shift(-1))])],
            guards=[Guard(_N, ">", _M.shift(1))],
        ),
        SchematicRule(
            "loc1:%s%s" % (hi, lo),
            [(hi, _M), (lo, _N)],
            [RhsTerm(one, [(lo, _N), (hi, _M)]),
             RhsTerm(one, [(hi, _M.shift(-1)), (lo, _N.shift(1))]),
             RhsTerm(neg, [(lo, _N.shift(1)), (hi, _M.shift(-1))])],
            guards=[Guard(_M, ">=", _N.shift(1))],
        ),
    ]


def _same_gen_commutation(x: str) -> SchematicRule:
    return SchematicRule(
        "loc0:%s%s" % (x, x),
        [(x, _N), (x, _M)],
        [RhsTerm(CoeffFn(), [(x, _M), (x, _N)])],
        guards=[Guard(_N, ">", _M)],
    )


def orient_relation(rel: LinComb, order: OrderSpec, name: str) -> SchematicRule:
    """Turn a concrete relation into a rule rewriting its largest word."""
    if rel.is_zero():
        raise UnorientableRelation("zero relation")
    lead = rel.leading_word(order)
    lead_key = order.word_key(lead)
    ties = [w for w in rel.terms if order.word_key(w) == lead_key]
    if len(ties) > 1:
        raise UnorientableRelation(
            "relation %s has no strictly largest word" % name)
    c = rel.terms[lead]
    if not isinstance(c, Fraction):
        raise UnorientableRelation(
            "relation %s has a non-rational leading coefficient" % name)
    rhs = []
    for w, a in rel:
        if w == lead:
            continue
        rhs.append(RhsTerm(CoeffFn(a * Fraction(-1) / c), [
            l if is_t(l) else (l[0], AffineExpr.constant(l[1])) for l in w.letters
        ]))
    lhs = [l if is_t(l) else (l[0], AffineExpr.constant(l[1])) for l in lead.letters]
    return SchematicRule(name, lhs, rhs, kind="module" if lead.module else "algebra")


def coefficient_rules(p: VertexPresentation) -> RuleSystem:
    """Compile a presentation to its rule system."""
    order = p.order
    rules: List = []
    rules.extend(t_rules(order))
    rules.extend(vacuum_rules(order))
    names = p.generator_names()
    for i, x in enumerate(names):
        # same generator
        n = p.locality[(x, x)]
        if n == 0:
            rules.append(_same_gen_commutation(x))
        else:
            rules.append(DynamicLocalityRule("loc%d:%s%s" % (n, x, x), x, x, n))
        for y in names[i + 1:]:
            n = p.locality[(x, y)]
            if n == 0:
                rules.extend(_commutation_rules_n0(x, y, order))
            elif n == 1:
                rules.extend(_locality_rules_n1(x, y, order))
            else:
                rules.append(DynamicLocalityRule("loc%d:%s%s" % (n, x, y), x, y, n))
    for k, rel in enumerate(p.relations):
        rules.append(orient_relation(rel, order, "rel:%d" % k))
    return RuleSystem(order, rules)


# -- Weyl ---------------------------------------------------------------------


def weyl_presentation() -> VertexPresentation:
    order = OrderSpec([
        Generator("x", rank=0, weight=Fraction(1, 2)),
        Generator("y", rank=1, weight=Fraction(1, 2)),
    ])
    rel = LinComb({
        module_word([("x", 0), ("y", -1)]): Fraction(1),
        VACUUM: Fraction(-1),
    })
    return VertexPresentation(
        order,
        {("x", "x"): 0, ("y", "y"): 0, ("x", "y"): 1},
        [rel],
        name="weyl",
    )


def weyl_theorem_rules(order: OrderSpec) -> List[SchematicRule]:
    """The tail-carrying module rules of the Weyl GSB.

    y(m) x(m) u1 -> x(m) y(m) u1
    x(m+1) y(m) u1 -> y(m) x(m+1) u1            (m != -1)
    x(0) y(-1) u1 -> y(-1) x(0) u1 + u1
    """
    one = CoeffFn()
    return [
        SchematicRule(
            "weyl:yx",
            [("y", _M), ("x", _M)],
            [RhsTerm(one, [("x", _M), ("y", _M)])],
            kind="module", tail=True,
        ),
        SchematicRule(
            "weyl:xy",
            [("x", _M.shift(1)), ("y", _M)],
            [RhsTerm(one, [("y", _M), ("x", _M.shift(1))])],
            guards=[Guard(_M, "!=", AffineExpr.constant(-1))],
            kind="module", tail=True,
        ),
        SchematicRule(
            "weyl:xy0",
            [("x", AffineExpr.constant(0)), ("y", AffineExpr.constant(-1))],
            [RhsTerm(one, [("y", AffineExpr.constant(-1)), ("x", AffineExpr.constant(0))]),
             RhsTerm(one, [])],
            kind="module", tail=True,
        ),
    ]


def weyl_system() -> Tuple[VertexPresentation, RuleSystem]:
    """The exact schematic Weyl GSB."""
    p = weyl_presentation()
    sys = coefficient_rules(p)
    return p, sys.extended(weyl_theorem_rules(p.order))


def weyl_terminal(w: Word) -> bool:
    """Terminal-word predicate of the Weyl basis.

    Modes ascend and stay negative; a y directly left of an x forces a
    strictly smaller mode.
    """
    if not w.module:
        return False
    prev = None
    for l in w.letters:
        if is_t(l):
            return False
        gen, n = l
        if n >= 0:
            return False
        if prev is not None:
            pg, pn = prev
            if pn > n:
                return False
            if pn == n and pg == "y" and gen == "x":
                return False
        prev = l
    return True


# -- universal envelopes -------------------------------------------------------


def _central_sort_rules(e: str, order: OrderSpec) -> List[SchematicRule]:
    """Sort a central generator's letters into the order
    e(-1) < e(0) < e(1) < ... < e(-2) < e(-3) < ...  (five guard regions)."""
    one = CoeffFn()
    zero = AffineExpr.constant(0)
    swap = [RhsTerm(one, [(e, _M), (e, _N)])]
    mk = lambda tag, guards: SchematicRule(
        "sortC:%s:%s" % (e, tag), [(e, _N), (e, _M)], swap, guards=guards)
    return [
        mk("pos-pos", [Guard(_N, ">", _M), Guard(_M, ">=", zero)]),
        mk("pos-neg1", [Guard(_N, ">=", zero), Guard(_M, "==", AffineExpr.constant(-1))]),
        mk("neg-neg1", [Guard(_N, "<=", AffineExpr.constant(-2)),
                        Guard(_M, "==", AffineExpr.constant(-1))]),
        mk("neg-pos", [Guard(_N, "<=", AffineExpr.constant(-2)), Guard(_M, ">=", zero)]),
        mk("neg-neg", [Guard(_N, "<", _M), Guard(_M, "<=", AffineExpr.constant(-2))]),
    ]


def _central_commute_rules(e: str, others: Iterable[str]) -> List[SchematicRule]:
    one = CoeffFn()
    out = []
    for z in others:
        out.append(SchematicRule(
            "commC:%s%s" % (e, z),
            [(e, _N), (z, _M)],
            [RhsTerm(one, [(z, _M), (e, _N)])],
        ))
    return out


def _bracket_rhs_terms(E: ConformalAlgebra, a: str, b: str) -> List[RhsTerm]:
    """Expansion of [a(n), b(m)] = sum_s binom(n,s) (a o_s b)(n+m-s).

    Each T-polynomial term alpha T^k z of (a o_s b) contributes, via
    (T^k z)(p) = (-1)^k k! binom(p, k) z(p-k),
    the template  alpha (-1)^k k! binom(n,s) binom(n+m-s,k)  z(n+m-s-k).
    """
    out = []
    N = E.locality(a, b)
    nm = AffineExpr({"n": 1, "m": 1})
    for s in range(N):
        prod = E.nth_product(a, b, s)
        for (k, z), alpha in prod.terms.items():
            fact = 1
            for i in range(2, k + 1):
                fact *= i
            const = alpha * Fraction((-1) ** k * fact)
            coeff = CoeffFn(
                const,
                binoms=[(_N, AffineExpr.constant(s)),
                        (nm.shift(-s), AffineExpr.constant(k))],
            )
            out.append(RhsTerm(coeff, [(z, nm.shift(-s - k))]))
    return out


def _swap_rules(E: ConformalAlgebra) -> List[SchematicRule]:
    """The PBW straightening rules x(n) y(m) u1 -> y(m) x(n) u1 + brackets.

    One rule per ordered pair whose left letter can exceed the right in the
    letter order; guards encode x(n) > y(m).
    """
    one = CoeffFn()
    rules = []
    ordinary = [g for g in E.order.generators if not g.central]
    for i, ga in enumerate(ordinary):
        a = ga.name
        rules.append(SchematicRule(
            "pbw:%s%s" % (a, a),
            [(a, _N), (a, _M)],
            [RhsTerm(one, [(a, _M), (a, _N)])] + _bracket_rhs_terms(E, a, a),
            guards=[Guard(_N, ">", _M)],
            kind="module", tail=True,
        ))
        for gb in ordinary[i + 1:]:
            b = gb.name
            hi, lo = (a, b) if ga.rank > gb.rank else (b, a)
            rules.append(SchematicRule(
                "pbw:%s%s" % (hi, lo),
                [(hi, _N), (lo, _M)],
                [RhsTerm(one, [(lo, _M), (hi, _N)])] + _bracket_rhs_terms(E, hi, lo),
                guards=[Guard(_N, ">=", _M)],
                kind="module", tail=True,
            ))
            rules.append(SchematicRule(
                "pbw:%s%s" % (lo, hi),
                [(lo, _N), (hi, _M)],
                [RhsTerm(one, [(hi, _M), (lo, _N)])] + _bracket_rhs_terms(E, lo, hi),
                guards=[Guard(_N, ">", _M)],
                kind="module", tail=True,
            ))
    return rules


def _annihilation_tail_rules(order: OrderSpec) -> List[SchematicRule]:
    """x(n) e(-1)^l ... 1 -> 0 for n >= 0: nonnegative modes die through
    central tails (the tail alphabet is the torsion mode range)."""
    central_letters = []
    for g in order.generators:
        if g.central:
            for j in range(1, (g.torsion or 1) + 1):
                central_letters.append((g.name, -j))
    if not central_letters:
        return []
    out = []
    for g in order.generators:
        if g.central:
            continue
        out.append(SchematicRule(
            "annC:%s" % g.name,
            [(g.name, _N)], [],
            guards=[Guard(_N, ">=", AffineExpr.constant(0))],
            kind="module", tail=True, tail_alphabet=central_letters,
        ))
    return out


def envelope_pbw_system(E: ConformalAlgebra) -> Tuple[VertexPresentation, RuleSystem]:
    """Universal vertex envelope of a conformal algebra.

    Returns the presentation (with the defining bracket relations, used by
    the dimension oracle) and the PBW rule system.
    """
    report = E.check_axioms()
    if report:
        from .errors import AxiomViolation

        raise AxiomViolation("conformal axioms fail", report=report)
    order = E.order
    names = [g.name for g in order.generators]
    ordinary = [g.name for g in order.generators if not g.central]
    centrals = [g.name for g in order.generators if g.central]
    locality = {}
    for x in names:
        for y in names:
            locality[(x, y)] = E.locality(x, y)
    relations = []
    for a in ordinary:
        for b in ordinary:
            for n in range(E.locality(a, b)):
                lhs = module_word([(a, n), (b, -1)])
                rel = LinComb.from_word(lhs)
                prod = E.nth_product(a, b, n)
                for (k, z), alpha in prod.terms.items():
                    fact = 1
                    for i in range(2, k + 1):
                        fact *= i
                    rel = rel - LinComb.from_word(
                        module_word([(z, -1 - k)]), alpha * fact)
                if not rel.is_zero():
                    relations.append(rel)
    p = VertexPresentation(order, locality, relations, name="envelope")

    rules: List = []
    rules.extend(t_rules(order))
    rules.extend(vacuum_rules(order))
    for e in centrals:
        rules.extend(_central_sort_rules(e, order))
        rules.extend(_central_commute_rules(e, ordinary))
    rules.extend(_annihilation_tail_rules(order))
    rules.extend(_swap_rules(E))
    # raw locality orientations of the coefficient algebra
    for i, x in enumerate(ordinary):
        n = locality[(x, x)]
        if n >= 1:
            rules.append(DynamicLocalityRule("loc%d:%s%s" % (n, x, x), x, x, n))
        for y in ordinary[i + 1:]:
            n = locality[(x, y)]
            if n == 1:
                rules.extend(_locality_rules_n1(x, y, order))
            elif n >= 2:
                rules.append(DynamicLocalityRule("loc%d:%s%s" % (n, x, y), x, y, n))
    return p, RuleSystem(order, rules)


def quotient_identify(sys: RuleSystem, lhs: Word, rhs) -> RuleSystem:
    """Add the identification lhs -> rhs as a concrete module rule."""
    if isinstance(rhs, Word):
        rhs = LinComb.from_word(rhs)
    for w in list(rhs.terms) + [lhs]:
        if not w.module:
            raise VgsbError("quotient identification must be between module words")
    for w in rhs.terms:
        if sys.order.compare_words(lhs, w) <= 0:
            raise VgsbError("order violation: lhs is not above %r" % (w,))
    rel = LinComb.from_word(lhs) - rhs
    rule = orient_relation(rel, sys.order, "quot:%s" % len(sys.rules))
    if any(_same_concrete_rule(rule, r) for r in sys.rules):
        return sys
    return sys.extended([rule])


def _same_concrete_rule(r1, r2) -> bool:
    if not isinstance(r2, SchematicRule) or not isinstance(r1, SchematicRule):
        return False
    return repr(r1).split(": ", 1)[-1] == repr(r2).split(": ", 1)[-1]


# -- built-in presentations ------------------------------------------------------


def free_presentation(k: int, N) -> VertexPresentation:
    """Free vertex algebra on k generators with constant or matrix locality."""
    if k == 1:
        names = ["v"]
    elif k <= 3:
        names = ["x", "y", "z"][:k]
    else:
        names = ["g%d" % i for i in range(k)]
    gens = [Generator(nm, rank=i, weight=Fraction(1)) for i, nm in enumerate(names)]
    order = OrderSpec(gens)
    if isinstance(N, int):
        locality = {(a, b): N for a in names for b in names}
    else:
        locality = dict(N)
    return VertexPresentation(order, locality, [], name="free%d" % k)


def free_system(k: int, N) -> Tuple[VertexPresentation, RuleSystem]:
    p = free_presentation(k, N)
    return p, coefficient_rules(p)


def abelian_presentation() -> VertexPresentation:
    """One generator e with Te = 0 imposed as a module relation."""
    order = OrderSpec([Generator("e", rank=0, weight=Fraction(1))])
    rel = LinComb.from_word(module_word([T, ("e", -1)]))
    return VertexPresentation(order, {("e", "e"): 0}, [rel], name="abelian")


def abelian_system() -> Tuple[VertexPresentation, RuleSystem]:
    p = abelian_presentation()
    return p, coefficient_rules(p)


def virasoro_vertex(c) -> Tuple[VertexPresentation, RuleSystem]:
    """Virasoro vertex algebra of central charge c: envelope mod e(-1)1 = 1."""
    from .conformal import virasoro_c

    E = virasoro_c(c)
    p, sys = envelope_pbw_system(E)
    lhs = module_word([("e", -1)])
    sys = quotient_identify(sys, lhs, VACUUM)
    p = VertexPresentation(
        p.order, p.locality,
        p.relations + [LinComb.from_word(lhs) - LinComb.from_word(VACUUM)],
        name="virasoro")
    return p, sys


def heisenberg_vertex(f_coeffs) -> Tuple[VertexPresentation, RuleSystem]:
    from .conformal import heisenberg

    E = heisenberg(f_coeffs)
    p, sys = envelope_pbw_system(E)
    lhs = module_word([("e", -1)])
    sys = quotient_identify(sys, lhs, VACUUM)
    p = VertexPresentation(
        p.order, p.locality,
        p.relations + [LinComb.from_word(lhs) - LinComb.from_word(VACUUM)],
        name="heisenberg")
    return p, sys


def comm_pair_system() -> Tuple[VertexPresentation, RuleSystem]:
    """The commutative-pair example: envelope with T^2 e = 0 mod e(-2)1 = 1.

    The quotient destroys the grading, so the returned presentation drops
    the weights (enumeration proceeds by length and mode boxes).
    """
    from .conformal import comm_pair_extension

    E = comm_pair_extension()
    p, sys = envelope_pbw_system(E)
    lhs = module_word([("e", -2)])
    sys = quotient_identify(sys, lhs, VACUUM)
    gens = [Generator(g.name, rank=g.rank, weight=None, central=g.central,
                      torsion=g.torsion) for g in p.order.generators]
    order = OrderSpec(gens)
    rel = LinComb.from_word(lhs) - LinComb.from_word(VACUUM)
    p2 = VertexPresentation(order, p.locality,
                            [_strip(r) for r in p.relations] + [rel],
                            name="comm_pair")
    sys2 = RuleSystem(order, sys.rules)
    return p2, sys2


def _strip(rel: LinComb) -> LinComb:
    return LinComb(dict(rel.terms))


def weyl_envelope_system() -> Tuple[VertexPresentation, RuleSystem]:
    """The Weyl vertex algebra as the quotient of the rank-2 abelian
    extension by e(-1)1 = 1."""
    from .conformal import weyl_pair

    E = weyl_pair()
    p, sys = envelope_pbw_system(E)
    lhs = module_word([("e", -1)])
    sys = quotient_identify(sys, lhs, VACUUM)
    p = VertexPresentation(
        p.order, p.locality,
        p.relations + [LinComb.from_word(lhs) - LinComb.from_word(VACUUM)],
        name="weyl_envelope")
    return p, sys


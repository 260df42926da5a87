"""Schematic integer-parameterized rewrite rules.

A rule's left side is a sequence of letter patterns (T or g(affine expr)),
guarded by integer comparisons; the right side is a list of coefficient
functions with word templates.  Module rules are anchored so the pattern's
last letter abuts the vacuum, optionally with a wildcard tail absorbing
intervening letters (the tail may be restricted to an alphabet, e.g. e(-1)
runs).  Locality relations of order N >= 2 are carried by DynamicLocalityRule,
which orients each concrete instance by its order-largest word on demand.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .scalars import Scalar, format_scalar, generalized_binomial, is_zero, parse_scalar
from .terms import Generator, Letter, LinComb, OrderSpec, T, Word, is_t


# -- affine expressions ------------------------------------------------------


class AffineExpr:
    """Integer-coefficient linear combination of index variables + constant."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0):
        self.coeffs = {v: c for v, c in (coeffs or {}).items() if c != 0}
        self.const = const

    @classmethod
    def var(cls, name):
        return cls({name: 1})

    @classmethod
    def constant(cls, c):
        return cls({}, c)

    def variables(self):
        return set(self.coeffs)

    def is_constant(self):
        return not self.coeffs

    def shift(self, d):
        return AffineExpr(self.coeffs, self.const + d)

    def evaluate(self, subst: Dict[str, int]) -> int:
        total = self.const
        for v, c in self.coeffs.items():
            total += c * subst[v]
        return total

    def partial(self, subst: Dict[str, int]):
        """Evaluate known variables; return (residual coeffs, constant)."""
        total = self.const
        residual = {}
        for v, c in self.coeffs.items():
            if v in subst:
                total += c * subst[v]
            else:
                residual[v] = c
        return residual, total

    def __eq__(self, other):
        return (
            isinstance(other, AffineExpr)
            and self.coeffs == other.coeffs
            and self.const == other.const
        )

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.const))

    def __str__(self):
        parts = []
        for v in sorted(self.coeffs):
            c = self.coeffs[v]
            if c == 1:
                parts.append(("+", v))
            elif c == -1:
                parts.append(("-", v))
            else:
                parts.append(("+" if c > 0 else "-", "%d%s" % (abs(c), v)))
        if self.const or not parts:
            parts.append(("+" if self.const >= 0 else "-", str(abs(self.const))))
        out = ""
        for i, (sign, body) in enumerate(parts):
            if i == 0:
                out = ("-" if sign == "-" else "") + body
            else:
                out += sign + body
        return out

    def __repr__(self):
        return "AffineExpr(%s)" % self


_TOKEN = re.compile(r"\s*([+-]|\d+|[A-Za-z_]\w*)")


def parse_affine(text: str) -> AffineExpr:
    """Parse forms like "n-1", "n+m-2", "-3", "2n+1"."""
    pos = 0
    coeffs: Dict[str, int] = {}
    const = 0
    sign = 1
    pending: Optional[int] = None
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError("bad affine expression %r" % text)
        tok = m.group(1)
        pos = m.end()
        if tok == "+":
            if pending is not None:
                const += sign * pending
                pending = None
            sign = 1
        elif tok == "-":
            if pending is not None:
                const += sign * pending
                pending = None
            sign = -sign
        elif tok.isdigit():
            if pending is not None:
                raise ValueError("bad affine expression %r" % text)
            pending = int(tok)
        else:
            mult = 1 if pending is None else pending
            pending = None
            coeffs[tok] = coeffs.get(tok, 0) + sign * mult
            sign = 1
    if pending is not None:
        const += sign * pending
    return AffineExpr(coeffs, const)


# -- guards ------------------------------------------------------------------

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class Guard:
    __slots__ = ("lhs", "op", "rhs")

    def __init__(self, lhs: AffineExpr, op: str, rhs: AffineExpr):
        if op not in _OPS:
            raise ValueError("unknown comparison %r" % op)
        self.lhs = lhs
        self.op = op
        self.rhs = rhs

    def holds(self, subst) -> bool:
        return _OPS[self.op](self.lhs.evaluate(subst), self.rhs.evaluate(subst))

    def __str__(self):
        return "%s%s%s" % (self.lhs, self.op, self.rhs)

    def __repr__(self):
        return "Guard(%s)" % self


_GUARD_RE = re.compile(r"(.*?)(<=|>=|==|!=|<|>)(.*)")


def parse_guard(text: str) -> Guard:
    m = _GUARD_RE.fullmatch(text.replace(" ", ""))
    if not m:
        raise ValueError("bad guard %r" % text)
    return Guard(parse_affine(m.group(1)), m.group(2), parse_affine(m.group(3)))


# -- coefficient functions ---------------------------------------------------


class CoeffFn:
    """Product of a scalar constant, generalized binomials, signs, deltas."""

    __slots__ = ("const", "binoms", "signs", "deltas")

    def __init__(self, const: Scalar = Fraction(1), binoms=(), signs=(), deltas=()):
        self.const = const
        self.binoms = tuple(binoms)   # (top expr, bottom expr)
        self.signs = tuple(signs)     # exprs e: factor (-1)^e
        self.deltas = tuple(deltas)   # (expr, int): Kronecker delta

    def evaluate(self, subst) -> Scalar:
        val = self.const
        for expr, target in self.deltas:
            if expr.evaluate(subst) != target:
                return Fraction(0)
        for e in self.signs:
            if e.evaluate(subst) % 2:
                val = val * Fraction(-1)
        for top, bot in self.binoms:
            b = bot.evaluate(subst)
            if b < 0:
                return Fraction(0)
            val = val * generalized_binomial(top.evaluate(subst), b)
        return val

    def __str__(self):
        parts = [format_scalar(self.const)]
        for top, bot in self.binoms:
            parts.append("binom(%s,%s)" % (top, bot))
        for e in self.signs:
            parts.append("sign(%s)" % e)
        for e, t in self.deltas:
            parts.append("delta(%s,%d)" % (e, t))
        return "*".join(parts)

    def __repr__(self):
        return "CoeffFn(%s)" % self


def parse_coeff(text: str, param_name="g") -> CoeffFn:
    const = Fraction(1)
    binoms, signs, deltas = [], [], []
    for factor in text.replace(" ", "").split("*"):
        if factor.startswith("binom(") and factor.endswith(")"):
            a, b = factor[6:-1].split(",")
            binoms.append((parse_affine(a), parse_affine(b)))
        elif factor.startswith("sign(") and factor.endswith(")"):
            signs.append(parse_affine(factor[5:-1]))
        elif factor.startswith("delta(") and factor.endswith(")"):
            a, b = factor[6:-1].split(",")
            deltas.append((parse_affine(a), int(b)))
        else:
            const = const * parse_scalar(factor, param_name)
    return CoeffFn(const, binoms, signs, deltas)


# -- patterns ----------------------------------------------------------------

# A letter pattern is T (the string) or (generator name, AffineExpr).
Pattern = Union[str, Tuple[str, AffineExpr]]


def pat(gen: str, expr) -> Pattern:
    if isinstance(expr, int):
        expr = AffineExpr.constant(expr)
    elif isinstance(expr, str):
        expr = parse_affine(expr)
    return (gen, expr)


def pattern_str(p: Pattern) -> str:
    if is_t(p):
        return "T"
    return "%s(%s)" % (p[0], p[1])


def instantiate_pattern(p: Pattern, subst) -> Letter:
    if is_t(p):
        return T
    return (p[0], p[1].evaluate(subst))


# -- rules ---------------------------------------------------------------------


class RhsTerm:
    __slots__ = ("coeff", "pats")

    def __init__(self, coeff: CoeffFn, pats: Sequence[Pattern]):
        self.coeff = coeff
        self.pats = tuple(pats)


TAIL_ANY = "any"


class SchematicRule:
    """lhs pattern -> sum of coefficient * word template.

    kind "algebra": matches any contiguous subword.
    kind "module": the pattern's final letter abuts the vacuum; with a tail
    wildcard the pattern may sit further left and the tail (restricted to
    ``tail_alphabet`` when given) is spliced into every rhs template at the
    position marked by tail_after (always the template end here).
    """

    __slots__ = ("name", "lhs", "guards", "rhs", "kind", "tail", "tail_alphabet")

    def __init__(self, name, lhs, rhs, guards=(), kind="algebra",
                 tail=False, tail_alphabet=None):
        self.name = name
        self.lhs = tuple(lhs)
        self.rhs = tuple(rhs)
        self.guards = tuple(guards)
        self.kind = kind
        self.tail = tail
        self.tail_alphabet = None if tail_alphabet is None else frozenset(tail_alphabet)
        if tail and kind != "module":
            raise ValueError("tail wildcard only on module rules")

    def variables(self):
        out = set()
        for p in self.lhs:
            if not is_t(p):
                out |= p[1].variables()
        return out

    # -- matching ---------------------------------------------------------

    def match(self, word: Word, pos: int):
        """Substitution making the pattern equal the subword at pos, or None.

        For module rules the pattern must abut the vacuum, with any
        intervening letters absorbed by the tail wildcard (when enabled).
        """
        lhs = self.lhs
        k = len(lhs)
        letters = word.letters
        if pos + k > len(letters):
            return None
        # cheap generator-shape prepass before any allocation
        for i in range(k):
            p = lhs[i]
            l = letters[pos + i]
            if p.__class__ is str:
                if l.__class__ is not str:
                    return None
            elif l.__class__ is str or l[0] != p[0]:
                return None
        if self.kind == "module":
            if not word.module:
                return None
            tail = letters[pos + k:]
            if not self.tail:
                if tail:
                    return None
            else:
                alphabet = self.tail_alphabet
                for l in tail:
                    if l.__class__ is str:
                        return None
                    if alphabet is not None and l not in alphabet:
                        return None
        subst: Dict[str, int] = {}
        for i in range(k):
            p = lhs[i]
            if p.__class__ is str:
                continue
            expr = p[1]
            residual, const = expr.partial(subst)
            target = letters[pos + i][1] - const
            if not residual:
                if target != 0:
                    return None
            elif len(residual) == 1:
                (v, c), = residual.items()
                if target % c != 0:
                    return None
                subst[v] = target // c
            else:
                raise ValueError(
                    "underdetermined pattern %s in rule %s"
                    % (pattern_str(p), self.name)
                )
        for g in self.guards:
            if not g.holds(subst):
                return None
        return subst

    def instantiate_rhs(self, subst, tail: Tuple[Letter, ...] = ()):
        """List of (coefficient, letters) with the tail spliced in."""
        out = []
        for term in self.rhs:
            c = term.coeff.evaluate(subst)
            if is_zero(c):
                continue
            letters = tuple(instantiate_pattern(p, subst) for p in term.pats) + tail
            out.append((c, letters))
        return out

    def lhs_letters(self, subst) -> Tuple[Letter, ...]:
        return tuple(instantiate_pattern(p, subst) for p in self.lhs)

    def __repr__(self):
        lhs = " ".join(pattern_str(p) for p in self.lhs)
        if self.tail:
            lhs += " u"
        if self.kind == "module":
            lhs += " 1"
        rhs = " + ".join(
            "(%s) %s%s" % (t.coeff, " ".join(pattern_str(p) for p in t.pats),
                           " u" if self.tail else "")
            for t in self.rhs
        ) or "0"
        g = " if " + " and ".join(str(g) for g in self.guards) if self.guards else ""
        return "%s: %s -> %s%s" % (self.name, lhs, rhs, g)


class DynamicLocalityRule:
    """Instance-wise orientation of the locality family of order N >= 2.

    The family is sum_{s=0}^{N} (-1)^s binom(N,s) [x(n0-s), y(m0+s)] = 0.
    An adjacent pair is rewritable when it is the strictly largest word of
    some instance; the instance with the smallest shift wins for determinism.
    """

    __slots__ = ("name", "x", "y", "N", "_match_cache")

    def __init__(self, name, x, y, N):
        self.name = name
        self.x = x
        self.y = y
        self.N = N
        self._match_cache = {}
        if N < 1 or (N == 1 and x != y):
            raise ValueError("dynamic locality handles N >= 2, or N = 1 on a single generator")

    kind = "algebra"
    tail = False

    def instance_terms(self, n0, m0):
        """All (coeff, (letter, letter)) of the relation instance (n0, m0)."""
        acc: Dict[Tuple[Letter, Letter], Fraction] = {}
        for s in range(self.N + 1):
            c = Fraction((-1) ** s) * generalized_binomial(self.N, s)
            a = (self.x, n0 - s)
            b = (self.y, m0 + s)
            for pair, coeff in (((a, b), c), ((b, a), -c)):
                cur = acc.get(pair)
                cur = coeff if cur is None else cur + coeff
                if cur == 0:
                    acc.pop(pair, None)
                else:
                    acc[pair] = cur
        return acc

    def match_pair(self, l1: Letter, l2: Letter, order: OrderSpec):
        """Replacement [(coeff, (letters...))] for l1 l2, or None."""
        if l1.__class__ is str or l2.__class__ is str:
            return None
        key = (l1, l2)
        if key in self._match_cache:
            return self._match_cache[key]
        out = self._match_pair_uncached(l1, l2, order)
        self._match_cache[key] = out
        return out

    def _match_pair_uncached(self, l1, l2, order):
        roles = []
        if l1[0] == self.x and l2[0] == self.y:
            # l1 = x(n0 - s), l2 = y(m0 + s)
            roles.append(lambda s: (l1[1] + s, l2[1] - s))
        if l1[0] == self.y and l2[0] == self.x:
            # l1 = y(m0 + s), l2 = x(n0 - s); for x == y both roles apply
            roles.append(lambda s: (l2[1] + s, l1[1] - s))
        if not roles:
            return None
        target = (l1, l2)
        for s in range(self.N + 1):
            for role in roles:
                n0, m0 = role(s)
                terms = self.instance_terms(n0, m0)
                c = terms.get(target)
                if c is None:
                    continue
                words = [Word(pair, False) for pair in terms]
                top = max(words, key=order.word_key)
                if top.letters != target:
                    continue
                if sum(1 for w in words if order.word_key(w) == order.word_key(top)) > 1:
                    continue
                repl = []
                for pair, coeff in terms.items():
                    if pair == target:
                        continue
                    repl.append((-coeff / c, pair))
                return repl
        return None

    def concrete_instances(self, window: int, order: OrderSpec):
        """All oriented instances with every mode in [-window, window].

        Yields (lhs letters, [(coeff, letters)]) pairs.
        """
        seen = set()
        for n0 in range(-window, window + 1):
            for m0 in range(-window, window + 1):
                terms = self.instance_terms(n0, m0)
                if not terms:
                    continue
                if any(
                    not (-window <= l[1] <= window) for pair in terms for l in pair
                ):
                    continue
                words = [Word(pair, False) for pair in terms]
                top = max(words, key=order.word_key)
                if sum(1 for w in words if order.word_key(w) == order.word_key(top)) > 1:
                    continue
                lhs = top.letters
                if lhs in seen:
                    continue
                seen.add(lhs)
                c = terms[lhs]
                repl = [(-coeff / c, pair) for pair, coeff in terms.items() if pair != lhs]
                yield lhs, repl

    def __repr__(self):
        return "%s: locality(%s,%s; N=%d) instance-wise" % (
            self.name, self.x, self.y, self.N)


Rule = Union[SchematicRule, DynamicLocalityRule]


class RuleSystem:
    """Immutable list of rules plus the order; reduction caches live here."""

    def __init__(self, order: OrderSpec, rules: Iterable[Rule],
                 default_fuel: int = 100_000, default_window: int = 6):
        self.order = order
        self.rules = list(rules)
        self.default_fuel = default_fuel
        self.default_window = default_window
        self._nf_cache: Dict[Word, LinComb] = {}
        # rules indexed by the generator their first pattern letter accepts
        # ("T" for the derivation symbol); preserves rule-id order per bucket
        self._by_first: Dict[str, list] = {}
        for rule in self.rules:
            if isinstance(rule, DynamicLocalityRule):
                keys = {rule.x, rule.y}
            else:
                p = rule.lhs[0]
                keys = {"T"} if p.__class__ is str else {p[0]}
            for k in keys:
                self._by_first.setdefault(k, []).append(rule)

    def rules_starting_with(self, letter) -> list:
        key = "T" if letter.__class__ is str else letter[0]
        return self._by_first.get(key, ())

    def extended(self, new_rules: Iterable[Rule]) -> "RuleSystem":
        return RuleSystem(self.order, self.rules + list(new_rules),
                          self.default_fuel, self.default_window)

    def rule_names(self):
        return [r.name for r in self.rules]


# -- JSON ----------------------------------------------------------------------


def _letter_to_json(l: Letter):
    if is_t(l):
        return {"T": True}
    return {"g": l[0], "n": str(l[1])}


def _letter_from_json(d) -> Letter:
    if d.get("T"):
        return T
    return (d["g"], int(d["n"]))


def _pattern_to_json(p: Pattern):
    if is_t(p):
        return {"T": True}
    return {"g": p[0], "n": str(p[1])}


def _pattern_from_json(d) -> Pattern:
    if d.get("T"):
        return T
    return (d["g"], parse_affine(d["n"]))


def rules_to_json(sys: RuleSystem) -> dict:
    rules = []
    for r in sys.rules:
        if isinstance(r, DynamicLocalityRule):
            rules.append({"name": r.name,
                          "locality": {"x": r.x, "y": r.y, "N": r.N}})
            continue
        item = {
            "name": r.name,
            "lhs": [_pattern_to_json(p) for p in r.lhs],
            "guards": [str(g) for g in r.guards],
            "rhs": [
                {"coeff": str(t.coeff),
                 "word": [_pattern_to_json(p) for p in t.pats]}
                for t in r.rhs
            ],
            "kind": r.kind,
        }
        if r.tail:
            item["tail"] = (
                True if r.tail_alphabet is None
                else [_letter_to_json(l) for l in sorted(r.tail_alphabet)]
            )
        rules.append(item)
    order = []
    for g in sys.order.generators:
        item = {"name": g.name, "central": g.central}
        if g.torsion is not None:
            item["torsion"] = g.torsion
        if g.weight is not None:
            item["weight"] = format_scalar(g.weight)
        order.append(item)
    return {"rules": rules, "order": order,
            "fuel": sys.default_fuel, "window": sys.default_window}


def rules_from_json(doc: dict) -> RuleSystem:
    gens = []
    for r, item in enumerate(doc["order"]):
        w = item.get("weight")
        gens.append(Generator(
            item["name"], rank=r,
            weight=None if w is None else Fraction(w),
            central=bool(item.get("central", False)),
            torsion=item.get("torsion"),
        ))
    order = OrderSpec(gens)
    rules = []
    for item in doc["rules"]:
        if "locality" in item:
            loc = item["locality"]
            rules.append(DynamicLocalityRule(item["name"], loc["x"], loc["y"], loc["N"]))
            continue
        tail = item.get("tail", False)
        tail_alphabet = None
        if isinstance(tail, list):
            tail_alphabet = [_letter_from_json(d) for d in tail]
            tail = True
        rules.append(SchematicRule(
            item["name"],
            [_pattern_from_json(p) for p in item["lhs"]],
            [RhsTerm(parse_coeff(t["coeff"]),
                     [_pattern_from_json(p) for p in t["word"]])
             for t in item["rhs"]],
            guards=[parse_guard(g) for g in item.get("guards", [])],
            kind=item.get("kind", "algebra"),
            tail=tail,
            tail_alphabet=tail_alphabet,
        ))
    return RuleSystem(order, rules,
                      default_fuel=doc.get("fuel", 100_000),
                      default_window=doc.get("window", 6))

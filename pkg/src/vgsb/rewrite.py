"""Reduction to terminal form.

The strategy is fixed for reproducibility: inside a combination the largest
word is rewritten first; inside a word the leftmost match wins, ties broken
by lowest rule id.  Normal forms of single words are memoized on the rule
system (sound because the strategy makes one-step rewriting a function of
the word, so the terminal form of a combination is the coefficient-weighted
sum of its words' terminal forms).
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import FuelExhausted
from .rules import DynamicLocalityRule, RuleSystem, SchematicRule
from .terms import LinComb, Word


def find_redex(word: Word, sys: RuleSystem):
    """Leftmost position / lowest rule id redex, or None if terminal.

    Returns (position, replacement) where replacement is the list of
    (coefficient, full replacement Word) for the whole word.
    """
    letters = word.letters
    n = len(letters)
    for pos in range(n):
        for rule in sys.rules_starting_with(letters[pos]):
            if isinstance(rule, DynamicLocalityRule):
                if pos + 1 >= n:
                    continue
                repl = rule.match_pair(letters[pos], letters[pos + 1], sys.order)
                if repl is None:
                    continue
                prefix, suffix = letters[:pos], letters[pos + 2:]
                return pos, [
                    (c, Word(prefix + pair + suffix, word.module))
                    for c, pair in repl
                ]
            subst = rule.match(word, pos)
            if subst is None:
                continue
            if rule.kind == "module":
                tail = letters[pos + len(rule.lhs):]
                terms = rule.instantiate_rhs(subst, tail)
                prefix = letters[:pos]
                return pos, [
                    (c, Word(prefix + ls, word.module)) for c, ls in terms
                ]
            terms = rule.instantiate_rhs(subst)
            prefix, suffix = letters[:pos], letters[pos + len(rule.lhs):]
            return pos, [
                (c, Word(prefix + ls + suffix, word.module)) for c, ls in terms
            ]
    return None


def rewrite_step(c: LinComb, sys: RuleSystem) -> Optional[LinComb]:
    """One reduction step on the largest reducible word; None when terminal."""
    for w in sorted(c.terms, key=sys.order.word_key, reverse=True):
        hit = find_redex(w, sys)
        if hit is None:
            continue
        _, repl = hit
        coeff = c.terms[w]
        out = LinComb(dict(c.terms))
        del out.terms[w]
        delta = LinComb([(nw, coeff * rc) for rc, nw in repl])
        return out + delta
    return None


def normal_form(word: Word, sys: RuleSystem, budget: List[int]) -> LinComb:
    """Terminal form of a single word, memoized on the system."""
    memo = sys._nf_cache
    cached = memo.get(word)
    if cached is not None:
        return cached

    # Iterative post-order over the rewrite DAG.
    # Frame: [word, replacement list, next child index, accumulator dict]
    in_progress = set()
    stack: List[list] = []

    def push(w):
        hit = find_redex(w, sys)
        if hit is None:
            memo[w] = LinComb.from_word(w)
            return None
        if budget[0] <= 0:
            raise FuelExhausted("fuel exhausted", partial=LinComb.from_word(w))
        budget[0] -= 1
        in_progress.add(w)
        frame = [w, hit[1], 0, {}]
        stack.append(frame)
        return frame

    def credit(acc, nf_terms, coeff):
        for w2, c2 in nf_terms.items():
            v = acc.get(w2)
            v = c2 * coeff if v is None else v + c2 * coeff
            if v:
                acc[w2] = v
            else:
                acc.pop(w2, None)

    if push(word) is None:
        return memo[word]
    while stack:
        frame = stack[-1]
        w, repl, idx, acc = frame
        if idx == len(repl):
            stack.pop()
            in_progress.discard(w)
            nf = LinComb()
            nf.terms = acc
            memo[w] = nf
            if stack:
                parent = stack[-1]
                pc, _ = parent[1][parent[2]]
                credit(parent[3], acc, pc)
                parent[2] += 1
            continue
        child_coeff, child_word = repl[idx]
        cached = memo.get(child_word)
        if cached is not None:
            credit(acc, cached.terms, child_coeff)
            frame[2] = idx + 1
            continue
        if child_word in in_progress:
            raise FuelExhausted(
                "cyclic rewriting at %r" % (child_word,),
                partial=LinComb.from_word(child_word),
            )
        if push(child_word) is None:
            # terminal child, now in memo
            continue
    return memo[word]


def reduce(c: LinComb, sys: RuleSystem, fuel: Optional[int] = None) -> LinComb:
    """Terminal form of a combination; deterministic given the strategy."""
    if fuel is None:
        fuel = sys.default_fuel
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    budget = [fuel]
    acc = {}
    done = []
    for w, coeff in list(c.terms.items()):
        try:
            nf = normal_form(w, sys, budget)
        except FuelExhausted as e:
            partial = LinComb(dict(acc))
            for w2, c2 in c.terms.items():
                if w2 not in done and w2 != w:
                    partial = partial + LinComb.from_word(w2, c2)
            partial = partial + e.partial.scale(c.terms[w])
            raise FuelExhausted(str(e), partial=partial) from None
        for w2, c2 in nf.terms.items():
            v = acc.get(w2)
            v = c2 * coeff if v is None else v + c2 * coeff
            if v:
                acc[w2] = v
            else:
                acc.pop(w2, None)
        done.append(w)
    out = LinComb()
    out.terms = acc
    return out


def reduce_word(w: Word, sys: RuleSystem, fuel: Optional[int] = None) -> LinComb:
    return reduce(LinComb.from_word(w), sys, fuel)


def is_terminal(w: Word, sys: RuleSystem) -> bool:
    if w in sys._nf_cache:
        nf = sys._nf_cache[w]
        return len(nf) == 1 and nf.coeff(w) == Fraction(1)
    return find_redex(w, sys) is None


def reduce_random(c: LinComb, sys: RuleSystem, rng, fuel: int = 100_000) -> LinComb:
    """Reduce with a randomized strategy (for confluence testing only)."""
    current = c
    for _ in range(fuel):
        options = []
        for w in current.terms:
            letters = w.letters
            for pos in range(len(letters)):
                for rid, rule in enumerate(sys.rules):
                    if isinstance(rule, DynamicLocalityRule):
                        if pos + 1 >= len(letters):
                            continue
                        repl = rule.match_pair(letters[pos], letters[pos + 1], sys.order)
                        if repl is None:
                            continue
                        prefix, suffix = letters[:pos], letters[pos + 2:]
                        options.append((w, [
                            (rc, Word(prefix + pair + suffix, w.module))
                            for rc, pair in repl
                        ]))
                        continue
                    subst = rule.match(w, pos)
                    if subst is None:
                        continue
                    if rule.kind == "module":
                        tail = letters[pos + len(rule.lhs):]
                        terms = rule.instantiate_rhs(subst, tail)
                        prefix = letters[:pos]
                        options.append((w, [
                            (rc, Word(prefix + ls, w.module)) for rc, ls in terms
                        ]))
                    else:
                        terms = rule.instantiate_rhs(subst)
                        prefix, suffix = letters[:pos], letters[pos + len(rule.lhs):]
                        options.append((w, [
                            (rc, Word(prefix + ls + suffix, w.module))
                            for rc, ls in terms
                        ]))
        if not options:
            return current
        w, repl = options[rng.randrange(len(options))]
        coeff = current.terms[w]
        nxt = LinComb(dict(current.terms))
        del nxt.terms[w]
        current = nxt + LinComb([(nw, coeff * rc) for rc, nw in repl])
    raise FuelExhausted("randomized reduction exhausted fuel", partial=current)

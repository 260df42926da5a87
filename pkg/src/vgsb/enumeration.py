"""Graded bases: terminal-word enumeration and an independent rank oracle.

The enumeration lists terminal module words of a fixed weight (negative
modes only, as in every presented basis here).  The oracle never touches
the completed rule system: it spans candidate words of the target weight,
imposes instances of the defining relations only (vacuum, locality,
T-derivation closures of the module relations), and returns span size
minus rank over Q.  Agreement between the two is a genuine two-sided
check: the oracle can only overcount (missing relations), the enumeration
can only overcount (missing rules), so equality pins the dimension.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .errors import NotGraded, WindowTooSmall
from .presentations import VertexPresentation
from .rewrite import find_redex
from .rules import RuleSystem
from .terms import LinComb, OrderSpec, T, Word, apply_T_derivation, is_t, module_word


# -- partition helpers --------------------------------------------------------


def partition_count(n: int) -> int:
    if n < 0:
        return 0
    dp = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            dp[total] += dp[total - part]
    return dp[n]


def partition_count_min_part(n: int, min_part: int) -> int:
    if n < 0:
        return 0
    dp = [1] + [0] * n
    for part in range(min_part, n + 1):
        for total in range(part, n + 1):
            dp[total] += dp[total - part]
    return dp[n]


def odd_partition_count(n: int) -> int:
    if n < 0:
        return 0
    dp = [1] + [0] * n
    for part in range(1, n + 1, 2):
        for total in range(part, n + 1):
            dp[total] += dp[total - part]
    return dp[n]


def weyl_pair_count(weight: Fraction) -> int:
    """Pairs of partitions with parts in 1/2 + Z>=0 summing to the weight.

    Doubling weights turns each side into a partition with odd parts.
    """
    two_w = weight * 2
    if two_w.denominator != 1 or two_w < 0:
        return 0
    n = int(two_w)
    return sum(odd_partition_count(j) * odd_partition_count(n - j)
               for j in range(n + 1))


# -- terminal-word enumeration -------------------------------------------------


def enumerate_terminal_words(sys: RuleSystem, weight: Fraction, max_len: int,
                             min_mode: Optional[int] = None) -> List[Word]:
    """All terminal module words of the exact weight, negative modes only.

    Candidate letters carry nonnegative weight (modes below -1 only as far
    as the weight allows, or down to ``min_mode`` when given).  Every
    completed candidate is checked against the full rule system.
    """
    order = sys.order
    if not order.graded():
        raise NotGraded("presentation carries no weight grading")
    weight = Fraction(weight)
    letters = []
    for g in order.generators:
        n = -1
        while min_mode is None or n >= min_mode:
            l = (g.name, n)
            if order.torsion_killed(l):
                break
            wl = order.letter_weight(l)
            if wl > weight:
                break
            letters.append((l, wl))
            n -= 1
    letters.sort(key=lambda pair: order.letter_key(pair[0]))
    out = []

    def dfs(prefix, remaining):
        if remaining == 0:
            w = module_word(prefix)
            if find_redex(w, sys) is None:
                out.append(w)
            if not any(wl == 0 for _, wl in letters):
                return
        if len(prefix) >= max_len:
            return
        for l, wl in letters:
            if wl > remaining:
                continue
            # quick prune: an algebra redex in the prefix never goes away
            if prefix and _algebra_redex_at(prefix[-1], l, sys):
                continue
            dfs(prefix + [l], remaining - wl)

    dfs([], weight)
    seen = set()
    unique = []
    for w in out:
        if w not in seen:
            seen.add(w)
            unique.append(w)
    unique.sort(key=order.word_key)
    return unique


def _algebra_redex_at(l1, l2, sys: RuleSystem) -> bool:
    w = Word((l1, l2), False)
    from .rules import DynamicLocalityRule

    for rule in sys.rules_starting_with(l1):
        if isinstance(rule, DynamicLocalityRule):
            if rule.match_pair(l1, l2, sys.order) is not None:
                return True
            continue
        if rule.kind != "algebra" or len(rule.lhs) != 2:
            continue
        if rule.match(w, 0) is not None:
            return True
    return False


def enumerate_terminal_words_box(sys: RuleSystem, max_len: int,
                                 min_mode: int) -> List[Word]:
    """Terminal module words with modes in [min_mode, -1], length <= max_len."""
    order = sys.order
    letters = []
    for g in order.generators:
        for n in range(min_mode, 0):
            l = (g.name, n)
            if not order.torsion_killed(l):
                letters.append(l)
    letters.sort(key=order.letter_key)
    out = []

    def dfs(prefix):
        if prefix:
            w = module_word(prefix)
            if find_redex(w, sys) is None:
                out.append(w)
        if len(prefix) >= max_len:
            return
        for l in letters:
            if prefix and _algebra_redex_at(prefix[-1], l, sys):
                continue
            dfs(prefix + [l])

    if find_redex(module_word([]), sys) is None:
        out.append(module_word([]))
    dfs([])
    out.sort(key=order.word_key)
    return out


# -- sparse exact rank ----------------------------------------------------------


class SparseRank:
    """Incremental Gaussian elimination over Q on sparse rows."""

    def __init__(self):
        self.pivots: Dict[int, Dict[int, Fraction]] = {}
        self.rank = 0

    def add_row(self, row: Dict[int, Fraction]) -> bool:
        """Returns True when the row was independent."""
        row = {c: v for c, v in row.items() if v}
        while row:
            c = min(row)
            piv = self.pivots.get(c)
            if piv is None:
                inv = Fraction(1) / row[c]
                self.pivots[c] = {k: v * inv for k, v in row.items()}
                self.rank += 1
                return True
            factor = row[c]
            for k, v in piv.items():
                cur = row.get(k)
                nv = (cur if cur is not None else Fraction(0)) - factor * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return False


# -- the dimension oracle --------------------------------------------------------


def _t_normalize(rel: LinComb, order: OrderSpec) -> LinComb:
    """Eliminate T letters: u T v 1 = u (T acting on v 1) with T 1 = 0."""
    out = LinComb()
    pending = list(rel)
    while pending:
        w, c = pending.pop()
        ts = [i for i, l in enumerate(w.letters) if is_t(l)]
        if not ts:
            out = out + LinComb.from_word(w, c)
            continue
        i = ts[-1]
        tail_word = module_word(w.letters[i + 1:])
        acted = apply_T_derivation(tail_word, order)
        for w2, c2 in acted:
            pending.append((Word(w.letters[:i] + w2.letters, True), c * c2))
    return out


def dimension_oracle(p: VertexPresentation, weight: Fraction, window: int,
                     max_len: int, slack: Optional[Fraction] = None) -> int:
    """Independent graded dimension from the defining relations only.

    Builds the relation closure of the all-negative-mode words of the target
    weight: starting from those spanning words, every defining-relation
    instance (locality in context, prefixed T-derivation closures of the
    module relations) whose members stay inside the bounds joins its member
    words to the set and contributes a row.  The result is the dimension of
    the image of the spanning words in the row quotient: rank(rows + unit
    vectors) - rank(rows), so stray candidate words never inflate the count
    while a missing relation still shows up as an overcount.

    Words any of whose suffixes has negative weight are treated as zero;
    that is sound when every s-product carries nonnegative weight, so the
    positivity condition N(x,y) <= wt(x) + wt(y) is enforced.  Vacuum
    relations enter through the same classification (trailing nonnegative
    or torsion-dead letters).
    """
    order = p.order
    if not order.graded():
        raise NotGraded("dimension oracle needs a weight grading")
    for (x, y), n in p.locality.items():
        wx = order.generator(x).weight
        wy = order.generator(y).weight
        if wx < 0 or n > wx + wy:
            raise NotGraded(
                "oracle needs N(x,y) <= wt(x)+wt(y); fails on (%s, %s)" % (x, y))
    weight = Fraction(weight)
    if slack is None:
        slack = Fraction(max(p.locality.values()) + 1)
    wmax = weight + slack

    from .scalars import generalized_binomial

    def classify(letters_tuple):
        """'zero', 'escape', or the word itself as a valid candidate."""
        if not letters_tuple:
            return module_word(())
        if letters_tuple[-1][1] >= 0:
            return "zero"
        if len(letters_tuple) > max_len:
            return "escape"
        cum = Fraction(0)
        for l in reversed(letters_tuple):
            if order.torsion_killed(l):
                return "zero"
            if not (-window <= l[1] <= window):
                return "escape"
            cum += order.letter_weight(l)
            if cum < 0:
                return "zero"
            if cum > wmax:
                return "escape"
        return Word(tuple(letters_tuple), True)

    # seeds: all-negative-mode words of the exact weight
    seeds = []
    neg_letters = []
    for g in order.generators:
        n = -1
        while True:
            l = (g.name, n)
            if order.torsion_killed(l) or n < -window:
                break
            wl = order.letter_weight(l)
            if wl > weight:
                break
            neg_letters.append((l, wl))
            n -= 1
    neg_letters.sort(key=lambda pair: order.letter_key(pair[0]))
    has_zero_weight = any(wl == 0 for _, wl in neg_letters)

    def grow(prefix, remaining):
        if remaining == 0:
            seeds.append(module_word(prefix))
            if not has_zero_weight:
                return
        if len(prefix) >= max_len:
            return
        for l, wl in neg_letters:
            if wl <= remaining:
                grow(prefix + [l], remaining - wl)

    grow([], weight)
    seeds = sorted(set(seeds), key=order.word_key)

    # T-derivation closures of the module relations; a layer stays useful
    # while its own words fit the suffix-weight cap (prefixes may carry
    # negative weight, so the bound is wmax, not the target weight).
    rel_layers = []
    for rel in p.relations:
        rel = _t_normalize(rel, order)
        if rel.is_zero():
            continue
        wts = {order.word_weight(w) for w, _ in rel}
        base_w = wts.pop()
        layer = rel
        j = 0
        while base_w + j <= wmax:
            if not layer.is_zero():
                rel_layers.append(layer)
            layer = apply_T_derivation(layer, order)
            j += 1
    by_suffix: Dict[Tuple, List[LinComb]] = {}
    for layer in rel_layers:
        for m, _ in layer:
            by_suffix.setdefault(m.letters, []).append(layer)

    # relation-closure BFS from the seeds
    word_ids: Dict[Word, int] = {}
    queue: List[Word] = []

    def intern(w: Word) -> int:
        i = word_ids.get(w)
        if i is None:
            i = len(word_ids)
            word_ids[w] = i
            queue.append(w)
        return i

    for w in seeds:
        intern(w)

    rows: List[Dict[int, Fraction]] = []
    seen_instances = set()
    escapes = 0
    qi = 0
    while qi < len(queue):
        w = queue[qi]
        qi += 1
        ls = w.letters
        for i in range(len(ls) - 1):
            a, b = ls[i], ls[i + 1]
            ga, gb = a[0], b[0]
            N = p.locality[(ga, gb)]
            for s in range(N + 1):
                for (x, y, n0, m0) in (
                    (ga, gb, a[1] + s, b[1] - s),
                    (gb, ga, b[1] + s, a[1] - s),
                ):
                    key = (ls[:i], ls[i + 2:], x, y, n0, m0)
                    if key in seen_instances:
                        continue
                    seen_instances.add(key)
                    members = []
                    ok = True
                    for s2 in range(N + 1):
                        c2 = Fraction((-1) ** s2) * generalized_binomial(N, s2)
                        la = (x, n0 - s2)
                        lb = (y, m0 + s2)
                        for pair, coeff in (((la, lb), c2), ((lb, la), -c2)):
                            st = classify(ls[:i] + pair + ls[i + 2:])
                            if st == "zero":
                                continue
                            if st == "escape":
                                ok = False
                                break
                            members.append((st, coeff))
                        if not ok:
                            break
                    if not ok:
                        escapes += 1
                        continue
                    row: Dict[int, Fraction] = {}
                    for mw, coeff in members:
                        c = intern(mw)
                        cur = row.get(c)
                        cur = coeff if cur is None else cur + coeff
                        if cur:
                            row[c] = cur
                        else:
                            row.pop(c, None)
                    if row:
                        rows.append(row)
        for cut in range(len(ls) + 1):
            layers = by_suffix.get(ls[cut:])
            if not layers:
                continue
            prefix = ls[:cut]
            for layer in layers:
                key = (id(layer), prefix)
                if key in seen_instances:
                    continue
                seen_instances.add(key)
                members = []
                ok = True
                for m, coeff in layer:
                    member = prefix + m.letters
                    st = classify(member)
                    if st == "zero":
                        continue
                    if st == "escape":
                        if any(l[1] < -window for l in member):
                            raise WindowTooSmall(
                                "relation instance escapes the mode window")
                        ok = False
                        break
                    members.append((st, coeff))
                if not ok:
                    escapes += 1
                    continue
                row = {}
                for mw, coeff in members:
                    c = intern(mw)
                    cur = row.get(c)
                    cur = coeff if cur is None else cur + coeff
                    if cur:
                        row[c] = cur
                    else:
                        row.pop(c, None)
                if row:
                    rows.append(row)

    rank = SparseRank()
    for row in rows:
        rank.add_row(row)
    dim = 0
    for w in seeds:
        if rank.add_row({word_ids[w]: Fraction(1)}):
            dim += 1
    return dim

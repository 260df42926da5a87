"""Letters, words, the word order, and exact linear combinations.

A letter is either the derivation symbol ``T`` (represented by the string
"T") or a mode ``(generator_name, index)``.  A word is a finite sequence of
letters; module words end at the implicit vacuum marker and never have
letters to its right.  The empty module word is the vacuum itself.

The word order is length-first, then left-to-right letter comparison with
T greatest, central letters above ordinary ones in the order
e(-1) < e(0) < e(1) < ... < e(-2) < e(-3) < ..., and ordinary letters
compared by (index, generator rank).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Tuple, Union

from .scalars import Scalar, format_scalar, is_zero

T = "T"

Letter = Union[str, Tuple[str, int]]


def is_t(letter) -> bool:
    return letter == T


def mode(gen: str, n: int) -> Letter:
    return (gen, n)


@dataclass(frozen=True)
class Generator:
    name: str
    rank: int
    weight: Optional[Fraction] = None
    central: bool = False
    torsion: Optional[int] = None  # smallest d with T^d g = 0; None = torsion-free

    def __post_init__(self):
        if self.torsion is not None and not self.central:
            raise ValueError("torsion degree only allowed on central generators")


class Word(NamedTuple):
    letters: Tuple[Letter, ...]
    module: bool

    def __repr__(self):
        return word_str(self)


VACUUM = Word((), True)
EMPTY = Word((), False)


def module_word(letters: Iterable[Letter]) -> Word:
    return Word(tuple(letters), True)


def alg_word(letters: Iterable[Letter]) -> Word:
    return Word(tuple(letters), False)


def letter_str(letter) -> str:
    if is_t(letter):
        return "T"
    return "%s(%d)" % letter


def word_str(w: Word) -> str:
    parts = [letter_str(l) for l in w.letters]
    if w.module:
        parts.append("1")
    return " ".join(parts) if parts else ("1" if w.module else "<empty>")


def _central_mode_key(n: int):
    # e(-1) < e(0) < e(1) < ... < e(-2) < e(-3) < ...
    if n == -1:
        return (0, 0)
    if n >= 0:
        return (1, n)
    return (2, -n)


class OrderSpec:
    """Generator table: ranks, weights, centrality, torsion; letter order."""

    def __init__(self, generators: Iterable[Generator]):
        self.generators = tuple(generators)
        self.by_name = {}
        for g in self.generators:
            if g.name in self.by_name:
                raise ValueError("duplicate generator %r" % g.name)
            self.by_name[g.name] = g
        self._letter_key_cache = {}

    def generator(self, name) -> Generator:
        return self.by_name[name]

    def letter_key(self, letter):
        key = self._letter_key_cache.get(letter)
        if key is None:
            if is_t(letter):
                key = (3,)
            else:
                gen, n = letter
                g = self.by_name[gen]
                if g.central:
                    key = (2,) + _central_mode_key(n) + (g.rank,)
                else:
                    key = (1, n, g.rank)
            self._letter_key_cache[letter] = key
        return key

    def word_key(self, w: Word):
        return (len(w.letters), tuple(self.letter_key(l) for l in w.letters))

    def compare_words(self, w1: Word, w2: Word) -> int:
        """-1, 0 or 1.  Total order: length first, then leftmost letter."""
        k1, k2 = self.word_key(w1), self.word_key(w2)
        if k1 < k2:
            return -1
        if k1 > k2:
            return 1
        return 0

    # -- weights ---------------------------------------------------------

    def graded(self) -> bool:
        return all(g.weight is not None for g in self.generators)

    def letter_weight(self, letter) -> Fraction:
        if is_t(letter):
            return Fraction(1)
        gen, n = letter
        delta = self.by_name[gen].weight
        if delta is None:
            raise ValueError("generator %r has no weight" % gen)
        return delta - n - 1

    def word_weight(self, w: Word) -> Fraction:
        total = Fraction(0)
        for l in w.letters:
            total += self.letter_weight(l)
        return total

    # -- torsion ---------------------------------------------------------

    def torsion_killed(self, letter) -> bool:
        """True when the letter lies beyond its generator's torsion modes.

        A central generator with T^d g = 0 has g(n) = 0 as a coefficient
        operator unless n lies in {-1, ..., -d} or n >= 0 (the latter are
        killed by vacuum rules instead, so only negative overruns count).
        """
        if is_t(letter):
            return False
        gen, n = letter
        g = self.by_name[gen]
        return g.torsion is not None and n < -g.torsion


class LinComb:
    """Finitely supported map Word -> Scalar, zero coefficients dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for w, c in (terms.items() if isinstance(terms, dict) else terms):
                if is_zero(c):
                    continue
                acc = d.get(w)
                if acc is None:
                    d[w] = c
                else:
                    acc = acc + c
                    if is_zero(acc):
                        del d[w]
                    else:
                        d[w] = acc
        self.terms = d

    @classmethod
    def from_word(cls, w: Word, coeff: Scalar = Fraction(1)):
        lc = cls()
        if not is_zero(coeff):
            lc.terms[w] = coeff
        return lc

    @classmethod
    def zero(cls):
        return cls()

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coeff(self, w: Word) -> Scalar:
        return self.terms.get(w, Fraction(0))

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            acc = out.get(w)
            if acc is None:
                out[w] = c
            else:
                acc = acc + c
                if is_zero(acc):
                    del out[w]
                else:
                    out[w] = acc
        lc = LinComb()
        lc.terms = out
        return lc

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def __neg__(self):
        return self.scale(Fraction(-1))

    def scale(self, c: Scalar):
        lc = LinComb()
        if not is_zero(c):
            for w, a in self.terms.items():
                v = a * c
                if not is_zero(v):
                    lc.terms[w] = v
        return lc

    def __eq__(self, other):
        if not isinstance(other, LinComb):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def map_words(self, f):
        """Apply a word->LinComb map linearly."""
        out = LinComb()
        for w, c in self.terms.items():
            out = out + f(w).scale(c)
        return out

    def words_sorted(self, order: OrderSpec = None):
        if order is None:
            return sorted(self.terms, key=_default_word_key)
        return sorted(self.terms, key=order.word_key)

    def leading_word(self, order: OrderSpec):
        """The order-largest word, or None for zero."""
        if not self.terms:
            return None
        return max(self.terms, key=order.word_key)

    def __repr__(self):
        return lincomb_str(self)


def _default_letter_key(letter):
    if is_t(letter):
        return (1, "", 0)
    return (0, letter[0], letter[1])


def _default_word_key(w: Word):
    return (len(w.letters), tuple(_default_letter_key(l) for l in w.letters), w.module)


def lincomb_str(lc: LinComb, order: OrderSpec = None) -> str:
    if lc.is_zero():
        return "0"
    words = lc.words_sorted(order)
    if order is not None:
        words = list(reversed(words))
    parts = []
    for w in words:
        c = lc.terms[w]
        cs = format_scalar(c)
        ws = word_str(w)
        if cs == "1":
            parts.append("+ " + ws)
        elif cs == "-1":
            parts.append("- " + ws)
        elif cs.startswith("-") and "+" not in cs and "*" not in cs[1:]:
            parts.append("- " + cs[1:] + " " + ws)
        else:
            parts.append("+ (" + cs + ") " + ws)
    out = " ".join(parts)
    if out.startswith("+ "):
        out = out[2:]
    return out


def apply_T_derivation(arg, order: OrderSpec) -> LinComb:
    """[T, w] on T-free module words: sum of mode-lowering actions.

    Each position with letter z(n) contributes -n times the word with z(n)
    replaced by z(n-1).  T applied to the vacuum is zero.  Torsion is applied
    eagerly: replacements whose letter falls beyond the generator's torsion
    modes are dropped.
    """
    if isinstance(arg, Word):
        arg = LinComb.from_word(arg)
    out = LinComb()
    for w, c in arg:
        for l in w.letters:
            if is_t(l):
                raise ValueError("input contains T: %s" % word_str(w))
        for i, l in enumerate(w.letters):
            gen, n = l
            coeff = c * Fraction(-n)
            if is_zero(coeff):
                continue
            repl = (gen, n - 1)
            if order.torsion_killed(repl):
                continue
            nw = Word(w.letters[:i] + (repl,) + w.letters[i + 1:], w.module)
            out = out + LinComb.from_word(nw, coeff)
    return out

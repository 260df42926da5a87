"""Exact scalar arithmetic.

Every coefficient in the engine is either a ``fractions.Fraction`` or a
:class:`ParamPoly`, a polynomial in one formal parameter with Fraction
coefficients.  No floating point anywhere.  ParamPoly exists for the two
places a formal parameter enters linearly: a symbolic central charge in a
bracket table and the gamma parameter of structure-constant families.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction, "ParamPoly"]

ZERO = Fraction(0)
ONE = Fraction(1)


def generalized_binomial(n: int, s: int) -> Fraction:
    """Binomial coefficient n over s, extended to negative n.

    Equals n(n-1)...(n-s+1)/s!; for n >= s >= 0 this is the standard
    binomial.  The result is always an integer, returned as a Fraction.
    """
    if s < 0:
        raise ValueError("lower index must be nonnegative")
    num = 1
    for i in range(s):
        num *= n - i
    den = 1
    for i in range(2, s + 1):
        den *= i
    return Fraction(num, den)


class ParamPoly:
    """Polynomial in one named parameter over Q.

    Instances are normalized: a would-be constant is returned as a plain
    Fraction by :func:`param_poly`, so a live ParamPoly always has degree
    at least 1.  Immutable.
    """

    __slots__ = ("name", "coeffs")

    def __init__(self, name, coeffs):
        self.name = name
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def degree(self):
        return len(self.coeffs) - 1

    def constant_part(self):
        return self.coeffs[0] if self.coeffs else ZERO

    def _coerce(self, other):
        if isinstance(other, ParamPoly):
            if other.name != self.name:
                raise ValueError(
                    "mixed parameters %r and %r" % (self.name, other.name)
                )
            return other.coeffs
        if isinstance(other, (int, Fraction)):
            return (Fraction(other),)
        return None

    def __add__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        n = max(len(self.coeffs), len(oc))
        out = [ZERO] * n
        for i, c in enumerate(self.coeffs):
            out[i] += c
        for i, c in enumerate(oc):
            out[i] += c
        return param_poly(self.name, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.name, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return self + ParamPoly(self.name, tuple(-c for c in oc))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        out = [ZERO] * (len(self.coeffs) + len(oc) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(oc):
                if b:
                    out[i + j] += a * b
        return param_poly(self.name, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return ParamPoly(self.name, tuple(c / other for c in self.coeffs))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.name == other.name and _trim(self.coeffs) == _trim(other.coeffs)
        if isinstance(other, (int, Fraction)):
            t = _trim(self.coeffs)
            return len(t) <= 1 and (t[0] if t else ZERO) == other
        return NotImplemented

    def __hash__(self):
        t = _trim(self.coeffs)
        if len(t) <= 1:
            return hash(t[0] if t else ZERO)
        return hash((self.name, t))

    def __repr__(self):
        return "ParamPoly(%r, %r)" % (self.name, self.coeffs)

    def __str__(self):
        return format_scalar(self)

    def subs(self, value):
        """Evaluate at a concrete rational value of the parameter."""
        value = Fraction(value)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc


def _trim(coeffs):
    n = len(coeffs)
    while n > 0 and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


def param_poly(name, coeffs):
    """Normalizing constructor: constants collapse to Fraction."""
    t = _trim(tuple(Fraction(c) for c in coeffs))
    if not t:
        return ZERO
    if len(t) == 1:
        return t[0]
    return ParamPoly(name, t)


def parameter(name="g"):
    """The parameter itself as a scalar."""
    return ParamPoly(name, (ZERO, ONE))


def is_zero(c: Scalar) -> bool:
    return not c


def format_scalar(c: Scalar) -> str:
    """Canonical rendering: "p/q" for rationals, "a+b*g" style for polys."""
    if isinstance(c, int):
        c = Fraction(c)
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return "%d/%d" % (c.numerator, c.denominator)
    parts = []
    for k, a in enumerate(c.coeffs):
        if not a:
            continue
        mag = format_scalar(abs(a))
        if k == 0:
            term = mag
        elif k == 1:
            term = "%s*%s" % (mag, c.name)
        else:
            term = "%s*%s^%d" % (mag, c.name, k)
        sign = "-" if a < 0 else "+"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first_term = parts[0]
    out = ("-" if first_sign == "-" else "") + first_term
    for sign, term in parts[1:]:
        out += sign + term
    return out


def parse_scalar(text, param_name="g"):
    """Parse "p/q" or a polynomial like "1-g", "2*g^2+1/3"."""
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty scalar")
    # split into signed terms
    terms = []
    i = 0
    start = 0
    depth = 0
    while i < len(text):
        ch = text[i]
        if ch in "+-" and i > start and text[i - 1] not in "+-*/^":
            terms.append(text[start:i])
            start = i
        i += 1
    terms.append(text[start:])
    coeffs = {}
    for term in terms:
        sign = ONE
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError("malformed scalar term")
        power = 0
        coeff = ONE
        for factor in term.split("*"):
            if not factor:
                raise ValueError("malformed scalar %r" % text)
            if factor.startswith(param_name):
                rest = factor[len(param_name):]
                if rest == "":
                    power += 1
                elif rest.startswith("^"):
                    power += int(rest[1:])
                else:
                    raise ValueError("bad factor %r" % factor)
            else:
                coeff *= Fraction(factor)
        coeffs[power] = coeffs.get(power, ZERO) + sign * coeff
    top = max(coeffs)
    return param_poly(param_name, [coeffs.get(k, ZERO) for k in range(top + 1)])

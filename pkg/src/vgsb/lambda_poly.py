"""Two-variable polynomials in the divided-power basis.

A LambdaPoly is a finitely supported map (i, j) -> coefficient representing
sum_{i,j} lambda^i/i! mu^j/j! (x) c_ij.  In this basis the coefficient at
lambda^n/n! is literally the n-th product, and (lambda+mu)^s/s! expands with
unit coefficients, which keeps every operator here a small exact shuffle.

Coefficients are any vector-like values exposing __add__, scale(s) and
is_zero(); both TPoly (conformal side) and LinComb (module side) qualify.
Operators that need T acting on coefficients take a ``t_op`` callable.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import generalized_binomial


class LambdaPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        d = {}
        if coeffs:
            for key, v in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                if v.is_zero():
                    continue
                cur = d.get(key)
                if cur is None:
                    d[key] = v
                else:
                    cur = cur + v
                    if cur.is_zero():
                        del d[key]
                    else:
                        d[key] = cur
        self.coeffs = d

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, v):
        lp = cls()
        if not v.is_zero():
            lp.coeffs[(0, 0)] = v
        return lp

    @classmethod
    def term(cls, i, j, v):
        lp = cls()
        if not v.is_zero():
            lp.coeffs[(i, j)] = v
        return lp

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for key, v in other.coeffs.items():
            cur = out.get(key)
            if cur is None:
                out[key] = v
            else:
                cur = cur + v
                if cur.is_zero():
                    del out[key]
                else:
                    out[key] = cur
        lp = LambdaPoly()
        lp.coeffs = out
        return lp

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def __neg__(self):
        return self.scale(Fraction(-1))

    def scale(self, s):
        lp = LambdaPoly()
        for key, v in self.coeffs.items():
            nv = v.scale(s)
            if not nv.is_zero():
                lp.coeffs[key] = nv
        return lp

    def __eq__(self, other):
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def apply_coeff(self, f):
        """Map every coefficient through f (a linear coefficient operator)."""
        lp = LambdaPoly()
        for key, v in self.coeffs.items():
            nv = f(v)
            if not nv.is_zero():
                cur = lp.coeffs.get(key)
                lp.coeffs[key] = nv if cur is None else cur + nv
        return lp

    def lambda_degree(self):
        return max((i for (i, _) in self.coeffs), default=-1)

    def mu_degree(self):
        return max((j for (_, j) in self.coeffs), default=-1)

    def coeff(self, i, j=0):
        return self.coeffs.get((i, j))

    def mul_lambda_divpow(self, a):
        """Multiply by lambda^a/a!."""
        if a == 0:
            return self
        lp = LambdaPoly()
        for (i, j), v in self.coeffs.items():
            lp.coeffs[(i + a, j)] = v.scale(generalized_binomial(i + a, a))
        return lp

    def mul_mu_divpow(self, b):
        if b == 0:
            return self
        lp = LambdaPoly()
        for (i, j), v in self.coeffs.items():
            lp.coeffs[(i, j + b)] = v.scale(generalized_binomial(j + b, b))
        return lp

    def mul_lambda(self):
        """Multiply by plain lambda: (i,j) -> (i+1,j) with factor i+1."""
        lp = LambdaPoly()
        for (i, j), v in self.coeffs.items():
            lp.coeffs[(i + 1, j)] = v.scale(Fraction(i + 1))
        return lp

    def mul_t_plus_lambda(self, t_op):
        """Multiply by (T + lambda), T acting on coefficients from the left."""
        return self.apply_coeff(t_op) + self.mul_lambda()

    def expand_lambda_to_sum(self):
        """Substitute lambda := lambda + mu.

        In divided powers nu^s/s! = sum_{a+b=s} lambda^a/a! mu^b/b! with unit
        coefficients, so each (s, 0) term fans out unchanged.  Requires
        mu-degree 0.
        """
        lp = LambdaPoly()
        for (s, j), v in self.coeffs.items():
            if j != 0:
                raise ValueError("input already involves mu")
            for a in range(s + 1):
                key = (a, s - a)
                cur = lp.coeffs.get(key)
                lp.coeffs[key] = v if cur is None else cur + v
        return lp

    def swap_variables(self):
        lp = LambdaPoly()
        for (i, j), v in self.coeffs.items():
            lp.coeffs[(j, i)] = v
        return lp


def integrate_minus_t_to_zero(p: LambdaPoly, t_op, zero):
    """Integrate d(lambda) from -T to 0.

    Each lambda^n/n! term contributes (-1)^n T^(n+1)/(n+1)! applied to its
    coefficient; the result is lambda-free.  Requires mu-degree 0.
    """
    if p.mu_degree() > 0:
        raise ValueError("integrand involves mu")
    out = zero
    for (n, _), v in p.coeffs.items():
        acc = v
        for _ in range(n + 1):
            acc = t_op(acc)
        out = out + acc.scale(Fraction((-1) ** n, _factorial(n + 1)))
    return out


def integrate_zero_to_lambda(p: LambdaPoly) -> LambdaPoly:
    """Integrate d(mu) from 0 to lambda, eliminating mu.

    lambda^i/i! mu^j/j! integrates to binom(i+j+1, i) lambda^(i+j+1)/(i+j+1)!.
    """
    lp = LambdaPoly()
    for (i, j), v in p.coeffs.items():
        n = i + j + 1
        nv = v.scale(generalized_binomial(n, i))
        key = (n, 0)
        cur = lp.coeffs.get(key)
        s = nv if cur is None else cur + nv
        if s.is_zero():
            lp.coeffs.pop(key, None)
        else:
            lp.coeffs[key] = s
    return lp


def substitute_skew(p: LambdaPoly, t_op) -> LambdaPoly:
    """Substitute lambda := -lambda - T, T acting on coefficients.

    In divided powers the lambda^j/j! coefficient of the result is
    sum_{i>=j} (-1)^i T^(i-j)/(i-j)! c_i.  Applying twice is the identity.
    Requires mu-degree 0.
    """
    if p.mu_degree() > 0:
        raise ValueError("input involves mu")
    lp = LambdaPoly()
    for (i, _), v in p.coeffs.items():
        acc = v
        for k in range(i + 1):
            j = i - k
            contrib = acc.scale(Fraction((-1) ** i, _factorial(k)))
            if not contrib.is_zero():
                key = (j, 0)
                cur = lp.coeffs.get(key)
                s = contrib if cur is None else cur + contrib
                if s.is_zero():
                    lp.coeffs.pop(key, None)
                else:
                    lp.coeffs[key] = s
            acc = t_op(acc)
            if acc.is_zero():
                break
    return lp


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out

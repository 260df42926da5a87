"""Lie conformal algebras with finitely many generators.

A conformal algebra is stored as a bracket table: for every ordered pair of
generators, a LambdaPoly (divided-power basis) whose coefficients are
TPoly values, i.e. spans of T^k g with k below the generator's torsion
degree.  Central extensions add central generators with T-torsion and a
cocycle; validity is checked a posteriori through the axiom suite.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import AxiomViolation, NovikovViolation
from .lambda_poly import LambdaPoly, substitute_skew
from .scalars import Scalar, format_scalar, is_zero, parse_scalar
from .terms import Generator, OrderSpec


class TPoly:
    """Finitely supported map (k, generator) -> Scalar: sum c * T^k g."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for key, c in (terms.items() if isinstance(terms, dict) else terms):
                if is_zero(c):
                    continue
                cur = d.get(key)
                if cur is None:
                    d[key] = c
                else:
                    cur = cur + c
                    if is_zero(cur):
                        del d[key]
                    else:
                        d[key] = cur
        self.terms = d

    @classmethod
    def gen(cls, name, coeff: Scalar = Fraction(1)):
        return cls({(0, name): coeff})

    @classmethod
    def zero(cls):
        return cls()

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            cur = out.get(key)
            if cur is None:
                out[key] = c
            else:
                cur = cur + c
                if is_zero(cur):
                    del out[key]
                else:
                    out[key] = cur
        tp = TPoly()
        tp.terms = out
        return tp

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def scale(self, c: Scalar):
        tp = TPoly()
        if not is_zero(c):
            for key, a in self.terms.items():
                v = a * c
                if not is_zero(v):
                    tp.terms[key] = v
        return tp

    def __eq__(self, other):
        if not isinstance(other, TPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, g), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            head = "T^%d %s" % (k, g) if k > 1 else ("T %s" % g if k == 1 else g)
            parts.append("(%s) %s" % (format_scalar(c), head))
        return " + ".join(parts)


class ConformalAlgebra:
    def __init__(self, order: OrderSpec, table: Dict[Tuple[str, str], LambdaPoly]):
        self.order = order
        self.table = {}
        names = [g.name for g in order.generators]
        for x in names:
            for y in names:
                self.table[(x, y)] = table.get((x, y), LambdaPoly.zero())
        self._validate_torsion()

    # -- torsion-aware T action on TPoly ---------------------------------

    def t_op(self, v: TPoly) -> TPoly:
        out = TPoly()
        for (k, g), c in v.terms.items():
            tg = self.order.generator(g).torsion
            if tg is not None and k + 1 >= tg:
                continue
            key = (k + 1, g)
            cur = out.terms.get(key)
            if cur is None:
                out.terms[key] = c
            else:
                cur = cur + c
                if is_zero(cur):
                    del out.terms[key]
                else:
                    out.terms[key] = cur
        return out

    def _validate_torsion(self):
        for g in self.order.generators:
            if g.torsion is None:
                continue
            for y in self.order.generators:
                if not self.table[(g.name, y.name)].is_zero():
                    raise AxiomViolation(
                        "torsion generator %s has a nonzero bracket row" % g.name
                    )
                p = self.table[(y.name, g.name)]
                for _ in range(g.torsion):
                    p = p.mul_t_plus_lambda(self.t_op)
                if not p.is_zero():
                    raise AxiomViolation(
                        "bracket (%s, %s) inconsistent with T^%d %s = 0"
                        % (y.name, g.name, g.torsion, g.name)
                    )

    # -- brackets ---------------------------------------------------------

    def bracket_gen(self, x: str, y: str) -> LambdaPoly:
        return self.table[(x, y)]

    def _bracket_gen_tpoly(self, x: str, c: TPoly) -> LambdaPoly:
        """(x olambda T^k z) = (T+lambda)^k (x olambda z), extended linearly."""
        out = LambdaPoly.zero()
        for (k, z), a in c.terms.items():
            p = self.table[(x, z)]
            for _ in range(k):
                p = p.mul_t_plus_lambda(self.t_op)
            out = out + p.scale(a)
        return out

    def lambda_bracket(self, a, b) -> LambdaPoly:
        """Sesquilinear extension of the table to T-polynomial arguments."""
        a = self._as_tpoly(a)
        b = self._as_tpoly(b)
        out = LambdaPoly.zero()
        for (j, x), ca in a.terms.items():
            p = self._bracket_gen_tpoly(x, b)
            # (T^j x olambda -) = (-lambda)^j (x olambda -)
            for _ in range(j):
                p = p.mul_lambda()
            if j % 2:
                p = p.scale(Fraction(-1))
            out = out + p.scale(ca)
        return out

    def _as_tpoly(self, a) -> TPoly:
        if isinstance(a, TPoly):
            return a
        if isinstance(a, str):
            return TPoly.gen(a)
        raise TypeError("expected generator name or TPoly")

    def nth_product(self, a, b, n: int) -> TPoly:
        p = self.lambda_bracket(a, b)
        v = p.coeff(n, 0)
        return v if v is not None else TPoly.zero()

    def locality(self, x, y) -> int:
        p = self.lambda_bracket(x, y)
        if p.is_zero():
            return 0
        return p.lambda_degree() + 1

    # -- axioms -----------------------------------------------------------

    def check_axioms(self) -> List[str]:
        """Skew symmetry on all pairs, Jacobi on all triples; [] if clean."""
        report = []
        names = [g.name for g in self.order.generators]
        for x in names:
            for y in names:
                lhs = self.table[(x, y)] + substitute_skew(self.table[(y, x)], self.t_op)
                if not lhs.is_zero():
                    report.append("skew symmetry fails on (%s, %s)" % (x, y))
        for x in names:
            for y in names:
                for z in names:
                    if not self._jacobi_holds(x, y, z):
                        report.append("Jacobi fails on (%s, %s, %s)" % (x, y, z))
        return report

    def _jacobi_holds(self, x, y, z) -> bool:
        # (x olambda (y omu z))
        lhs1 = LambdaPoly.zero()
        byz = self.table[(y, z)]
        for (jj, _), c in byz.coeffs.items():
            lhs1 = lhs1 + self._bracket_gen_tpoly(x, c).mul_mu_divpow(jj)
        # (y omu (x olambda z)): compute in lambda, swap to mu, reattach lambda power
        lhs2 = LambdaPoly.zero()
        bxz = self.table[(x, z)]
        for (ii, _), c in bxz.coeffs.items():
            q = self._bracket_gen_tpoly(y, c).swap_variables()
            lhs2 = lhs2 + q.mul_lambda_divpow(ii)
        # ((x olambda y) o(lambda+mu) z)
        rhs = LambdaPoly.zero()
        bxy = self.table[(x, y)]
        for (ii, _), c in bxy.coeffs.items():
            for (k, w), a in c.terms.items():
                p = self.table[(w, z)]
                for _ in range(k):
                    p = p.mul_lambda()
                if k % 2:
                    p = p.scale(Fraction(-1))
                rhs = rhs + p.scale(a).expand_lambda_to_sum().mul_lambda_divpow(ii)
        return (lhs1 - lhs2 - rhs).is_zero()


# -- Novikov algebras ------------------------------------------------------


class NovikovAlgebra:
    """Finite-dimensional algebra given by structure constants.

    mult[i][j] is the coefficient vector of e_i o e_j in the basis.
    """

    def __init__(self, basis: Iterable[str], mult):
        self.basis = list(basis)
        d = len(self.basis)
        self.mult = [[[_scalarize(c) for c in mult[i][j]] for j in range(d)] for i in range(d)]

    @property
    def dim(self):
        return len(self.basis)

    def product(self, u, v):
        """Vectors in, vector out."""
        d = self.dim
        out = [Fraction(0)] * d
        for i in range(d):
            if is_zero(u[i]):
                continue
            for j in range(d):
                if is_zero(v[j]):
                    continue
                uv = u[i] * v[j]
                for k in range(d):
                    c = self.mult[i][j][k]
                    if not is_zero(c):
                        out[k] = out[k] + uv * c
        return out

    def basis_vector(self, i):
        return [Fraction(1) if k == i else Fraction(0) for k in range(self.dim)]


def _scalarize(c):
    if isinstance(c, str):
        return parse_scalar(c)
    if isinstance(c, int):
        return Fraction(c)
    return c


def check_novikov(V: NovikovAlgebra) -> List[Tuple[int, int, int]]:
    """Both Novikov identities on all basis triples; violated triples back."""
    bad = []
    d = V.dim
    for i in range(d):
        u = V.basis_vector(i)
        for j in range(d):
            v = V.basis_vector(j)
            for k in range(d):
                w = V.basis_vector(k)
                uv_w = V.product(V.product(u, v), w)
                u_vw = V.product(u, V.product(v, w))
                vu_w = V.product(V.product(v, u), w)
                v_uw = V.product(v, V.product(u, w))
                left_sym = [uv_w[t] - u_vw[t] - vu_w[t] + v_uw[t] for t in range(d)]
                uw_v = V.product(V.product(u, w), v)
                right_comm = [uv_w[t] - uw_v[t] for t in range(d)]
                if any(not is_zero(c) for c in left_sym) or any(
                    not is_zero(c) for c in right_comm
                ):
                    bad.append((i, j, k))
    return bad


def quadratic_conformal(V: NovikovAlgebra, weights=None) -> ConformalAlgebra:
    """Conformal algebra on k[T] (x) V with
    (u olambda v) = T (v o u) + lambda (u o v + v o u)."""
    if check_novikov(V):
        raise NovikovViolation("input fails the Novikov identities")
    gens = []
    for r, name in enumerate(V.basis):
        w = None if weights is None else weights.get(name)
        gens.append(Generator(name, rank=r, weight=w))
    order = OrderSpec(gens)
    table = {}
    d = V.dim
    for i, x in enumerate(V.basis):
        for j, y in enumerate(V.basis):
            vu = V.mult[j][i]
            uv = V.mult[i][j]
            c0 = TPoly({(1, V.basis[k]): vu[k] for k in range(d)})
            c1 = TPoly({(0, V.basis[k]): uv[k] + vu[k] for k in range(d)})
            table[(x, y)] = LambdaPoly.term(0, 0, c0) + LambdaPoly.term(1, 0, c1)
    return ConformalAlgebra(order, table)


# -- central extensions ----------------------------------------------------


class CentralExtensionSpec:
    """Base algebra, one new central generator, and a cocycle table.

    The cocycle maps an ordered generator pair to {lambda_power: Scalar} in
    the divided-power basis: entry n is the coefficient of lambda^n/n!.
    """

    def __init__(self, base: ConformalAlgebra, central_name: str, torsion: int,
                 cocycle: Dict[Tuple[str, str], Dict[int, Scalar]],
                 central_weight: Optional[Fraction] = None):
        self.base = base
        self.central_name = central_name
        self.torsion = torsion
        self.cocycle = cocycle
        self.central_weight = central_weight


def build_central_extension(spec: CentralExtensionSpec) -> ConformalAlgebra:
    base = spec.base
    gens = list(base.order.generators)
    rank = max((g.rank for g in gens), default=-1) + 1
    e = Generator(spec.central_name, rank=rank, weight=spec.central_weight,
                  central=True, torsion=spec.torsion)
    order = OrderSpec(gens + [e])
    table = {}
    for (x, y), p in base.table.items():
        table[(x, y)] = LambdaPoly(dict(p.coeffs))
    for (x, y), phi in spec.cocycle.items():
        add = LambdaPoly({(n, 0): TPoly.gen(spec.central_name, c)
                          for n, c in phi.items() if not is_zero(c)})
        table[(x, y)] = table.get((x, y), LambdaPoly.zero()) + add
    ext = ConformalAlgebra(order, table)
    report = ext.check_axioms()
    if report:
        raise AxiomViolation("central extension fails axioms", report=report)
    return ext


# -- built-ins --------------------------------------------------------------


def novikov_virasoro() -> NovikovAlgebra:
    return NovikovAlgebra(["v"], [[[Fraction(1)]]])


def novikov_schrodinger_virasoro() -> NovikovAlgebra:
    # v o v = v, v o u = u/2, u o v = u, u o u = w, w o v = w, rest zero
    names = ["v", "u", "w"]
    z = Fraction(0)
    m = [[[z] * 3 for _ in range(3)] for _ in range(3)]
    m[0][0][0] = Fraction(1)
    m[0][1][1] = Fraction(1, 2)
    m[1][0][1] = Fraction(1)
    m[1][1][2] = Fraction(1)
    m[2][0][2] = Fraction(1)
    return NovikovAlgebra(names, m)


def virasoro() -> ConformalAlgebra:
    return quadratic_conformal(novikov_virasoro(), weights={"v": Fraction(2)})


def virasoro_c(c: Scalar) -> ConformalAlgebra:
    """Virasoro with central charge: (v olambda v) = (T+2lambda)v + c/12 lambda^3 e.

    In divided powers the lambda^3 cocycle coefficient is c/2.
    """
    spec = CentralExtensionSpec(
        base=virasoro(), central_name="e", torsion=1,
        cocycle={("v", "v"): {3: _scalarize(c) * Fraction(1, 2)}},
        central_weight=Fraction(0),
    )
    return build_central_extension(spec)


def abelian_conformal(k: int, weight=Fraction(1)) -> ConformalAlgebra:
    names = ["v"] if k == 1 else ["x", "y"] if k == 2 else ["v%d" % i for i in range(k)]
    gens = [Generator(n, rank=i, weight=weight) for i, n in enumerate(names)]
    return ConformalAlgebra(OrderSpec(gens), {})


def heisenberg(f_coeffs) -> ConformalAlgebra:
    """Extension of the rank-1 abelian algebra by (v olambda v) = f(lambda) e.

    ``f_coeffs`` are plain polynomial coefficients of f from lambda^0 up;
    f must be odd for the extension to satisfy skew symmetry.
    """
    fact = 1
    phi = {}
    for n, c in enumerate(f_coeffs):
        if n >= 2:
            fact *= n
        c = _scalarize(c)
        if not is_zero(c):
            phi[n] = c * fact
    degs = [n for n in phi]
    weight = None
    if len(degs) == 1:
        # homogeneous: wt(v o_n v) = 2 wt(v) - n - 1 = 0
        n = degs[0]
        weight = Fraction(n + 1, 2)
    spec = CentralExtensionSpec(
        base=abelian_conformal(1, weight=weight), central_name="e", torsion=1,
        cocycle={("v", "v"): phi}, central_weight=Fraction(0),
    )
    return build_central_extension(spec)


def weyl_pair() -> ConformalAlgebra:
    """Rank-2 abelian extended by phi_{x,y} = -phi_{y,x} = 1, Te = 0."""
    spec = CentralExtensionSpec(
        base=abelian_conformal(2, weight=Fraction(1, 2)), central_name="e", torsion=1,
        cocycle={("x", "y"): {0: Fraction(1)}, ("y", "x"): {0: Fraction(-1)}},
        central_weight=Fraction(0),
    )
    return build_central_extension(spec)


def comm_pair_extension() -> ConformalAlgebra:
    """Rank-2 abelian extended by e with T^2 e = 0 and (x o0 y) = e."""
    spec = CentralExtensionSpec(
        base=abelian_conformal(2, weight=Fraction(1)), central_name="e", torsion=2,
        cocycle={("x", "y"): {0: Fraction(1)}, ("y", "x"): {0: Fraction(-1)}},
        central_weight=Fraction(1),
    )
    return build_central_extension(spec)


def schrodinger_virasoro() -> ConformalAlgebra:
    return quadratic_conformal(novikov_schrodinger_virasoro())


# -- JSON -------------------------------------------------------------------


def conformal_to_json(C: ConformalAlgebra) -> dict:
    gens = []
    for g in C.order.generators:
        item = {"name": g.name, "central": g.central}
        if g.torsion is not None:
            item["torsion"] = g.torsion
        if g.weight is not None:
            item["weight"] = format_scalar(g.weight)
        gens.append(item)
    table = {}
    for (x, y), p in C.table.items():
        entries = []
        for (i, j), c in sorted(p.coeffs.items()):
            if j != 0:
                raise ValueError("table entry involves mu")
            for (k, z), a in sorted(c.terms.items()):
                entries.append({"Tpow": k, "lambda_pow": i,
                                "coeff": format_scalar(a), "gen": z})
        if entries:
            table["%s|%s" % (x, y)] = entries
    return {"generators": gens, "table": table}


def conformal_from_json(doc: dict) -> ConformalAlgebra:
    gens = []
    for r, item in enumerate(doc["generators"]):
        w = item.get("weight")
        gens.append(Generator(
            item["name"], rank=r,
            weight=None if w is None else Fraction(w),
            central=bool(item.get("central", False)),
            torsion=item.get("torsion"),
        ))
    order = OrderSpec(gens)
    table = {}
    for key, entries in doc.get("table", {}).items():
        x, y = key.split("|")
        p = LambdaPoly.zero()
        for ent in entries:
            c = parse_scalar(str(ent["coeff"]))
            tp = TPoly({(int(ent["Tpow"]), ent["gen"]): c})
            p = p + LambdaPoly.term(int(ent["lambda_pow"]), 0, tp)
        table[(x, y)] = p
    return ConformalAlgebra(order, table)


def novikov_from_json(doc: dict) -> NovikovAlgebra:
    return NovikovAlgebra(doc["basis"], doc["mult"])

from fractions import Fraction

import pytest

from vgsb.conformal import (
    ConformalAlgebra,
    NovikovAlgebra,
    TPoly,
    abelian_conformal,
    build_central_extension,
    CentralExtensionSpec,
    check_novikov,
    comm_pair_extension,
    conformal_from_json,
    conformal_to_json,
    heisenberg,
    novikov_schrodinger_virasoro,
    novikov_virasoro,
    quadratic_conformal,
    schrodinger_virasoro,
    virasoro,
    virasoro_c,
    weyl_pair,
)
from vgsb.errors import AxiomViolation
from vgsb.lambda_poly import LambdaPoly, substitute_skew
from vgsb.scalars import parameter


def test_novikov_builtins_pass():
    assert check_novikov(novikov_virasoro()) == []
    assert check_novikov(novikov_schrodinger_virasoro()) == []


def test_novikov_perturbed_table_fails():
    one = Fraction(1)
    zero = Fraction(0)
    # v o v = u, u o v = v, rest zero: left-symmetry fails on (v, u, v)
    m = [[[zero, one], [zero, zero]], [[one, zero], [zero, zero]]]
    V = NovikovAlgebra(["v", "u"], m)
    assert check_novikov(V) != []


def test_novikov_commutative_associative_table_passes():
    # v o v = v, v o u = u o v = u, u o u = u is commutative and associative,
    # hence Novikov: both identities hold on every triple.
    one = Fraction(1)
    zero = Fraction(0)
    m = [[[one, zero], [zero, one]], [[zero, one], [zero, one]]]
    V = NovikovAlgebra(["v", "u"], m)
    assert check_novikov(V) == []


def test_virasoro_table():
    C = virasoro()
    # (v olambda v) = (T + 2 lambda) v
    p = C.bracket_gen("v", "v")
    assert p.coeff(0) == TPoly({(1, "v"): Fraction(1)})
    assert p.coeff(1) == TPoly({(0, "v"): Fraction(2)})
    assert C.locality("v", "v") == 2
    assert C.nth_product("v", "v", 0) == TPoly({(1, "v"): Fraction(1)})
    assert C.nth_product("v", "v", 1) == TPoly({(0, "v"): Fraction(2)})
    assert C.nth_product("v", "v", 5).is_zero()


def test_schrodinger_virasoro_sample_bracket():
    C = schrodinger_virasoro()
    # (u olambda v) = T(v o u) + lambda(u o v + v o u) = (1/2) T u + (3/2) lambda u
    p = C.bracket_gen("u", "v")
    assert p.coeff(0) == TPoly({(1, "u"): Fraction(1, 2)})
    assert p.coeff(1) == TPoly({(0, "u"): Fraction(3, 2)})


def test_quadratic_conformal_passes_axioms():
    for C in (virasoro(), schrodinger_virasoro()):
        assert C.check_axioms() == []


def test_sesquilinearity_through_lambda_bracket():
    C = virasoro()
    tv = TPoly({(1, "v"): Fraction(1)})
    # (Tv olambda v) = -lambda (T+2lambda) v = -lambda T v - 2 lambda^2 v
    p = C.lambda_bracket(tv, "v")
    assert p.coeff(1) == TPoly({(1, "v"): Fraction(-1)})
    # -2 lambda^2 = -4 lambda^2/2!
    assert p.coeff(2) == TPoly({(0, "v"): Fraction(-4)})
    # (v olambda Tv) = (T+lambda)(T+2lambda) v
    q = C.lambda_bracket("v", tv)
    assert q.coeff(0) == TPoly({(2, "v"): Fraction(1)})


def test_central_bracket_is_zero():
    C = virasoro_c(Fraction(1, 2))
    assert C.lambda_bracket("e", "v").is_zero()
    assert C.lambda_bracket("e", "e").is_zero()


def test_virasoro_c_table_and_locality():
    C = virasoro_c(Fraction(1, 2))
    # (v o3 v) = (c/2) e
    assert C.nth_product("v", "v", 3) == TPoly({(0, "e"): Fraction(1, 4)})
    assert C.locality("v", "v") == 4
    assert C.locality("v", "e") == 0


def test_virasoro_c_axioms_symbolic():
    c = parameter("c")
    C = virasoro_c(c)
    assert C.check_axioms() == []
    assert C.nth_product("v", "v", 3) == TPoly({(0, "e"): c / 2})


def test_skew_violation_reported():
    # (v olambda v) = (T + 3 lambda) v fails skew symmetry
    from vgsb.terms import Generator, OrderSpec

    order = OrderSpec([Generator("v", rank=0)])
    table = {("v", "v"): LambdaPoly.term(0, 0, TPoly({(1, "v"): Fraction(1)}))
             + LambdaPoly.term(1, 0, TPoly({(0, "v"): Fraction(3)}))}
    C = ConformalAlgebra(order, table)
    report = C.check_axioms()
    assert any("skew" in line for line in report)


def test_substitute_skew_on_virasoro_bracket():
    C = virasoro()
    p = C.bracket_gen("v", "v")
    q = substitute_skew(p, C.t_op)
    # (T + 2(-lambda - T)) v = (-T - 2 lambda) v
    assert q.coeff(0) == TPoly({(1, "v"): Fraction(-1)})
    assert q.coeff(1) == TPoly({(0, "v"): Fraction(-2)})
    # involution
    assert substitute_skew(q, C.t_op) == p


def test_heisenberg_odd_even():
    H = heisenberg([0, 1])  # f = lambda
    assert H.nth_product("v", "v", 1) == TPoly({(0, "e"): Fraction(1)})
    assert H.check_axioms() == []
    H3 = heisenberg([0, 0, 0, 1])  # f = lambda^3
    assert H3.nth_product("v", "v", 3) == TPoly({(0, "e"): Fraction(6)})
    with pytest.raises(AxiomViolation):
        heisenberg([0, 0, 1])  # f = lambda^2 fails skew


def test_weyl_pair_extension():
    W = weyl_pair()
    assert W.nth_product("x", "y", 0) == TPoly({(0, "e"): Fraction(1)})
    assert W.nth_product("y", "x", 0) == TPoly({(0, "e"): Fraction(-1)})
    assert W.check_axioms() == []


def test_comm_pair_torsion_two():
    E = comm_pair_extension()
    assert E.order.generator("e").torsion == 2
    assert E.check_axioms() == []
    # T e is nonzero, T^2 e vanishes
    te = E.t_op(TPoly.gen("e"))
    assert te == TPoly({(1, "e"): Fraction(1)})
    assert E.t_op(te).is_zero()


def test_locality_symmetric_on_builtins():
    for C in (virasoro(), virasoro_c(Fraction(1)), heisenberg([0, 1]), weyl_pair()):
        names = [g.name for g in C.order.generators]
        for x in names:
            for y in names:
                assert C.locality(x, y) == C.locality(y, x)


def test_nth_product_vanishes_beyond_locality():
    for C in (virasoro(), virasoro_c(Fraction(1)), weyl_pair()):
        names = [g.name for g in C.order.generators]
        for x in names:
            for y in names:
                N = C.locality(x, y)
                for n in range(N, N + 4):
                    assert C.nth_product(x, y, n).is_zero()


def test_abelian_zero_brackets():
    C = abelian_conformal(1)
    assert C.locality("v", "v") == 0
    assert C.check_axioms() == []


def test_json_round_trip():
    for C in (virasoro_c(Fraction(1, 2)), weyl_pair(), comm_pair_extension()):
        doc = conformal_to_json(C)
        C2 = conformal_from_json(doc)
        assert conformal_to_json(C2) == doc
        assert C2.check_axioms() == []


def test_random_novikov_quadratic_conformal_passes():
    # 2-dim tables over a small coefficient pool, filtered by check_novikov
    import itertools

    pool = [Fraction(0), Fraction(1), Fraction(-1)]
    found = 0
    # enumerate deterministic small tables: e1*e1 and e1*e2 vary, rest zero
    for c1, c2, c3, c4 in itertools.product(pool, repeat=4):
        m = [
            [[c1, c2], [c3, c4]],
            [[Fraction(0)] * 2, [Fraction(0)] * 2],
        ]
        V = NovikovAlgebra(["a", "b"], m)
        if check_novikov(V):
            continue
        found += 1
        C = quadratic_conformal(V)
        assert C.check_axioms() == []
        if found >= 20:
            break
    assert found >= 5

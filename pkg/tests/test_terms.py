from fractions import Fraction

import pytest

from vgsb.conformal import TPoly, virasoro
from vgsb.lambda_poly import LambdaPoly, integrate_minus_t_to_zero
from vgsb.scalars import ParamPoly, generalized_binomial, param_poly, parameter, parse_scalar, format_scalar
from vgsb.terms import (
    Generator,
    LinComb,
    OrderSpec,
    T,
    VACUUM,
    Word,
    alg_word,
    apply_T_derivation,
    module_word,
)


def test_generalized_binomial():
    assert generalized_binomial(3, 2) == 3
    for n in (-5, -1, 0, 2, 7):
        assert generalized_binomial(n, 0) == 1
    assert generalized_binomial(-2, 3) == -4
    assert generalized_binomial(5, 2) == 10
    assert generalized_binomial(2, 5) == 0


def test_binomial_pascal_rule():
    for n in range(-6, 7):
        for s in range(1, 6):
            assert generalized_binomial(n, s) == (
                generalized_binomial(n - 1, s) + generalized_binomial(n - 1, s - 1)
            )


def test_rational_exactness():
    a = Fraction(3, 7)
    assert a * (1 / a) == 1
    assert Fraction(1, 3) + Fraction(1, 6) == Fraction(1, 2)


def test_param_poly_arithmetic():
    g = parameter("g")
    p = (1 - g) * (1 + g)
    assert p == param_poly("g", [1, 0, -1])
    assert (g - g) == 0
    assert ((1 - g) + g) == 1  # collapses to a constant
    assert isinstance((1 - g) + g, Fraction) or ((1 - g) + g) == Fraction(1)
    assert format_scalar(Fraction(-3)) == "-3"
    assert format_scalar(param_poly("g", [1, -1])) == "1-1*g"
    assert parse_scalar("1-g") == param_poly("g", [1, -1])
    assert parse_scalar("-3/2") == Fraction(-3, 2)
    assert g.subs(Fraction(1, 2)) == Fraction(1, 2)


def _weyl_order():
    return OrderSpec([
        Generator("x", rank=0, weight=Fraction(1, 2)),
        Generator("y", rank=1, weight=Fraction(1, 2)),
    ])


def _central_order():
    return OrderSpec([
        Generator("x", rank=0),
        Generator("e", rank=1, central=True, torsion=1),
    ])


def test_compare_words_t_greatest():
    order = _weyl_order()
    w1 = alg_word([T, ("x", 5)])
    w2 = alg_word([("x", 5), T])
    assert order.compare_words(w1, w2) > 0


def test_compare_words_index_dominates():
    order = _weyl_order()
    w1 = alg_word([("x", 3), ("y", 1)])
    w2 = alg_word([("y", 1), ("x", 3)])
    assert order.compare_words(w1, w2) > 0


def test_compare_words_central_order():
    order = _central_order()
    e2 = alg_word([("e", -2)])
    e0 = alg_word([("e", 0)])
    em1 = alg_word([("e", -1)])
    assert order.compare_words(e2, e0) > 0
    assert order.compare_words(e0, em1) > 0
    # central letters sit above ordinary ones
    assert order.compare_words(em1, alg_word([("x", 100)])) > 0


def test_compare_words_length_first():
    order = _weyl_order()
    long = module_word([("x", -1), ("x", -1)])
    short = module_word([("y", -5)])
    assert order.compare_words(long, short) > 0


def test_word_weight():
    order = _weyl_order()
    w = module_word([("x", -1), ("y", -2)])
    assert order.word_weight(w) == Fraction(2)
    assert order.letter_weight(T) == 1


def test_lincomb_basics():
    w1 = module_word([("x", -1)])
    w2 = module_word([("y", -1)])
    a = LinComb.from_word(w1) + LinComb.from_word(w2, Fraction(2))
    b = a - LinComb.from_word(w2, Fraction(2))
    assert b == LinComb.from_word(w1)
    assert (a - a).is_zero()
    assert a.scale(Fraction(0)).is_zero()


def test_apply_T_derivation_vacuum():
    order = _weyl_order()
    assert apply_T_derivation(VACUUM, order).is_zero()


def test_apply_T_derivation_single():
    order = _weyl_order()
    out = apply_T_derivation(module_word([("x", -1)]), order)
    assert out == LinComb.from_word(module_word([("x", -2)]))


def test_apply_T_derivation_leibniz_example():
    order = _weyl_order()
    out = apply_T_derivation(module_word([("x", -1), ("y", -2)]), order)
    expect = LinComb({
        module_word([("x", -2), ("y", -2)]): Fraction(1),
        module_word([("x", -1), ("y", -3)]): Fraction(2),
    })
    assert out == expect


def test_apply_T_derivation_rejects_T():
    order = _weyl_order()
    with pytest.raises(ValueError):
        apply_T_derivation(module_word([T, ("x", -1)]), order)


def test_apply_T_torsion_eager():
    order = _central_order()
    out = apply_T_derivation(module_word([("e", -1)]), order)
    assert out.is_zero()  # e(-2) is beyond torsion degree 1


def test_integrate_minus_t_to_zero_on_virasoro():
    # input (v olambda v) = (T + 2 lambda) v integrates to zero: x.y = y.x
    # for a single generator.
    C = virasoro()
    p = C.bracket_gen("v", "v")
    out = integrate_minus_t_to_zero(p, C.t_op, TPoly.zero())
    assert out.is_zero()


def test_integrate_minus_t_to_zero_basics():
    C = virasoro()
    const = LambdaPoly.constant(TPoly.gen("v"))
    out = integrate_minus_t_to_zero(const, C.t_op, TPoly.zero())
    assert out == TPoly({(1, "v"): Fraction(1)})
    lam = LambdaPoly.term(1, 0, TPoly.gen("v"))  # lambda/1! v, i.e. lambda v
    out2 = integrate_minus_t_to_zero(lam, C.t_op, TPoly.zero())
    assert out2 == TPoly({(2, "v"): Fraction(-1, 2)})

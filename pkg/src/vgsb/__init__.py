"""Grobner-Shirshov workbench for vertex algebras."""

from .scalars import Fraction, ParamPoly, generalized_binomial, param_poly, parameter
from .terms import (
    Generator,
    LinComb,
    OrderSpec,
    T,
    VACUUM,
    Word,
    alg_word,
    apply_T_derivation,
    mode,
    module_word,
)
from .lambda_poly import (
    LambdaPoly,
    integrate_minus_t_to_zero,
    integrate_zero_to_lambda,
    substitute_skew,
)
from .conformal import (
    CentralExtensionSpec,
    ConformalAlgebra,
    NovikovAlgebra,
    TPoly,
    build_central_extension,
    check_novikov,
    quadratic_conformal,
    virasoro,
    virasoro_c,
    heisenberg,
    weyl_pair,
    schrodinger_virasoro,
    abelian_conformal,
    comm_pair_extension,
)

__all__ = [name for name in dir() if not name.startswith("_")]

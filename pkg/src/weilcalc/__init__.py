"""Weil-algebra calculus: prolongations, microcubes, icons, brackets and Lie derivations."""

from .forms import Semiform, antisymmetrize_form, check_form_properties, make_semiform, tensor_semiforms, wedge
from .icons import (
    CLASSICAL_SIGN,
    Icon,
    VVForm,
    add_icons,
    compile_vvform,
    fn_bracket,
    icon_convolve,
    icon_reparametrize,
    lie_bracket_L,
    vector_field,
)
from .lie import lie_derivative, lie_hat
from .perm import Permutation, sigma_pq, sigma_pq_r
from .prolongation import (
    AgreementViolation,
    Microcube,
    TaylorTable,
    assemble,
    extract_d,
    from_taylor,
    general_jacobi_residual,
    glue,
    restrict_along,
    strong_diff,
    to_taylor,
)
from .smooth import eval_map, make_smooth_map
from .weil import FLOAT, RATIONAL, Context, WeilAlgebra, WeilElement, build_algebra, check_pullback_square, make_hom

__version__ = "0.1.0"

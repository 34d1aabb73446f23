"""Discrete Jacobi last multiplier for first-order linear difference equations on 2D lattices."""

from ._kernels import BACKEND
from .core import (
    ANSATZ_FAMILY,
    DEFAULT_TOLERANCE,
    AnsatzMatch,
    AnsatzMember,
    MinorPair,
    MultiplierField,
    conservation_residual,
    divergence_of_minors,
    field_scale,
    jlm_residual,
    minors,
    pde_residual,
    search_ansatz_jlm,
    solve_jlm_rowwise,
    wronskian_det,
)
from .diffops import (
    forward_diff_x,
    forward_diff_y,
    mixed_commutator,
    symmetric_diff_x,
    symmetric_diff_y,
)
from .errors import (
    CompatibilityError,
    DomainError,
    ExprEvalError,
    ExprSyntaxError,
    LatticeError,
    ZeroValueError,
)
from .expr import bind_coefficient, evaluate, parse, to_text
from .grid import (
    IndexDomain,
    Lattice1D,
    OrthoLattice2D,
    ScalarField2D,
    build_lattice_from_points,
    build_uniform_lattice,
)
from .solution import (
    compatibility_residual,
    gradient_fields_from_jlm,
    integrate_path,
    propagate_direct,
)
from .special import Example2Params, digamma, example2_closed_form

__version__ = "0.1.0"

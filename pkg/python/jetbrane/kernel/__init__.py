from jetbrane.kernel.expr import (  # noqa: F401
    Expr,
    Monomial,
    canonicalize,
    commutator,
    derivation,
    graded_product,
    grading_of,
    homogeneous_parts,
    parity_of,
    partial_derivative,
    substitute,
)
from jetbrane.kernel.generators import (  # noqa: F401
    Generator,
    Grading,
    Kind,
    MultiIndex,
    SpaceSpec,
    antifield,
    basis_form,
    coordinate,
    field_jet,
    ghost,
    ghost_antifield,
    multi_indices,
)
from jetbrane.kernel.render import render_expr  # noqa: F401

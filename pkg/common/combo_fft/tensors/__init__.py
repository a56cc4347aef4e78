from .exceptions import (
    SingularMatrix,
    NotSymmetric,
)
from .notation import (
    SQRT2,
    IDENTITY2,
    to_vector,
    from_vector,
    to_mandel,
    from_mandel,
    mandel_to_tensor4,
    tensor4_to_mandel,
    tensor4_to_matrix9,
    matrix9_to_tensor4,
    mandel_to_matrix9,
    ddot,
    symmetric_part,
    outer,
    identity_mandel,
    isotropic_mandel,
)
from .linalg import (
    det3,
    adjugate3,
    inv3,
    det_lemma,
    sym_eig3,
)


__all__ = (
    "SingularMatrix",
    "NotSymmetric",

    "SQRT2",
    "IDENTITY2",
    "to_vector",
    "from_vector",
    "to_mandel",
    "from_mandel",
    "mandel_to_tensor4",
    "tensor4_to_mandel",
    "tensor4_to_matrix9",
    "matrix9_to_tensor4",
    "mandel_to_matrix9",
    "ddot",
    "symmetric_part",
    "outer",
    "identity_mandel",
    "isotropic_mandel",

    "det3",
    "adjugate3",
    "inv3",
    "det_lemma",
    "sym_eig3",
)

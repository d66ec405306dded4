"""Interpolatory (CUR-type) Tucker decompositions of dense tensors."""
from .decomp import (
    ErrorReport,
    HoidDecomp,
    convert_to_hoid,
    core_tensor,
    hoid,
    hosvd,
    matrix_cur,
    reconstruct,
    relative_error,
    st_hoid,
)
from .tensor import CpDecomp, TuckerDecomp, fold, mode_multiply, unfold

__version__ = "0.1.0"

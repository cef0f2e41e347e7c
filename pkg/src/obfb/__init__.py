"""Oversampled filter banks: FIR invertibility, minimal-order inverses and
time/frequency optimization of the synthesis side."""

from .banks import load_bank, mclt
from .config import Tolerances, default_tolerances
from .diagnostics import freq_dispersion, pr_residual, time_dispersion
from .filterbank import (AnalysisBank, SynthesisBank, analyze, read_bank, save_bank,
                         synthesize, to_polyphase)
from .inverse import solve_min_order, solve_min_order_hs
from .invertibility import is_fir_invertible
from .laurent import LaurentMatrix, LaurentPoly, determinant
from .objective import CostConfig, Objective, make_kernels
from .optimizer import optimize
from .paramspace import ParamSpace, assemble, build_paramspace

__version__ = "0.1.0"

__all__ = [
    "AnalysisBank", "SynthesisBank", "analyze", "synthesize", "to_polyphase", "read_bank",
    "save_bank", "LaurentPoly", "LaurentMatrix", "determinant", "is_fir_invertible",
    "solve_min_order", "solve_min_order_hs", "ParamSpace", "build_paramspace", "assemble",
    "CostConfig", "Objective", "make_kernels", "optimize", "mclt", "load_bank",
    "time_dispersion", "freq_dispersion", "pr_residual", "Tolerances", "default_tolerances",
]

"""Weibull sine-skewed von Mises models for cylindrical (angle, length) data."""

from .models import (
    GGSSVMParams,
    IndepParams,
    JWParams,
    MSKSParams,
    WeiSSVMParams,
    weissvm_logpdf,
    weissvm_pdf,
)
from .sampling import sample_weissvm
from .inference import fit, lr_test_indep, lr_test_jw, FitResult, TestResult

__version__ = "0.1.0"

__all__ = [
    "GGSSVMParams",
    "IndepParams",
    "JWParams",
    "MSKSParams",
    "WeiSSVMParams",
    "weissvm_logpdf",
    "weissvm_pdf",
    "sample_weissvm",
    "fit",
    "lr_test_jw",
    "lr_test_indep",
    "FitResult",
    "TestResult",
]

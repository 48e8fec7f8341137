"""Numerical checks for rotationally symmetric substatic triples.

A triple is a warped product ``g = dr^2/f^2 + b(r)^2 g_Sigma`` with a lapse f.
The package builds model triples, verifies the substatic condition, follows
optical-distance level sets, and tests the comparison and isoperimetric-type
inequalities they satisfy.
"""

from .errors import SubstaticError
from .functionals import Base, area_functional, avr_estimate, volume_functional
from .inequalities import heintze_karcher_check, isoperimetric_check, willmore_check
from .models import (
    CrossSection,
    ModelSpec,
    ProfileTriple,
    build_model,
    classify_end,
    de_sitter,
    euclidean,
    eval_f,
    reissner_nordstrom,
    schwarzschild,
    schwarzschild_ads,
)
from .curvature import check_substatic, substatic_tensor
from .report import CheckReport
from .surfaces import RadialGraphSurface, area, f_volume, mean_curvature

__version__ = "0.1.0"

__all__ = [
    "Base",
    "CheckReport",
    "CrossSection",
    "ModelSpec",
    "ProfileTriple",
    "RadialGraphSurface",
    "SubstaticError",
    "area",
    "area_functional",
    "avr_estimate",
    "build_model",
    "check_substatic",
    "classify_end",
    "de_sitter",
    "euclidean",
    "eval_f",
    "f_volume",
    "heintze_karcher_check",
    "isoperimetric_check",
    "mean_curvature",
    "reissner_nordstrom",
    "schwarzschild",
    "schwarzschild_ads",
    "substatic_tensor",
    "volume_functional",
    "willmore_check",
]

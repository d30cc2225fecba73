"""Steady gSQG vortex equilibria (co-rotating N-fold and translating pairs)
computed by rearrangement ascent on polar and half-plane grids."""

__version__ = "0.1.0"

from .errors import (
    InfeasibleConfigError,
    InfeasibleConstraintError,
    NotConvergedError,
    ResolutionError,
    SingularityError,
    UnsupportedError,
)
from .profiles import (
    Profile,
    load_tabulated_profile,
    make_parabolic_profile,
    make_patch_profile,
    make_tabulated_profile,
    radial_rearrangement,
    scale_profile,
)
from .solver_rotating import RotatingConfig, alpha_crosscheck, extract_multipliers, solve_rotating
from .solver_translating import TranslatingConfig, extract_threshold, odd_extension, solve_translating

__all__ = [
    "InfeasibleConfigError", "InfeasibleConstraintError", "NotConvergedError", "ResolutionError",
    "SingularityError", "UnsupportedError", "Profile", "load_tabulated_profile", "make_parabolic_profile",
    "make_patch_profile", "make_tabulated_profile", "radial_rearrangement", "scale_profile",
    "RotatingConfig", "alpha_crosscheck", "extract_multipliers", "solve_rotating",
    "TranslatingConfig", "extract_threshold", "odd_extension", "solve_translating",
]

"""Python bindings for the critical-mass dichotomy solvers.

The heavy lifting lives in the compiled extension ``_kscrit``; this package
re-exports it and adds a couple of ergonomic wrappers.
"""

import json as _json

from ._kscrit import (
    AmplitudeLaw,
    BandEntry,
    ConstraintViolation,
    CriticalConstants,
    Grid,
    InconsistencyError,
    InvalidInput,
    NoConvergence,
    NumericalFailure,
    Parameters,
    PhysicalField,
    Profile,
    RateFit,
    SelfSimProfile,
    StationaryProfile,
    amplitude,
    c1_distance,
    critical_band,
    critical_constants,
    derivative_samples,
    energy_F,
    energy_F_eps,
    f_eps,
    find_a_for_mass,
    fit_blowup_rate,
    H_eps,
    H_of,
    integral_equation_solve,
    nmax,
    read_profile_csv,
    reconstruct_physical,
    self_similar_field,
    solve_Pa,
    solve_Qeps,
    write_profile_csv,
)
from ._kscrit import classify_json as _classify_json

__all__ = [
    "AmplitudeLaw",
    "BandEntry",
    "ConstraintViolation",
    "CriticalConstants",
    "Grid",
    "InconsistencyError",
    "InvalidInput",
    "NoConvergence",
    "NumericalFailure",
    "Parameters",
    "PhysicalField",
    "Profile",
    "RateFit",
    "SelfSimProfile",
    "StationaryProfile",
    "amplitude",
    "c1_distance",
    "classify",
    "critical_band",
    "critical_constants",
    "derivative_samples",
    "energy_F",
    "energy_F_eps",
    "f_eps",
    "find_a_for_mass",
    "fit_blowup_rate",
    "H_eps",
    "H_of",
    "integral_equation_solve",
    "nmax",
    "read_profile_csv",
    "reconstruct_physical",
    "self_similar_field",
    "solve_Pa",
    "solve_Qeps",
    "write_profile_csv",
]

__version__ = "0.1.0"


def classify(config_path):
    """Run a classification scenario from a config file; returns a dict report."""
    return _json.loads(_classify_json(str(config_path)))

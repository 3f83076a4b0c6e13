"""
reebmec: indices of symplectic paths and mean Euler characteristics of
contact manifolds from declarative Reeb orbit data.
"""

from .catalog import prequantization, standard_sphere, standard_sphere_af, ustilovsky
from .indices import (
    BlockPath,
    MeanIndex,
    WipCertificate,
    catenation_defect,
    conley_zehnder,
    conley_zehnder_rot,
    degree,
    dgw_index,
    mean_index,
    robbin_salamon,
    unitary_index,
    wip_fit,
)
from .mec import (
    MecValue,
    SurgeryStep,
    af_surgery,
    mec,
    mec_af,
    mec_mb,
    oracle_convergence,
    reachability_necessary,
    surgery_apply,
    surgery_generators,
    truncated_euler,
)
from .orbit_model import (
    AFModel,
    MaximalOrbifold,
    MBModel,
    PrincipalOrbitFamily,
    Stratum,
    chi_hat,
    e_invariant,
    enumerate_generators,
    orbifold_degree,
    orbifold_sign,
    validate_af,
    validate_mb,
)
from .symplin import (
    AngleTrack,
    PolarParts,
    SympPath,
    catenate,
    det_complex_sq,
    is_symplectic,
    iterate_path,
    lift_angle,
    polar_decompose,
    rotation_path,
    standard_J,
)

__version__ = "0.1.0"

__all__ = [
    "AFModel",
    "AngleTrack",
    "BlockPath",
    "MBModel",
    "MaximalOrbifold",
    "MeanIndex",
    "MecValue",
    "PolarParts",
    "PrincipalOrbitFamily",
    "Stratum",
    "SurgeryStep",
    "SympPath",
    "WipCertificate",
    "af_surgery",
    "catenate",
    "catenation_defect",
    "chi_hat",
    "conley_zehnder",
    "conley_zehnder_rot",
    "degree",
    "det_complex_sq",
    "dgw_index",
    "e_invariant",
    "enumerate_generators",
    "is_symplectic",
    "iterate_path",
    "lift_angle",
    "mean_index",
    "mec",
    "mec_af",
    "mec_mb",
    "oracle_convergence",
    "orbifold_degree",
    "orbifold_sign",
    "polar_decompose",
    "prequantization",
    "reachability_necessary",
    "robbin_salamon",
    "rotation_path",
    "standard_J",
    "standard_sphere",
    "standard_sphere_af",
    "surgery_apply",
    "surgery_generators",
    "truncated_euler",
    "unitary_index",
    "ustilovsky",
    "validate_af",
    "validate_mb",
    "wip_fit",
]

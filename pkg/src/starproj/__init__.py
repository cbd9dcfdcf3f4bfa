"""Probability measures on a segment, their star-shaped domains, and the
Monte Carlo round trip between them.

The package splits into: class membership testing for segment measures
(`measures`, `families`), the circle log-potential and the domain
construction (`potentials`, `construction`), an independent harmonic-measure
estimator (`harmonic_measure`), and a numerical harness for the growth
theorems (`harness`).  The `starproj` console script fronts all of it.
"""

from .construction import (
    ClassMembershipError,
    GeometryError,
    StarShapedDomain,
    boundary_correspondence,
    build_domain,
    domain_distance,
    read_domain_csv,
    write_domain_csv,
)
from .families import (
    builtin_szego_measures,
    measure_from_density,
    nonmember_measure,
    nonmember_profile,
    quadratic_measure,
    rescale_measure,
    resolve_measure,
    szego_cosine,
    szego_expsine,
    szego_flat,
    szego_trig3,
    uniform_measure,
)
from .harness import (
    MatsaevWeight,
    SectorSpec,
    TestFunction,
    UnsupportedFunctionError,
    builtin_test_functions,
    carleman_identity_residual,
    eval_test_function,
    levinson_profile,
    matsaev_profile,
    matsaev_weight,
    phragmen_check,
    psi_weight,
    theorem1_profile,
)
from .harmonic_measure import (
    AngularDistribution,
    WalkConfig,
    bound_constant,
    disk_harmonic_measure,
    ks_distance,
    wos_project,
)
from .measures import (
    DegenerateMeasureError,
    InvalidMeasureError,
    InverseProfile,
    MajorantSpec,
    SegmentMeasure,
    class_a_defect,
    condition_integral,
    defect_sequence,
    dini_modulus,
    inverse_distribution,
    measure_from_majorant,
    read_density_csv,
    read_measure_csv,
    write_density_csv,
    write_measure_csv,
)
from .potentials import (
    circle_log_potential,
    clausen,
    potential_continuity_probe,
    segment_log_potential,
)

__version__ = "0.1.0"

__all__ = [
    "AngularDistribution",
    "ClassMembershipError",
    "DegenerateMeasureError",
    "GeometryError",
    "InvalidMeasureError",
    "InverseProfile",
    "MajorantSpec",
    "MatsaevWeight",
    "SectorSpec",
    "SegmentMeasure",
    "StarShapedDomain",
    "TestFunction",
    "UnsupportedFunctionError",
    "WalkConfig",
    "bound_constant",
    "boundary_correspondence",
    "build_domain",
    "builtin_szego_measures",
    "builtin_test_functions",
    "carleman_identity_residual",
    "circle_log_potential",
    "class_a_defect",
    "clausen",
    "condition_integral",
    "defect_sequence",
    "dini_modulus",
    "disk_harmonic_measure",
    "domain_distance",
    "eval_test_function",
    "inverse_distribution",
    "ks_distance",
    "levinson_profile",
    "matsaev_profile",
    "matsaev_weight",
    "measure_from_density",
    "measure_from_majorant",
    "nonmember_measure",
    "nonmember_profile",
    "phragmen_check",
    "potential_continuity_probe",
    "psi_weight",
    "quadratic_measure",
    "read_density_csv",
    "read_domain_csv",
    "read_measure_csv",
    "rescale_measure",
    "resolve_measure",
    "szego_cosine",
    "szego_expsine",
    "szego_flat",
    "szego_trig3",
    "theorem1_profile",
    "uniform_measure",
    "wos_project",
    "write_density_csv",
    "write_domain_csv",
    "write_measure_csv",
]

"""Exact verification of coupled Kahler-Einstein / Hermitian-Yang-Mills solutions
on P(L + O) over (P^1)^k obtained from the Calabi ansatz."""

__version__ = "0.1.0"

from .exact import (  # noqa: E402
    CertifiedInterval,
    DomainError,
    Log3Linear,
    Log3Rational,
    PiGraded,
    Rational,
    enclose,
    ln3_enclosure,
    pi_enclosure,
)
from .poly import (  # noqa: E402
    LaurentPoly,
    SignCertificate,
    Undecidable,
    UnsupportedExponent,
    Verdict,
    a_closed_form,
    compute_R,
    moment_integral,
    rk_bounds,
    sign_on_domain,
)
from .scenario import (  # noqa: E402
    Case,
    ConstantSet,
    InvalidScenario,
    NotSolvable,
    Scenario,
    ak_bk,
    c_tilde,
    constants,
    coupling_ratio,
    lambda_constant,
    volume_constant,
)
from .profile import (  # noqa: E402
    MomentumProfile,
    PoleInDomain,
    ReducedPolynomial,
    SolvabilityReport,
    Status,
    boundary_check,
    build_profile,
    build_Q,
    obstruction_integral,
    solvability,
)
from .geometry import (  # noqa: E402
    QuadratureFailure,
    Reconstruction,
    alpha0_identity,
    pde_residual,
    reconstruct,
    volume_identity,
)

__all__ = [
    "CertifiedInterval", "DomainError", "Log3Linear", "Log3Rational", "PiGraded", "Rational",
    "enclose", "ln3_enclosure", "pi_enclosure",
    "LaurentPoly", "SignCertificate", "Undecidable", "UnsupportedExponent", "Verdict",
    "a_closed_form", "compute_R", "moment_integral", "rk_bounds", "sign_on_domain",
    "Case", "ConstantSet", "InvalidScenario", "NotSolvable", "Scenario", "ak_bk", "c_tilde",
    "constants", "coupling_ratio", "lambda_constant", "volume_constant",
    "MomentumProfile", "PoleInDomain", "ReducedPolynomial", "SolvabilityReport", "Status",
    "boundary_check", "build_profile", "build_Q", "obstruction_integral", "solvability",
    "QuadratureFailure", "Reconstruction", "alpha0_identity", "pde_residual", "reconstruct",
    "volume_identity",
]

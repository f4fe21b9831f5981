"""Spectrahedral shadows: SOS certificates, non-SOS obstructions, moment
relaxations, dual cones, and square-root lifts of spectrahedral cones."""

from .catalog import (L14, NamedForm, VeroneseSpec, catalog, catalog_names,
                      counterexample_pipeline, l14_shift_membership,
                      psd_vs_sos_demo, veronese, veronese_spec)
from .hanselka import (LiftCertificate, LiftData, NotNonnegative, build_lift,
                       lift_certificate, verify_lift_numeric)
from .polys import (Polynomial, Subspace, homogeneous_monomial_subspace,
                    monomial_subspace, shift_support)
from .puiseux import DEFAULT_TRUNC, PuiseuxScalar
from .relax import (BasicClosedSet, HullReport, MomentShadow, ProbeReport,
                    RelaxationSpec, build_K_prime, exactness_probe,
                    hull_certificate_check, k_prime_member, umker_shadow)
from .sdp import SdpProblem, SymMatrix, lmi_maximize, solve_sdp
from .soscert import (InconclusiveError, NotInSpanError, NotSosWitness,
                      ObstructionReport, SosCertificate,
                      infinitesimal_obstruction, local_obstruction,
                      psd_via_multiplier, pullback_sos_check, sos_decide)
from .spectra import (NotStrictlyFeasible, Pencil, Shadow,
                      cone_witness_direction, dual_cone_member,
                      dual_cone_point, shadow_contains)

__version__ = "0.1.0"

__all__ = [
    "L14", "NamedForm", "VeroneseSpec", "catalog", "catalog_names",
    "counterexample_pipeline", "l14_shift_membership", "psd_vs_sos_demo",
    "veronese", "veronese_spec",
    "LiftCertificate", "LiftData", "NotNonnegative", "build_lift",
    "lift_certificate", "verify_lift_numeric",
    "Polynomial", "Subspace", "homogeneous_monomial_subspace",
    "monomial_subspace", "shift_support",
    "DEFAULT_TRUNC", "PuiseuxScalar",
    "BasicClosedSet", "HullReport", "MomentShadow", "ProbeReport",
    "RelaxationSpec", "build_K_prime", "exactness_probe",
    "hull_certificate_check", "k_prime_member", "umker_shadow",
    "SdpProblem", "SymMatrix", "lmi_maximize", "solve_sdp",
    "InconclusiveError", "NotInSpanError", "NotSosWitness",
    "ObstructionReport", "SosCertificate", "infinitesimal_obstruction",
    "local_obstruction", "psd_via_multiplier", "pullback_sos_check",
    "sos_decide",
    "NotStrictlyFeasible", "Pencil", "Shadow", "cone_witness_direction",
    "dual_cone_member", "dual_cone_point", "shadow_contains",
    "__version__",
]

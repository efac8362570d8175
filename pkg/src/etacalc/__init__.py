"""Eta-invariant calculus for flat and nearly flat connections on flat tori."""

from .eta import (
    EtaValue,
    TowerEta,
    eta_bk,
    eta_heat_estimate,
    eta_s1_closed,
    eta_s1_spectral,
    hurwitz_zeta,
    m_minus,
)
from .flow import (
    EigenvalueTrack,
    TrackError,
    gauge_path,
    spectral_flow,
    track_path,
)
from .forms import EQ_TOL, SubTorus, TrigPolyForm
from .geometry import (
    Connection,
    a_coeff,
    a_coeff_exact,
    cs_form,
    cs_r_poly,
    gauge_transform,
    l_form,
    odd_chern_char,
    odd_subtori,
    subtorus_pairing,
)
from .spectral import (
    MemoryGuardError,
    OperatorTruncation,
    build_truncation,
    s1_mu_list,
    spectrum,
)
from .verify import (
    CheckEntry,
    VerificationReport,
    assemble_report,
    eta_tilde,
    psi_exponential,
    psi_local,
    psi_spectral,
    standard_suite,
)

__all__ = [
    "EQ_TOL",
    "CheckEntry",
    "Connection",
    "EigenvalueTrack",
    "EtaValue",
    "MemoryGuardError",
    "OperatorTruncation",
    "SubTorus",
    "TowerEta",
    "TrackError",
    "TrigPolyForm",
    "VerificationReport",
    "a_coeff",
    "a_coeff_exact",
    "assemble_report",
    "build_truncation",
    "cs_form",
    "cs_r_poly",
    "eta_bk",
    "eta_heat_estimate",
    "eta_s1_closed",
    "eta_s1_spectral",
    "eta_tilde",
    "gauge_path",
    "gauge_transform",
    "hurwitz_zeta",
    "l_form",
    "m_minus",
    "odd_chern_char",
    "odd_subtori",
    "psi_exponential",
    "psi_local",
    "psi_spectral",
    "s1_mu_list",
    "spectral_flow",
    "spectrum",
    "standard_suite",
    "subtorus_pairing",
    "track_path",
]

__version__ = "0.1.0"

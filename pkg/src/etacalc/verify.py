"""Identity harness: each characteristic-class / spectral-asymmetry identity
in scope becomes a check producing :class:`CheckEntry` records, collected in a
deterministic :class:`VerificationReport`.

Conventions shared by all checks:

* residual modes -- ``absolute`` is |lhs - rhs|; ``mod-Z`` takes the circle
  distance of the real parts (nearest-integer gap) plus the absolute gap of
  the imaginary parts; ``integer`` demands exact equality of two integers.
* every spectral quantity is evaluated on the circle, where constant
  connections have closed-form eigenvalue towers; higher-dimensional tori
  contribute only form-level sides (pairings, characteristic forms).
* one global sign calibration (unitary circle connection, tower shift 1/4,
  upward crossing counts +1) pins the Clifford orientation and the spectral
  flow sign; no check below carries a per-check sign choice.

Checks are pure functions of their inputs and independent of each other, so
they may run in any order (or concurrently); reports are assembled sorted by
check id, making the output order-free.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from .eta import EtaValue, TowerEta, eta_s1_spectral
from .flow import gauge_path, spectral_flow, track_path
from .geometry import (
    Connection,
    a_coeff,
    cs_form,
    cs_r_poly,
    odd_subtori,
    subtorus_pairing,
)
from .spectral import build_truncation, s1_mu_list, spectrum

SCHEMA_VERSION = "1"

#: default tolerances per residual mode (overridable per check)
DEFAULT_ABS_TOL = 1e-9
DEFAULT_MOD_Z_TOL = 1e-6


# ----------------------------------------------------------------------
# report plumbing


def _complex_json(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def circle_distance(x: float) -> float:
    """Distance from x to the nearest integer."""
    return abs(x - round(x))


def residual_for(lhs: complex, rhs: complex, mode: str) -> float:
    """Residual of lhs vs rhs under the given comparison mode."""
    diff = complex(lhs) - complex(rhs)
    if mode == "absolute":
        return abs(diff)
    if mode == "mod-Z":
        return max(circle_distance(diff.real), abs(diff.imag))
    if mode == "integer":
        return abs(diff)
    raise ValueError(f"unknown comparison mode {mode!r}")


@dataclass(frozen=True)
class CheckEntry:
    """One verified identity: lhs and rhs with the residual, the comparison
    mode it was computed under, and the pass verdict at ``tolerance``."""

    check_id: str
    identity: str
    lhs: complex
    rhs: complex
    residual: float
    mode: str
    tolerance: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "check_id": self.check_id,
            "identity": self.identity,
            "lhs": _complex_json(self.lhs),
            "rhs": _complex_json(self.rhs),
            "residual": self.residual,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def make_entry(
    check_id: str,
    identity: str,
    lhs: complex,
    rhs: complex,
    mode: str,
    tolerance: float,
) -> CheckEntry:
    res = residual_for(lhs, rhs, mode)
    return CheckEntry(
        check_id=check_id,
        identity=identity,
        lhs=complex(lhs),
        rhs=complex(rhs),
        residual=res,
        mode=mode,
        tolerance=float(tolerance),
        passed=bool(res <= tolerance),
    )


@dataclass(frozen=True)
class VerificationReport:
    """Sorted, deterministic collection of check entries.

    ``meta`` carries the schema version and the seed of any randomized
    construction; no timestamps, so equal inputs give byte-equal JSON.
    """

    entries: tuple[CheckEntry, ...]
    meta: dict

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failed(self) -> tuple[CheckEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)

    def to_json_obj(self) -> dict:
        return {
            "meta": dict(self.meta),
            "entries": [e.to_json_obj() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2)

    def summary_lines(self) -> list[str]:
        width = max([len(e.check_id) for e in self.entries] + [8])
        lines = [
            f"{'check':<{width}}  {'mode':<8}  {'residual':>12}  "
            f"{'tol':>9}  verdict"
        ]
        for e in self.entries:
            verdict = "pass" if e.passed else "FAIL"
            lines.append(
                f"{e.check_id:<{width}}  {e.mode:<8}  {e.residual:>12.3e}  "
                f"{e.tolerance:>9.1e}  {verdict}"
            )
        n_fail = len(self.failed())
        lines.append(
            f"{len(self.entries)} checks, "
            + ("all passed" if n_fail == 0 else f"{n_fail} FAILED")
        )
        return lines


def assemble_report(
    entries: Iterable[CheckEntry], seed: int | None = None
) -> VerificationReport:
    ordered = tuple(sorted(entries, key=lambda e: (e.check_id, e.identity)))
    meta: dict = {"schema_version": SCHEMA_VERSION}
    if seed is not None:
        meta["seed"] = int(seed)
    return VerificationReport(entries=ordered, meta=meta)


# ----------------------------------------------------------------------
# transgression vs. odd Chern forms


def _region_tag(region) -> str:
    return "".join(str(i) for i in region.indices)


def check_cs_odd_chern_pairing(
    c: Connection,
    r: float,
    tol: float = DEFAULT_ABS_TOL,
    label: str = "cs_odd_chern_pairing",
) -> list[CheckEntry]:
    """Pair the transgression from the metric-compatible connection to its
    r-deformation against the weighted sum of odd Chern forms, on every
    odd-dimensional coordinate subtorus::

        <CS(herm, r-deformed)>_J = -(r/2pi) sum_j a_j(r)/j! <c_{2j+1}>_J

    Requires a flat connection (the identity uses flatness); one entry per
    subtorus, absolute comparison.
    """
    if not c.is_flat(1e-9):
        raise ValueError("pairing identity requires a flat connection")
    r = float(r)
    cs = cs_form(c.hermitian_part(), c.r_deformation(r))
    identity = (
        "subtorus pairing of CS(hermitian part, r-deformation) equals "
        "-(r/2pi) sum_j a_j(r)/j! times the odd-Chern pairing"
    )
    entries = []
    for region in odd_subtori(c.dim):
        lhs = subtorus_pairing(cs, region)
        rhs = 0j
        j = 0
        while 2 * j + 1 <= len(region.indices):
            rhs -= (
                (r / (2 * math.pi))
                * a_coeff(j, r)
                / factorial(j)
                * subtorus_pairing(c.chern_odd(j), region)
            )
            j += 1
        entries.append(
            make_entry(
                f"{label}[r={r:g},J={_region_tag(region)}]",
                identity,
                lhs,
                rhs,
                "absolute",
                tol,
            )
        )
    return entries


# ----------------------------------------------------------------------
# circle spectral sides


def _require_constant_circle(c: Connection, what: str) -> None:
    if c.dim != 1:
        raise ValueError(f"{what} uses closed-form circle spectra (dim == 1)")
    c.constant_coefficient(1)  # raises when the coefficient is x-dependent


def reduced_eta_circle(c: Connection) -> TowerEta:
    """Reduced eta of the twisted odd signature operator for a constant
    connection on the circle, from its closed-form eigenvalue towers."""
    _require_constant_circle(c, "reduced eta")
    return eta_s1_spectral(s1_mu_list(c))


def check_gilkey_variation(
    c0: Connection,
    c1: Connection,
    tol: float = DEFAULT_MOD_Z_TOL,
    check_id: str = "gilkey_variation",
) -> CheckEntry:
    """Gilkey-type variation on the circle: the change of the reduced eta
    invariant equals the transgression pairing up to an integer::

        reduced_eta(c1) - reduced_eta(c0)  ==  <L . CS(c0, c1)>   (mod Z)

    Real parts compare modulo Z, imaginary parts exactly.  Both connections
    must be constant on the circle and share the fiber metric.
    """
    _require_constant_circle(c0, "variation check")
    _require_constant_circle(c1, "variation check")
    lhs = reduced_eta_circle(c1).value.reduced - reduced_eta_circle(c0).value.reduced
    rhs = subtorus_pairing(cs_form(c0, c1))  # flat torus: L = 1
    return make_entry(
        check_id,
        "change of reduced eta equals the transgression pairing mod Z",
        lhs,
        rhs,
        "mod-Z",
        tol,
    )


def check_variation_complex(
    path: Callable[[float], Connection],
    tol: float = 1e-8,
    cutoff: int = 8,
    m0: int = 8,
    check_id: str = "variation_complex",
) -> CheckEntry:
    """Exact complex-valued variation formula along a path of circle
    connections: no integer slack, the jump is absorbed by spectral flow::

        reduced_eta(end) - reduced_eta(start)  ==  sf + <L . CS(start, end)>

    Endpoint etas come from closed-form towers (endpoints must be constant
    and axis-free); sf is computed by eigenvalue tracking of the Galerkin
    truncations along the path, which may pass through non-constant
    connections (for example gauge interpolations).
    """
    c0 = path(0.0)
    c1 = path(1.0)
    _require_constant_circle(c0, "complex variation check")
    _require_constant_circle(c1, "complex variation check")
    t0 = reduced_eta_circle(c0)
    t1 = reduced_eta_circle(c1)
    if t0.excluded or t1.excluded or t0.value.kernel_dim or t1.value.kernel_dim:
        raise ValueError(
            "complex variation formula needs axis-free endpoint spectra"
        )
    lhs = t1.value.reduced - t0.value.reduced
    tr = track_path(lambda t: build_truncation(path(t), cutoff), m0=m0)
    sf = spectral_flow(tr)
    rhs = sf + subtorus_pairing(cs_form(c0, c1))
    return make_entry(
        check_id,
        "change of reduced eta equals spectral flow plus the transgression "
        "pairing, exactly in C",
        lhs,
        rhs,
        "absolute",
        tol,
    )


def check_gauge_pumping(
    c: Connection,
    w: int,
    cutoff: int = 8,
    m0: int = 8,
    check_id: str | None = None,
) -> CheckEntry:
    """Spectral flow along the gauge interpolation with winding w equals w
    exactly (integer comparison): the gauge path pumps w eigenvalue towers
    across the imaginary axis.
    """
    w = int(w)
    tr = track_path(lambda t: build_truncation(gauge_path(c, w, t), cutoff), m0=m0)
    sf = spectral_flow(tr)
    return make_entry(
        check_id or f"gauge_pumping[w={w}]",
        "spectral flow of the winding-w gauge interpolation equals w",
        complex(sf),
        complex(w),
        "integer",
        0.0,
    )


def check_re_im_split(
    c: Connection,
    tol_re: float = DEFAULT_MOD_Z_TOL,
    tol_im: float = 1e-8,
    check_id: str = "re_im_split",
) -> list[CheckEntry]:
    """Split the reduced eta of a constant circle connection into the
    self-adjoint part plus pairings of the transgression polynomial
    coefficients p_i = <coefficient_i of cs_r_poly>::

        Re reduced_eta(c) ==  reduced_eta(hermitian part)
                              + sum_{even i} (-1)^{i/2} p_i     (mod Z)
        Im reduced_eta(c) ==  sum_{odd i} (-1)^{(i-1)/2} p_i    (exactly)

    On the circle only i in {0, 1} occur (and p_0 = 0 identically).
    """
    _require_constant_circle(c, "real/imaginary split")
    eta_full = reduced_eta_circle(c).value.reduced
    eta_herm = reduced_eta_circle(c.hermitian_part()).value.reduced
    poly = cs_r_poly(c)
    pav = [subtorus_pairing(f) for f in poly.coeffs]
    even_sum = sum(
        (-1) ** (i // 2) * p for i, p in enumerate(pav) if i % 2 == 0
    )
    odd_sum = sum(
        (-1) ** ((i - 1) // 2) * p for i, p in enumerate(pav) if i % 2 == 1
    )
    re_entry = make_entry(
        f"{check_id}[re]",
        "real part of reduced eta equals the self-adjoint reduced eta plus "
        "the even transgression coefficients, mod Z",
        complex(eta_full.real),
        eta_herm + even_sum,
        "mod-Z",
        tol_re,
    )
    im_entry = make_entry(
        f"{check_id}[im]",
        "imaginary part of reduced eta equals the odd transgression "
        "coefficients",
        complex(eta_full.imag),
        complex(odd_sum),
        "absolute",
        tol_im,
    )
    return [re_entry, im_entry]


# ----------------------------------------------------------------------
# the locally constant phase function


def psi_local(c: Connection) -> complex:
    """Local formula for the phase function: a weighted full-torus pairing
    of the odd Chern forms of degree >= 3::

        psi = -(1/2pi) sum_{j>=1} 2^{2j} j!/(2j+1)! <L . c_{2j+1}>

    Zero on the circle (no degree-3 forms) and for diagonal deformation
    defects (odd powers are traceless).
    """
    total = 0j
    j = 1
    while 2 * j + 1 <= c.dim:
        coef = 2.0 ** (2 * j) * factorial(j) / factorial(2 * j + 1)
        total -= coef / (2 * math.pi) * subtorus_pairing(c.chern_odd(j))
        j += 1
    return total


def psi_spectral(c: Connection) -> complex:
    """Spectral route to the phase function on the circle: the imaginary
    part of reduced eta plus the first-Chern pairing::

        psi = Im reduced_eta(c) + (1/2pi) <L . c_1>
    """
    _require_constant_circle(c, "spectral phase function")
    eta = reduced_eta_circle(c).value.reduced
    return complex(
        eta.imag + subtorus_pairing(c.chern_odd(0)).real / (2 * math.pi)
    )


def psi_exponential(psi: complex) -> complex:
    """The multiplicative phase factor exp(pi * psi)."""
    return cmath.exp(math.pi * complex(psi))


def check_psi_constancy(
    path: Callable[[float], Connection],
    n_samples: int = 9,
    tol: float = DEFAULT_ABS_TOL,
    check_id: str = "psi_constancy",
) -> CheckEntry:
    """The phase function is locally constant: along a path of flat
    connections, psi_local(path(t)) must not move.  The entry compares the
    farthest sampled value against the value at t = 0.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples along the path")
    times = np.linspace(0.0, 1.0, n_samples)
    values = [psi_local(path(float(t))) for t in times]
    base = values[0]
    worst = max(values, key=lambda v: abs(v - base))
    return make_entry(
        check_id,
        "the phase function is constant along a path of flat connections",
        worst,
        base,
        "absolute",
        tol,
    )


# ----------------------------------------------------------------------
# metric-independent imaginary part


def eta_tilde(c: Connection, ref: Connection | None = None) -> complex:
    """Transgression pairing from the metric-compatible reference to c::

        eta_tilde = <L . CS(hermitian_part(ref), c)>

    with ref defaulting to c itself.  Its imaginary part equals the
    imaginary part of the reduced eta invariant (checked spectrally on the
    circle) and is independent of the fiber metric used.
    """
    base = (c if ref is None else ref).hermitian_part()
    return subtorus_pairing(cs_form(base, c))


def check_eta_tilde_imaginary(
    c: Connection,
    ref: Connection | None = None,
    tol: float = 1e-8,
    check_id: str = "eta_tilde_imaginary",
) -> CheckEntry:
    """Imaginary part of the transgression from the metric-compatible
    reference equals the imaginary part of the reduced eta (circle,
    constant connections)."""
    _require_constant_circle(c, "eta-tilde check")
    lhs = complex(0.0, eta_tilde(c, ref).imag)
    rhs = complex(0.0, reduced_eta_circle(c).value.reduced.imag)
    return make_entry(
        check_id,
        "imaginary part of the hermitian-reference transgression equals the "
        "imaginary part of reduced eta",
        lhs,
        rhs,
        "absolute",
        tol,
    )


# ----------------------------------------------------------------------
# untwisted census and the phase factor


def trivial_line_eta(dim: int, cutoff: int = 4) -> EtaValue:
    """Mode census of the untwisted operator on the trivial line bundle:
    the spectrum is symmetric (eta = 0) and the zero modes count the even
    exterior algebra, 2^(dim-1)."""
    c = Connection.from_constant(
        dim, [np.zeros((1, 1), dtype=complex)] * dim
    )
    lam = spectrum(build_truncation(c, cutoff)).real
    kernel = int(np.sum(np.abs(lam) <= 1e-9))
    eta = float(np.sum(np.sign(lam[np.abs(lam) > 1e-9])))
    return EtaValue(eta=complex(eta), kernel_dim=kernel)


def bk_phase_factor(rank: int, eta_sig_trivial: EtaValue) -> complex:
    """Unit-modulus phase factor exp(i pi rank reduced_eta) built from the
    reduced eta of the untwisted operator (kernel term included)."""
    return cmath.exp(1j * math.pi * int(rank) * eta_sig_trivial.reduced)


def check_bk_phase(
    rank: int, dim: int = 1, cutoff: int = 4, check_id: str | None = None
) -> CheckEntry:
    """The censused phase factor matches the closed form
    exp(i pi rank (0 + 2^(dim-1))/2)."""
    census = trivial_line_eta(dim, cutoff)
    lhs = bk_phase_factor(rank, census)
    rhs = cmath.exp(1j * math.pi * int(rank) * 2 ** (dim - 1) / 2)
    return make_entry(
        check_id or f"bk_phase[rank={int(rank)},dim={dim}]",
        "censused phase factor matches the closed form from the zero-mode "
        "count",
        lhs,
        rhs,
        "absolute",
        1e-12,
    )


# ----------------------------------------------------------------------
# standard randomized suite


def _suite_mus(rng: np.random.Generator, n: int) -> list[complex]:
    """Tower shifts kept away from the axis and from each other."""
    out: list[complex] = []
    while len(out) < n:
        m = complex(
            rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.3)
        )
        if all(abs(m - o) > 0.05 for o in out):
            out.append(m)
    return out


def _banded_mus(rng: np.random.Generator, n: int) -> list[complex]:
    """Tower shifts in disjoint real-part bands: linear interpolation between
    two such draws never collides towers and never crosses the axis."""
    out = []
    for i in range(n):
        lo = 0.1 + 0.8 * i / n + 0.03
        hi = 0.1 + 0.8 * (i + 1) / n - 0.03
        out.append(complex(rng.uniform(lo, hi), rng.uniform(-0.3, 0.3)))
    return out


def _diag_circle(mus: Sequence[complex]) -> Connection:
    mat = np.diag([2j * math.pi * m for m in mus])
    return Connection.from_constant(1, [mat])


def standard_suite(seed: int = 0) -> VerificationReport:
    """Deterministic battery over all check families; equal seeds give
    byte-identical reports."""
    rng = np.random.default_rng(seed)
    entries: list[CheckEntry] = []

    # transgression vs odd Chern pairings: circle and 3-torus
    entries += check_cs_odd_chern_pairing(
        Connection.from_constant(1, [np.array([[1.0 + 2.0j]])]),
        r=0.5,
        label="cs_odd_chern_pairing.s1",
    )
    mus_t3 = [_suite_mus(rng, 2) for _ in range(3)]
    t3 = Connection.from_constant(
        3, [np.diag([2j * math.pi * m for m in mus]) for mus in mus_t3]
    )
    for r in (0.5, 1.0, 2.0):
        entries += check_cs_odd_chern_pairing(
            t3, r=r, label="cs_odd_chern_pairing.t3"
        )

    # variation mod Z: unitary pair, complex pair, random pair
    entries.append(
        check_gilkey_variation(
            _diag_circle([0.2]),
            _diag_circle([0.45]),
            check_id="gilkey_variation[unitary]",
        )
    )
    entries.append(
        check_gilkey_variation(
            _diag_circle([0.3 + 0.1j]),
            _diag_circle([0.6 - 0.3j]),
            check_id="gilkey_variation[complex]",
        )
    )
    m0s, m1s = _suite_mus(rng, 2), _suite_mus(rng, 2)
    entries.append(
        check_gilkey_variation(
            _diag_circle(m0s),
            _diag_circle(m1s),
            check_id="gilkey_variation[random-rank2]",
        )
    )

    # exact complex variation: crossing path, gauge pumping, random path
    def sliding(t: float) -> Connection:
        return _diag_circle([0.25 + t])

    entries.append(
        check_variation_complex(sliding, check_id="variation_complex[crossing]")
    )
    gauge_base = _diag_circle([0.3 + 0.07j, 0.55 - 0.1j])

    def gauged(t: float) -> Connection:
        return gauge_path(gauge_base, 2, t)

    entries.append(
        check_variation_complex(gauged, check_id="variation_complex[gauge-w2]")
    )
    p0, p1 = _banded_mus(rng, 2), _banded_mus(rng, 2)

    def straight(t: float) -> Connection:
        return _diag_circle([a + t * (b - a) for a, b in zip(p0, p1)])

    entries.append(
        check_variation_complex(straight, check_id="variation_complex[random]")
    )
    entries.append(check_gauge_pumping(gauge_base, 2))

    # real/imaginary split on the circle
    entries += check_re_im_split(
        _diag_circle([0.3 + 0.07j]), check_id="re_im_split[rank1]"
    )
    entries += check_re_im_split(
        _diag_circle(_suite_mus(rng, 2)), check_id="re_im_split[rank2]"
    )

    # phase function constancy: circle (dimension) and diagonal 3-torus
    q0, q1 = _suite_mus(rng, 2), _suite_mus(rng, 2)

    def circle_path(t: float) -> Connection:
        return _diag_circle([a + t * (b - a) for a, b in zip(q0, q1)])

    entries.append(
        check_psi_constancy(circle_path, check_id="psi_constancy[circle]")
    )
    d0 = [_suite_mus(rng, 2) for _ in range(3)]
    d1 = [_suite_mus(rng, 2) for _ in range(3)]

    def t3_path(t: float) -> Connection:
        mats = [
            np.diag(
                [
                    2j * math.pi * (a + t * (b - a))
                    for a, b in zip(d0[i], d1[i])
                ]
            )
            for i in range(3)
        ]
        return Connection.from_constant(3, mats)

    entries.append(
        check_psi_constancy(t3_path, check_id="psi_constancy[t3-diagonal]")
    )

    # imaginary part of the hermitian-reference transgression
    entries.append(
        check_eta_tilde_imaginary(
            _diag_circle([0.3 + 0.07j]), check_id="eta_tilde_imaginary[rank1]"
        )
    )
    entries.append(
        check_eta_tilde_imaginary(
            _diag_circle(_suite_mus(rng, 2)),
            check_id="eta_tilde_imaginary[rank2]",
        )
    )

    # untwisted census phase factors
    entries.append(check_bk_phase(1, dim=1))
    entries.append(check_bk_phase(3, dim=1))
    entries.append(check_bk_phase(2, dim=3, cutoff=2))

    return assemble_report(entries, seed=seed)

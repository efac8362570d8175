"""Connections on trivialized bundles over flat tori and the transgression
and characteristic forms built from them.

A connection is d + A for a degree-1 trig-polynomial form A, together with
a Hermitian fiber metric g.  The central derived objects:

* ``omega_metric``: the failure of d + A to preserve g (zero exactly for
  unitary connections);
* ``hermitian_part`` and the one-parameter ``r_deformation`` family that
  interpolates between the Hermitian connection, the original one, and its
  metric adjoint;
* Chern--Simons transgression forms between two connections, their
  expansion in the deformation parameter r, odd Chern forms, the Chern
  character, the Hirzebruch L-form, and the odd Chern character of a gauge
  map.

All conventions are pinned by exactly-computable calibrations in the test
suite (flat-circle Chern--Simons values, winding numbers, metric
compatibility checks), so every sign here is load-bearing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .forms import EQ_TOL, SubTorus, TrigPolyForm

TWO_PI_I = 2j * math.pi

# Deterministic sample points for positive-definiteness spot checks.
_SPOT_FRACTIONS = (0.0, 0.31830988618, 0.61803398875, 0.14142135623)


def phi_scale(branch: int = 1) -> complex:
    """The square root of 2*pi*i used by the degree normalization phi.

    branch=+1 is the principal root sqrt(2*pi)*e^{i*pi/4}; physical pairings
    must not depend on the branch (tested).
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    return branch * math.sqrt(2.0 * math.pi) * np.exp(0.25j * math.pi)


def invert_degree0(g: TrigPolyForm, tol: float = 1e-10, max_terms: int = 64) -> TrigPolyForm:
    """Invert a degree-0 form (a matrix-valued function on the torus).

    Constant functions invert by plain linear algebra.  Non-constant ones
    are attempted via the Neumann series sum (I - g)^m, which terminates
    exactly when I - g is nilpotent in the function algebra (the case for
    unipotent factors used to build non-trivial metrics).  Anything else is
    refused rather than approximated.
    """
    if set(g.degrees()) - {0}:
        raise ValueError("can only invert degree-0 forms")
    terms = list(g.terms())
    if len(terms) <= 1:
        if not terms:
            raise ValueError("zero form is not invertible")
        k, _, mat = terms[0]
        if all(v == 0 for v in k):
            return TrigPolyForm.constant(g.dim, np.linalg.inv(mat))
    ident = TrigPolyForm.identity(g.dim, g.rank)
    h = ident - g
    acc = ident
    power = ident
    for _ in range(max_terms):
        power = power.wedge(h)
        if power.is_zero(0.0):
            if g.wedge(acc).allclose(ident, tol):
                return acc
            break
        acc = acc + power
    raise ValueError(
        "degree-0 form is not invertible in closed form; "
        "supply g_inv explicitly (e.g. from a unipotent factorization)"
    )


def hermitian_metric_from_factor(
    w: TrigPolyForm, w_inv: TrigPolyForm | None = None
) -> tuple[TrigPolyForm, TrigPolyForm]:
    """Build (g, g_inv) = (w^dagger w, w^{-1} w^{-dagger}) from a factor w.

    With w = I + f(x) N for nilpotent N the inverse is exact, giving
    genuinely x-dependent positive metrics with closed-form inverses.
    """
    if w_inv is None:
        w_inv = invert_degree0(w)
    g = w.dagger().wedge(w)
    g_inv = w_inv.wedge(w_inv.dagger())
    return g, g_inv


@dataclass(frozen=True)
class Connection:
    """d + a on a trivialized rank-r bundle over T^dim, with fiber metric g.

    ``a`` must be pure degree 1.  ``g`` (degree 0) defaults to the identity;
    it must be Hermitian and positive definite (spot-checked on sample
    points).  ``g_inv`` may be supplied when g has a closed-form inverse the
    Neumann fallback cannot find.
    """

    a: TrigPolyForm
    g: TrigPolyForm = None  # type: ignore[assignment]
    g_inv: TrigPolyForm = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if set(self.a.degrees()) - {1}:
            raise ValueError("connection form must be pure degree 1")
        if self.g is None:
            ident = TrigPolyForm.identity(self.a.dim, self.a.rank)
            object.__setattr__(self, "g", ident)
            object.__setattr__(self, "g_inv", ident)
        else:
            if self.g.dim != self.a.dim or self.g.rank != self.a.rank:
                raise ValueError("metric shape mismatch")
            if set(self.g.degrees()) - {0}:
                raise ValueError("metric must be a degree-0 form")
            if not self.g.allclose(self.g.dagger(), 1e-10):
                raise ValueError("metric must be Hermitian")
            if self.g_inv is None:
                object.__setattr__(self, "g_inv", invert_degree0(self.g))
            ident = TrigPolyForm.identity(self.a.dim, self.a.rank)
            if not self.g.wedge(self.g_inv).allclose(ident, 1e-9):
                raise ValueError("g_inv is not an inverse of g")
            self._spot_check_positive()

    def _spot_check_positive(self) -> None:
        d = self.dim
        for i in range(3):
            x = [(_SPOT_FRACTIONS[(i + j) % len(_SPOT_FRACTIONS)]) for j in range(d)]
            mat = self.g.evaluate_at(x).get((), np.zeros((self.rank, self.rank)))
            vals = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
            if np.min(vals) <= 0:
                raise ValueError("metric is not positive definite at sample point")

    # ------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def rank(self) -> int:
        return self.a.rank

    @classmethod
    def from_constant(
        cls,
        dim: int,
        mats: Sequence[np.ndarray],
        g: TrigPolyForm | None = None,
        g_inv: TrigPolyForm | None = None,
    ) -> "Connection":
        """Connection with constant coefficient matrices A_1..A_dim."""
        return cls(TrigPolyForm.constant_one_form(dim, list(mats)), g, g_inv)

    def constant_coefficient(self, j: int) -> np.ndarray:
        """The constant matrix A_j; error if the dx_j part is x-dependent."""
        out = np.zeros((self.rank, self.rank), dtype=complex)
        for k, I, mat in self.a.terms():
            if I != (j,):
                continue
            if any(v != 0 for v in k):
                raise ValueError(f"dx_{j} component is not constant")
            out = out + mat
        return out

    def constant_coefficients(self) -> list[np.ndarray]:
        return [self.constant_coefficient(j) for j in range(1, self.dim + 1)]

    # ------------------------------------------------------------------
    # metric structure

    def curvature(self) -> TrigPolyForm:
        """dA + A^A; identically zero exactly for flat connections."""
        return self.a.ext_d() + self.a.wedge(self.a)

    def is_flat(self, tol: float = 1e-10) -> bool:
        return self.curvature().is_zero(tol)

    def omega_metric(self) -> TrigPolyForm:
        """g^{-1} (dg - A^dagger g - g A): the defect of metric compatibility.

        d + A + omega is the metric adjoint of d + A; omega vanishes exactly
        when the connection is unitary for g.  For g = I this is -(A^dagger + A).
        """
        nabla_g = (
            self.g.ext_d() - self.a.dagger().wedge(self.g) - self.g.wedge(self.a)
        )
        return self.g_inv.wedge(nabla_g)

    def hermitian_part(self) -> "Connection":
        """The metric-compatible connection d + A + omega/2."""
        return Connection(self.a + 0.5 * self.omega_metric(), self.g, self.g_inv)

    def r_deformation(self, r: complex) -> "Connection":
        """A + (1 + i r)/2 * omega: r=0 gives the Hermitian part, r=i the
        original connection, r=-i the metric adjoint; real r stays
        metric-compatible."""
        coef = (1.0 + 1j * complex(r)) / 2.0
        return Connection(self.a + coef * self.omega_metric(), self.g, self.g_inv)

    def metric_adjoint(self) -> "Connection":
        return self.r_deformation(-1j)

    def chern_odd(self, j: int) -> TrigPolyForm:
        """Odd Chern form of degree 2j+1: (2 pi i)^{-j} 2^{-(2j+1)} Tr[omega^{2j+1}]."""
        if j < 0:
            raise ValueError("j must be >= 0")
        w = self.omega_metric()
        power = w
        for _ in range(2 * j):
            power = power.wedge(w)
        return (TWO_PI_I ** (-j) * 2.0 ** (-(2 * j + 1))) * power.mat_trace()

    def to_json_obj(self) -> dict:
        return {
            "dim": self.dim,
            "rank": self.rank,
            "A": self.a.to_json_obj(),
            "g": self.g.to_json_obj(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Connection":
        a = TrigPolyForm.from_json_obj(obj["A"])
        g = TrigPolyForm.from_json_obj(obj["g"]) if "g" in obj and obj["g"] else None
        return cls(a, g)


# ----------------------------------------------------------------------
# deformation coefficients


def a_coeff(j: int, r: complex) -> complex:
    """a_j(r) = integral_0^1 (1 + u^2 r^2)^j du = sum_m C(j,m) r^{2m}/(2m+1)."""
    if j < 0:
        raise ValueError("j must be >= 0")
    r = complex(r)
    return sum(comb(j, m) * r ** (2 * m) / (2 * m + 1) for m in range(j + 1))


def a_coeff_exact(j: int, r_squared: Fraction) -> Fraction:
    """a_j at rational r^2, in exact arithmetic (r^2 = -1 corresponds to r = i)."""
    if j < 0:
        raise ValueError("j must be >= 0")
    return sum(
        Fraction(comb(j, m)) * r_squared**m / (2 * m + 1) for m in range(j + 1)
    )


# ----------------------------------------------------------------------
# transgression and characteristic forms


def _check_cs_compatible(c0: Connection, c1: Connection) -> None:
    if c0.dim != c1.dim or c0.rank != c1.rank:
        raise ValueError("connections live on different bundles")
    if not c0.g.allclose(c1.g, 1e-10):
        raise ValueError("Chern-Simons transgression requires a common metric")


def cs_form(c0: Connection, c1: Connection, branch: int = 1) -> TrigPolyForm:
    """Chern--Simons transgression along the linear path from c0 to c1.

    Defined as -(2 pi i)^{-1/2} phi( integral_0^1 Tr[Adot exp(-Theta_t)] dt )
    with Theta_t the curvature of A_t = (1-t)A_0 + tA_1.  The t-integrand is
    polynomial, so Gauss--Legendre with ceil(d/2)+1 nodes integrates it
    exactly; the only error is roundoff.  d(CS) equals the difference of
    Chern characters at the form level (tested).
    """
    _check_cs_compatible(c0, c1)
    d = c0.dim
    n_nodes = (d + 1) // 2 + 1
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    adot = c1.a - c0.a
    acc = TrigPolyForm.zero(d, 1)
    for x, w in zip(nodes, weights):
        t = 0.5 * (x + 1.0)
        at = c0.a + t * adot
        theta = at.ext_d() + at.wedge(at)
        integrand = adot.wedge((-theta).exp_nilpotent()).mat_trace()
        acc = acc + (0.5 * w) * integrand
    s = phi_scale(branch)
    return (-1.0 / s) * acc.phi_normalize(branch)


def chern_character(c: Connection, branch: int = 1) -> TrigPolyForm:
    """phi Tr[exp(-curvature)]: rank in degree 0 plus curvature corrections."""
    return (-c.curvature()).exp_nilpotent().mat_trace().phi_normalize(branch)


@dataclass(frozen=True)
class RPolynomial:
    """A polynomial in the deformation parameter r with form coefficients."""

    coeffs: tuple[TrigPolyForm, ...]

    def evaluate(self, r: complex) -> TrigPolyForm:
        r = complex(r)
        acc = TrigPolyForm.zero(self.coeffs[0].dim, self.coeffs[0].rank)
        for i, f in enumerate(self.coeffs):
            acc = acc + (r**i) * f
        return acc

    def degree(self) -> int:
        return len(self.coeffs) - 1


def cs_r_poly(c: Connection, branch: int = 1) -> RPolynomial:
    """Expand r -> cs_form(hermitian_part(c), r_deformation(c, r)) in powers of r.

    The dependence is polynomial of degree at most dim, recovered exactly by
    interpolation at dim+2 integer nodes; the spurious top coefficient of
    the interpolation must vanish and is checked.
    """
    d = c.dim
    herm = c.hermitian_part()
    n_coef = d + 2
    nodes: list[int] = [0]
    step = 1
    while len(nodes) < n_coef:
        nodes.append(step)
        if len(nodes) < n_coef:
            nodes.append(-step)
        step += 1
    vals = [cs_form(herm, c.r_deformation(r), branch) for r in nodes]
    vmat = np.array([[float(n) ** j for j in range(n_coef)] for n in nodes])
    vinv = np.linalg.inv(vmat)
    coeffs = []
    for j in range(n_coef):
        acc = TrigPolyForm.zero(d, 1)
        for i, val in enumerate(vals):
            acc = acc + vinv[j, i] * val
        coeffs.append(acc)
    scale = max([v.max_abs() for v in vals] + [1.0])
    if coeffs[-1].max_abs() > 1e-7 * scale:
        raise ArithmeticError(
            "CS family has unexpected r-degree; interpolation inconsistent"
        )
    return RPolynomial(tuple(coeffs[: d + 1]))


# log of (x/2)/tanh(x/2) = sum c_{2m} x^{2m}; normalized so the value at
# x = 0 is 1, making the L-form of a flat connection exactly 1.
_L_LOG_COEFFS: tuple[tuple[int, float], ...] = (
    (2, 1.0 / 12.0),
    (4, -7.0 / 1440.0),
    (6, 31.0 / 90720.0),
)


def l_form(curv: TrigPolyForm, branch: int = 1) -> TrigPolyForm:
    """Hirzebruch L-form of a curvature 2-form: phi exp(1/2 Tr log f(R))
    with f(x) = (x/2)/tanh(x/2); only degrees divisible by 4 occur.

    For the flat tori in scope R = 0 and L = 1; non-zero R exercises the
    series (tested against a direct det^{1/2} expansion).
    """
    if set(curv.degrees()) - {2}:
        raise ValueError("l_form expects a pure 2-form (a curvature)")
    d = curv.dim
    r2 = curv.wedge(curv)
    acc = TrigPolyForm.zero(d, 1)
    power = None
    for m, (x_power, coef) in enumerate(_L_LOG_COEFFS, start=1):
        if 2 * x_power > d:
            break
        power = r2 if power is None else power.wedge(r2)
        acc = acc + coef * power.mat_trace()
    if acc.is_zero(0.0):
        return TrigPolyForm.identity(d, 1)
    out = (0.5 * acc).exp_nilpotent().phi_normalize(branch)
    keep = TrigPolyForm.zero(d, 1)
    for p in range(0, d + 1, 4):
        keep = keep + out.degree_component(p)
    return keep


def odd_chern_char(
    gmap: TrigPolyForm, gmap_inv: TrigPolyForm | None = None
) -> TrigPolyForm:
    """Odd Chern character of a gauge map g: sum over m of
    (-1)^m m!/(2m+1)! (2 pi i)^{-(m+1)} Tr[(g^{-1}dg)^{2m+1}].

    The constant is pinned by the circle calibration: the integral over T^1
    equals the winding number of det(g) (tested), which fixes the m = 0
    coefficient to 1/(2 pi i).
    """
    if set(gmap.degrees()) - {0}:
        raise ValueError("gauge map must be a degree-0 form")
    if gmap_inv is None:
        gmap_inv = invert_degree0(gmap)
    ident = TrigPolyForm.identity(gmap.dim, gmap.rank)
    if not gmap.wedge(gmap_inv).allclose(ident, 1e-9):
        raise ValueError("gmap_inv is not an inverse of gmap")
    u = gmap_inv.wedge(gmap.ext_d())
    u2 = u.wedge(u)
    acc = TrigPolyForm.zero(gmap.dim, 1)
    upow = u
    m = 0
    while 2 * m + 1 <= gmap.dim:
        coef = ((-1) ** m) * factorial(m) / factorial(2 * m + 1)
        coef = coef * TWO_PI_I ** (-(m + 1))
        acc = acc + coef * upow.mat_trace()
        upow = upow.wedge(u2)
        m += 1
    return acc


# ----------------------------------------------------------------------
# gauge action, holonomy, pairings


def gauge_transform(
    c: Connection, u: TrigPolyForm, u_inv: TrigPolyForm | None = None
) -> Connection:
    """Pull back the connection by the bundle automorphism u:
    A -> u^{-1} A u + u^{-1} du, g -> u^dagger g u."""
    if u_inv is None:
        u_inv = invert_degree0(u)
    a_new = u_inv.wedge(c.a).wedge(u) + u_inv.wedge(u.ext_d())
    g_new = u.dagger().wedge(c.g).wedge(u)
    g_inv_new = u_inv.wedge(c.g_inv).wedge(u_inv.dagger())
    return Connection(a_new, g_new, g_inv_new)


def holonomy(c: Connection, j: int) -> np.ndarray:
    """Parallel transport around the j-th coordinate loop for a connection
    whose dx_j component is constant: exp(-A_j)."""
    return scipy.linalg.expm(-c.constant_coefficient(j))


def subtorus_pairing(
    form: TrigPolyForm,
    region: SubTorus | None = None,
    weight: TrigPolyForm | None = None,
) -> complex:
    """Integrate (weight ^ form) over a coordinate subtorus, selecting the
    matching degree first.  ``weight`` defaults to the constant 1 (the
    L-form of the flat metrics in scope); pass any closed even form to
    realize other characteristic-class pairings."""
    if form.rank != 1:
        raise ValueError("pairing expects a scalar (rank-1) form; trace first")
    f = form if weight is None else weight.wedge(form)
    if region is None:
        region = SubTorus.full(form.dim)
    deg = len(region.indices)
    return complex(f.degree_component(deg).integrate(region)[0, 0])


def odd_subtori(dim: int) -> tuple[SubTorus, ...]:
    """All odd-dimensional coordinate subtori of T^dim (basepoint 0)."""
    from itertools import combinations

    out = []
    for size in range(1, dim + 1, 2):
        for idx in combinations(range(1, dim + 1), size):
            out.append(SubTorus(dim, idx, (0.0,) * dim))
    return tuple(out)

"""Matrix-valued trigonometric-polynomial differential forms on flat tori.

The basic object is a finite sum of terms

    M * exp(2*pi*i <k, x>) * dx_{i_1} ^ ... ^ dx_{i_p}

where M is a fixed (rank x rank) complex matrix, k an integer frequency
vector, and 1 <= i_1 < ... < i_p <= dim.  This family of forms is closed
under addition, wedge product, exterior derivative, conjugate transpose,
trace and fiberwise exponential, so every identity downstream (Chern--Simons
transgression, L-form factorization, odd Chern character calibrations) can
be verified exactly -- up to float roundoff -- rather than on a sampling
grid.

Coordinates live on the unit torus R^d / Z^d, so the volume of the full
torus is 1 and ``exp(2*pi*i*k*x)`` is periodic for integer k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

# Terms whose matrix norm falls at or below this are treated as zero by
# comparison helpers.  Arithmetic itself only prunes exact zeros, so exact
# identities (d of d, telescoping sums) collapse to the empty form.
EQ_TOL = 1e-12

TermKey = tuple[tuple[int, ...], tuple[int, ...]]


def _merge_sign(I: tuple[int, ...], J: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign of sorting the concatenation I+J, or (0, ()) on a repeated index.

    This is the sign picked up when moving dx_I ^ dx_J into increasing
    order; a repeated index means the wedge vanishes.
    """
    merged = list(I) + list(J)
    sign = 1
    for a in range(1, len(merged)):
        b = a
        while b > 0 and merged[b - 1] > merged[b]:
            merged[b - 1], merged[b] = merged[b], merged[b - 1]
            sign = -sign
            b -= 1
        if b > 0 and merged[b - 1] == merged[b]:
            return 0, ()
    return sign, tuple(merged)


def _freeze(mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=np.complex128)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SubTorus:
    """A coordinate subtorus of T^dim: the directions in ``indices`` vary,
    the remaining coordinates are pinned at the corresponding entries of
    ``base`` (a full-length basepoint; integrated coordinates ignore it).

    ``indices`` are 1-based and strictly increasing, matching dx labels.
    """

    dim: int
    indices: tuple[int, ...]
    base: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.base) != self.dim:
            raise ValueError("base must give all dim coordinates")
        if any(not (1 <= i <= self.dim) for i in self.indices):
            raise ValueError("subtorus indices must lie in 1..dim")
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("subtorus indices must be strictly increasing")

    @classmethod
    def full(cls, dim: int) -> "SubTorus":
        return cls(dim, tuple(range(1, dim + 1)), (0.0,) * dim)


class TrigPolyForm:
    """An inhomogeneous matrix-valued form with trig-polynomial coefficients.

    Immutable by convention: all operations return new instances and the
    stored matrices are read-only views.
    """

    __slots__ = ("dim", "rank", "_terms")

    def __init__(
        self,
        dim: int,
        rank: int,
        terms: Mapping[TermKey, np.ndarray] | Iterable[tuple[TermKey, np.ndarray]] = (),
    ) -> None:
        if dim < 1 or rank < 1:
            raise ValueError("dim and rank must be positive")
        self.dim = int(dim)
        self.rank = int(rank)
        store: dict[TermKey, np.ndarray] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (k, I), mat in items:
            k = tuple(int(v) for v in k)
            I = tuple(int(v) for v in I)
            if len(k) != self.dim:
                raise ValueError(f"frequency vector {k} has wrong length for dim={dim}")
            if any(a >= b for a, b in zip(I, I[1:])) or any(
                not (1 <= i <= self.dim) for i in I
            ):
                raise ValueError(f"index tuple {I} must be strictly increasing in 1..dim")
            mat = np.asarray(mat, dtype=np.complex128)
            if mat.shape != (self.rank, self.rank):
                raise ValueError(f"matrix shape {mat.shape} != ({rank},{rank})")
            if (k, I) in store:
                mat = store[(k, I)] + mat
            if np.any(mat != 0):
                store[(k, I)] = _freeze(mat)
            else:
                store.pop((k, I), None)
        self._terms = store

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, dim: int, rank: int) -> "TrigPolyForm":
        return cls(dim, rank)

    @classmethod
    def constant(cls, dim: int, mat: np.ndarray) -> "TrigPolyForm":
        """Degree-0 form with constant coefficient ``mat``."""
        mat = np.atleast_2d(np.asarray(mat, dtype=np.complex128))
        return cls(dim, mat.shape[0], {((0,) * dim, ()): mat})

    @classmethod
    def identity(cls, dim: int, rank: int) -> "TrigPolyForm":
        return cls.constant(dim, np.eye(rank))

    @classmethod
    def monomial(
        cls,
        dim: int,
        mat: np.ndarray,
        k: Iterable[int] = (),
        I: Iterable[int] = (),
    ) -> "TrigPolyForm":
        """Single term M exp(2 pi i <k,x>) dx_I (k defaults to 0)."""
        mat = np.atleast_2d(np.asarray(mat, dtype=np.complex128))
        kk = tuple(k) if k else (0,) * dim
        return cls(dim, mat.shape[0], {(tuple(kk), tuple(I)): mat})

    @classmethod
    def constant_one_form(cls, dim: int, mats: Iterable[np.ndarray]) -> "TrigPolyForm":
        """sum_j M_j dx_j with constant matrices M_j (j = 1..dim)."""
        mats = [np.atleast_2d(np.asarray(m, dtype=np.complex128)) for m in mats]
        if len(mats) != dim:
            raise ValueError("need one matrix per coordinate")
        rank = mats[0].shape[0]
        return cls(
            dim, rank, {((0,) * dim, (j + 1,)): mats[j] for j in range(dim)}
        )

    # ------------------------------------------------------------------
    # inspection

    def terms(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], np.ndarray]]:
        for (k, I), mat in sorted(self._terms.items()):
            yield k, I, mat

    def num_terms(self) -> int:
        return len(self._terms)

    def degrees(self) -> set[int]:
        return {len(I) for (_, I) in self._terms}

    def coefficient(self, k: Iterable[int], I: Iterable[int]) -> np.ndarray:
        key = (tuple(int(v) for v in k), tuple(int(v) for v in I))
        return np.array(self._terms.get(key, np.zeros((self.rank, self.rank))))

    def max_abs(self) -> float:
        if not self._terms:
            return 0.0
        return max(float(np.max(np.abs(m))) for m in self._terms.values())

    def is_zero(self, tol: float = EQ_TOL) -> bool:
        return self.max_abs() <= tol

    def allclose(self, other: "TrigPolyForm", tol: float = EQ_TOL) -> bool:
        return (self - other).is_zero(tol)

    def __repr__(self) -> str:  # short, for debugging/tests
        return (
            f"TrigPolyForm(dim={self.dim}, rank={self.rank}, "
            f"terms={len(self._terms)}, degrees={sorted(self.degrees())})"
        )

    # ------------------------------------------------------------------
    # linear structure

    def _check_compatible(self, other: "TrigPolyForm") -> None:
        if self.dim != other.dim or self.rank != other.rank:
            raise ValueError("forms live on different tori or bundle ranks")

    def __add__(self, other: "TrigPolyForm") -> "TrigPolyForm":
        self._check_compatible(other)
        out = dict(self._terms)
        for key, mat in other._terms.items():
            cur = out.get(key)
            mat = mat if cur is None else cur + mat
            if np.any(mat != 0):
                out[key] = mat
            else:
                out.pop(key, None)
        return TrigPolyForm(self.dim, self.rank, out)

    def __neg__(self) -> "TrigPolyForm":
        return TrigPolyForm(
            self.dim, self.rank, {key: -mat for key, mat in self._terms.items()}
        )

    def __sub__(self, other: "TrigPolyForm") -> "TrigPolyForm":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "TrigPolyForm":
        scalar = complex(scalar)
        if scalar == 0:
            return TrigPolyForm.zero(self.dim, self.rank)
        return TrigPolyForm(
            self.dim, self.rank, {key: scalar * mat for key, mat in self._terms.items()}
        )

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "TrigPolyForm":
        return self * (1.0 / complex(scalar))

    # ------------------------------------------------------------------
    # graded algebra

    def wedge(self, other: "TrigPolyForm") -> "TrigPolyForm":
        """Wedge product; matrix coefficients multiply in order."""
        self._check_compatible(other)
        out: dict[TermKey, np.ndarray] = {}
        for (k, I), M in self._terms.items():
            for (l, J), N in other._terms.items():
                sign, K = _merge_sign(I, J)
                if sign == 0:
                    continue
                key = (tuple(a + b for a, b in zip(k, l)), K)
                mat = sign * (M @ N)
                cur = out.get(key)
                out[key] = mat if cur is None else cur + mat
        return TrigPolyForm(self.dim, self.rank, out)

    def ext_d(self) -> "TrigPolyForm":
        """Exterior derivative: d(M e^{2 pi i k.x} dx_I)
        = sum_j (2 pi i k_j) M e^{2 pi i k.x} dx_j ^ dx_I."""
        out: dict[TermKey, np.ndarray] = {}
        for (k, I), M in self._terms.items():
            for j, kj in enumerate(k, start=1):
                if kj == 0:
                    continue
                sign, K = _merge_sign((j,), I)
                if sign == 0:
                    continue
                key = (k, K)
                mat = (sign * 2j * math.pi * kj) * M
                cur = out.get(key)
                out[key] = mat if cur is None else cur + mat
        return TrigPolyForm(self.dim, self.rank, out)

    def dagger(self) -> "TrigPolyForm":
        """Fiberwise conjugate transpose.

        Matrices go to M^*, frequencies to -k (conjugating the phase), and
        the real coordinate differentials are fixed.  For homogeneous forms
        this satisfies (a ^ b)^dagger = (-1)^{pq} b^dagger ^ a^dagger.
        """
        return TrigPolyForm(
            self.dim,
            self.rank,
            {
                (tuple(-v for v in k), I): mat.conj().T
                for (k, I), mat in self._terms.items()
            },
        )

    def hermitian_part(self) -> "TrigPolyForm":
        return (self + self.dagger()) * 0.5

    def anti_hermitian_part(self) -> "TrigPolyForm":
        return (self - self.dagger()) * 0.5

    def mat_trace(self) -> "TrigPolyForm":
        """Fiberwise matrix trace; result has rank 1 so the algebra stays closed."""
        out: dict[TermKey, np.ndarray] = {}
        for (k, I), mat in self._terms.items():
            tr = np.trace(mat)
            key = (k, I)
            cur = out.get(key)
            val = np.array([[tr]])
            out[key] = val if cur is None else cur + val
        return TrigPolyForm(self.dim, 1, out)

    def degree_component(self, p: int) -> "TrigPolyForm":
        return TrigPolyForm(
            self.dim,
            self.rank,
            {key: mat for key, mat in self._terms.items() if len(key[1]) == p},
        )

    def wedge_power(self, n: int) -> "TrigPolyForm":
        if n < 0:
            raise ValueError("negative wedge power")
        out = TrigPolyForm.identity(self.dim, self.rank)
        for _ in range(n):
            out = out.wedge(self)
        return out

    def exp_nilpotent(self) -> "TrigPolyForm":
        """Fiberwise exponential of a form with only even degrees >= 2.

        Each wedge power raises the degree by at least 2, so the series
        terminates after at most dim/2 powers and the result is exact.
        Restricting to even degrees keeps the summands in the commutative
        center of the grading (no hidden sign subtleties for curvature
        exponentials).
        """
        if any(p == 0 or p % 2 for p in self.degrees()):
            raise ValueError("exp_nilpotent requires even degrees >= 2 only")
        result = TrigPolyForm.identity(self.dim, self.rank)
        power = result
        for m in range(1, self.dim // 2 + 1):
            power = power.wedge(self) / m
            if not power._terms:
                break
            result = result + power
        return result

    # ------------------------------------------------------------------
    # normalization, evaluation, integration

    def phi_normalize(self, branch: int = 1) -> "TrigPolyForm":
        """Degree-dependent rescaling: a p-form is divided by s^p with
        s = branch * sqrt(2 pi) e^{i pi/4}, i.e. s^2 = 2 pi i * branch^2.

        The branch sign (+1 default) picks the square root; quantities built
        here (Chern--Simons pairings, L-form, odd Chern character) are
        branch-independent.
        """
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        s = branch * math.sqrt(2.0 * math.pi) * np.exp(0.25j * math.pi)
        return TrigPolyForm(
            self.dim,
            self.rank,
            {key: mat / s ** len(key[1]) for key, mat in self._terms.items()},
        )

    def evaluate_at(self, x: Iterable[float]) -> dict[tuple[int, ...], np.ndarray]:
        """Sum the trig polynomial at the point x; one matrix per index tuple."""
        x = tuple(float(v) for v in x)
        if len(x) != self.dim:
            raise ValueError("point has wrong dimension")
        out: dict[tuple[int, ...], np.ndarray] = {}
        for (k, I), mat in self._terms.items():
            phase = np.exp(2j * math.pi * sum(kj * xj for kj, xj in zip(k, x)))
            cur = out.get(I)
            val = phase * mat
            out[I] = val if cur is None else cur + val
        return out

    def integrate(self, region: SubTorus | None = None) -> np.ndarray:
        """Integrate over a coordinate subtorus (default: the full torus).

        The form is pulled back to the subtorus (coordinates outside
        ``region.indices`` pinned at the basepoint) and its top-degree part
        integrated with unit total volume.  Terms whose index set is a
        *proper* subset of the subtorus directions would pull back to a
        nonzero lower-degree form: that is a degree mismatch and raises
        ValueError.  Callers integrating an inhomogeneous form should select
        ``degree_component(len(region.indices))`` first.
        """
        if region is None:
            region = SubTorus.full(self.dim)
        elif region.dim != self.dim:
            raise ValueError("region lives on a different torus")
        Jset = frozenset(region.indices)
        total = np.zeros((self.rank, self.rank), dtype=np.complex128)
        for (k, I), mat in self._terms.items():
            if not set(I) <= Jset:
                continue  # a dx outside the subtorus pulls back to zero
            if len(I) != len(region.indices):
                raise ValueError(
                    "integrand has a lower-degree component on the subtorus; "
                    "take degree_component first"
                )
            if any(k[j - 1] != 0 for j in region.indices):
                continue  # oscillatory in an integrated direction: mean zero
            fixed_phase = sum(
                k[j] * region.base[j] for j in range(self.dim) if (j + 1) not in Jset
            )
            total += np.exp(2j * math.pi * fixed_phase) * mat
        return total

    # ------------------------------------------------------------------
    # serialization

    def to_json_obj(self) -> dict:
        terms = []
        for k, I, mat in self.terms():
            terms.append(
                {
                    "k": list(k),
                    "I": list(I),
                    "re": np.real(mat).tolist(),
                    "im": np.imag(mat).tolist(),
                }
            )
        return {"dim": self.dim, "rank": self.rank, "terms": terms}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "TrigPolyForm":
        dim = int(obj["dim"])
        rank = int(obj["rank"])
        terms: list[tuple[TermKey, np.ndarray]] = []
        for t in obj["terms"]:
            mat = np.asarray(t["re"], dtype=float) + 1j * np.asarray(
                t["im"], dtype=float
            )
            terms.append(((tuple(t["k"]), tuple(t["I"])), mat))
        return cls(dim, rank, terms)

"""Twisted odd signature operators on S^1, T^3 (and T^5) via Fourier modes.

The operator is D = Gamma sum_j c(e_j) (d/dx_j + A_j(x)) acting on
even-degree exterior forms twisted by the bundle, where c(X) = X^* - i_X is
the Clifford action on the full exterior algebra and
Gamma = i^{n+1} c(e_1)...c(e_d) for d = 2n+1.  Both Gamma and each c(e_j)
flip exterior parity, so their composite preserves the even part; Gamma
squares to the identity.

For constant connection forms the Fourier modes decouple: one block of
size 2^{d-1} * rank per frequency k, namely
    M(k) = sum_j B_j (x) (2 pi i k_j I + A_j),   B_j = (Gamma c(e_j))|_even.
The orientation of Gamma is fixed by the circle calibration: for d = 1 and
A = 2 pi i mu, the spectrum over the modes is exactly {2 pi (k + mu)}.

Trig-polynomial connections produce a coupled Galerkin matrix over the
truncated mode lattice; a memory guard refuses truncations that would not
fit instead of attempting them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from .geometry import Connection

# refuse eigenproblem storage beyond this many bytes (complex128 dense)
DEFAULT_MEMORY_LIMIT = 512 * 1024 * 1024


class MemoryGuardError(RuntimeError):
    """A requested truncation exceeds the configured memory budget."""


class CliffordModel:
    """Clifford action c(e_j) = e_j wedge - contraction on Lambda(C^d),
    with the chirality-style element Gamma = i^{n+1} c(e_1)...c(e_d).

    Basis: subsets of {1..d} as bitmasks, ordered by integer value.
    """

    def __init__(self, dim: int) -> None:
        if dim < 1 or dim % 2 == 0:
            raise ValueError("dim must be odd and >= 1")
        self.dim = dim
        n_states = 1 << dim
        self.c = []
        for j in range(dim):
            mat = np.zeros((n_states, n_states), dtype=complex)
            bit = 1 << j
            for s in range(n_states):
                # sign: number of basis indices below j already present
                sign = (-1) ** bin(s & (bit - 1)).count("1")
                if s & bit:
                    mat[s ^ bit, s] = -sign  # contraction removes e_j
                else:
                    mat[s | bit, s] = sign  # wedge inserts e_j
            self.c.append(mat)
        n = (dim - 1) // 2
        gamma = np.eye(n_states, dtype=complex)
        for j in range(dim):
            gamma = gamma @ self.c[j]
        self.gamma = (1j) ** (n + 1) * gamma
        self.even_states = [s for s in range(n_states) if bin(s).count("1") % 2 == 0]
        # B_j = (Gamma c_j) restricted to the even part (parity-preserving)
        self.b = [
            (self.gamma @ cj)[np.ix_(self.even_states, self.even_states)]
            for cj in self.c
        ]

    @property
    def even_dim(self) -> int:
        return len(self.even_states)


_MODEL_CACHE: dict[int, CliffordModel] = {}


def clifford_model(dim: int) -> CliffordModel:
    if dim not in _MODEL_CACHE:
        _MODEL_CACHE[dim] = CliffordModel(dim)
    return _MODEL_CACHE[dim]


def build_sig_mode(c: Connection, k: Iterable[int]) -> np.ndarray:
    """Signature-operator block on the Fourier mode e^{2 pi i k.x} for a
    constant connection: sum_j B_j (x) (2 pi i k_j I + A_j)."""
    model = clifford_model(c.dim)
    k = tuple(int(v) for v in k)
    if len(k) != c.dim:
        raise ValueError("mode frequency has wrong length")
    mats = c.constant_coefficients()  # raises for non-constant A
    out = np.zeros((model.even_dim * c.rank,) * 2, dtype=complex)
    eye_r = np.eye(c.rank)
    for j in range(c.dim):
        out += np.kron(model.b[j], 2j * math.pi * k[j] * eye_r + mats[j])
    return out


@dataclass(frozen=True)
class OperatorTruncation:
    """Finite section of the twisted odd signature operator.

    Either block-diagonal over modes (constant connections: ``blocks`` maps
    each frequency to its matrix) or one dense coupled matrix over the mode
    lattice (trig-polynomial connections).
    """

    dim: int
    rank: int
    cutoff: int
    modes: tuple[tuple[int, ...], ...]
    blocks: Mapping[tuple[int, ...], np.ndarray] | None
    dense: np.ndarray | None
    formally_self_adjoint: bool

    @property
    def block_diagonal(self) -> bool:
        return self.blocks is not None

    @property
    def size(self) -> int:
        per_mode = clifford_model(self.dim).even_dim * self.rank
        return len(self.modes) * per_mode

    def full_matrix(self) -> np.ndarray:
        if self.dense is not None:
            return np.array(self.dense)
        per = clifford_model(self.dim).even_dim * self.rank
        out = np.zeros((self.size, self.size), dtype=complex)
        for i, k in enumerate(self.modes):
            out[i * per : (i + 1) * per, i * per : (i + 1) * per] = self.blocks[k]
        return out


def _is_constant(c: Connection) -> bool:
    return all(all(v == 0 for v in k) for k, _, _ in c.a.terms())


def build_truncation(
    c: Connection, cutoff: int, memory_limit: int = DEFAULT_MEMORY_LIMIT
) -> OperatorTruncation:
    """Assemble the Galerkin section over modes {k : |k_j| <= cutoff}.

    Constant connections stay block-diagonal (one small block per mode);
    anything else produces one dense coupled matrix.  Refuses to allocate
    past ``memory_limit`` bytes of matrix storage.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    model = clifford_model(c.dim)
    modes = tuple(product(range(-cutoff, cutoff + 1), repeat=c.dim))
    per = model.even_dim * c.rank
    self_adjoint = c.omega_metric().is_zero(1e-10)
    if _is_constant(c):
        bytes_needed = len(modes) * per * per * 16
        if bytes_needed > memory_limit:
            raise MemoryGuardError(
                f"block storage would need {bytes_needed} bytes "
                f"(limit {memory_limit}); lower the cutoff"
            )
        blocks = {k: build_sig_mode(c, k) for k in modes}
        return OperatorTruncation(
            c.dim, c.rank, cutoff, modes, blocks, None, self_adjoint
        )
    size = len(modes) * per
    bytes_needed = size * size * 16
    if bytes_needed > memory_limit:
        raise MemoryGuardError(
            f"dense Galerkin matrix would need {bytes_needed} bytes "
            f"(limit {memory_limit}); lower the cutoff"
        )
    index = {k: i for i, k in enumerate(modes)}
    dense = np.zeros((size, size), dtype=complex)
    eye_r = np.eye(c.rank)
    # derivative part: diagonal in the mode index
    for k, i in index.items():
        blk = np.zeros((per, per), dtype=complex)
        for j in range(c.dim):
            blk += np.kron(model.b[j], 2j * math.pi * k[j] * eye_r)
        dense[i * per : (i + 1) * per, i * per : (i + 1) * per] += blk
    # multiplication part: A_j\'s frequency q couples k -> k + q
    for q, I, mat in c.a.terms():
        j = I[0] - 1
        coupling = np.kron(model.b[j], mat)
        for k, i in index.items():
            target = tuple(a + b for a, b in zip(k, q))
            it = index.get(target)
            if it is None:
                continue  # Galerkin projection drops out-of-window modes
            dense[it * per : (it + 1) * per, i * per : (i + 1) * per] += coupling
    return OperatorTruncation(c.dim, c.rank, cutoff, modes, None, dense, self_adjoint)


def spectrum(t: OperatorTruncation) -> np.ndarray:
    """All eigenvalues with multiplicity, sorted by (Re, Im)."""
    if t.block_diagonal:
        vals = np.concatenate(
            [np.linalg.eigvals(t.blocks[k]) for k in t.modes]
        )
    else:
        vals = np.linalg.eigvals(t.dense)
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def spectrum_rows(t: OperatorTruncation) -> list[tuple[float, float, str]]:
    """(Re, Im, mode-label) rows; mode column is empty for coupled matrices."""
    rows = []
    if t.block_diagonal:
        for k in sorted(t.modes):
            vals = np.linalg.eigvals(t.blocks[k])
            vals = vals[np.lexsort((vals.imag, vals.real))]
            label = " ".join(str(v) for v in k)
            rows.extend((float(v.real), float(v.imag), label) for v in vals)
    else:
        rows.extend(
            (float(v.real), float(v.imag), "") for v in spectrum(t)
        )
    return rows


def export_spectrum_csv(t: OperatorTruncation, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "mode"])
        writer.writerows(spectrum_rows(t))


def s1_mu_list(c: Connection) -> list[complex]:
    """Tower shifts mu for a constant connection on S^1: the spectrum is
    the union over eigenvalues a of A_1 of {2 pi (n + a/(2 pi i))}."""
    if c.dim != 1:
        raise ValueError("mu towers are defined on S^1")
    a1 = c.constant_coefficient(1)
    return [complex(v) / (2j * math.pi) for v in np.linalg.eigvals(a1)]

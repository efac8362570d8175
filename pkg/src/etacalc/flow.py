"""Spectral flow for paths of (possibly non-self-adjoint) operators.

Eigenvalues are tracked along a sampled operator path by
minimal-total-distance matching between consecutive spectra, with adaptive
bisection wherever the matching is ambiguous (eigenvalues move more than
half the local spectral gap) or a track hugs the imaginary axis closely
enough to hide a double crossing.  The flow counts signed crossings of the
imaginary axis Re lambda = 0.

Sign convention: a track moving from Re < 0 to Re >= 0 contributes +1.
This is the classical (self-adjoint) convention; it is the unique choice
consistent with the complex-valued variation formula on the circle, where
eta_bar(1) - eta_bar(0) = sf + transgression integral demands sf = +w for
the winding-w gauge path (each tower's floor(Re mu) rises by w).  Both raw
crossing counts are exposed for callers that prefer the opposite ordering.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .forms import TrigPolyForm
from .geometry import Connection, gauge_transform
from .spectral import OperatorTruncation, spectrum


class TrackError(RuntimeError):
    """Eigenvalue tracking could not be disambiguated within the refinement
    budget (near-collision or axis tangency)."""


@dataclass(frozen=True)
class EigenvalueTrack:
    """Matched eigenvalue paths over a refined grid in [0, 1].

    ``values[i, j]`` is eigenvalue j at ``times[i]``; column j is one
    continuously-matched track.  ``refinement_log`` records each interval
    bisection as (t_lo, t_hi, reason).
    """

    times: np.ndarray
    values: np.ndarray
    axis_delta: float
    refinement_log: tuple[tuple[float, float, str], ...]

    @property
    def n_tracks(self) -> int:
        return self.values.shape[1]

    def track(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return self.values[0], self.values[-1]


def _sample_spectrum(sample) -> np.ndarray:
    if isinstance(sample, OperatorTruncation):
        return spectrum(sample)
    arr = np.asarray(sample, dtype=complex)
    if arr.ndim == 2:
        vals = np.linalg.eigvals(arr)
        return vals[np.lexsort((vals.imag, vals.real))]
    if arr.ndim == 1:
        return arr[np.lexsort((arr.imag, arr.real))]
    raise TypeError("path samples must be truncations, matrices, or spectra")


def _distinct_neighbor_distance(vals: np.ndarray, cluster_tol: float) -> np.ndarray:
    """Per-eigenvalue distance to the nearest *distinct* eigenvalue
    (co-located cluster members closer than cluster_tol do not count)."""
    dist = np.abs(vals[:, None] - vals[None, :])
    dist[dist <= cluster_tol] = np.inf
    return dist.min(axis=1)


def _match(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Reorder v to minimize the total matching distance to u."""
    cost = np.abs(u[:, None] - v[None, :])
    row, col = linear_sum_assignment(cost)
    out = np.empty_like(v)
    out[row] = v[col]
    return out


def _needs_refinement(
    u: np.ndarray, v: np.ndarray, delta: float, cluster_tol: float
) -> str | None:
    moves = np.abs(u - v)
    # a track is safely matchable when it moves less than half its own
    # distance to the nearest distinct neighbor at both interval ends
    room = np.minimum(
        _distinct_neighbor_distance(u, cluster_tol),
        _distinct_neighbor_distance(v, cluster_tol),
    )
    if np.any(moves > 0.5 * room):
        return "matching-ambiguous"
    # A track that stays on one side of the axis but comes within delta of
    # it *and* moves farther than the sum of its endpoint distances could
    # dip across and back unseen; refine until the move budget rules the
    # dip out.  (Strict inequality so linear tracks starting exactly on
    # the axis terminate.)
    for i in range(len(u)):
        if (u[i].real >= 0) == (v[i].real >= 0):
            near = min(abs(u[i].real), abs(v[i].real))
            if near <= delta and moves[i] > abs(u[i].real) + abs(v[i].real):
                return "axis-proximity"
    return None


def track_path(
    path: Callable[[float], object],
    m0: int = 8,
    max_depth: int = 20,
    axis_delta: float | None = None,
    cluster_tol: float | None = None,
) -> EigenvalueTrack:
    """Track the spectrum of ``path(t)`` over t in [0, 1].

    ``path`` may return an OperatorTruncation, a square matrix, or a
    precomputed eigenvalue vector (of constant length along the path).  The
    initial grid of ``m0`` intervals is bisected wherever eigenvalue
    matching is ambiguous or a track hugs the imaginary axis; exceeding
    ``max_depth`` bisections on one interval raises TrackError.  Tracks
    that run *along* the axis within delta while moving are treated as
    genuinely ambiguous and also end in TrackError.
    """
    if m0 < 1:
        raise ValueError("need at least one interval")
    times = np.linspace(0.0, 1.0, m0 + 1)
    spectra = [_sample_spectrum(path(t)) for t in times]
    sizes = {len(s) for s in spectra}
    if len(sizes) != 1:
        raise TrackError(f"spectrum size changes along the path: {sorted(sizes)}")
    scale = max(float(np.max(np.abs(s))) for s in spectra) if spectra else 0.0
    if axis_delta is None:
        axis_delta = 1e-3 * (1.0 + scale)
    if cluster_tol is None:
        cluster_tol = 1e-9 * (1.0 + scale)

    log: list[tuple[float, float, str]] = []
    out_times: list[float] = [float(times[0])]
    out_vals: list[np.ndarray] = [spectra[0]]

    def extend(t0: float, u: np.ndarray, t1: float, v_raw: np.ndarray,
               depth: int) -> None:
        v = _match(u, v_raw)
        reason = _needs_refinement(u, v, axis_delta, cluster_tol)
        if reason is None:
            out_times.append(t1)
            out_vals.append(v)
            return
        if depth >= max_depth:
            raise TrackError(
                f"cannot disambiguate tracks on [{t0:.6g}, {t1:.6g}] "
                f"after {max_depth} bisections ({reason}); eigenvalues "
                "may collide or touch the imaginary axis tangentially"
            )
        log.append((t0, t1, reason))
        tm = 0.5 * (t0 + t1)
        w = _sample_spectrum(path(tm))
        if len(w) != len(u):
            raise TrackError("spectrum size changes along the path")
        extend(t0, u, tm, w, depth + 1)
        extend(tm, out_vals[-1], t1, v_raw, depth + 1)

    for i in range(m0):
        extend(float(times[i]), out_vals[-1], float(times[i + 1]),
               spectra[i + 1], 0)
    return EigenvalueTrack(
        times=np.array(out_times),
        values=np.vstack(out_vals),
        axis_delta=axis_delta,
        refinement_log=tuple(log),
    )


def crossing_counts(tr: EigenvalueTrack) -> tuple[int, int]:
    """(number of Re>=0 -> Re<0 transitions, number of Re<0 -> Re>=0
    transitions) summed over all tracks and grid steps."""
    nonneg = tr.values.real >= 0
    pos_to_neg = int(np.sum(nonneg[:-1] & ~nonneg[1:]))
    neg_to_pos = int(np.sum(~nonneg[:-1] & nonneg[1:]))
    return pos_to_neg, neg_to_pos


def spectral_flow(tr: EigenvalueTrack, axis_tol: float = 1e-9) -> int:
    """Net signed count of imaginary-axis crossings: +1 per track moving
    from Re < 0 to Re >= 0, -1 for the reverse (classical convention; see
    the module docstring for why this orientation is forced).

    Endpoint eigenvalues within ``axis_tol`` of the axis are rejected:
    their class is not stable under perturbation, so the caller must move
    the endpoints first.
    """
    start, end = tr.endpoints()
    for side, vals in (("start", start), ("end", end)):
        bad = np.abs(vals.real) <= axis_tol
        if np.any(bad):
            raise ValueError(
                f"{side} of path has eigenvalue(s) on the imaginary axis "
                f"(|Re| <= {axis_tol:g}): {vals[bad]}; perturb the endpoints"
            )
    return int(np.sum(end.real >= 0) - np.sum(start.real >= 0))


def gauge_path(c: Connection, w: int, t: float) -> Connection:
    """Connection at time t on the straight line from A to its gauge
    transform by u = diag(e^{2 pi i w x}, 1, ..., 1) on the circle:
    A_t = (1-t) A + t (u^{-1} A u + u^{-1} du).  Endpoints are
    gauge-equivalent, so the path pumps exactly w eigenvalue towers across
    the axis (sf = +w for diagonal A)."""
    if c.dim != 1:
        raise ValueError("gauge paths are defined on the circle")
    w = int(w)
    rank = c.rank
    e11 = np.zeros((rank, rank), dtype=complex)
    e11[0, 0] = 1.0
    rest = np.eye(rank, dtype=complex)
    rest[0, 0] = 0.0
    u = TrigPolyForm.constant(1, rest) + TrigPolyForm.monomial(1, e11, k=(w,))
    u_inv = TrigPolyForm.constant(1, rest) + TrigPolyForm.monomial(
        1, e11, k=(-w,)
    )
    target = gauge_transform(c, u, u_inv)
    a_t = c.a * (1.0 - t) + target.a * t
    return Connection(a_t, c.g, c.g_inv)


def export_tracks_csv(tr: EigenvalueTrack, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "re", "im", "track"])
        for i, t in enumerate(tr.times):
            for j in range(tr.n_tracks):
                v = tr.values[i, j]
                writer.writerow([f"{t:.12g}", f"{v.real:.17g}",
                                 f"{v.imag:.17g}", j])

"""Eigenvalue tracking and spectral flow: crossing calibration, gauge-path
winding, refinement behavior, and collision diagnostics."""

import math

import numpy as np
import pytest

from etacalc.flow import (
    TrackError,
    crossing_counts,
    export_tracks_csv,
    gauge_path,
    spectral_flow,
    track_path,
)
from etacalc.geometry import Connection
from etacalc.spectral import build_truncation, s1_mu_list

from helpers import diagonal_connection_from_mus


def test_constant_path_has_constant_tracks_and_zero_flow():
    vals = np.array([1.5 + 0.2j, -0.7, 2.0 - 1.0j])
    tr = track_path(lambda t: vals)
    assert np.allclose(tr.values, tr.values[0][None, :])
    assert spectral_flow(tr) == 0
    assert crossing_counts(tr) == (0, 0)
    assert tr.refinement_log == ()


def test_single_upward_crossing_is_plus_one():
    # classical sign convention: Re < 0 -> Re >= 0 counts +1 (the choice
    # forced by the complex variation formula; see flow module docstring)
    tr = track_path(lambda t: np.array([[(t - 0.5) + 0.3j]]))
    assert spectral_flow(tr) == 1
    assert crossing_counts(tr) == (0, 1)


def test_single_downward_crossing_is_minus_one():
    tr = track_path(lambda t: np.array([[(0.5 - t) + 0.3j]]))
    assert spectral_flow(tr) == -1
    assert crossing_counts(tr) == (1, 0)


def test_endpoint_on_axis_is_rejected():
    # starts exactly on the axis, then moves into Re > 0
    tr = track_path(lambda t: np.array([t + 1j]))
    with pytest.raises(ValueError):
        spectral_flow(tr)


def test_track_moving_along_axis_is_ambiguous():
    # a track that travels *along* the imaginary axis has no well-defined
    # crossing count; tracking refuses it
    with pytest.raises(TrackError):
        track_path(lambda t: np.array([1j * (1 + t)]))


def test_track_columns_preserve_identity():
    def path(t):
        return np.array([2 * t - 0.7 + 0.2j, -1 + 0.5 * t + 0.1j])

    tr = track_path(path)
    start, end = tr.endpoints()
    crossers = [j for j in range(2) if start[j].real < 0 <= end[j].real]
    assert len(crossers) == 1
    j = crossers[0]
    assert end[j] == pytest.approx(1.3 + 0.2j, abs=1e-12)


def test_gauge_path_endpoints_are_gauge_related():
    c = diagonal_connection_from_mus([0.3])
    assert gauge_path(c, 2, 0.0).a.allclose(c.a)
    end = gauge_path(c, 2, 1.0)
    assert end.is_flat()
    assert s1_mu_list(end)[0] == pytest.approx(0.3 + 2, abs=1e-12)
    # w = 0 gives the constant path
    assert gauge_path(c, 0, 0.7).a.allclose(c.a)


def test_gauge_path_rejects_higher_tori():
    c3 = Connection.from_constant(3, [np.zeros((1, 1))] * 3)
    with pytest.raises(ValueError):
        gauge_path(c3, 1, 0.5)


def test_gauge_winding_pumps_flow_with_linear_tracks():
    c = diagonal_connection_from_mus([0.3])
    tr = track_path(lambda t: build_truncation(gauge_path(c, 2, t), 10))
    assert spectral_flow(tr) == 2
    assert crossing_counts(tr) == (0, 2)
    # every track is affine in t (exact tower motion 2 pi (n + mu + w t))
    assert np.max(np.abs(np.diff(tr.values, n=2, axis=0))) < 1e-10


def test_gauge_winding_negative():
    c = diagonal_connection_from_mus([0.3])
    tr = track_path(lambda t: build_truncation(gauge_path(c, -3, t), 8))
    assert spectral_flow(tr) == -3
    assert crossing_counts(tr) == (3, 0)


def test_gauge_path_dense_nonnormal_triangular():
    # upper-triangular constant part: the operator path stays triangular,
    # so the exact spectrum is the union of two scalar towers (one pumped,
    # one static complex) while the Galerkin matrix is genuinely coupled
    a = np.array([[2j * math.pi * 0.3, 0.1],
                  [0.0, 2j * math.pi * (0.62 + 0.1j)]])
    c = Connection.from_constant(1, [a])
    tr = track_path(lambda t: build_truncation(gauge_path(c, 1, t), 6))
    assert spectral_flow(tr) == 1
    assert crossing_counts(tr) == (0, 1)


def test_gauge_path_self_adjoint_avoided_crossing():
    a = np.array([[2j * math.pi * 0.3, 0.1],
                  [-0.1, 2j * math.pi * 0.55]])
    c = Connection.from_constant(1, [a])
    tr = track_path(lambda t: build_truncation(gauge_path(c, 1, t), 6))
    assert spectral_flow(tr) == 1
    # self-adjoint path: tracks stay real
    assert np.max(np.abs(tr.values.imag)) < 1e-12
    assert len(tr.refinement_log) > 0  # avoided crossing forces refinement


def test_classical_two_by_two_crossing_family():
    # Hermitian family whose upper eigenvalue t - 1 + sqrt(1/4 + 0.09)
    # crosses zero once upward; brute-force signed-crossing count agrees
    def path(t):
        return np.array([[t - 0.5, 0.3], [0.3, t - 1.5]])

    tr = track_path(path)
    assert spectral_flow(tr) == 1
    assert crossing_counts(tr) == (0, 1)
    fine = np.linspace(0, 1, 2001)
    upper = np.array([(t - 1) + np.hypot(0.5, 0.3) for t in fine])
    brute = int(np.sum((upper[:-1] < 0) & (upper[1:] >= 0))
                - np.sum((upper[:-1] >= 0) & (upper[1:] < 0)))
    assert spectral_flow(tr) == brute


def test_flow_additive_under_concatenation():
    def full(t):
        return np.array([2 * t - 0.7 + 0.2j, -1 + 0.5 * t + 0.1j])

    sf_full = spectral_flow(track_path(full))
    sf_first = spectral_flow(track_path(lambda s: full(0.5 * s)))
    sf_second = spectral_flow(track_path(lambda s: full(0.5 + 0.5 * s)))
    assert sf_full == sf_first + sf_second == 1


def test_flow_invariant_under_grid_refinement():
    c = diagonal_connection_from_mus([0.3])

    def path(t):
        return build_truncation(gauge_path(c, 2, t), 10)

    assert spectral_flow(track_path(path, m0=8)) == 2
    assert spectral_flow(track_path(path, m0=16)) == 2

    def small(t):
        return np.array([[(t - 0.5) + 0.3j]])

    assert spectral_flow(track_path(small, m0=8)) == spectral_flow(
        track_path(small, m0=16)
    )


def test_flow_stable_under_cutoff_growth():
    c = diagonal_connection_from_mus([0.3])
    flows = [
        spectral_flow(
            track_path(lambda t: build_truncation(gauge_path(c, 1, t), n))
        )
        for n in (6, 9, 12)
    ]
    assert flows == [1, 1, 1]


def test_eigenvalue_collision_raises_diagnostic():
    # double zero eigenvalue at t = 1/2: +-sqrt(t - 1/2) collides, tracking
    # must refuse rather than guess
    with pytest.raises(TrackError):
        track_path(lambda t: np.array([[0.0, 1.0], [t - 0.5, 0.0]]))


def test_track_path_input_validation():
    with pytest.raises(ValueError):
        track_path(lambda t: np.array([1.0 + 0j]), m0=0)

    def varying(t):
        return np.ones(2 if t < 0.5 else 3, dtype=complex)

    with pytest.raises(TrackError):
        track_path(varying)


def test_export_tracks_csv(tmp_path):
    tr = track_path(lambda t: np.array([(t - 0.5) + 0.3j, 2.0 + 0j]))
    out = tmp_path / "tracks.csv"
    export_tracks_csv(tr, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,re,im,track"
    assert len(lines) == 1 + len(tr.times) * tr.n_tracks

"""Shared hypothesis strategies and small deterministic generators."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from etacalc.forms import TrigPolyForm
from etacalc.geometry import Connection

# Small integer/rational-ish entries keep float roundoff tiny, so exact
# identities can be asserted at tight tolerances.
_entry = st.sampled_from(
    [0.0, 1.0, -1.0, 0.5, -0.5, 2.0, 1j, -1j, 0.5j, 1 + 1j, 1 - 0.5j]
)


@st.composite
def matrices(draw, rank: int):
    vals = draw(
        st.lists(_entry, min_size=rank * rank, max_size=rank * rank)
    )
    return np.array(vals, dtype=complex).reshape(rank, rank)


@st.composite
def index_tuples(draw, dim: int, degree: int | None = None):
    if degree is None:
        degree = draw(st.integers(min_value=0, max_value=dim))
    idx = draw(
        st.lists(
            st.integers(min_value=1, max_value=dim),
            min_size=degree,
            max_size=degree,
            unique=True,
        )
    )
    return tuple(sorted(idx))


@st.composite
def freq_vectors(draw, dim: int, max_freq: int = 2):
    return tuple(
        draw(
            st.lists(
                st.integers(min_value=-max_freq, max_value=max_freq),
                min_size=dim,
                max_size=dim,
            )
        )
    )


@st.composite
def forms(
    draw,
    dim: int | None = None,
    rank: int | None = None,
    degree: int | None = None,
    max_terms: int = 3,
    max_freq: int = 2,
):
    """Random small TrigPolyForm; fix dim/rank/degree to constrain it."""
    if dim is None:
        dim = draw(st.integers(min_value=1, max_value=3))
    if rank is None:
        rank = draw(st.integers(min_value=1, max_value=2))
    n_terms = draw(st.integers(min_value=0, max_value=max_terms))
    terms = []
    for _ in range(n_terms):
        k = draw(freq_vectors(dim, max_freq))
        I = draw(index_tuples(dim, degree))
        M = draw(matrices(rank))
        terms.append(((k, I), M))
    return TrigPolyForm(dim, rank, terms)


def rng_matrix(rng: np.random.Generator, rank: int, scale: float = 1.0):
    return scale * (
        rng.standard_normal((rank, rank)) + 1j * rng.standard_normal((rank, rank))
    )


def rng_form(
    rng: np.random.Generator,
    dim: int,
    rank: int,
    degree: int | None = None,
    n_terms: int = 3,
    max_freq: int = 2,
    scale: float = 1.0,
) -> TrigPolyForm:
    """Dense-float random form for the acceptance-style stress tests."""
    degrees = list(range(dim + 1)) if degree is None else [degree]
    terms = []
    for _ in range(n_terms):
        p = degrees[rng.integers(len(degrees))]
        I = tuple(
            sorted(rng.choice(np.arange(1, dim + 1), size=p, replace=False).tolist())
        )
        k = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, size=dim))
        terms.append(((k, I), rng_matrix(rng, rank, scale)))
    return TrigPolyForm(dim, rank, terms)


# ----------------------------------------------------------------------
# connection generators


def random_mus(
    rng: np.random.Generator,
    count: int,
    re_range=(0.08, 0.92),
    im_range=(-0.35, 0.35),
    min_sep: float = 0.05,
) -> list[complex]:
    """Eigenvalue shifts mu with real parts inside the open unit strip and
    pairwise separation (avoids tower collisions in tracking tests)."""
    mus: list[complex] = []
    while len(mus) < count:
        cand = complex(rng.uniform(*re_range), rng.uniform(*im_range))
        if all(abs(cand - m) >= min_sep for m in mus):
            mus.append(cand)
    return mus


def diagonal_connection_from_mus(mus) -> Connection:
    """S^1 connection whose eigenvalue towers sit at 2*pi*(n + mu_k)."""
    a1 = np.diag([2j * np.pi * m for m in mus])
    return Connection.from_constant(1, [a1])


def random_unitary_constant_connection(
    rng: np.random.Generator, dim: int, rank: int, scale: float = 0.8
) -> Connection:
    mats = []
    for _ in range(dim):
        x = rng_matrix(rng, rank, scale)
        mats.append(0.5 * (x - x.conj().T))  # anti-Hermitian
    return Connection.from_constant(dim, mats)


def random_flat_commuting_connection(
    rng: np.random.Generator, dim: int, rank: int, scale: float = 0.5
) -> Connection:
    """Flat (pairwise-commuting constant) connection, generically
    non-unitary and non-normal: A_j = S D_j S^{-1} with diagonal D_j."""
    while True:
        s = np.eye(rank) + 0.7 * rng_matrix(rng, rank)
        if np.linalg.cond(s) < 40:
            break
    s_inv = np.linalg.inv(s)
    mats = []
    for _ in range(dim):
        d = np.diag(scale * (rng.standard_normal(rank) + 1j * rng.standard_normal(rank)))
        mats.append(s @ d @ s_inv)
    return Connection.from_constant(dim, mats)


def random_nonflat_connection(
    rng: np.random.Generator, dim: int, rank: int, scale: float = 0.4
) -> Connection:
    """Constant + oscillatory connection with generically nonzero curvature."""
    terms = []
    for j in range(1, dim + 1):
        terms.append((((0,) * dim, (j,)), rng_matrix(rng, rank, scale)))
    # one oscillatory term to make the curvature x-dependent
    k = [0] * dim
    k[int(rng.integers(dim))] = int(rng.choice([-1, 1]))
    j = int(rng.integers(1, dim + 1))
    terms.append(((tuple(k), (j,)), rng_matrix(rng, rank, 0.5 * scale)))
    return Connection(TrigPolyForm(dim, rank, terms))


def unipotent_metric(dim: int, rank: int, amp: float = 0.4):
    """x-dependent positive metric g = w^dagger w with w = I + amp e^{2 pi i x_1} E_{12};
    the inverse is exact because the factor is unipotent."""
    from etacalc.geometry import hermitian_metric_from_factor

    if rank < 2:
        raise ValueError("need rank >= 2")
    n = np.zeros((rank, rank), dtype=complex)
    n[0, 1] = amp
    k = (1,) + (0,) * (dim - 1)
    w = TrigPolyForm.identity(dim, rank) + TrigPolyForm.monomial(dim, n, k=k)
    w_inv = TrigPolyForm.identity(dim, rank) - TrigPolyForm.monomial(dim, n, k=k)
    return hermitian_metric_from_factor(w, w_inv)


def constant_hermitian_metric(rng: np.random.Generator, dim: int, rank: int):
    """Random constant positive-definite metric with exact numpy inverse."""
    x = rng_matrix(rng, rank, 0.45)
    mat = np.eye(rank) + x.conj().T @ x
    g = TrigPolyForm.constant(dim, mat)
    g_inv = TrigPolyForm.constant(dim, np.linalg.inv(mat))
    return g, g_inv

# ----------------------------------------------------------------------
# independent eta oracle


def sign_sum_eta_oracle(mu: float, n_terms: int = 2000, n_nodes: int = 7) -> float:
    """Eta of the tower {2 pi (n + mu)} straight from its defining series.

    The sign-split sum sum_{n>=0} (n+mu)^{-s} - sum_{n>=1} (n-mu)^{-s} is
    truncated at n_terms, corrected by the integral tail and half-endpoint
    terms, evaluated on the geometric ladder s_j = 1/2^{j+1}, and
    Neville-extrapolated to s = 0.  Probe accuracy: ~2e-9 for mu in (0,1),
    far inside the 1e-6 comparisons it anchors.  No shared code with the
    Hurwitz continuation it is used to check.
    """
    n_pos = np.arange(0, n_terms + 1, dtype=float)
    n_neg = np.arange(1, n_terms + 1, dtype=float)

    def truncated(s: float) -> float:
        head = np.sum((n_pos + mu) ** (-s)) - np.sum((n_neg - mu) ** (-s))
        tail = ((n_terms + mu) ** (1 - s) - (n_terms - mu) ** (1 - s)) / (s - 1)
        half = 0.5 * ((n_terms + mu) ** (-s) - (n_terms - mu) ** (-s))
        return head + tail - half

    svals = [0.5 / 2**j for j in range(n_nodes)]
    t = [truncated(s) for s in svals]
    for level in range(1, n_nodes):
        for i in range(n_nodes - level):
            t[i] = t[i + 1] + (t[i + 1] - t[i]) * svals[i + level] / (
                svals[i] - svals[i + level]
            )
    return t[0]

"""Communication graph, the coupling matrix H, and coupling-gain intervals.

The network has ``N + 1`` nodes; node 0 is the leader.  Edge weights follow
the convention ``a[i, j] > 0`` iff agent ``i`` uses information from agent
``j``, which makes ``H`` reconstructible from a stated edge list and vice
versa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import AssumptionViolation, DimensionError, EmptyIntervalError


@dataclass
class Digraph:
    """Weighted digraph over one leader (node 0) and ``N`` followers.

    ``adjacency`` is the ``(N+1) x (N+1)`` weight matrix; entry ``(i, j)`` is
    the weight agent ``i`` places on agent ``j``.  The diagonal is zero and
    the leader listens to no one (row 0 is zero).
    """

    adjacency: np.ndarray

    def __post_init__(self):
        a = linalg.as_matrix(self.adjacency, "adjacency")
        if a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise DimensionError(
                f"adjacency must be square with at least 2 nodes, got {a.shape}"
            )
        if np.any(a < 0):
            raise ValueError("adjacency weights must be nonnegative")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency diagonal must be zero (no self-loops)")
        if np.any(a[0, :] != 0):
            raise ValueError("row 0 must be zero (the leader receives from no one)")
        self.adjacency = a

    @property
    def n_followers(self) -> int:
        return self.adjacency.shape[0] - 1


@dataclass
class HMatrix:
    """Coupling matrix derived from a :class:`Digraph`, plus its spectrum.

    ``h[i, i]`` is the total in-weight of follower ``i`` (leader included) and
    ``h[i, j] = -a[i, j]`` off the diagonal.  ``pairs`` lists the eigenvalues
    as ``(a_l, b_l)`` with ``b_l = 0`` for the ``n_real`` real ones and one
    entry per conjugate pair otherwise, so ``n_real + 2 * n_pairs == N``.
    """

    h: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    pairs: list[tuple[float, float]]
    n_real: int
    n_pairs: int


def build_h(g: Digraph) -> HMatrix:
    """Assemble H and summarize its spectrum.

    Raises nothing: the spanning-tree condition is *not* checked here; use
    :func:`has_leader_rooted_spanning_tree` and the gain-interval functions,
    which do insist on eigenvalues with positive real part.
    """
    a = g.adjacency
    n = g.n_followers
    follower = a[1:, 1:]
    h = -follower.copy()
    np.fill_diagonal(h, a[1:, :].sum(axis=1))
    eigs = linalg.spectrum(h)
    pairs: list[tuple[float, float]] = []
    n_real = 0
    for ev in eigs:
        if abs(ev.imag) <= linalg.REAL_EIG_TOL:
            pairs.append((float(ev.real), 0.0))
            n_real += 1
        elif ev.imag > 0:
            pairs.append((float(ev.real), float(ev.imag)))
    n_pairs = len(pairs) - n_real
    assert n_real + 2 * n_pairs == n
    return HMatrix(h=h, eigenvalues=eigs, pairs=pairs, n_real=n_real, n_pairs=n_pairs)


def digraph_from_h(h: np.ndarray) -> Digraph:
    """Reconstruct the digraph that produced ``h``.

    Exact inverse of :func:`build_h`: off-diagonal entries give the
    follower-to-follower weights and each row sum gives the leader weight.
    """
    m = linalg.as_matrix(h, "h")
    n = m.shape[0]
    adj = np.zeros((n + 1, n + 1))
    adj[1:, 1:] = -m
    np.fill_diagonal(adj[1:, 1:], 0.0)
    adj[1:, 0] = m.sum(axis=1)
    return Digraph(adjacency=adj)


def has_leader_rooted_spanning_tree(g: Digraph) -> bool:
    """True iff every follower is reachable from the leader along edges."""
    a = g.adjacency
    n_nodes = a.shape[0]
    seen = {0}
    frontier = [0]
    while frontier:
        j = frontier.pop()
        # (j, i) is an edge when a[i, j] > 0: i hears j.
        for i in range(1, n_nodes):
            if i not in seen and a[i, j] > 0:
                seen.add(i)
                frontier.append(i)
    return len(seen) == n_nodes


def _require_positive_real_parts(h: HMatrix) -> None:
    if np.any(h.eigenvalues.real <= 0):
        raise AssumptionViolation(
            "coupling matrix has an eigenvalue with non-positive real part; "
            "the graph lacks a leader-rooted spanning tree"
        )


def mu1_interval(h: HMatrix) -> tuple[float, float]:
    """Admissible interval ``(0, 2 / rho(H))`` for the estimator gain mu1."""
    _require_positive_real_parts(h)
    return (0.0, 2.0 / linalg.rho(h.h))


def mu2_interval(h: HMatrix, s_spectrum: np.ndarray) -> tuple[float, float]:
    """Closed-form admissible interval for the signal-coupling gain mu2.

    For each eigenvalue ``a_l + j b_l`` of H the per-eigenvalue interval is
    ``((a_l - sqrt(D_l)) / (a_l^2 + b_l^2), (a_l + sqrt(D_l)) / (a_l^2 + b_l^2))``
    with ``D_l = (a_l^2 + b_l^2) / |lam|^2 - b_l^2``, where ``|lam|`` is taken
    as the *largest* leader eigenvalue modulus for every ``l`` (the binding
    one; when all leader eigenvalues sit on the unit circle this reduces to
    ``(0, min 2 a_l / (a_l^2 + b_l^2))``).  The returned interval is the
    intersection over ``l``.

    :func:`verify_mu2` is the ground truth whenever the two disagree.

    Raises
    ------
    AssumptionViolation
        If some eigenvalue of H has non-positive real part.
    EmptyIntervalError
        If some ``D_l`` is negative (interval empty).
    """
    _require_positive_real_parts(h)
    mods = np.abs(np.asarray(s_spectrum, dtype=complex))
    max_mod = float(mods.max()) if mods.size else 0.0
    if max_mod == 0.0:
        # Nilpotent leader: any gain keeps the coupled update stable.
        return (0.0, math.inf)
    lowers, uppers = [], []
    for a_l, b_l in h.pairs:
        mag2 = a_l * a_l + b_l * b_l
        delta = mag2 / max_mod**2 - b_l * b_l
        if delta < 0:
            raise EmptyIntervalError(
                f"empty gain interval: discriminant {delta:.3g} < 0 for "
                f"eigenvalue {a_l:+.4g}{b_l:+.4g}j"
            )
        root = math.sqrt(delta)
        lowers.append((a_l - root) / mag2)
        uppers.append((a_l + root) / mag2)
    return (max(lowers), min(uppers))


def verify_mu2(h: HMatrix | np.ndarray, s: np.ndarray, mu2: float) -> bool:
    """Directly test whether ``I (x) S - mu2 (H (x) S)`` is Schur.

    This is the actual stability hypothesis; it is independent of the
    closed-form interval and overrides it on disagreement.
    """
    hm = h.h if isinstance(h, HMatrix) else linalg.as_matrix(h, "h")
    s = linalg.as_matrix(s, "s")
    n = hm.shape[0]
    coupled = linalg.kron(np.eye(n), s) - mu2 * linalg.kron(hm, s)
    return linalg.is_schur(coupled)


def mu2_certified_interval(
    h: HMatrix,
    s: np.ndarray,
    tol: float = 1e-6,
    scan_points: int = 128,
) -> tuple[float, float] | None:
    """Bisection-certified interval of mu2 values passing :func:`verify_mu2`.

    The stable set is an interval in mu2 (the test reduces to a convex
    function of mu2 dipping below a constant), so it is pinned down by
    bisecting each edge against the direct Schur test.  Returns ``None`` when
    no stable gain is found on the scan grid.
    """
    _require_positive_real_parts(h)
    stable = lambda mu: verify_mu2(h, s, mu)  # noqa: E731

    # Seed the search from the closed-form interval when it is usable.
    cap = 4.0 / linalg.rho(h.h)
    seed = None
    try:
        lo_f, hi_f = mu2_interval(h, linalg.spectrum(s))
        mid = 0.5 * (max(lo_f, 0.0) + min(hi_f, cap))
        if mid > 0 and stable(mid):
            seed = mid
    except (EmptyIntervalError, AssumptionViolation):
        pass
    if seed is None:
        for mu in np.linspace(cap / scan_points, cap, scan_points):
            if stable(mu):
                seed = float(mu)
                break
    if seed is None:
        return None

    # Lower edge: 0 may itself be stable (leader matrix already Schur).
    if stable(tol):
        lo = 0.0
    else:
        bad, good = 0.0, seed
        while good - bad > tol:
            mid = 0.5 * (bad + good)
            if stable(mid):
                good = mid
            else:
                bad = mid
        lo = good

    # Upper edge: grow until unstable, then bisect.
    hi_good, hi_bad = seed, None
    step = max(seed, cap / 4)
    for _ in range(64):
        probe = hi_good + step
        if stable(probe):
            hi_good = probe
        else:
            hi_bad = probe
            break
        step *= 2.0
    if hi_bad is None:
        return (lo, math.inf)
    while hi_bad - hi_good > tol:
        mid = 0.5 * (hi_good + hi_bad)
        if stable(mid):
            hi_good = mid
        else:
            hi_bad = mid
    return (lo, hi_good)

"""Leader/follower plant models, solvability checks, and exact regulator data.

The leader is the autonomous system ``v(t+1) = S v(t)``; each follower is a
nine-matrix discrete-time LTI plant driven by its own input and the leader
state.  The steady-state tracking manifold of a follower is given by the
matrix pair ``(X, U)`` solving

    X S = A X + B U + E
    0   = C X + D U + F

which vectorizes to the square linear system ``Q vec([X; U]) = vec([E; F])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, topology
from .exceptions import AssumptionViolation, DimensionError, SingularMatrixError

#: Slack on the unit-modulus bound for leader eigenvalues; rotation matrices
#: assembled in floating point sit exactly on the boundary.
MODULUS_TOL = 1e-9


@dataclass
class LeaderSystem:
    """Autonomous reference/disturbance generator ``v(t+1) = S v(t)``."""

    s: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        self.s = linalg.as_matrix(self.s, "leader.s")
        if self.s.shape[0] != self.s.shape[1]:
            raise DimensionError(f"leader matrix must be square, got {self.s.shape}")
        self.v0 = linalg.as_vector(self.v0, "leader.v0")
        if self.v0.size != self.s.shape[0]:
            raise DimensionError(
                f"leader.v0 has length {self.v0.size}, expected {self.s.shape[0]}"
            )

    @property
    def q(self) -> int:
        return self.s.shape[0]

    def modulus_bounded(self, tol: float = MODULUS_TOL) -> bool:
        """True iff every eigenvalue of S has modulus at most ``1 + tol``."""
        return bool(np.all(np.abs(linalg.spectrum(self.s)) <= 1.0 + tol))


@dataclass
class FollowerPlant:
    """One follower's plant matrices and optional initial state.

    State update, regulated output, and measurement output:

        x(t+1) = A x + B u + E v
        e(t)   = C x + D u + F v
        y_m(t) = C_m x + D_m u + F_m v
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray
    c_m: np.ndarray
    d_m: np.ndarray
    f_m: np.ndarray
    x0: np.ndarray | None = None

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "e", "f", "c_m", "d_m", "f_m"):
            setattr(self, name, linalg.as_matrix(getattr(self, name), name))
        n, m, p, q = self.n, self.m, self.p_m, self.q
        expected = {
            "a": (n, n), "b": (n, m), "c": (m, n), "d": (m, m),
            "e": (n, q), "f": (m, q), "c_m": (p, n), "d_m": (p, m), "f_m": (p, q),
        }
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise DimensionError(f"plant matrix {name} has shape {got}, expected {shape}")
        if self.x0 is not None:
            self.x0 = linalg.as_vector(self.x0, "x0")
            if self.x0.size != n:
                raise DimensionError(f"x0 has length {self.x0.size}, expected {n}")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]

    @property
    def p_m(self) -> int:
        return self.c_m.shape[0]

    @property
    def q(self) -> int:
        return self.e.shape[1]


@dataclass
class RegulatorData:
    """Vectorized regulator system ``Q x = b`` and its exact solution."""

    q_mat: np.ndarray
    b_vec: np.ndarray
    exact_x: np.ndarray
    exact_u: np.ndarray


def step_leader(leader: LeaderSystem, v: np.ndarray) -> np.ndarray:
    """One leader step: returns ``S @ v``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (leader.q,):
        raise DimensionError(f"v has shape {v.shape}, expected ({leader.q},)")
    return leader.s @ v


def step_follower(
    p: FollowerPlant, x: np.ndarray, u: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One plant step: returns ``(x_next, e, y_m)`` for current ``(x, u, v)``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    x_next = p.a @ x + p.b @ u + p.e @ v
    e = p.c @ x + p.d @ u + p.f @ v
    y_m = p.c_m @ x + p.d_m @ u + p.f_m @ v
    return x_next, e, y_m


def regulator_coefficient(s_mat: np.ndarray, p: FollowerPlant) -> np.ndarray:
    """Coefficient matrix of the vectorized regulator equations.

    ``S^T (x) [I 0; 0 0] - I_q (x) [A B; C D]``, square of size
    ``q * (n + m)``.  Used both with the true leader matrix and with an
    agent's running estimate of it, so the assembly path is shared.
    """
    n, m = p.n, p.m
    s_mat = linalg.as_matrix(s_mat, "s")
    top = np.zeros((n + m, n + m))
    top[:n, :n] = np.eye(n)
    plant_block = np.block([[p.a, p.b], [p.c, p.d]])
    return linalg.kron(s_mat.T, top) - linalg.kron(np.eye(s_mat.shape[0]), plant_block)


def regulator_rhs(p: FollowerPlant) -> np.ndarray:
    """Right-hand side ``vec([E; F])`` of the vectorized regulator equations."""
    return linalg.vec(np.vstack([p.e, p.f]))


def build_regulator_data(p: FollowerPlant, s: np.ndarray) -> RegulatorData:
    """Assemble ``Q``, ``b`` and the exact ``(X, U)`` solution.

    Raises
    ------
    AssumptionViolation
        If ``Q`` is singular, i.e. the regulator equations are unsolvable.
    """
    q_mat = regulator_coefficient(s, p)
    b_vec = regulator_rhs(p)
    try:
        sol = linalg.solve_linear(q_mat, b_vec)
    except SingularMatrixError as err:
        raise AssumptionViolation(
            f"regulator equations unsolvable: coefficient matrix singular ({err})"
        ) from err
    xu = linalg.unvec(sol, p.n + p.m, p.q)
    return RegulatorData(q_mat=q_mat, b_vec=b_vec, exact_x=xu[: p.n], exact_u=xu[p.n :])


# ---------------------------------------------------------------------------
# Assumption checks
# ---------------------------------------------------------------------------

def _rank_deficient(mat: np.ndarray, full: int) -> bool:
    """Rank test by singular-value thresholding."""
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size < full:
        return True
    thresh = max(mat.shape) * np.finfo(float).eps * sv[0]
    return sv[full - 1] <= thresh


def pbh_stabilizable(a: np.ndarray, b: np.ndarray, tol: float = MODULUS_TOL) -> bool:
    """PBH test: ``[A - lam I, B]`` has full row rank at every ``|lam| >= 1``."""
    n = a.shape[0]
    for lam in np.linalg.eigvals(a):
        if abs(lam) >= 1.0 - tol:
            test = np.hstack([a - lam * np.eye(n), b.astype(complex)])
            if _rank_deficient(test, n):
                return False
    return True


def pbh_detectable(a: np.ndarray, c: np.ndarray, tol: float = MODULUS_TOL) -> bool:
    """Dual PBH test: ``[A - lam I; C]`` has full column rank at ``|lam| >= 1``."""
    return pbh_stabilizable(a.T, c.T, tol)


def transmission_rank_ok(p: FollowerPlant, s_spectrum: np.ndarray) -> bool:
    """Full rank of ``[A - lam I, B; C, D]`` at every leader eigenvalue."""
    n, m = p.n, p.m
    for lam in np.asarray(s_spectrum, dtype=complex):
        test = np.block(
            [[p.a - lam * np.eye(n), p.b.astype(complex)],
             [p.c.astype(complex), p.d.astype(complex)]]
        )
        if _rank_deficient(test, n + m):
            return False
    return True


@dataclass
class AssumptionCheck:
    number: int
    name: str
    passed: bool
    details: str


@dataclass
class AssumptionReport:
    """Per-assumption pass/fail results plus optional gain diagnostics."""

    checks: list[AssumptionCheck]
    gain_checks: list[AssumptionCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(
            c.passed for c in self.gain_checks
        )

    def failures(self) -> list[AssumptionCheck]:
        return [c for c in self.checks + self.gain_checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "assumptions": [vars(c) for c in self.checks],
            "gain_checks": [vars(c) for c in self.gain_checks],
            "all_passed": self.all_passed,
        }


def check_assumptions(
    leader: LeaderSystem,
    plants: list[FollowerPlant],
    g: topology.Digraph,
    gains: dict | None = None,
) -> AssumptionReport:
    """Run all six solvability checks and report per-check diagnostics.

    1. every leader eigenvalue has modulus at most 1,
    2. each ``(A_i, B_i)`` is stabilizable,
    3. each ``(C_mi, A_i)`` is detectable,
    4. the transmission-zero rank condition holds at every leader eigenvalue,
    5. each regulator coefficient matrix ``Q_i`` is nonsingular (must agree
       with check 4),
    6. the graph has a spanning tree rooted at the leader.

    ``gains``, when given, may carry ``mu1``, ``mu2``, ``mu3`` (list), ``k_x``
    (list) and ``l`` (list); each supplied value is validated against its
    admissible interval or Schur requirement and reported separately.
    """
    checks: list[AssumptionCheck] = []
    s_eigs = linalg.spectrum(leader.s)

    mods = np.abs(s_eigs)
    checks.append(AssumptionCheck(
        1, "leader_modulus", bool(np.all(mods <= 1.0 + MODULUS_TOL)),
        f"max leader eigenvalue modulus {mods.max():.6g}",
    ))

    stab_fail = [i for i, p in enumerate(plants, 1) if not pbh_stabilizable(p.a, p.b)]
    checks.append(AssumptionCheck(
        2, "stabilizable", not stab_fail,
        "all (A_i, B_i) stabilizable" if not stab_fail
        else f"unstabilizable agents: {stab_fail}",
    ))

    det_fail = [i for i, p in enumerate(plants, 1) if not pbh_detectable(p.a, p.c_m)]
    checks.append(AssumptionCheck(
        3, "detectable", not det_fail,
        "all (C_mi, A_i) detectable" if not det_fail
        else f"undetectable agents: {det_fail}",
    ))

    rank_fail = [
        i for i, p in enumerate(plants, 1) if not transmission_rank_ok(p, s_eigs)
    ]
    checks.append(AssumptionCheck(
        4, "transmission_rank", not rank_fail,
        "rank condition holds at every leader eigenvalue" if not rank_fail
        else f"rank deficiency at a leader eigenvalue for agents: {rank_fail}",
    ))

    sing_fail = []
    for i, p in enumerate(plants, 1):
        q_mat = regulator_coefficient(leader.s, p)
        cond = np.linalg.cond(q_mat)
        if not np.isfinite(cond) or cond > linalg.DEFAULT_COND_LIMIT:
            sing_fail.append(i)
    agree = set(sing_fail) == set(rank_fail)
    checks.append(AssumptionCheck(
        5, "regulator_solvable", not sing_fail and agree,
        "all Q_i nonsingular (agrees with rank test)" if not sing_fail and agree
        else f"singular Q_i for agents {sing_fail}"
        + ("" if agree else f"; DISAGREES with rank test {rank_fail}"),
    ))

    tree = topology.has_leader_rooted_spanning_tree(g)
    checks.append(AssumptionCheck(
        6, "spanning_tree", tree,
        "every follower reachable from the leader" if tree
        else "graph has no leader-rooted spanning tree",
    ))

    report = AssumptionReport(checks=checks)
    if gains:
        report.gain_checks = _check_gains(leader, plants, g, gains, tree)
    return report


def _check_gains(leader, plants, g, gains, tree_ok) -> list[AssumptionCheck]:
    from . import controller, regsolver  # deferred: avoids import cycle

    out: list[AssumptionCheck] = []
    h = topology.build_h(g) if tree_ok else None

    mu1 = gains.get("mu1")
    if mu1 is not None and h is not None:
        lo, hi = topology.mu1_interval(h)
        out.append(AssumptionCheck(
            0, "gain_mu1", lo < mu1 < hi, f"mu1={mu1} vs interval ({lo:.4g}, {hi:.4g})"
        ))
    mu2 = gains.get("mu2")
    if mu2 is not None and h is not None:
        ok = topology.verify_mu2(h, leader.s, mu2)
        out.append(AssumptionCheck(
            0, "gain_mu2", ok, f"mu2={mu2} direct Schur test {'passed' if ok else 'failed'}"
        ))
    mu3 = gains.get("mu3")
    if mu3 is not None:
        bad = []
        for i, p in enumerate(plants):
            try:
                bound = regsolver.mu3_bound(regulator_coefficient(leader.s, p))
            except SingularMatrixError:
                bad.append(i + 1)
                continue
            value = mu3[i] if isinstance(mu3, (list, tuple, np.ndarray)) else mu3
            if not 0 < value < bound:
                bad.append(i + 1)
        out.append(AssumptionCheck(
            0, "gain_mu3", not bad,
            "all mu3 inside bounds" if not bad else f"mu3 out of bounds for agents {bad}",
        ))
    k_x = gains.get("k_x")
    if k_x is not None:
        bad = [
            i + 1
            for i, p in enumerate(plants)
            if not controller.verify_gain(p.a, p.b, np.asarray(k_x[i]), side="input")
        ]
        out.append(AssumptionCheck(
            0, "gain_k_x", not bad,
            "all A+B K_x Schur" if not bad else f"non-Schur closed loop for agents {bad}",
        ))
    l_gain = gains.get("l")
    if l_gain is not None:
        bad = [
            i + 1
            for i, p in enumerate(plants)
            if not controller.verify_gain(p.a, p.c_m, np.asarray(l_gain[i]), side="output")
        ]
        out.append(AssumptionCheck(
            0, "gain_l", not bad,
            "all A+L C_m Schur" if not bad else f"non-Schur observer loop for agents {bad}",
        ))
    return out

"""Dense real-matrix kernel.

Matrices are plain ``numpy.ndarray`` objects with finite entries; vectors are
1-D arrays.  This module adds the column-stacking/Kronecker machinery and the
spectral functionals that the gain-interval computations are built on, with a
canonical eigenvalue ordering so spectra can be compared reproducibly.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, SingularMatrixError

#: Condition-number ceiling for :func:`solve_linear`.  Desk-scale problems are
#: well conditioned; anything beyond this is treated as singular.
DEFAULT_COND_LIMIT = 1e12

#: Tolerance used when classifying eigenvalues as real.
REAL_EIG_TOL = 1e-9


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D float array, rejecting NaN/Inf entries."""
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Coerce ``x`` to a 1-D float array, rejecting NaN/Inf entries."""
    v = np.asarray(x, dtype=float).reshape(-1)
    if not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


def _require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices.

    Block ``(i, j)`` of the result equals ``a[i, j] * b``; the result has
    shape ``(a.rows * b.rows, a.cols * b.cols)``.
    """
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def vec(a: np.ndarray) -> np.ndarray:
    """Stack the columns of ``a`` top to bottom into one vector.

    ``vec`` of an ``n x q`` matrix has length ``n * q``; a column vector is
    returned unchanged (as a 1-D array).
    """
    return np.asarray(a, dtype=float).reshape(-1, order="F")


def unvec(x: np.ndarray, n: int, q: int) -> np.ndarray:
    """Reshape a stacked column vector back into an ``n x q`` matrix.

    Inverse of :func:`vec`: ``unvec(vec(a), a.shape[0], a.shape[1])`` is
    bit-identical to ``a``.

    Raises
    ------
    DimensionError
        If ``len(x) != n * q``.
    """
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size != n * q:
        raise DimensionError(f"cannot reshape length-{v.size} vector into {n}x{q}")
    return v.reshape((n, q), order="F")


def spectrum(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square matrix, in canonical order.

    The returned complex array is sorted by real part, then imaginary part,
    so two spectra can be compared entry by entry.  For real input the
    multiset is closed under conjugation (up to roundoff).

    Raises
    ------
    DimensionError
        If ``a`` is not square.
    """
    m = _require_square(as_matrix(a))
    return np.sort_complex(np.linalg.eigvals(m))


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    return float(np.abs(spectrum(a)).max())


def rho(a: np.ndarray) -> float:
    """Spectral functional ``max |lambda|^2 / Re(lambda)`` over the spectrum.

    Governs the admissible step-size intervals of the iterative updates.
    Defined only when every eigenvalue has strictly positive real part; for a
    symmetric positive-definite matrix it equals the largest eigenvalue.

    Raises
    ------
    ValueError
        If some eigenvalue has ``Re(lambda) <= 0``.
    """
    eigs = spectrum(a)
    if np.any(eigs.real <= 0):
        raise ValueError(
            "rho is undefined: eigenvalue with non-positive real part "
            f"(spectrum {eigs})"
        )
    return float(np.max(np.abs(eigs) ** 2 / eigs.real))


def is_schur(a: np.ndarray, margin: float = 0.0) -> bool:
    """True iff every eigenvalue of ``a`` has modulus below ``1 - margin``."""
    if margin < 0:
        raise ValueError("margin must be >= 0")
    return spectral_radius(a) < 1.0 - margin


def solve_linear(
    a: np.ndarray, b: np.ndarray, cond_limit: float = DEFAULT_COND_LIMIT
) -> np.ndarray:
    """Solve ``a @ x = b`` for a square, well-conditioned ``a``.

    Serves as the exact oracle against which the iterative solvers are
    checked.  The residual satisfies
    ``norm(a @ x - b) <= 1e-10 * (norm(a) * norm(x) + norm(b))`` on
    well-conditioned desk-scale inputs.

    Raises
    ------
    SingularMatrixError
        If the condition estimate exceeds ``cond_limit``.
    """
    m = _require_square(as_matrix(a, "a"))
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularMatrixError(
            f"matrix is singular or ill-conditioned (cond ~ {cond:.3g}, "
            f"limit {cond_limit:.3g})"
        )
    return np.linalg.solve(m, np.asarray(b, dtype=float))

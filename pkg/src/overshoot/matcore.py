"""Dense real-matrix kernel.

Matrices are plain 2-D ``float64`` numpy arrays. :func:`as_mat` is the single
entry point that enforces the shape and finiteness invariants; every public
function here runs its inputs through it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.linalg

from .errors import DimensionError, DuplicateNodeError, SingularMatrixError

DEFAULT_RANK_TOL = 1e-9
PIVOT_TOL = 1e-14
MAX_CHARPOLY_DEGREE = 64
EXTENDED_DIGITS = 50


def as_mat(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite 2-D float array (a scalar becomes 1x1)."""
    arr = np.array(m, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square(m, name: str = "matrix") -> np.ndarray:
    arr = as_mat(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class CharPoly:
    """Non-leading coefficients of a monic polynomial.

    ``coeffs[0]`` multiplies s^(n-1) and ``coeffs[-1]`` is the constant term.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) < 1:
            raise DimensionError("a characteristic polynomial needs degree >= 1")

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def full(self) -> np.ndarray:
        """All n+1 coefficients, leading 1 first (``np.polyval`` order)."""
        return np.concatenate(([1.0], self.coeffs))


def operator_norm(m) -> float:
    """Spectral norm: the largest singular value."""
    arr = as_mat(m)
    return float(np.linalg.svd(arr, compute_uv=False)[0])


def rank(m, tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    sv = np.linalg.svd(as_mat(m), compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def solve(a, rhs) -> np.ndarray:
    """Solve ``a @ x = rhs`` by LU with partial pivoting.

    Raises SingularMatrixError when a pivot is below ``1e-14 * ||a||``.
    A 1-D ``rhs`` gives a 1-D result.
    """
    a = as_square(a, "a")
    rhs_arr = np.asarray(rhs, dtype=float)
    vector = rhs_arr.ndim == 1
    rhs_mat = rhs_arr.reshape(-1, 1) if vector else as_mat(rhs_arr, "rhs")
    if rhs_mat.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs has {rhs_mat.shape[0]} rows, a has {a.shape[0]}")

    scale = operator_norm(a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() < PIVOT_TOL * scale:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} below {PIVOT_TOL:g} * ||a|| = {PIVOT_TOL * scale:.3e}"
        )
    x = scipy.linalg.lu_solve((lu, piv), rhs_mat, check_finite=False)
    return x.ravel() if vector else x


def inverse(a) -> np.ndarray:
    a = as_square(a, "a")
    return solve(a, np.eye(a.shape[0]))


def char_poly(a) -> CharPoly:
    """det(sI - a) by the Faddeev-LeVerrier recurrence.

    M_k = a M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(a M_k) / k,  with M_0 = 0, c_n = 1.
    """
    a = as_square(a, "a")
    n = a.shape[0]
    if n > MAX_CHARPOLY_DEGREE:
        raise DimensionError(f"char_poly supports n <= {MAX_CHARPOLY_DEGREE}, got {n}")
    eye = np.eye(n)
    m_k = np.zeros((n, n))
    c_prev = 1.0
    coeffs = []
    for k in range(1, n + 1):
        m_k = a @ m_k + c_prev * eye
        c_prev = -np.trace(a @ m_k) / k
        coeffs.append(c_prev)
    return CharPoly(tuple(coeffs))


def vandermonde(lambdas) -> np.ndarray:
    """Row i holds lambda_j ** i (nodes along the columns)."""
    nodes = np.asarray(lambdas, dtype=float).ravel()
    if nodes.size < 1:
        raise DimensionError("need at least one node")
    if not np.all(np.isfinite(nodes)):
        raise ValueError("nodes must be finite")
    if np.unique(nodes).size != nodes.size:
        raise DuplicateNodeError(f"nodes must be pairwise distinct: {nodes.tolist()}")
    return np.vander(nodes, increasing=True).T.copy()


def expm_batch(f, times) -> np.ndarray:
    """e^{f t} for every t in ``times``; returns shape (len(times), n, n).

    Raises OverflowError on non-finite output.
    """
    f = as_square(f, "f")
    ts = np.asarray(times, dtype=float).ravel()
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise ValueError("times must be finite and nonnegative")
    n = f.shape[0]
    if ts.size == 0:
        return np.empty((0, n, n))
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(f[None, :, :] * ts[:, None, None])
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed the float64 range")
    return out


def matrix_exponential(f, t: float = 1.0) -> np.ndarray:
    """e^{f t} by scaling and squaring with Pade approximants (scipy's expm)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return expm_batch(f, [t])[0]


def _mp_lu(a: np.ndarray, digits: int):
    """In-place Doolittle LU with partial pivoting on an mpmath copy of ``a``.

    Returns (lu, perm, sign, min_pivot). Float entries convert exactly.
    """
    n = a.shape[0]
    with mpmath.workdps(digits):
        lu = mpmath.matrix(a.tolist())
        perm = list(range(n))
        sign = 1
        min_pivot = mpmath.inf
        for k in range(n):
            p = max(range(k, n), key=lambda i: abs(lu[i, k]))
            if p != k:
                for j in range(n):
                    lu[k, j], lu[p, j] = lu[p, j], lu[k, j]
                perm[k], perm[p] = perm[p], perm[k]
                sign = -sign
            piv = lu[k, k]
            min_pivot = min(min_pivot, abs(piv))
            if piv == 0:
                continue
            for i in range(k + 1, n):
                lu[i, k] = lu[i, k] / piv
                for j in range(k + 1, n):
                    lu[i, j] -= lu[i, k] * lu[k, j]
    return lu, perm, sign, min_pivot


def _mp_lu_solve(lu, perm, rhs, digits: int):
    n = lu.rows
    with mpmath.workdps(digits):
        x = mpmath.matrix(n, rhs.cols)
        for c in range(rhs.cols):
            y = [rhs[perm[i], c] for i in range(n)]
            for i in range(n):
                y[i] -= mpmath.fsum(lu[i, j] * y[j] for j in range(i))
            for i in reversed(range(n)):
                y[i] = (y[i] - mpmath.fsum(lu[i, j] * y[j] for j in range(i + 1, n))) / lu[i, i]
            for i in range(n):
                x[i, c] = y[i]
    return x


def solve_extended(a, rhs, digits: int = EXTENDED_DIGITS, as_mp: bool = False):
    """``solve`` carried out at ``digits`` decimal digits.

    For the clustered Vandermonde matrices of high-gain ladders, float64
    LU loses everything (cond ~ 1e16 at n = 6, |lambda| = 100); at 50
    digits the result is the correctly rounded solution. ``rhs`` may be an
    mpmath matrix. The singularity threshold scales with the working
    precision: pivot < 10**(2 - digits) * ||a||.
    """
    a = as_square(a, "a")
    lu, perm, _, min_pivot = _mp_lu(a, digits)
    scale = operator_norm(a)
    with mpmath.workdps(digits):
        if scale == 0.0 or min_pivot < mpmath.mpf(10) ** (2 - digits) * scale:
            raise SingularMatrixError(
                f"pivot {mpmath.nstr(min_pivot, 5)} below 1e{2 - digits} * ||a|| at {digits} digits"
            )
        if not isinstance(rhs, mpmath.matrix):
            rhs_arr = np.asarray(rhs, dtype=float)
            rhs = mpmath.matrix(rhs_arr.reshape(a.shape[0], -1).tolist())
        x = _mp_lu_solve(lu, perm, rhs, digits)
    return x if as_mp else np.array(x.tolist(), dtype=float)


def determinant(a, digits: int = EXTENDED_DIGITS) -> float:
    """Determinant as signed product of LU pivots, factorized at ``digits`` digits."""
    a = as_square(a, "a")
    lu, _, sign, _ = _mp_lu(a, digits)
    with mpmath.workdps(digits):
        det = mpmath.mpf(sign)
        for k in range(a.shape[0]):
            det *= lu[k, k]
        return float(det)


def condition_number(a) -> float:
    """||a|| * ||a^{-1}|| in the spectral norm."""
    return operator_norm(a) * operator_norm(inverse(a))

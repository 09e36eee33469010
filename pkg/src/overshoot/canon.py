"""Controllability, the single-input canonical transform, and Heymann reduction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotControllableError, ReductionError
from .matcore import (
    DEFAULT_RANK_TOL,
    CharPoly,
    as_mat,
    char_poly,
    inverse,
    operator_norm,
    rank,
    solve,
)


@dataclass(frozen=True)
class Plant:
    """Open-loop pair for x' = A x + B u."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_mat(self.a, "A")
        b = as_mat(self.b, "B")
        if a.shape[0] != a.shape[1]:
            raise DimensionError(f"A must be square, got {a.shape}")
        if b.shape[0] != a.shape[0]:
            raise DimensionError(f"B has {b.shape[0]} rows but A is {a.shape[0]}x{a.shape[0]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True)
class CanonicalForm:
    t: np.ndarray
    t_inv: np.ndarray
    a_c: np.ndarray
    b_c: np.ndarray
    open_loop_coeffs: CharPoly

    @property
    def bottom_row(self) -> np.ndarray:
        """(a_1, ..., a_n) with x_n' = sum a_i x_i + u in canonical coordinates."""
        return self.a_c[-1].copy()

    @property
    def t_norm(self) -> float:
        return operator_norm(self.t)

    @property
    def t_inv_norm(self) -> float:
        return operator_norm(self.t_inv)


@dataclass(frozen=True)
class HeymannReduction:
    v: np.ndarray
    k0: np.ndarray
    b_single: np.ndarray
    basis: np.ndarray
    controls: np.ndarray


def controllability_matrix(p: Plant) -> np.ndarray:
    """[B, AB, ..., A^{n-1} B]."""
    blocks = [p.b]
    for _ in range(p.n - 1):
        blocks.append(p.a @ blocks[-1])
    return np.hstack(blocks)


def is_controllable(p: Plant, tol: float = DEFAULT_RANK_TOL) -> bool:
    return rank(controllability_matrix(p), tol) == p.n


def companion_toeplitz(coeffs: CharPoly) -> np.ndarray:
    """Upper anti-triangular Hankel block of characteristic coefficients.

    Entry (i, j) is c_{n-1-i-j} with c_0 = 1, zero below the anti-diagonal;
    the first row reads (c_{n-1}, ..., c_1, 1). Only c_1..c_{n-1} appear.
    """
    n = coeffs.degree
    c = (1.0,) + coeffs.coeffs
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(n - i):
            h[i, j] = c[n - 1 - i - j]
    return h


def brunovsky_transform(a, b, tol: float = DEFAULT_RANK_TOL) -> CanonicalForm:
    """T with (T^{-1} a T, T^{-1} b) in controllable canonical form.

    T = [b, ab, ..., a^{n-1} b] @ Hankel(c_{n-1} ... c_1, 1), where the c_k
    are the coefficients of det(sI - a).
    """
    p = Plant(a, b)
    if p.m != 1:
        raise DimensionError(f"brunovsky_transform needs a single input column, got m = {p.m}")
    ctrb = controllability_matrix(p)
    if rank(ctrb, tol) != p.n:
        raise NotControllableError(f"(a, b) is not controllable at tol = {tol:g}")
    coeffs = char_poly(p.a)
    t = ctrb @ companion_toeplitz(coeffs)
    t_inv = inverse(t)
    return CanonicalForm(
        t=t,
        t_inv=t_inv,
        a_c=t_inv @ p.a @ t,
        b_c=t_inv @ p.b,
        open_loop_coeffs=coeffs,
    )


def _independent(columns: list[np.ndarray], candidate: np.ndarray, tol: float) -> bool:
    return rank(np.column_stack(columns + [candidate]), tol) == len(columns) + 1


def heymann_reduce(p: Plant, tol: float = DEFAULT_RANK_TOL) -> HeymannReduction:
    """Find v, K0 such that (A + B K0, B v) is controllable.

    v is the first column selector e_j with ||B_j|| > tol * ||B||. The basis
    grows greedily: x_1 = B v and x_{i+1} = A x_i + B u_i, where u_i is the
    first of (0, e_1, ..., e_m) that keeps the x's independent. K0 maps
    x_i to u_i, with u_n = 0.
    """
    n, m = p.n, p.m
    if not is_controllable(p, tol):
        raise NotControllableError(f"(A, B) is not controllable at tol = {tol:g}")

    if m == 1:
        return HeymannReduction(
            v=np.ones(1),
            k0=np.zeros((1, n)),
            b_single=p.b.copy(),
            basis=controllability_matrix(p),
            controls=np.zeros((1, n)),
        )

    b_norm = operator_norm(p.b)
    col_norms = np.linalg.norm(p.b, axis=0)
    j = int(np.argmax(col_norms > tol * b_norm))
    v = np.zeros(m)
    v[j] = 1.0

    candidates = [np.zeros(m)] + list(np.eye(m))
    xs = [p.b @ v]
    us = []
    for step in range(1, n):
        for u in candidates:
            nxt = p.a @ xs[-1] + p.b @ u
            if _independent(xs, nxt, tol):
                us.append(u)
                xs.append(nxt)
                break
        else:
            raise ReductionError(
                f"no candidate control extends the basis at step {step} (tol = {tol:g})"
            )
    us.append(np.zeros(m))

    basis = np.column_stack(xs)
    controls = np.column_stack(us)
    # K0 @ basis = controls  <=>  basis^T @ K0^T = controls^T
    k0 = solve(basis.T, controls.T).T
    return HeymannReduction(
        v=v,
        k0=k0,
        b_single=(p.b @ v).reshape(n, 1),
        basis=basis,
        controls=controls,
    )

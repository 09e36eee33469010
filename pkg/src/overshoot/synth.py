"""Eigenvalue ladder, canonical pole placement, gain assembly and certificate constants.

The certified bound is

    ||exp((A + B K) t)|| <= M_1 * lam**L * exp(-lam t),   t >= 0,

with L = (n-1)(n+2)/2, M = n * n! * rho**L and M_1 = M * ||T|| * ||T^{-1}||,
where rho = n and T is the canonical-form transform of the reduced
single-input pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .canon import CanonicalForm, HeymannReduction, Plant, brunovsky_transform, heymann_reduce
from .errors import DimensionError, LambdaDomainError
from .matcore import DEFAULT_RANK_TOL, EXTENDED_DIGITS, CharPoly, as_mat, solve_extended


@dataclass(frozen=True)
class EigenvalueLadder:
    values: tuple[float, ...]
    rho: float

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def lambda_min(self) -> float:
        return abs(self.values[0])

    @property
    def lambda_max(self) -> float:
        return abs(self.values[-1])


@dataclass(frozen=True)
class GainCertificate:
    k_gain: np.ndarray
    k_canonical: np.ndarray
    beta: np.ndarray
    ladder: EigenvalueLadder
    l_exponent: int
    m_constant: float
    m_total: float
    transform_norms: tuple[float, float]
    lambda_request: float
    # audit trail
    plant: Plant
    reduction: HeymannReduction
    canonical: CanonicalForm

    @property
    def closed_loop(self) -> np.ndarray:
        return self.plant.a + self.plant.b @ self.k_gain

    @property
    def canonical_closed_loop(self) -> np.ndarray:
        """T^{-1} (A + B K) T, formed at extended precision before rounding."""
        return closed_loop_in_basis(self.plant.a, self.plant.b, self.k_gain, self.canonical.t)

    @property
    def transform_condition(self) -> float:
        return self.transform_norms[0] * self.transform_norms[1]

    @property
    def certified_bound(self) -> float:
        """M_1 * lam**L, the bound on ||e^{Ft}|| e^{lam t}."""
        return self.m_total * self.lambda_request**self.l_exponent


@dataclass(frozen=True)
class SquashingParams:
    tau0: float
    delta: float


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam >= 1.0:
        raise LambdaDomainError(
            f"lambda = {lam:g} is not allowed: the overshoot bound only holds for lambda >= 1 "
            "(the ladder needs lambda_1 <= -1)"
        )
    return lam


def eigenvalue_ladder(lam: float, n: int) -> EigenvalueLadder:
    """lambda_1 = -lam, lambda_{i+1} = lambda_i - 1, with spread bound rho = n."""
    lam = check_lambda(lam)
    if n < 1:
        raise DimensionError("n must be positive")
    return EigenvalueLadder(values=tuple(-lam - i for i in range(n)), rho=float(n))


def _exact_poly(roots) -> list[Fraction]:
    coeffs = [Fraction(1)]
    for r in roots:
        fr = Fraction(float(r))
        coeffs = [c - fr * prev for c, prev in zip(coeffs + [Fraction(0)], [Fraction(0)] + coeffs)]
    return coeffs


def poly_from_roots(roots) -> CharPoly:
    """Monic prod(s - r_i) by sequential convolution in exact rational arithmetic.

    The float inputs are taken as exact binary rationals, so the only rounding
    is the final conversion of each coefficient.
    """
    roots = [float(r) for r in np.asarray(roots, dtype=float).ravel()]
    if not roots:
        raise DimensionError("need at least one root")
    if not all(math.isfinite(r) for r in roots):
        raise ValueError("roots must be finite")
    return CharPoly(tuple(float(c) for c in _exact_poly(roots)[1:]))


def place_canonical(open_loop: CharPoly, ladder: EigenvalueLadder) -> tuple[np.ndarray, np.ndarray]:
    """Canonical gain k~ and closed-loop bottom row beta.

    With the open-loop bottom row a_i (x_n' = sum a_i x_i + u) and the
    target p(s) = s^n - beta_n s^{n-1} - ... - beta_1, the gain is
    k~_i = beta_i - a_i; k~_i multiplies x_i.
    """
    n = open_loop.degree
    if ladder.n != n:
        raise DimensionError(f"open-loop degree {n} does not match ladder length {ladder.n}")
    exact = _exact_poly(ladder.values)[1:]
    a_exact = [-Fraction(c) for c in reversed(open_loop.coeffs)]
    beta_exact = [-c for c in reversed(exact)]
    beta = np.array([float(b) for b in beta_exact])
    k_canonical = np.array([float(b - a) for b, a in zip(beta_exact, a_exact)])
    return k_canonical, beta


def certificate_constants(n: int, rho: float, t_norm: float, t_inv_norm: float) -> tuple[int, float, float]:
    """(L, M, M_1) for state dimension n and spread bound rho."""
    if n < 1:
        raise DimensionError("n must be positive")
    if rho < 1 or (n > 1 and rho <= 1):
        raise ValueError(f"rho must exceed 1 (or equal 1 when n = 1), got {rho}")
    if t_norm < 0 or t_inv_norm < 0:
        raise ValueError("transform norms must be nonnegative")
    l_exp = (n - 1) * (n + 2) // 2
    try:
        if float(rho).is_integer():
            m_const = float(n * math.factorial(n) * int(rho) ** l_exp)
        else:
            m_const = n * math.factorial(n) * float(rho) ** l_exp
    except OverflowError:
        raise OverflowError(f"M = n n! rho^L overflows float64 at n = {n}") from None
    m_total = m_const * t_norm * t_inv_norm
    if not math.isfinite(m_total):
        raise OverflowError(f"M_1 overflows float64 at n = {n}")
    return l_exp, m_const, m_total


def legacy_example_constant(n: int, t_norm: float, t_inv_norm: float) -> float:
    """||T|| ||T^{-1}|| n n! n^{(n-1)(n-2)/2}.

    This is the exponent used in the worked 3-state example's printed
    constant (about 218.642). It disagrees with the general M formula and
    is kept only to reproduce that number; never certify with it.
    """
    return t_norm * t_inv_norm * n * math.factorial(n) * float(n) ** ((n - 1) * (n - 2) // 2)


def synthesize_gain(p: Plant, lam: float, tol: float = DEFAULT_RANK_TOL) -> GainCertificate:
    """Full pipeline: Heymann reduction, canonical transform, placement, gain assembly."""
    lam = check_lambda(lam)
    reduction = heymann_reduce(p, tol)
    a_red = p.a + p.b @ reduction.k0
    cf = brunovsky_transform(a_red, reduction.b_single, tol)
    ladder = eigenvalue_ladder(lam, p.n)
    k_canonical, beta = place_canonical(cf.open_loop_coeffs, ladder)

    k_single = k_canonical @ cf.t_inv
    k_gain = reduction.k0 + np.outer(reduction.v, k_single)

    t_norm, t_inv_norm = cf.t_norm, cf.t_inv_norm
    l_exp, m_const, m_total = certificate_constants(p.n, ladder.rho, t_norm, t_inv_norm)
    return GainCertificate(
        k_gain=k_gain,
        k_canonical=k_canonical,
        beta=beta,
        ladder=ladder,
        l_exponent=l_exp,
        m_constant=m_const,
        m_total=m_total,
        transform_norms=(t_norm, t_inv_norm),
        lambda_request=lam,
        plant=p,
        reduction=reduction,
        canonical=cf,
    )


def closed_loop_in_basis(a, b, k, s, digits: int = EXTENDED_DIGITS) -> np.ndarray:
    """S^{-1} (a + b k) S computed at ``digits`` digits, then rounded.

    Forming a + b k in float64 is harmful for high gains: the rounding
    error is unstructured, and the placed spectrum is far more sensitive to
    unstructured perturbations than to errors in k itself (n = 5,
    lam = 25 already moves eigenvalues by several percent). In the
    canonical basis the closed loop is a companion matrix whose float
    rounding only perturbs polynomial coefficients.
    """
    a, b, k, s = (as_mat(x, name) for x, name in ((a, "a"), (b, "b"), (k, "k"), (s, "s")))
    with mpmath.workdps(digits):
        f = mpmath.matrix(a.tolist()) + mpmath.matrix(b.tolist()) * mpmath.matrix(k.tolist())
        fs = f * mpmath.matrix(s.tolist())
        g = solve_extended(s, fs, digits=digits, as_mp=True)
        return np.array(g.tolist(), dtype=float)


def placement_error(cert: GainCertificate) -> float:
    """Largest relative gap between the closed-loop spectrum and the ladder.

    The spectrum is taken from the canonical-basis closed loop (a similarity
    of A + B K computed exactly; see ``closed_loop_in_basis``). Eigenvalues
    are matched after sorting by real part, descending, which is the
    ladder's own order.
    """
    eig = np.linalg.eigvals(cert.canonical_closed_loop)
    eig = eig[np.argsort(-eig.real, kind="stable")]
    target = np.asarray(cert.ladder.values)
    return float(np.max(np.abs(eig - target) / np.abs(target)))


def squashing_form(cert: GainCertificate, tau0: float) -> SquashingParams:
    """Smallest delta with M_1 lam^L e^{-lam t} <= delta e^{-lam (t - tau0)} for all t >= 0."""
    if not tau0 > 0:
        raise ValueError("tau0 must be positive")
    lam = cert.lambda_request
    log_delta = math.log(cert.m_total) + cert.l_exponent * math.log(lam) - lam * tau0
    return SquashingParams(tau0=float(tau0), delta=math.exp(log_delta))


def squashing_offset(cert: GainCertificate) -> float:
    """tau0 at which the squashing level delta equals 1: ln(M_1 lam^L) / lam."""
    lam = cert.lambda_request
    return (math.log(cert.m_total) + cert.l_exponent * math.log(lam)) / lam

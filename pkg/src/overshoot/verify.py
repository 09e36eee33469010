"""Numerical checks of the overshoot certificate.

Two independent routes to the transition matrix are used: the generic
matrix exponential, and the spectral factorization

    e^{C t} = V diag(e^{lambda_i t}) V^{-1}

of the placed companion matrix C, where V is the Vandermonde matrix of the
ladder. The spectral route runs in extended precision because V becomes
very ill-conditioned for high-gain ladders.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .canon import CanonicalForm
from .errors import DuplicateNodeError
from .matcore import (
    EXTENDED_DIGITS,
    as_square,
    expm_batch,
    operator_norm,
    solve_extended,
    vandermonde,
)
from .synth import EigenvalueLadder, check_lambda

PASS_SLACK = 1e-9
REFINE_POINTS = 17
MAX_REFINE_ROUNDS = 80


@dataclass(frozen=True)
class SpectralFactors:
    lambda0: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float).ravel()
        if np.any(d >= 0):
            raise ValueError("spectral nodes must be negative")
        if np.unique(d).size != d.size:
            raise DuplicateNodeError("spectral nodes must be distinct")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "lambda0", vandermonde(d))

    @classmethod
    def from_ladder(cls, ladder: EigenvalueLadder) -> "SpectralFactors":
        d = np.array(ladder.values)
        return cls(lambda0=vandermonde(d), d=d)


@dataclass
class EnvelopeReport:
    sup_ratio: float
    peak_time: float
    certified_bound: float
    passed: bool
    samples: list[tuple[float, float, float]] = field(repr=False)
    step_control: str = ""

    @property
    def margin(self) -> float:
        """certified_bound / sup_ratio; above 1 means room to spare."""
        return self.certified_bound / self.sup_ratio

    @property
    def tightness(self) -> float:
        return self.sup_ratio / self.certified_bound


@dataclass(frozen=True)
class VandermondeBounds:
    norm: float
    norm_bound: float
    inv_norm: float
    inv_bound: float
    det: float

    @property
    def norm_margin(self) -> float:
        return self.norm_bound - self.norm

    @property
    def inv_margin(self) -> float:
        return self.inv_bound - self.inv_norm

    @property
    def det_margin(self) -> float:
        return abs(self.det) - 1.0

    @property
    def norm_ok(self) -> bool:
        return self.norm_margin >= 0

    @property
    def inv_ok(self) -> bool:
        return self.inv_margin >= 0

    @property
    def det_ok(self) -> bool:
        return self.det_margin >= 0

    @property
    def all_ok(self) -> bool:
        return self.norm_ok and self.inv_ok and self.det_ok


def _vandermonde_mp(nodes, digits: int):
    """Vandermonde matrix with powers formed at ``digits`` digits, not rounded to float64."""
    n = len(nodes)
    with mpmath.workdps(digits):
        return mpmath.matrix([[mpmath.mpf(float(x)) ** i for x in nodes] for i in range(n)])


def _spectral_mp(f: SpectralFactors, t: float, digits: int):
    n = f.d.size
    with mpmath.workdps(digits):
        v = _vandermonde_mp(f.d, digits)
        weights = [mpmath.exp(mpmath.mpf(x) * mpmath.mpf(t)) for x in f.d]
        scaled = v.copy()
        for i in range(n):
            for j in range(n):
                scaled[i, j] *= weights[j]
        # X V = V E  <=>  X = V E V^{-1}
        return scaled * mpmath.inverse(v)


def spectral_transition(f: SpectralFactors, t: float, digits: int = EXTENDED_DIGITS) -> np.ndarray:
    """V e^{D t} V^{-1}, applying V^{-1} by an extended-precision solve."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return np.array(_spectral_mp(f, t, digits).tolist(), dtype=float)


def companion_closed_loop(beta) -> np.ndarray:
    """Companion matrix with ones on the superdiagonal and bottom row ``beta``."""
    beta = np.asarray(beta, dtype=float).ravel()
    n = beta.size
    c = np.eye(n, k=1)
    c[-1] = beta
    return c


def dominant_gap(f) -> float:
    """Distance between the two largest distinct real parts of spec(f); inf if only one."""
    re = np.sort(np.linalg.eigvals(as_square(f, "f")).real)[::-1]
    scale = max(1.0, float(np.abs(re).max()))
    distinct = re[np.concatenate(([True], np.diff(re) < -1e-9 * scale))]
    return float(distinct[0] - distinct[1]) if distinct.size > 1 else math.inf


def default_t_end(lam: float, l: int, m_total: float, gap: float = math.inf) -> float:
    """Horizon after which neither the envelope nor the ratio can still move.

    (ln(M_1 lam^L) + 20) / rate with rate = min(lam, gap): by then the
    envelope is below e^{-20} of its start, and the non-dominant modes of
    e^{(F + lam I) t} have decayed by e^{-20} relative to the dominant one,
    so the ratio has settled at its limit.
    """
    rate = min(lam, gap)
    return max(math.log(m_total) + l * math.log(lam) + 20.0, 20.0) / rate


def _ratios(shifted: np.ndarray, ts: np.ndarray, basis=None) -> np.ndarray:
    mats = expm_batch(shifted, ts)
    if basis is not None:
        s, s_inv = basis
        mats = s @ mats @ s_inv
    return np.linalg.svd(mats, compute_uv=False)[:, 0]


def envelope_check(
    f,
    lam: float,
    l: int,
    m_total: float,
    t_end: float | None = None,
    base_samples: int = 10_000,
    basis=None,
) -> EnvelopeReport:
    """Sample sup_t ||e^{F t}|| e^{lam t} and compare with M_1 lam^L.

    The ratio is evaluated as ||e^{(F + lam I) t}||, which avoids scaling a
    tiny matrix by a huge exponential. Half the base grid is linear on
    [0, 5/lam] where the peak sits, half is log-spaced out to ``t_end``.
    Around the running maximum the grid is then refined until the local
    step h satisfies h <= 1e-3 / (||F|| r_max), so that the first-order
    drift ||F|| r h of the sampled ratio stays below 1e-3.

    With ``basis`` = S, ``f`` is the generator expressed in that basis,
    g = S^{-1} F S, and the norms are those of S e^{g t} S^{-1} = e^{F t}.
    Use it for high-gain loops whose float64 rounding of F is unreliable
    (see ``synth.closed_loop_in_basis``).
    """
    f = as_square(f, "f")
    lam = check_lambda(lam)
    if base_samples < 1:
        raise ValueError("base_samples must be positive")
    bound = m_total * lam**l
    if t_end is None:
        t_end = default_t_end(lam, l, m_total, dominant_gap(f))
    if not t_end > 0:
        raise ValueError("t_end must be positive")

    early = 5.0 / lam
    n_lin = max(base_samples // 2, 1)
    if t_end <= early:
        grid = np.linspace(0.0, t_end, base_samples)
    else:
        n_log = max(base_samples - n_lin, 1)
        grid = np.concatenate([
            np.linspace(0.0, early, n_lin),
            np.geomspace(early, t_end, n_log + 1)[1:],
        ])
    ts = np.unique(np.concatenate([[0.0], grid]))

    shifted = f + lam * np.eye(f.shape[0])
    if basis is None:
        pair = None
        f_norm = operator_norm(f)
    else:
        s = as_square(basis, "basis")
        pair = (s, solve_extended(s, np.eye(s.shape[0])))
        f_norm = operator_norm(pair[0] @ f @ pair[1])
    ratios = _ratios(shifted, ts, pair)

    rounds = 0
    while f_norm > 0 and ts.size > 1 and rounds < MAX_REFINE_ROUNDS:
        i = int(np.argmax(ratios))
        lo = ts[max(i - 1, 0)]
        hi = ts[min(i + 1, ts.size - 1)]
        step = max(ts[i] - lo, hi - ts[i])
        if step <= 1e-3 / (f_norm * ratios[i]):
            break
        new = np.setdiff1d(np.linspace(lo, hi, REFINE_POINTS)[1:-1], ts)
        if new.size == 0:
            break
        ts = np.concatenate([ts, new])
        ratios = np.concatenate([ratios, _ratios(shifted, new, pair)])
        order = np.argsort(ts, kind="stable")
        ts, ratios = ts[order], ratios[order]
        rounds += 1

    i = int(np.argmax(ratios))
    sup_ratio = float(ratios[i])
    decay = np.exp(-lam * ts)
    samples = [
        (float(t), float(r * e), float(bound * e))
        for t, r, e in zip(ts, ratios, decay)
    ]
    return EnvelopeReport(
        sup_ratio=sup_ratio,
        peak_time=float(ts[i]),
        certified_bound=bound,
        passed=sup_ratio <= bound * (1 + PASS_SLACK),
        samples=samples,
        step_control=(
            f"{base_samples} base samples ({n_lin} linear on [0, {early:.6g}], rest log-spaced "
            f"to {t_end:.6g}); {rounds} refinement rounds, {ts.size} points total"
        ),
    )


def certificate_envelope(cert, t_end: float | None = None, base_samples: int = 10_000) -> EnvelopeReport:
    """envelope_check of A + B K in the certificate's canonical basis."""
    return envelope_check(
        cert.canonical_closed_loop,
        cert.lambda_request,
        cert.l_exponent,
        cert.m_total,
        t_end=t_end,
        base_samples=base_samples,
        basis=cert.canonical.t,
    )


def vandermonde_bounds_check(ladder: EigenvalueLadder) -> VandermondeBounds:
    """Measure ||V||, ||V^{-1}||, |det V| against their closed-form bounds.

    Bounds: ||V|| <= n lmax^{n-1}, ||V^{-1}|| <= n (n-1)! lmax^{n(n-1)/2},
    |det V| >= 1 for a unit-spaced ladder.
    """
    n = ladder.n
    lmax = ladder.lambda_max
    with mpmath.workdps(EXTENDED_DIGITS):
        v = _vandermonde_mp(ladder.values, EXTENDED_DIGITS)
        v_inv = np.array(mpmath.inverse(v).tolist(), dtype=float)
        det = float(mpmath.det(v))
    return VandermondeBounds(
        norm=operator_norm(vandermonde(ladder.values)),
        norm_bound=n * lmax ** (n - 1),
        inv_norm=operator_norm(v_inv),
        inv_bound=n * math.factorial(n - 1) * lmax ** (n * (n - 1) // 2),
        det=det,
    )


def cross_oracle_check(a, b, k_canonical, cf: CanonicalForm, ladder: EigenvalueLadder, times) -> float:
    """Worst elementwise gap between expm((a + b k T^{-1}) t) and T V e^{Dt} V^{-1} T^{-1}."""
    a = as_square(a, "a")
    b = np.asarray(b, dtype=float).reshape(a.shape[0], 1)
    k = np.asarray(k_canonical, dtype=float).reshape(1, -1)
    ts = np.asarray(times, dtype=float).ravel()
    if ts.size == 0:
        return 0.0
    closed = a + b @ (k @ cf.t_inv)
    generic = expm_batch(closed, ts)
    factors = SpectralFactors.from_ladder(ladder)
    worst = 0.0
    for t, g in zip(ts, generic):
        spectral = cf.t @ spectral_transition(factors, t) @ cf.t_inv
        worst = max(worst, float(np.max(np.abs(g - spectral))))
    return worst

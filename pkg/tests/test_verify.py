import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overshoot.canon import Plant
from overshoot.errors import DuplicateNodeError
from overshoot.fixtures import EXAMPLE_LAMBDA
from overshoot.matcore import matrix_exponential
from overshoot.synth import eigenvalue_ladder, synthesize_gain
from overshoot.verify import (
    SpectralFactors,
    certificate_envelope,
    companion_closed_loop,
    cross_oracle_check,
    default_t_end,
    dominant_gap,
    envelope_check,
    spectral_transition,
    vandermonde_bounds_check,
)

from conftest import random_controllable


def test_spectral_factors_validation():
    with pytest.raises(ValueError):
        SpectralFactors(lambda0=None, d=[-1.0, 0.5])
    with pytest.raises(DuplicateNodeError):
        SpectralFactors(lambda0=None, d=[-1.0, -1.0])


def test_spectral_at_zero_is_identity():
    f = SpectralFactors.from_ladder(eigenvalue_ladder(30.0, 4))
    np.testing.assert_allclose(spectral_transition(f, 0.0), np.eye(4), atol=1e-12)


def test_spectral_scalar():
    f = SpectralFactors.from_ladder(eigenvalue_ladder(2.0, 1))
    assert spectral_transition(f, 0.3)[0, 0] == pytest.approx(math.exp(-0.6), rel=1e-15)


def test_spectral_matches_expm_of_companion():
    lad = eigenvalue_ladder(EXAMPLE_LAMBDA, 3)
    cert = synthesize_gain(Plant(np.eye(3, k=1), [[0.0], [0.0], [1.0]]), EXAMPLE_LAMBDA)
    c = companion_closed_loop(cert.beta)
    got = spectral_transition(SpectralFactors.from_ladder(lad), 0.1)
    ref = matrix_exponential(c, 0.1)
    np.testing.assert_allclose(got, ref, rtol=1e-7, atol=1e-7 * np.abs(ref).max())


def test_envelope_scaled_identity_is_tight():
    rep = envelope_check(-3.0 * np.eye(2), 3.0, 0, 1.0, base_samples=200)
    assert rep.sup_ratio == pytest.approx(1.0, abs=1e-12)
    assert rep.passed


def test_envelope_detects_violation_at_zero():
    rep = envelope_check(-np.eye(2), 1.0, 0, 0.5, base_samples=200)
    assert not rep.passed
    assert rep.peak_time == 0.0
    assert rep.sup_ratio == pytest.approx(1.0)


def test_envelope_samples_are_consistent():
    rep = envelope_check(companion_closed_loop([-6.0, -5.0]), 2.0, 2, 16.0, base_samples=300)
    ts = [s[0] for s in rep.samples]
    assert ts == sorted(ts) and ts[0] == 0.0
    for t, nrm, env in rep.samples[:: max(1, len(ts) // 20)]:
        ref = np.linalg.norm(matrix_exponential(companion_closed_loop([-6.0, -5.0]), t), 2)
        assert nrm == pytest.approx(ref, rel=1e-9, abs=1e-300)
        assert env == pytest.approx(rep.certified_bound * math.exp(-2.0 * t), rel=1e-12)


def test_example_certificate_passes(example_plant):
    cert = synthesize_gain(example_plant, EXAMPLE_LAMBDA)
    rep = certificate_envelope(cert, base_samples=4000)
    assert rep.passed and rep.margin > 1


def test_default_t_end_and_gap():
    assert dominant_gap(np.diag([-1.0, -3.0])) == pytest.approx(2.0)
    assert dominant_gap(-np.eye(3)) == math.inf
    assert default_t_end(1.0, 0, 1.0) == pytest.approx(20.0)
    assert default_t_end(2.0, 0, 1.0, gap=0.5) == pytest.approx(40.0)


def test_orthogonal_similarity_invariance(rng):
    p = random_controllable(rng, 3, 1)
    cert = synthesize_gain(p, 4.0)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    f = cert.closed_loop
    a = envelope_check(f, 4.0, cert.l_exponent, cert.m_total, base_samples=1500)
    b = envelope_check(q.T @ f @ q, 4.0, cert.l_exponent, cert.m_total, t_end=None, base_samples=1500)
    assert b.sup_ratio == pytest.approx(a.sup_ratio, rel=1e-8)


def test_vandermonde_bounds_example():
    vb = vandermonde_bounds_check(eigenvalue_ladder(EXAMPLE_LAMBDA, 3))
    assert vb.all_ok
    assert vb.det == pytest.approx(-2.0, rel=1e-12) or vb.det == pytest.approx(2.0, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(1, 100), n=st.integers(1, 6))
def test_vandermonde_bounds_property(lam, n):
    lad = eigenvalue_ladder(lam, n)
    vb = vandermonde_bounds_check(lad)
    assert vb.all_ok
    oracle = math.prod(lad.values[j] - lad.values[i] for i in range(n) for j in range(i + 1, n))
    assert vb.det == pytest.approx(oracle, rel=1e-9)


def test_cross_oracle_example(example_plant):
    cert = synthesize_gain(example_plant, EXAMPLE_LAMBDA)
    red = cert.reduction
    times = np.linspace(0.0, 5.0 / EXAMPLE_LAMBDA, 20)
    gap = cross_oracle_check(
        example_plant.a + example_plant.b @ red.k0, red.b_single, cert.k_canonical,
        cert.canonical, cert.ladder, times,
    )
    peak = max(np.abs(matrix_exponential(cert.closed_loop, t)).max() for t in times)
    assert gap <= 1e-6 * peak
    assert cross_oracle_check(example_plant.a, example_plant.b, cert.k_canonical,
                              cert.canonical, cert.ladder, []) == 0.0

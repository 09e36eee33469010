"""State-feedback gain synthesis with a certified transient-overshoot bound."""
from .canon import Plant, brunovsky_transform, controllability_matrix, heymann_reduce, is_controllable
from .synth import (
    EigenvalueLadder,
    GainCertificate,
    certificate_constants,
    eigenvalue_ladder,
    place_canonical,
    poly_from_roots,
    squashing_form,
    synthesize_gain,
)
from .verify import cross_oracle_check, envelope_check, spectral_transition, vandermonde_bounds_check

__version__ = "0.1.0"

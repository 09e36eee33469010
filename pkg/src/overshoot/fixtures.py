"""Built-in plants: the worked 3-state example and a small round-trip set."""
import numpy as np

EXAMPLE_A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, -1.0], [2.0, 1.0, 0.0]])
EXAMPLE_B = np.array([[1.0], [0.0], [1.0]])
EXAMPLE_LAMBDA = 49.894

# Values as printed for the worked example. Several disagree with the
# construction they are said to come from; see cli.example_rows.
PRINTED = {
    "T": np.array([[0.0, 0.0, 1.0], [-1.0, -1.0, 0.0], [-1.0, 0.0, 1.0]]),
    "A_canonical": np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 2.0]]),
    "T_norm": 1.80193754431757,
    "T_inv_norm": 2.24697960199992,
    "L": 5,
    "M_example": 218.642,
    "K_canonical": np.array([-151.681, -7769.474, -131773.562]),
    "K": np.array([-124155.769, 7769.474, -7617.793]),
}

FIXTURE_PLANTS = {
    "scalar": {"A": [[0.0]], "B": [[1.0]], "lambda": 1.0},
    "example": {"A": EXAMPLE_A.tolist(), "B": EXAMPLE_B.tolist(), "lambda": EXAMPLE_LAMBDA},
    "double_integrator": {"A": [[0.0, 1.0], [0.0, 0.0]], "B": [[0.0], [1.0]], "lambda": 5.0},
    "two_input_zero": {"A": [[0.0, 0.0], [0.0, 0.0]], "B": [[1.0, 0.0], [0.0, 1.0]], "lambda": 2.0},
    "unstable_3x2": {
        "A": [[0.5, 1.0, 0.0], [0.0, -1.0, 2.0], [1.0, 0.0, 0.3]],
        "B": [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]],
        "lambda": 10.0,
    },
    "chain_4": {
        "A": [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [1.0, -2.0, 0.5, 0.0]],
        "B": [[0.0], [0.0], [1.0], [1.0]],
        "lambda": 3.0,
    },
}

UNCONTROLLABLE = {"A": [[1.0, 0.0], [0.0, 2.0]], "B": [[1.0], [0.0]]}

"""Shared randomized constructors for the test suite."""

import numpy as np

from qsnorm import Circuit, GateOp, MixedOperation

FIXED_KINDS = ["h", "x", "y", "z", "s", "sdg", "t", "tdg"]
PARAM_KINDS = ["rx", "ry", "rz", "phase"]


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    ops = []
    for _ in range(depth):
        roll = rng.random()
        if roll < 0.4:
            ops.append(GateOp(str(rng.choice(FIXED_KINDS)), (int(rng.integers(n)),)))
        elif roll < 0.8:
            kind = str(rng.choice(PARAM_KINDS))
            ops.append(GateOp(kind, (int(rng.integers(n)),), (float(rng.uniform(-np.pi, np.pi)),)))
        elif roll < 0.9 and n >= 2:
            control, target = rng.choice(n, size=2, replace=False)
            ops.append(GateOp("cnot", (int(control), int(target))))
        else:
            ops.append(GateOp("globalphase", (), (float(rng.uniform(-np.pi, np.pi)),)))
    return Circuit(n, tuple(ops))


def random_mixture(n: int, num_terms: int, rng: np.random.Generator, depth: int = 6) -> MixedOperation:
    """Random mixture with complex coefficients of total weight below 1."""
    coeffs = rng.standard_normal(num_terms) + 1j * rng.standard_normal(num_terms)
    coeffs /= np.sum(np.abs(coeffs)) * float(rng.uniform(1.0, 2.0))
    return MixedOperation(tuple((complex(c), random_circuit(n, depth, rng)) for c in coeffs))

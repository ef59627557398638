"""Simulated one-clean-qubit interference tests.

A Hadamard test prepares |psi> on the data register, applies a chain of
operations controlled on a clean ancilla that is put into superposition,
and measures the ancilla: 1 - 2 Pr(1) equals Re<psi|V|psi>, or
Im<psi|V|psi> when an S-dagger is inserted after the first Hadamard.

Two evaluation paths are provided. The analytic path computes the exact
probability straight from statevectors; the full-circuit path simulates
the literal (n+1)-qubit circuit and takes the marginal of the ancilla.
They agree to rounding and cross-check each other in the tests. Shot mode
draws Bernoulli outcomes at the exact probability to reintroduce
measurement noise deliberately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np

from .qsim import (
    MixedOperation,
    Operation,
    STATE_QUBIT_CAP,
    adjoint,
    apply_operation_amplitudes,
    zero_state,
)

Part = Literal["real", "imaginary"]


@dataclass(frozen=True)
class HadamardTestSpec:
    """One interference test: state prep, controlled chain, which part, shots.

    ``shots == 0`` selects analytic (error-free measurement) mode.
    """

    state_prep: Operation
    controlled_ops: tuple
    part: Part = "real"
    shots: int = 0

    def __post_init__(self):
        object.__setattr__(self, "controlled_ops", tuple(self.controlled_ops))
        if self.part not in ("real", "imaginary"):
            raise ValueError(f"part must be 'real' or 'imaginary', got {self.part!r}")
        if self.shots < 0:
            raise ValueError(f"shots must be nonnegative, got {self.shots}")
        n = self.state_prep.n
        if any(op.n != n for op in self.controlled_ops):
            raise ValueError("all circuits of a test must share one qubit count")

    @property
    def n(self) -> int:
        return self.state_prep.n


@dataclass(frozen=True)
class ShotResult:
    """Outcome of a sampled test; estimate is always 1 - 2 p1_hat."""

    estimate: float
    shots_used: int
    p1_hat: float


def _overlap(spec: HadamardTestSpec) -> complex:
    psi = apply_operation_amplitudes(zero_state(spec.n).amplitudes, spec.state_prep)
    phi = psi
    for op in spec.controlled_ops:
        phi = apply_operation_amplitudes(phi, op)
    return complex(np.vdot(psi, phi))


def hadamard_probability(spec: HadamardTestSpec) -> float:
    """Exact Pr(ancilla = 1): (1 - Re<psi|V|psi>)/2, or Im for the
    imaginary-part test. Ignores ``spec.shots``."""
    z = _overlap(spec)
    value = z.real if spec.part == "real" else z.imag
    return min(1.0, max(0.0, (1.0 - value) / 2.0))


def hadamard_full_circuit_probability(spec: HadamardTestSpec) -> float:
    """Pr(ancilla = 1) from simulating the literal (n+1)-qubit circuit.

    The ancilla is qubit 0 of the enlarged register; the joint state is
    kept as two data-register rows indexed by the ancilla bit, and a
    controlled operation acts on the ancilla-1 row only.
    """
    n = spec.n
    if n + 1 > STATE_QUBIT_CAP:
        raise ValueError(f"full-circuit path needs n+1 <= {STATE_QUBIT_CAP}, got n={n}")
    dim = 1 << n
    rows = np.zeros((2, dim), dtype=complex)
    rows[0, 0] = 1.0
    rows[0] = apply_operation_amplitudes(rows[0], spec.state_prep)
    rows[1] = apply_operation_amplitudes(rows[1], spec.state_prep)
    # H on the ancilla
    rows = np.stack((rows[0] + rows[1], rows[0] - rows[1])) / math.sqrt(2)
    if spec.part == "imaginary":
        rows[1] *= -1j
    for op in spec.controlled_ops:
        rows[1] = apply_operation_amplitudes(rows[1], op)
    rows = np.stack((rows[0] + rows[1], rows[0] - rows[1])) / math.sqrt(2)
    return float(np.linalg.norm(rows[1]) ** 2)


def hadamard_shot_estimate(spec: HadamardTestSpec, rng: np.random.Generator) -> ShotResult:
    """Estimate 1 - 2 Pr(1) from ``spec.shots`` Bernoulli outcomes."""
    if spec.shots < 1:
        raise ValueError("shot estimation needs shots >= 1; use the analytic path for shots == 0")
    p1 = hadamard_probability(spec)
    ones = int(rng.binomial(spec.shots, p1))
    p1_hat = ones / spec.shots
    return ShotResult(estimate=1.0 - 2.0 * p1_hat, shots_used=spec.shots, p1_hat=p1_hat)


def hadamard_shot_budget(epsilon: float, delta: float) -> int:
    """Shots so one test is within epsilon with probability 1 - delta:
    ceil(2 ln(2/delta) / epsilon^2)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil(2.0 * math.log(2.0 / delta) / epsilon**2)


def measurement_budget_mixed(epsilon: float, delta: float, num_terms: int) -> int:
    """Total shots for the K-term quadratic form: ceil(32 K^4 ln(4 K^2/delta)/eps^2).

    Split evenly over the up-to K(K-1) cross tests, this holds each test to
    precision eps/(4 K^2) at confidence 1 - delta/(2 K^2), which is enough
    for the weighted sum because the coefficient weights are at most 2.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if num_terms < 1:
        raise ValueError(f"need at least one term, got {num_terms}")
    k = num_terms
    return math.ceil(32.0 * k**4 * math.log(4.0 * k**2 / delta) / epsilon**2)


def mixed_quadratic_form(
    mixed: MixedOperation,
    theta: float,
    shots_per_test: int = 0,
    rng: np.random.Generator | None = None,
) -> float:
    """<x(theta)| U~ U~^dagger |x(theta)> for a mixture U~ = sum_k a_k U_k.

    Expands into sum_k |a_k|^2 plus cross terms, each obtained from a
    Hadamard test with state prep S(theta) and controlled chain
    (U_k2^dagger, U_k1). Analytic when ``shots_per_test`` is 0; otherwise
    every cross test draws ``shots_per_test`` Bernoulli outcomes from
    ``rng``.
    """
    from .sampler import probe_vector
    from .schatten import sampling_circuit

    coeffs = [coeff for coeff, _ in mixed.terms]
    terms = [abs(c) ** 2 for c in coeffs]

    if shots_per_test == 0:
        # The prepared state S(theta)|0...0> is the probe vector, so the
        # analytic path builds it directly. Each cross bracket is evaluated
        # as <x|U_a U_b^dag|x> = <U_a^dag x|U_b^dag x>, and every ordered
        # pair is summed exactly: the contribution of (a, b) is computed by
        # the same float operations regardless of how the mixture terms are
        # listed, so the result is permutation invariant bit for bit.
        x = probe_vector(theta, mixed.n, 1 << mixed.n).astype(complex)
        back_applied = [apply_operation_amplitudes(x, adjoint(op)) for _, op in mixed.terms]
        for a in range(mixed.num_terms):
            for b in range(mixed.num_terms):
                if a == b:
                    continue
                overlap = complex(np.vdot(back_applied[a], back_applied[b]))
                terms.append((coeffs[a] * coeffs[b].conjugate() * overlap).real)
        return math.fsum(terms)

    if rng is None:
        raise ValueError("shot mode needs a generator; pass rng or use shots_per_test=0")
    prep = sampling_circuit(mixed.n, theta)
    for k1, k2 in combinations(range(mixed.num_terms), 2):
        weight = coeffs[k1] * coeffs[k2].conjugate()
        ops = (adjoint(mixed.terms[k2][1]), mixed.terms[k1][1])
        if weight.real != 0.0:
            spec = HadamardTestSpec(prep, ops, part="real", shots=shots_per_test)
            terms.append(2.0 * weight.real * hadamard_shot_estimate(spec, rng).estimate)
        if weight.imag != 0.0:
            spec = HadamardTestSpec(prep, ops, part="imaginary", shots=shots_per_test)
            terms.append(-2.0 * weight.imag * hadamard_shot_estimate(spec, rng).estimate)
    return math.fsum(terms)

"""Fidelity-based similarity of quantum operations.

Two operations are called (epsilon, delta)-similar when a Haar-random pure
state processed by both yields fidelity at least 1 - epsilon with
probability at least 1 - delta. A small normalized Schatten-2 distance is
a sufficient condition:

    ||U1 - U2|| <= epsilon / (1 + sqrt(2(1/delta - 1)))

and the mixture version of the bound additionally involves tau, the mean
of <psi| (U~1 U~1^dag + U~2 U~2^dag) |psi> / 2 over Haar states. The
decision procedure combines the sampled distance estimate with a
confidence slack so the verdict itself holds with probability at least
1 - delta_hat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qsim import (
    Circuit,
    DenseUnitary,
    GateOp,
    MixedOperation,
    Operation,
    StateVector,
    apply_circuit,
    circuit_matrix,
    haar_random_unitary,
)
from .sampler import SampleBudget, derive_seed, derived_rng
from .schatten import estimate_difference_norm, quantum_schatten2_estimate

ESTIMATE_FLOOR = 1e-6
TAU_FLOOR = 1e-12


@dataclass(frozen=True)
class SimilarityVerdict:
    """Decision record; similar iff estimate + slack_term <= threshold."""

    similar: bool
    epsilon: float
    delta: float
    delta_hat: float
    estimate: float
    slack_term: float
    threshold: float


@dataclass(frozen=True)
class TauEstimate:
    """Estimated mean squared size (tau) of a pair of mixtures, in (0, 1]."""

    tau: float
    m: int


def fidelity(psi1: StateVector, psi2: StateVector) -> float:
    """Squared overlap |<psi1|psi2>|^2 of two states on the same register."""
    if psi1.n != psi2.n:
        raise ValueError(f"states act on different registers: n={psi1.n} vs n={psi2.n}")
    return float(abs(np.vdot(psi1.amplitudes, psi2.amplitudes)) ** 2)


def haar_random_state(n: int, rng: np.random.Generator) -> StateVector:
    """Uniform pure state: normalized vector of complex standard Gaussians."""
    dim = 1 << n
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(n, amps / np.linalg.norm(amps))


def _check_eps_delta(epsilon: float, delta: float) -> None:
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def similarity_bound_unitary(epsilon: float, delta: float) -> float:
    """Distance below which two unitaries are (epsilon, delta)-similar:
    epsilon / (1 + sqrt(2 (1/delta - 1)))."""
    _check_eps_delta(epsilon, delta)
    return epsilon / (1.0 + math.sqrt(2.0 * (1.0 / delta - 1.0)))


def similarity_bound_mixed(epsilon: float, delta: float, tau: float) -> float | None:
    """Distance bound for mixtures, or None when no guarantee exists.

    Returns sqrt((eps^2 - (1/delta - 1)(tau - tau^4)) /
    (2 tau (eps + (1/delta - 1) tau^2))) when the radicand is nonnegative.
    Shrinking tau (operations far from unitary) weakens the bound until it
    disappears.
    """
    _check_eps_delta(epsilon, delta)
    if not 0 < tau <= 1:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    spread = 1.0 / delta - 1.0
    numerator = epsilon**2 - spread * (tau - tau**4)
    if numerator < 0:
        return None
    return math.sqrt(numerator / (2.0 * tau * (epsilon + spread * tau**2)))


def estimate_tau(
    u1: MixedOperation,
    u2: MixedOperation,
    budget: SampleBudget,
    shots_per_test: int = 0,
    seed: int = 0,
) -> TauEstimate:
    """Estimate tau = (||U~1||^2 + ||U~2||^2) / 2, clamped to (0, 1].

    Uses that the Haar mean of <psi|U~ U~^dag|psi> equals the squared
    normalized Schatten 2-norm, so each mixture is sized by the sampling
    pipeline independently.
    """
    if u1.n != u2.n:
        raise ValueError(f"mixtures act on different registers: n={u1.n} vs n={u2.n}")
    v1 = quantum_schatten2_estimate(u1, budget, shots_per_test, derive_seed(seed, 0)).value
    v2 = quantum_schatten2_estimate(u2, budget, shots_per_test, derive_seed(seed, 1)).value
    tau = (v1**2 + v2**2) / 2.0
    return TauEstimate(tau=min(1.0, max(TAU_FLOOR, tau)), m=budget.m)


def monte_carlo_similarity(
    u1: Operation,
    u2: Operation,
    epsilon: float,
    num_states: int,
    seed: int = 0,
) -> float:
    """Fraction of Haar states whose processed fidelity is >= 1 - epsilon."""
    if num_states < 1:
        raise ValueError(f"need at least one state, got {num_states}")
    hits = 0
    for i in range(num_states):
        psi = haar_random_state(u1.n, derived_rng(seed, i))
        if fidelity(apply_circuit(psi, u1), apply_circuit(psi, u2)) >= 1.0 - epsilon:
            hits += 1
    return hits / num_states


def similarity_slack(m: int, delta_hat: float, estimate: float) -> float:
    """Confidence slack added to a sampled distance estimate:
    min((2 ln(2/delta_hat)/m)^(1/4), sqrt(2 ln(2/delta_hat)/m)/max(estimate, floor)).

    The second branch would use the true distance; the estimate stands in
    for it (floored), and the first branch dominates whenever the distance
    is small, where no truth is needed.
    """
    if m < 1:
        raise ValueError(f"need at least one sample, got m={m}")
    if not 0 < delta_hat < 1:
        raise ValueError(f"delta_hat must lie in (0, 1), got {delta_hat}")
    base = 2.0 * math.log(2.0 / delta_hat) / m
    return min(base**0.25, math.sqrt(base) / max(estimate, ESTIMATE_FLOOR))


def decide_similarity(
    u1: Operation,
    u2: Operation,
    epsilon: float,
    delta: float,
    delta_hat: float,
    m: int,
    shots_per_test: int = 0,
    seed: int = 0,
) -> SimilarityVerdict:
    """Decide (epsilon, delta)-similarity from m sampled angles.

    Declares the pair similar when the distance estimate plus its
    confidence slack stays below the unitary similarity bound; a positive
    verdict is then correct with probability at least 1 - delta_hat.
    """
    _check_eps_delta(epsilon, delta)
    if epsilon > 2:
        raise ValueError(f"epsilon above 2 is vacuous for unit vectors, got {epsilon}")
    if not 0 < delta_hat < 1:
        raise ValueError(f"delta_hat must lie in (0, 1), got {delta_hat}")
    estimate = estimate_difference_norm(u1, u2, SampleBudget(m=m), shots_per_test, seed).value
    slack = similarity_slack(m, delta_hat, estimate)
    threshold = similarity_bound_unitary(epsilon, delta)
    return SimilarityVerdict(
        similar=bool(estimate + slack <= threshold),
        epsilon=epsilon,
        delta=delta,
        delta_hat=delta_hat,
        estimate=estimate,
        slack_term=slack,
        threshold=threshold,
    )


def rotation_perturbed_pair(n: int, distance: float, seed: int) -> tuple[DenseUnitary, DenseUnitary]:
    """A Haar unitary and a rotated copy at an exact Schatten-2 distance.

    The copy is R U with R a layer of equal-angle y-rotations; by unitary
    invariance ||U - R U|| = ||I - R|| = sqrt(2 - 2 cos(a/2)^n), which is
    inverted for the rotation angle a. Valid for 0 < distance < sqrt(2).
    """
    if not 0 < distance < math.sqrt(2.0):
        raise ValueError(f"distance must lie in (0, sqrt(2)), got {distance}")
    angle = 2.0 * math.acos((1.0 - distance**2 / 2.0) ** (1.0 / n))
    u1 = haar_random_unitary(n, seed)
    layer = Circuit(n, tuple(GateOp("ry", (q,), (angle,)) for q in range(n)))
    u2 = circuit_matrix(layer) @ u1
    return DenseUnitary(n, u1), DenseUnitary(n, u2)

"""Sample-based circuit learning.

Learns parameters xi of an ansatz U(xi) so that it approximates a target
operation V by gradient descent on the sampled squared-distance objective

    f(xi) = 2 - (1/m) sum_i 2 Re<0| S^dag(theta_i) V^dag U(xi) S(theta_i) |0>

whose expectation over uniform angles equals ||U(xi) - V||^2 in the
normalized Schatten-2 sense. The angle set is drawn once up front, so the
objective is a fixed deterministic function of xi for a given seed; with
finite shots both sides of every central difference reuse the same shot
seeds (common random numbers).

An ansatz applied ``repeat`` times learns roots: with repeat = 2 the loop
minimizes ||U(xi)^2 - V||^2. Ansatz templates can carry a global-phase
parameter because the objective is sensitive to a phase mismatch even
though states are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hadamard import HadamardTestSpec, hadamard_probability, hadamard_shot_estimate
from .qsim import (
    MATRIX_QUBIT_CAP,
    Circuit,
    CircuitFormatError,
    GateOp,
    Operation,
    adjoint,
    circuit_matrix,
)
from .sampler import derived_rng, probe_rows, sample_thetas
from .schatten import sampling_circuit


@dataclass(frozen=True)
class ParamSlot:
    """Placeholder for parameter ``index`` inside an ansatz template."""

    index: int


@dataclass(frozen=True)
class Ansatz:
    """Circuit template whose rotation angles are free parameters.

    ``template`` is a circuit whose params may contain :class:`ParamSlot`
    markers; ``repeat`` applies the bound circuit that many times, which is
    how square roots are learned.
    """

    template: Circuit
    num_params: int
    repeat: int = 1

    def __post_init__(self):
        if self.repeat < 1:
            raise ValueError(f"repeat must be at least 1, got {self.repeat}")
        used = {
            p.index
            for op in self.template.ops
            for p in op.params
            if isinstance(p, ParamSlot)
        }
        if used and (min(used) < 0 or max(used) >= self.num_params):
            raise ValueError(f"slot indices {sorted(used)} out of range for num_params={self.num_params}")

    @property
    def n(self) -> int:
        return self.template.n

    def bind(self, xi: np.ndarray) -> Circuit:
        """Fill the slots with values from xi (one application, no repeats)."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.num_params,):
            raise ValueError(f"expected {self.num_params} parameters, got shape {xi.shape}")
        ops = []
        for op in self.template.ops:
            params = tuple(
                float(xi[p.index]) if isinstance(p, ParamSlot) else float(p) for p in op.params
            )
            ops.append(GateOp(op.kind, op.qubits, params))
        return Circuit(self.template.n, tuple(ops))

    def bind_repeated(self, xi: np.ndarray) -> Circuit:
        """The bound circuit applied ``repeat`` times."""
        once = self.bind(xi)
        return Circuit(once.n, once.ops * self.repeat)


@dataclass(frozen=True)
class LearnConfig:
    """Optimizer settings; defaults converge in seconds on 2-qubit tasks."""

    m: int = 64
    eta: float = 0.1
    fd_eps: float = 1e-3
    max_iters: int = 1000
    tol: float = 1e-4
    shots_per_test: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.eta <= 0 or self.fd_eps <= 0 or self.max_iters < 1:
            raise ValueError("m, eta, fd_eps and max_iters must all be positive")
        if self.tol < 0 or self.shots_per_test < 0:
            raise ValueError("tol and shots_per_test must be nonnegative")


@dataclass
class LearnResult:
    xi: np.ndarray
    cost_history: list[float] = field(default_factory=list)
    converged: bool = False
    final_cost: float = math.inf


def loss(
    ansatz: Ansatz,
    xi: np.ndarray,
    target: Operation,
    thetas: np.ndarray,
    shots: int = 0,
    seed: int = 0,
) -> float:
    """Sampled squared-distance objective between U(xi) (with repeats) and V.

    Each term is the real-part interference test with state prep S(theta_i)
    and controlled chain (U(xi), V^dagger); with shots = 0 the test value
    Re<x|V^dag U|x> is taken exactly. Values lie in [0, 4].
    """
    if ansatz.n != target.n:
        raise ValueError(f"ansatz has n={ansatz.n} but target has n={target.n}")
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size == 0:
        raise ValueError("empty sample list")
    bound = ansatz.bind_repeated(xi)

    if shots == 0 and target.n <= MATRIX_QUBIT_CAP:
        total = circuit_matrix(adjoint(target)) @ circuit_matrix(bound)
        rows = probe_rows(thetas, target.n, 1 << target.n)
        values = np.einsum("si,ij,sj->s", rows, total, rows).real
        return 2.0 - 2.0 * math.fsum(values) / thetas.size

    values = []
    target_adj = adjoint(target)
    for i, theta in enumerate(thetas):
        spec = HadamardTestSpec(
            sampling_circuit(target.n, float(theta)),
            (bound, target_adj),
            part="real",
            shots=shots,
        )
        if shots == 0:
            values.append(1.0 - 2.0 * hadamard_probability(spec))
        else:
            values.append(hadamard_shot_estimate(spec, derived_rng(seed, i, 1)).estimate)
    return 2.0 - 2.0 * math.fsum(values) / thetas.size


def finite_diff_gradient(
    lossfn: Callable[[np.ndarray], float],
    xi: np.ndarray,
    fd_eps: float,
) -> np.ndarray:
    """Central-difference gradient, one coordinate at a time.

    The loss function must be deterministic in xi (fixed angle set and shot
    seeds) so both sides of each difference share their randomness.
    """
    if fd_eps <= 0:
        raise ValueError(f"fd_eps must be positive, got {fd_eps}")
    xi = np.asarray(xi, dtype=float)
    grad = np.empty_like(xi)
    for j in range(xi.size):
        shifted = xi.copy()
        shifted[j] = xi[j] + fd_eps
        upper = lossfn(shifted)
        shifted[j] = xi[j] - fd_eps
        lower = lossfn(shifted)
        grad[j] = (upper - lower) / (2.0 * fd_eps)
    return grad


def learn_circuit(ansatz: Ansatz, target: Operation, config: LearnConfig) -> LearnResult:
    """Gradient descent on the sampled objective.

    Angles are drawn once before the loop; xi starts uniform on [-pi, pi)
    per coordinate. Stops when the cost reaches config.tol or after
    config.max_iters steps; non-convergence is reported via the flag, never
    raised.
    """
    thetas = sample_thetas(config.seed, config.m)

    def objective(x: np.ndarray) -> float:
        return loss(ansatz, x, target, thetas, shots=config.shots_per_test, seed=config.seed)

    xi = derived_rng(config.seed).uniform(-math.pi, math.pi, ansatz.num_params)
    history = [objective(xi)]
    while history[-1] > config.tol and len(history) <= config.max_iters:
        grad = finite_diff_gradient(objective, xi, config.fd_eps)
        xi = xi - config.eta * grad
        history.append(objective(xi))
    return LearnResult(
        xi=xi,
        cost_history=history,
        converged=history[-1] <= config.tol,
        final_cost=history[-1],
    )


def learn_square_root(target: Operation, ansatz: Ansatz, config: LearnConfig) -> LearnResult:
    """Learn xi with U(xi) U(xi) approximating the target."""
    if ansatz.repeat != 2:
        raise ValueError(f"square-root learning needs repeat == 2, got {ansatz.repeat}")
    return learn_circuit(ansatz, target, config)


# --- ansatz documents -------------------------------------------------------
#
# An ansatz document is a circuit document where any param may be
# {"slot": k} instead of a number, plus a top-level "repeat".

def ansatz_to_dict(ansatz: Ansatz) -> dict:
    ops = []
    for op in ansatz.template.ops:
        entry: dict = {"gate": op.kind, "qubits": list(op.qubits)}
        if op.params:
            entry["params"] = [
                {"slot": p.index} if isinstance(p, ParamSlot) else float(p) for p in op.params
            ]
        ops.append(entry)
    return {"n": ansatz.template.n, "ops": ops, "repeat": ansatz.repeat}


def ansatz_from_dict(doc: dict) -> Ansatz:
    if not isinstance(doc, dict) or "n" not in doc:
        raise CircuitFormatError("ansatz document must be an object with an 'n' field")
    unknown = set(doc) - {"n", "ops", "repeat"}
    if unknown:
        raise CircuitFormatError(f"unknown ansatz keys {sorted(unknown)}")
    slots: set[int] = set()

    def convert(p):
        if isinstance(p, dict):
            if set(p) != {"slot"} or not isinstance(p["slot"], int) or p["slot"] < 0:
                raise CircuitFormatError(f"parameter object must be {{'slot': k}} with k >= 0, got {p!r}")
            slots.add(p["slot"])
            return ParamSlot(p["slot"])
        if isinstance(p, (int, float)):
            return float(p)
        raise CircuitFormatError(f"parameter must be a number or a slot, got {p!r}")

    ops = []
    try:
        for entry in doc.get("ops", []):
            if not isinstance(entry, dict) or "gate" not in entry:
                raise CircuitFormatError(f"gate entry must be an object with a 'gate' field, got {entry!r}")
            params = tuple(convert(p) for p in entry.get("params", []))
            ops.append(GateOp(str(entry["gate"]), tuple(entry.get("qubits", [])), params))
        template = Circuit(int(doc["n"]), tuple(ops))
        repeat = int(doc.get("repeat", 1))
        num_params = max(slots) + 1 if slots else 0
        return Ansatz(template, num_params=num_params, repeat=repeat)
    except CircuitFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise CircuitFormatError(str(exc)) from exc

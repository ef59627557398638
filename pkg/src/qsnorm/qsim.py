"""Dense statevector simulation of small gate circuits.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of a basis-state index, i.e. the
  amplitude at index ``0b100`` of a 3-qubit state is the one where qubit 0
  is |1> and qubits 1, 2 are |0>.
* Angles are radians, amplitudes are complex128.
* Dense matrices are only materialized for small systems
  (``MATRIX_QUBIT_CAP``); statevectors have their own cap
  (``STATE_QUBIT_CAP``).

Circuits, gates and statevectors are immutable values; applying a circuit
always produces a fresh state, so instances can be shared freely across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

MATRIX_QUBIT_CAP = 10
STATE_QUBIT_CAP = 20
ATOL = 1e-10

_SQRT2_INV = 1.0 / math.sqrt(2.0)

# kind -> (number of qubit arguments, number of angle parameters)
GATE_ARITY = {
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "h": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "phase": (1, 1),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "cnot": (2, 0),
    "globalphase": (0, 1),
}

_SELF_ADJOINT = {"x", "y", "z", "h", "cnot"}
_ADJOINT_SWAP = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}


class CircuitFormatError(ValueError):
    """Raised when a circuit or mixture document is malformed."""


@dataclass(frozen=True)
class GateOp:
    """One gate: a kind from ``GATE_ARITY``, its qubits and its angles."""

    kind: str
    qubits: tuple = ()
    params: tuple = ()

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(self.params))
        if kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        nq, npar = GATE_ARITY[kind]
        if len(self.qubits) != nq:
            raise ValueError(f"{kind} takes {nq} qubit(s), got {self.qubits}")
        if len(self.params) != npar:
            raise ValueError(f"{kind} takes {npar} parameter(s), got {self.params}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{kind} qubits must be distinct, got {self.qubits}")

    def dagger(self) -> "GateOp":
        """The Hermitian conjugate of this gate."""
        if self.kind in _SELF_ADJOINT:
            return self
        if self.kind in _ADJOINT_SWAP:
            return GateOp(_ADJOINT_SWAP[self.kind], self.qubits)
        return GateOp(self.kind, self.qubits, tuple(-p for p in self.params))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over ``n`` qubits; acts by left-multiplication."""

    n: int
    ops: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if any(q >= self.n or q < 0 for q in op.qubits):
                raise ValueError(f"{op.kind} on qubits {op.qubits} out of range for n={self.n}")

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class DenseUnitary:
    """A unitary given directly as a 2^n x 2^n matrix.

    Interchangeable with :class:`Circuit` everywhere an operation is
    applied, adjointed or materialized; used for e.g. QR-sampled random
    unitaries that have no gate decomposition.
    """

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (1 << self.n, 1 << self.n):
            raise ValueError(f"matrix shape {mat.shape} does not match n={self.n}")
        object.__setattr__(self, "matrix", mat)


Operation = Union[Circuit, DenseUnitary]


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector of length 2^n over ``n`` qubits."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"amplitude vector shape {amps.shape} does not match n={self.n}")
        object.__setattr__(self, "amplitudes", amps)


def zero_state(n: int, max_qubits: int = STATE_QUBIT_CAP) -> StateVector:
    """The all-zeros basis state |0...0>."""
    if n < 1 or n > max_qubits:
        raise ValueError(f"statevector qubit count {n} outside [1, {max_qubits}]")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def gate_matrix(op: GateOp) -> np.ndarray:
    """The defining matrix of a gate (2x2, 4x4 for cnot, 1x1 for globalphase)."""
    kind = op.kind
    if kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind == "h":
        return np.array([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]], dtype=complex)
    if kind == "s":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if kind == "sdg":
        return np.array([[1, 0], [0, -1j]], dtype=complex)
    if kind == "t":
        return np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
    if kind == "tdg":
        return np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex)
    if kind == "phase":
        return np.array([[1, 0], [0, np.exp(1j * op.params[0])]], dtype=complex)
    if kind == "rx":
        t = op.params[0] / 2
        return np.array([[math.cos(t), -1j * math.sin(t)], [-1j * math.sin(t), math.cos(t)]], dtype=complex)
    if kind == "ry":
        t = op.params[0] / 2
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=complex)
    if kind == "rz":
        t = op.params[0] / 2
        return np.array([[np.exp(-1j * t), 0], [0, np.exp(1j * t)]], dtype=complex)
    if kind == "cnot":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if kind == "globalphase":
        return np.array([[np.exp(1j * op.params[0])]], dtype=complex)
    raise ValueError(f"unknown gate kind {kind!r}")


def _apply_gateop(amps: np.ndarray, op: GateOp, n: int) -> np.ndarray:
    if op.kind == "globalphase":
        return amps * np.exp(1j * op.params[0])
    if op.kind == "cnot":
        control, target = op.qubits
        view = amps.reshape((2,) * n)
        out = view.copy()
        i10 = [slice(None)] * n
        i11 = [slice(None)] * n
        i10[control], i10[target] = 1, 0
        i11[control], i11[target] = 1, 1
        out[tuple(i10)] = view[tuple(i11)]
        out[tuple(i11)] = view[tuple(i10)]
        return out.reshape(-1)
    q = op.qubits[0]
    pre = 1 << q
    post = 1 << (n - q - 1)
    mat = gate_matrix(op)
    reshaped = amps.reshape(pre, 2, post)
    return np.einsum("ab,pbq->paq", mat, reshaped).reshape(-1)


def apply_operation_amplitudes(amps: np.ndarray, op: Operation) -> np.ndarray:
    """Apply a circuit or dense unitary to a raw amplitude array."""
    if isinstance(op, DenseUnitary):
        return op.matrix @ amps
    out = amps
    for gate in op.ops:
        out = _apply_gateop(out, gate, op.n)
    return out


def apply_circuit(state: StateVector, c: Operation) -> StateVector:
    """Apply ``c`` to ``state``; returns a fresh state, norm preserved."""
    if state.n != c.n:
        raise ValueError(f"state has n={state.n} but operation has n={c.n}")
    return StateVector(c.n, apply_operation_amplitudes(state.amplitudes, c))


def adjoint(c: Operation) -> Operation:
    """The Hermitian conjugate: gates daggered and order reversed."""
    if isinstance(c, DenseUnitary):
        return DenseUnitary(c.n, c.matrix.conj().T)
    return Circuit(c.n, tuple(op.dagger() for op in reversed(c.ops)))


def circuit_matrix(c: Operation, max_qubits: int = MATRIX_QUBIT_CAP) -> np.ndarray:
    """Materialize the full 2^n x 2^n matrix of an operation."""
    if c.n > max_qubits:
        raise ValueError(f"matrix build capped at {max_qubits} qubits, got n={c.n}")
    if isinstance(c, DenseUnitary):
        return c.matrix.copy()
    dim = 1 << c.n
    mat = np.eye(dim, dtype=complex)
    for k in range(dim):
        mat[:, k] = apply_operation_amplitudes(np.ascontiguousarray(mat[:, k]), c)
    return mat


def haar_random_unitary(n: int, seed: int, max_qubits: int = MATRIX_QUBIT_CAP) -> np.ndarray:
    """Draw a Haar-distributed 2^n x 2^n unitary.

    QR-decomposes a complex Ginibre matrix and absorbs the phases of R's
    diagonal into Q, which makes the distribution exactly Haar rather than
    merely unitary. Deterministic for a fixed seed.
    """
    if n > max_qubits:
        raise ValueError(f"matrix build capped at {max_qubits} qubits, got n={n}")
    rng = np.random.default_rng(seed)
    dim = 1 << n
    ginibre = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(ginibre)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def exact_schatten2(m: np.ndarray) -> float:
    """Normalized Schatten 2-norm: sqrt(sum of squared singular values / rows).

    Equals the Frobenius norm divided by sqrt(number of rows).
    """
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m) / math.sqrt(m.shape[0]))


def exact_normalized_trace(m: np.ndarray) -> complex:
    """Trace divided by dimension; input must be square."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"normalized trace needs a square matrix, got shape {m.shape}")
    return complex(np.trace(m) / m.shape[0])


@dataclass(frozen=True)
class MixedOperation:
    """Coefficient-weighted sum of unitaries.

    Physical mixtures have total coefficient weight at most 1; the
    constructor allows up to sqrt(2) so the canonical difference
    (U1 - U2)/sqrt(2) of two unitaries is representable by the same type.
    The strict weight-1 cap is enforced where mixture documents are loaded.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(coeff), op) for coeff, op in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("a mixed operation needs at least one term")
        n = terms[0][1].n
        if any(op.n != n for _, op in terms):
            raise ValueError("all terms of a mixed operation must share one qubit count")
        weight = sum(abs(coeff) for coeff, _ in terms)
        if weight > math.sqrt(2.0) + 1e-12:
            raise ValueError(f"sum of coefficient magnitudes {weight} exceeds sqrt(2)")

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    @property
    def num_terms(self) -> int:
        return len(self.terms)


def mixed_operation_matrix(mixed: MixedOperation, max_qubits: int = MATRIX_QUBIT_CAP) -> np.ndarray:
    """Dense matrix of the weighted sum; test/oracle helper."""
    total = np.zeros((1 << mixed.n, 1 << mixed.n), dtype=complex)
    for coeff, op in mixed.terms:
        total += coeff * circuit_matrix(op, max_qubits)
    return total


# --- JSON-friendly dict conversion -----------------------------------------
#
# Circuit document:  {"n": 3, "ops": [{"gate": "ry", "qubits": [0],
#                     "params": [1.5707963267948966]}, ...]}
# Mixture document:  {"terms": [{"coeff": [re, im], "circuit": {...}}, ...]}
# Gate names are lowercase, angles in radians.

def circuit_to_dict(c: Circuit) -> dict:
    ops = []
    for op in c.ops:
        entry: dict = {"gate": op.kind, "qubits": list(op.qubits)}
        if op.params:
            entry["params"] = [float(p) for p in op.params]
        ops.append(entry)
    return {"n": c.n, "ops": ops}


def _gateop_from_dict(entry: dict) -> GateOp:
    if not isinstance(entry, dict) or "gate" not in entry:
        raise CircuitFormatError(f"gate entry must be an object with a 'gate' field, got {entry!r}")
    unknown = set(entry) - {"gate", "qubits", "params"}
    if unknown:
        raise CircuitFormatError(f"unknown gate entry keys {sorted(unknown)}")
    params = entry.get("params", [])
    if not all(isinstance(p, (int, float)) for p in params):
        raise CircuitFormatError(f"gate params must be numbers, got {params!r}")
    try:
        return GateOp(str(entry["gate"]), tuple(entry.get("qubits", [])), tuple(float(p) for p in params))
    except (TypeError, ValueError) as exc:
        raise CircuitFormatError(str(exc)) from exc


def circuit_from_dict(doc: dict) -> Circuit:
    if not isinstance(doc, dict) or "n" not in doc:
        raise CircuitFormatError("circuit document must be an object with an 'n' field")
    unknown = set(doc) - {"n", "ops"}
    if unknown:
        raise CircuitFormatError(f"unknown circuit keys {sorted(unknown)}")
    try:
        return Circuit(int(doc["n"]), tuple(_gateop_from_dict(e) for e in doc.get("ops", [])))
    except CircuitFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise CircuitFormatError(str(exc)) from exc


def mixed_operation_to_dict(mixed: MixedOperation) -> dict:
    terms = []
    for coeff, op in mixed.terms:
        if not isinstance(op, Circuit):
            raise ValueError("only gate circuits can be serialized in a mixture document")
        terms.append({"coeff": [coeff.real, coeff.imag], "circuit": circuit_to_dict(op)})
    return {"terms": terms}


def mixed_operation_from_dict(doc: dict) -> MixedOperation:
    if not isinstance(doc, dict) or "terms" not in doc or not isinstance(doc["terms"], list):
        raise CircuitFormatError("mixture document must be an object with a 'terms' list")
    unknown = set(doc) - {"terms"}
    if unknown:
        raise CircuitFormatError(f"unknown mixture keys {sorted(unknown)}")
    terms = []
    for entry in doc["terms"]:
        if not isinstance(entry, dict) or set(entry) != {"coeff", "circuit"}:
            raise CircuitFormatError(f"mixture term must have exactly 'coeff' and 'circuit', got {entry!r}")
        coeff = entry["coeff"]
        if not (isinstance(coeff, list) and len(coeff) == 2 and all(isinstance(v, (int, float)) for v in coeff)):
            raise CircuitFormatError(f"coeff must be a [re, im] pair, got {coeff!r}")
        terms.append((complex(coeff[0], coeff[1]), circuit_from_dict(entry["circuit"])))
    if not terms:
        raise CircuitFormatError("mixture document has no terms")
    weight = sum(abs(coeff) for coeff, _ in terms)
    if weight > 1.0 + 1e-12:
        raise ValueError(f"sum of coefficient magnitudes {weight} exceeds 1")
    return MixedOperation(tuple(terms))

"""Textbook two-qubit constant-vs-balanced classifier.

Independent of the optical modules: states are plain 4-vectors over |x, y>
(order 00, 01, 10, 11) and the oracle is built directly from the boolean
function it computes.  Used to cross-validate the bench simulation's verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CONSTANT = "constant"
BALANCED = "balanced"

#: f(0), f(1) per oracle name, kept local on purpose so this module stays an
#: independent check of the physical pipeline
BOOLEAN_FUNCTIONS = {
    "identity": (0, 0),
    "not": (1, 1),
    "cnot": (0, 1),
    "zcnot": (1, 0),
}

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_H1 = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]])
_BITS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (4,):
            raise ValueError(f"need 4 amplitudes over |x,y>, got shape {amps.shape}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
            raise ValueError("two-qubit state must have unit norm")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def computational_state(x: int, y: int) -> TwoQubitState:
    amps = np.zeros(4, dtype=complex)
    amps[2 * x + y] = 1.0
    return TwoQubitState(amps)


def hadamard_both(state: TwoQubitState) -> TwoQubitState:
    return TwoQubitState(np.kron(_H1, _H1) @ state.amplitudes)


def hadamard_first(state: TwoQubitState) -> TwoQubitState:
    return TwoQubitState(np.kron(_H1, np.eye(2)) @ state.amplitudes)


def apply_uf(state: TwoQubitState, function: str) -> TwoQubitState:
    """|x, y> -> |x, y XOR f(x)> for one of the four boolean functions."""
    f = BOOLEAN_FUNCTIONS[function]
    out = np.zeros(4, dtype=complex)
    for j, (x, y) in enumerate(_BITS):
        out[2 * x + (y ^ f[x])] += state.amplitudes[j]
    return TwoQubitState(out)


def first_qubit_probabilities(state: TwoQubitState) -> tuple[float, float]:
    probs = np.abs(state.amplitudes) ** 2
    return float(probs[0] + probs[1]), float(probs[2] + probs[3])


def classify_abstract(function: str) -> str:
    """One-query classification: prepare |0,1>, query, measure the first qubit.

    The first qubit comes out |0> exactly for a constant function and |1>
    exactly for a balanced one; anything in between means a bug.
    """
    state = computational_state(0, 1)
    state = hadamard_both(state)
    state = apply_uf(state, function)
    state = hadamard_first(state)
    p0, p1 = first_qubit_probabilities(state)
    if abs(p0 - 1.0) <= 1e-12:
        return CONSTANT
    if abs(p1 - 1.0) <= 1e-12:
        return BALANCED
    raise AssertionError(
        f"classification is not deterministic for {function!r}: P(first=0)={p0}"
    )

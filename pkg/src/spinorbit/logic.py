"""Two-qubit logical encoding over joint polarization/OAM kets.

The control bit lives in polarization and the target bit in the OAM sign, but
the assignment is deliberately non-factorizable:

    |0,0> = |L,+2>    |0,1> = |R,-2>
    |1,0> = |R,+2>    |1,1> = |L,-2>

Decoding is therefore defined only on these four joint kets, never per
subsystem.  The four one-query oracles are realized as element chains that
share the two q-plates and two lenses; waveplates and the Dove prism are
inserted or removed to select the oracle:

    identity : QP1 L1 L2 QP2
    not      : QP1 L1 L2 QP2 HWP3 DP
    cnot     : QP1 L1 HWP1 L2 QP2
    zcnot    : HWP2 QP1 L1 HWP1 L2 QP2 HWP3
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elements import (
    APERTURE_FULL,
    APERTURE_L0,
    QPlateSpec,
    WaveplateSpec,
    dove_prism,
    hwp,
    lens,
    qplate,
)
from .errors import EncodingError, GateBrokenError
from .state import (
    LEFT,
    RIGHT,
    ElementOp,
    ModeSpace,
    PhotonState,
    apply,
    basis_state,
    compose,
)

ORACLE_IDS = ("identity", "not", "cnot", "zcnot")

#: (f(0), f(1)) for the boolean function each oracle computes into the target bit
ORACLE_FUNCTIONS = {
    "identity": (0, 0),
    "not": (1, 1),
    "cnot": (0, 1),
    "zcnot": (1, 0),
}

CONSTANT = "constant"
BALANCED = "balanced"


def oracle_class(oracle_id: str) -> str:
    f0, f1 = ORACLE_FUNCTIONS[oracle_id]
    return CONSTANT if f0 == f1 else BALANCED


LOGICAL_STATES: dict[tuple[int, int], tuple[str, int]] = {
    (0, 0): (LEFT, +2),
    (0, 1): (RIGHT, -2),
    (1, 0): (RIGHT, +2),
    (1, 1): (LEFT, -2),
}
PHYSICAL_TO_LOGICAL = {ket: bits for bits, ket in LOGICAL_STATES.items()}

#: decode tolerance: the dominant encoded ket must carry amplitude 1 to this
DECODE_TOL = 1e-9


def encode(space: ModeSpace, bits: tuple[int, int]) -> PhotonState:
    """Physical ket for logical |x, y>."""
    if bits not in LOGICAL_STATES:
        raise EncodingError(f"logical bits must be in {{0,1}}^2, got {bits!r}")
    pol, l = LOGICAL_STATES[bits]
    return basis_state(space, pol, l)


def decode(state: PhotonState) -> tuple[int, int]:
    """Logical bits of a pure encoded basis state; rejects anything else."""
    bits, _ = _decode_with_phase(state)
    return bits


def _decode_with_phase(state: PhotonState) -> tuple[tuple[int, int], complex]:
    best_bits = None
    best_amp = 0j
    for bits, (pol, l) in LOGICAL_STATES.items():
        amp = state.amplitude(pol, l)
        if abs(amp) > abs(best_amp):
            best_bits, best_amp = bits, amp
    if best_bits is None or abs(abs(best_amp) - 1.0) > DECODE_TOL:
        raise EncodingError(
            "state is not an encoded basis ket (no single |pol,+-2> component "
            f"with amplitude 1; largest is {abs(best_amp):.6f})"
        )
    return best_bits, best_amp


@dataclass(frozen=True, eq=False)
class OracleBench:
    """Ordered element chain realizing one oracle, plus its insertion record."""

    oracle_id: str
    elements: tuple[ElementOp, ...]
    inserted: frozenset[str]


def build_oracle(
    space: ModeSpace, oracle_id: str, eta: float = 1.0, crosstalk: float = 0.0
) -> OracleBench:
    """Assemble the element chain for an oracle in physical order.

    The two q-plates and two lenses are always present; HWP1/HWP2/HWP3 and the
    Dove prism are inserted per the oracle recipe.
    """
    if oracle_id not in ORACLE_IDS:
        raise ValueError(f"unknown oracle {oracle_id!r}; expected one of {ORACLE_IDS}")
    qspec = QPlateSpec(Fraction(1), eta)
    full_hwp = WaveplateSpec(0.0, APERTURE_FULL)
    chain: list[ElementOp] = []
    inserted: set[str] = set()
    if oracle_id == "zcnot":
        chain.append(hwp(space, full_hwp, label="HWP2"))
        inserted.add("HWP2")
    chain.append(qplate(space, qspec, label="QP1"))
    chain.append(lens(space, label="L1"))
    if oracle_id in ("cnot", "zcnot"):
        chain.append(
            hwp(space, WaveplateSpec(0.0, APERTURE_L0, crosstalk), label="HWP1")
        )
        inserted.add("HWP1")
    chain.append(lens(space, label="L2"))
    chain.append(qplate(space, qspec, label="QP2"))
    if oracle_id in ("not", "zcnot"):
        chain.append(hwp(space, full_hwp, label="HWP3"))
        inserted.add("HWP3")
    if oracle_id == "not":
        chain.append(dove_prism(space, label="DP"))
        inserted.add("DP")
    return OracleBench(oracle_id, tuple(chain), frozenset(inserted))


def truth_table(
    bench: OracleBench,
) -> dict[tuple[int, int], tuple[tuple[int, int], complex]]:
    """Map each encoded basis state through the composed bench.

    Returns {(x, y): ((x', y'), phase)} where phase is the output amplitude on
    the decoded ket.  Raises GateBrokenError if any output leaves the encoded
    subspace.
    """
    space = bench.elements[0].space
    composed = compose(bench.elements)
    table = {}
    for bits in LOGICAL_STATES:
        out = apply(composed, encode(space, bits))
        try:
            out_bits, phase = _decode_with_phase(out)
        except EncodingError as exc:
            raise GateBrokenError(
                f"oracle {bench.oracle_id!r} maps {bits} outside the encoded "
                f"subspace: {exc}"
            ) from exc
        table[bits] = (out_bits, phase)
    return table


_BIT_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))


def logical_matrix(oracle_id: str) -> np.ndarray:
    """Ideal 4x4 permutation |x,y> -> |x, y XOR f(x)>, built directly from f."""
    f = ORACLE_FUNCTIONS[oracle_id]
    matrix = np.zeros((4, 4), dtype=complex)
    for j, (x, y) in enumerate(_BIT_ORDER):
        i = _BIT_ORDER.index((x, y ^ f[x]))
        matrix[i, j] = 1.0
    return matrix


def encoded_restriction(op: ElementOp) -> np.ndarray:
    """4x4 restriction <enc_i| U |enc_j> of an operator to the encoded basis."""
    space = op.space
    indices = [space.index(*LOGICAL_STATES[bits]) for bits in _BIT_ORDER]
    return op.matrix[np.ix_(indices, indices)]

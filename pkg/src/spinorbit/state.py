"""Core types for a single photon carrying polarization and orbital angular momentum.

The joint Hilbert space is spanned by kets |pol, l> where pol is the circular
polarization (L or R) and l is the integer OAM index, truncated to |l| <= l_max.
Amplitude vectors use the fixed ordering

    index(pol, l) = pol_index * (2*l_max + 1) + (l + l_max)

with pol_index(L) = 0 and pol_index(R) = 1, so serialized vectors are
comparable across runs and implementations.

Linear polarizations are defined relative to the circular basis by

    |L> = (|H> + i|V|>) / sqrt(2),    |R> = (|H> - i|V>) / sqrt(2)

which fixes the amplitude identities (|L> - |R>)/sqrt(2) = i|V> and
(|L> + |R>)/sqrt(2) = |H>.

Loss is heralded and scalar: a photon either traverses an element intact or is
lost entirely, so a lossy element keeps a unitary matrix and contributes a
survival factor < 1 instead of attenuating individual modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import TruncationError

LEFT = "L"
RIGHT = "R"
POLARIZATIONS = (LEFT, RIGHT)

#: smallest truncation that keeps the composite CNOT bench representable
#: (its intermediate states reach OAM +/-4)
MIN_L_MAX = 4

UNITARITY_TOL = 1e-12
#: amplitude magnitude above which a guarded (edge-of-truncation) mode counts
#: as occupied
GUARD_TOL = 1e-12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

#: |H> and |V> written in circular (L, R) coordinates
H_CIRCULAR = np.array([_INV_SQRT2, _INV_SQRT2], dtype=complex)
V_CIRCULAR = np.array([-1j * _INV_SQRT2, 1j * _INV_SQRT2], dtype=complex)

#: change of basis taking (H, V) coordinates to (L, R) coordinates
LINEAR_TO_CIRCULAR = np.column_stack((H_CIRCULAR, V_CIRCULAR))


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ModeSpace:
    """Truncated polarization (x) OAM space with the documented basis ordering."""

    l_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.l_max, int) or isinstance(self.l_max, bool):
            raise TypeError(f"l_max must be an integer, got {self.l_max!r}")
        if self.l_max < MIN_L_MAX:
            raise TruncationError(
                f"l_max={self.l_max} is below the minimum {MIN_L_MAX}; the "
                f"composite CNOT bench reaches intermediate OAM +/-4"
            )

    @property
    def n_oam(self) -> int:
        return 2 * self.l_max + 1

    @property
    def dimension(self) -> int:
        return 2 * self.n_oam

    def oam_values(self) -> range:
        return range(-self.l_max, self.l_max + 1)

    def contains(self, l: int) -> bool:
        return -self.l_max <= l <= self.l_max

    def index(self, pol: str, l: int) -> int:
        if pol not in POLARIZATIONS:
            raise ValueError(f"polarization must be 'L' or 'R', got {pol!r}")
        if not self.contains(l):
            raise TruncationError(
                f"OAM index l={l:+d} outside truncation |l| <= {self.l_max}"
            )
        return POLARIZATIONS.index(pol) * self.n_oam + (l + self.l_max)

    def basis_label(self, index: int) -> tuple[str, int]:
        if not 0 <= index < self.dimension:
            raise IndexError(f"basis index {index} out of range")
        pol, offset = divmod(index, self.n_oam)
        return POLARIZATIONS[pol], offset - self.l_max


def make_space(l_max: int) -> ModeSpace:
    """Build the truncated mode space; rejects l_max < 4."""
    return ModeSpace(l_max)


@dataclass(frozen=True, eq=False)
class PhotonState:
    """Unit amplitude vector over |pol, l> plus a scalar survival probability.

    The amplitude norm is always 1 while survival > 0; loss lives entirely in
    `survival`.  Instances are immutable (the array is marked read-only).
    """

    space: ModeSpace
    amplitudes: np.ndarray
    survival: float = 1.0

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dimension,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected "
                f"({self.space.dimension},)"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"amplitudes are not normalized (norm={norm!r})")
        if not 0.0 <= self.survival <= 1.0:
            raise ValueError(f"survival must lie in [0, 1], got {self.survival!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps / norm))

    def amplitude(self, pol: str, l: int) -> complex:
        return complex(self.amplitudes[self.space.index(pol, l)])

    def components(self, tol: float = 1e-12) -> Iterator[tuple[str, int, complex]]:
        """Yield (pol, l, amplitude) for every component above `tol`."""
        for i, a in enumerate(self.amplitudes):
            if abs(a) > tol:
                pol, l = self.space.basis_label(i)
                yield pol, l, complex(a)


def basis_state(space: ModeSpace, pol: str, l: int) -> PhotonState:
    """Freshly prepared basis ket |pol, l> with survival 1."""
    amps = np.zeros(space.dimension, dtype=complex)
    amps[space.index(pol, l)] = 1.0
    return PhotonState(space, amps)


UNITARY = "unitary"
LOSSY = "lossy"


@dataclass(frozen=True, eq=False)
class ElementOp:
    """Dense operator on the mode space, tagged unitary or lossy.

    The matrix is unitary in both cases; a lossy element additionally carries
    survival_factor < 1.  `input_mask`, when present, marks the basis states
    the element is defined on: applying it to a state with amplitude on an
    unmasked (edge-of-truncation) mode raises TruncationError instead of
    silently corrupting the result.
    """

    space: ModeSpace
    matrix: np.ndarray
    kind: str = UNITARY
    survival_factor: float = 1.0
    label: str = ""
    input_mask: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex)
        dim = self.space.dimension
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({dim}, {dim})")
        deviation = np.abs(mat.conj().T @ mat - np.eye(dim)).max()
        if deviation > UNITARITY_TOL:
            raise ValueError(
                f"matrix for {self.label or 'element'} is not unitary "
                f"(max |U+U - I| = {deviation:.3e})"
            )
        if self.kind == UNITARY:
            if self.survival_factor != 1.0:
                raise ValueError("unitary elements must have survival_factor 1")
        elif self.kind == LOSSY:
            if not 0.0 < self.survival_factor < 1.0:
                raise ValueError(
                    f"lossy elements need survival_factor in (0, 1), got "
                    f"{self.survival_factor!r}"
                )
        else:
            raise ValueError(f"kind must be 'unitary' or 'lossy', got {self.kind!r}")
        object.__setattr__(self, "matrix", _frozen(mat))
        if self.input_mask is not None:
            mask = np.array(self.input_mask, dtype=bool)
            if mask.shape != (dim,):
                raise ValueError("input_mask length must equal the dimension")
            object.__setattr__(self, "input_mask", _frozen(mask))

    @property
    def is_lossy(self) -> bool:
        return self.kind == LOSSY


def identity_op(space: ModeSpace, label: str = "identity") -> ElementOp:
    return ElementOp(space, np.eye(space.dimension, dtype=complex), label=label)


def _check_guard(op: ElementOp, amplitudes: np.ndarray) -> None:
    if op.input_mask is None:
        return
    blocked = ~op.input_mask
    if not blocked.any():
        return
    weights = np.abs(amplitudes[blocked])
    worst = int(np.argmax(weights))
    if weights[worst] > GUARD_TOL:
        index = int(np.flatnonzero(blocked)[worst])
        pol, l = op.space.basis_label(index)
        raise TruncationError(
            f"{op.label or 'element'} cannot act on |{pol},{l:+d}>: the image "
            f"would leave the truncation |l| <= {op.space.l_max}"
        )


def apply(op: ElementOp, state: PhotonState) -> PhotonState:
    """Apply an element: new amplitudes, renormalized; survival multiplied."""
    if op.space.dimension != state.space.dimension:
        raise ValueError(
            f"dimension mismatch: operator is {op.space.dimension}, state is "
            f"{state.space.dimension}"
        )
    _check_guard(op, state.amplitudes)
    amps = op.matrix @ state.amplitudes
    amps = amps / np.linalg.norm(amps)
    return PhotonState(state.space, amps, survival=state.survival * op.survival_factor)


def apply_chain(ops: Iterable[ElementOp], state: PhotonState) -> PhotonState:
    for op in ops:
        state = apply(op, state)
    return state


def fidelity_up_to_phase(a: PhotonState, b: PhotonState) -> float:
    """|<a|b>|^2, the global-phase-invariant overlap, clamped into [0, 1]."""
    if a.space.dimension != b.space.dimension:
        raise ValueError("states live in different spaces")
    return min(1.0, float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def compose(ops: Sequence[ElementOp]) -> ElementOp:
    """Compose elements in application order (last element's matrix leftmost).

    The composite survival factor is the product of the factors, the kind is
    lossy iff any input is lossy, and the input mask excludes every basis
    state whose trajectory would touch a guarded mode of any stage.
    """
    if not ops:
        raise ValueError("cannot compose an empty element list")
    space = ops[0].space
    dim = space.dimension
    for op in ops:
        if op.space.dimension != dim:
            raise ValueError("composed elements must share one mode space")
    total = np.eye(dim, dtype=complex)
    mask = np.ones(dim, dtype=bool)
    for op in ops:
        if op.input_mask is not None:
            blocked = ~op.input_mask
            leakage = np.abs(total[blocked, :]).sum(axis=0)
            mask &= leakage <= GUARD_TOL
        total = op.matrix @ total
    survival = 1.0
    for op in ops:
        survival *= op.survival_factor
    kind = LOSSY if any(op.is_lossy for op in ops) else UNITARY
    label = " -> ".join(op.label or "element" for op in ops)
    return ElementOp(
        space,
        total,
        kind=kind,
        survival_factor=survival,
        label=label,
        input_mask=None if mask.all() else mask,
    )

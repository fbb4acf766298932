"""Dense statevector simulator over a closed gate set.

Qubit ``q`` is bit ``q`` of the basis-state index (little-endian):
``index = sum(bit_q * 2**q)``.  ``RY(theta)|0> = cos(theta/2)|0> + sin(theta/2)|1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from digispread.errors import CapacityError, StructuralError

MAX_QUBITS = 24

#: PRNG used by every sampling routine; recorded in outputs for reproducibility.
PRNG_NAME = f"numpy-{np.__version__}/PCG64"

# kind -> (allowed control counts, takes an angle)
_ARITY = {
    "H": ((0,), False),
    "X": ((0,), False),
    "Z": ((0,), False),
    "RY": ((0,), True),
    "CX": ((1,), False),
    "CCX": ((2,), False),
    "MCX": (None, False),
    "MCZ": (None, False),
    "CRY": ((1,), True),
    "CP": ((1,), True),
}
GATE_KINDS = tuple(_ARITY)
SELF_INVERSE = frozenset({"H", "X", "Z", "CX", "CCX", "MCX", "MCZ"})


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise StructuralError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        counts, has_angle = _ARITY[self.kind]
        if counts is not None and len(self.controls) not in counts:
            raise StructuralError(f"{self.kind} takes {counts[0]} control(s), got {len(self.controls)}")
        if has_angle != (self.angle is not None):
            raise StructuralError(f"{self.kind}: angle {'required' if has_angle else 'not allowed'}")
        qubits = self.qubits
        if min(qubits) < 0:
            raise StructuralError(f"negative qubit index in {self}")
        if len(set(qubits)) != len(qubits):
            raise StructuralError(f"controls and target must be distinct: {self}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    def inverse(self) -> Gate:
        if self.kind in SELF_INVERSE:
            return self
        return Gate(self.kind, self.target, self.controls, -self.angle)

    def shifted(self, offset: int) -> Gate:
        return Gate(self.kind, self.target + offset, tuple(c + offset for c in self.controls), self.angle)


def H(q: int) -> Gate:
    return Gate("H", q)


def X(q: int) -> Gate:
    return Gate("X", q)


def Z(q: int) -> Gate:
    return Gate("Z", q)


def RY(q: int, angle: float) -> Gate:
    return Gate("RY", q, (), float(angle))


def CX(c: int, t: int) -> Gate:
    return Gate("CX", t, (c,))


def CCX(c1: int, c2: int, t: int) -> Gate:
    return Gate("CCX", t, (c1, c2))


def MCX(controls: Sequence[int], t: int) -> Gate:
    return Gate("MCX", t, tuple(controls))


def MCZ(controls: Sequence[int], t: int) -> Gate:
    return Gate("MCZ", t, tuple(controls))


def CRY(c: int, t: int, angle: float) -> Gate:
    return Gate("CRY", t, (c,), float(angle))


def CP(c: int, t: int, angle: float) -> Gate:
    return Gate("CP", t, (c,), float(angle))


def _as_range(r) -> range | None:
    if r is None or isinstance(r, range):
        return r
    start, stop = r
    return range(int(start), int(stop))


@dataclass(frozen=True)
class RegisterLayout:
    """Named contiguous qubit ranges.  Unused roles stay ``None``."""

    value: range | None = None
    ramp: range | None = None
    carry_in: int | None = None
    target: int | None = None
    sum: range | None = None
    scratch: range | None = None
    eval: range | None = None

    _RANGES = ("value", "ramp", "sum", "scratch", "eval")
    _SINGLES = ("carry_in", "target")

    def __post_init__(self):
        for name in self._RANGES:
            object.__setattr__(self, name, _as_range(getattr(self, name)))
        seen: set[int] = set()
        for qubits in self.roles().values():
            if seen.intersection(qubits):
                raise StructuralError(f"layout ranges overlap: {self}")
            seen.update(qubits)

    def roles(self) -> dict[str, list[int]]:
        out = {}
        for name in self._RANGES:
            r = getattr(self, name)
            if r is not None:
                out[name] = list(r)
        for name in self._SINGLES:
            q = getattr(self, name)
            if q is not None:
                out[name] = [q]
        return out

    @property
    def width(self) -> int:
        used = [q for qs in self.roles().values() for q in qs]
        return max(used) + 1 if used else 0

    def to_dict(self) -> dict:
        out = {}
        for name in self._RANGES:
            r = getattr(self, name)
            out[name] = None if r is None else [r.start, r.stop]
        for name in self._SINGLES:
            out[name] = getattr(self, name)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> RegisterLayout:
        return cls(**{k: v for k, v in d.items() if v is not None})


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    layout: RegisterLayout = field(default_factory=RegisterLayout)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise StructuralError("a circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise StructuralError(f"{g} out of range for {self.num_qubits} qubits")
        if self.layout.width > self.num_qubits:
            raise StructuralError("layout does not fit in the circuit")

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> Circuit:
        return Circuit(self.num_qubits, tuple(g.inverse() for g in reversed(self.gates)), self.layout)

    def then(self, *others: Circuit | Iterable[Gate]) -> Circuit:
        """Concatenate gate lists; the result keeps this circuit's layout."""
        gates = list(self.gates)
        for other in others:
            gates.extend(other.gates if isinstance(other, Circuit) else other)
        return Circuit(self.num_qubits, gates, self.layout)


class Statevector:
    """Amplitude vector of an ``n``-qubit register (complex128)."""

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << num_qubits,):
            raise StructuralError(f"expected {1 << num_qubits} amplitudes, got {amplitudes.shape}")
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    def copy(self) -> Statevector:
        return Statevector(self.num_qubits, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(self.probabilities().sum())

    def __repr__(self) -> str:
        return f"Statevector(num_qubits={self.num_qubits})"


def new_statevector(n: int) -> Statevector:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside [1, {MAX_QUBITS}]")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n, amps)


def basis_state(n: int, index: int) -> Statevector:
    state = new_statevector(n)
    state.amplitudes[0] = 0.0
    state.amplitudes[index] = 1.0
    return state


def _axis(n: int, q: int) -> int:
    # C-order reshape puts the most significant bit on axis 0
    return n - 1 - q


@lru_cache(maxsize=4096)
def _gate_view(n: int, controls: tuple[int, ...], target: int):
    """Reshape splitting the index only at the touched qubits, plus both target slices."""
    touched = sorted(controls + (target,), reverse=True)
    shape: list[int] = []
    sel: list = []
    axis_of: dict[int, int] = {}
    hi = n
    for q in touched:
        if hi - q - 1 > 0:
            shape.append(1 << (hi - q - 1))
            sel.append(slice(None))
        axis_of[q] = len(shape)
        shape.append(2)
        sel.append(1)
        hi = q
    if hi > 0:
        shape.append(1 << hi)
        sel.append(slice(None))
    t = axis_of[target]
    sel[t] = 0
    idx0 = tuple(sel)
    sel[t] = 1
    return tuple(shape), idx0, tuple(sel)


_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    n = state.num_qubits
    if max(gate.qubits) >= n:
        raise StructuralError(f"{gate} out of range for {n} qubits")
    shape, idx0, idx1 = _gate_view(n, gate.controls, gate.target)
    psi = state.amplitudes.reshape(shape)
    v0 = psi[idx0]
    v1 = psi[idx1]

    kind = gate.kind
    if kind in ("X", "CX", "CCX", "MCX"):
        tmp = v0.copy()
        psi[idx0] = v1
        psi[idx1] = tmp
    elif kind in ("Z", "MCZ"):
        psi[idx1] = -v1
    elif kind == "CP":
        psi[idx1] = v1 * complex(math.cos(gate.angle), math.sin(gate.angle))
    elif kind == "H":
        a0 = v0.copy()
        psi[idx0] = (a0 + v1) * _INV_SQRT2
        psi[idx1] = (a0 - v1) * _INV_SQRT2
    else:  # RY, CRY
        c = math.cos(gate.angle / 2.0)
        s = math.sin(gate.angle / 2.0)
        a0 = v0.copy()
        psi[idx0] = c * a0 - s * v1
        psi[idx1] = s * a0 + c * v1
    return state


def _check_width(state: Statevector, circuit: Circuit) -> None:
    if circuit.num_qubits != state.num_qubits:
        raise StructuralError(
            f"circuit has {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    _check_width(state, circuit)
    for g in circuit.gates:
        apply_gate(state, g)
    return state


def apply_inverse(state: Statevector, circuit: Circuit) -> Statevector:
    _check_width(state, circuit)
    for g in reversed(circuit.gates):
        apply_gate(state, g.inverse())
    return state


def run(circuit: Circuit) -> Statevector:
    """Apply ``circuit`` to a fresh ``|0...0>``."""
    return apply_circuit(new_statevector(circuit.num_qubits), circuit)


def marginal_probability(state: Statevector, qubit: int) -> float:
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise StructuralError(f"qubit {qubit} out of range for {n} qubits")
    probs = state.probabilities().reshape((2,) * n)
    sel = [slice(None)] * n
    sel[_axis(n, qubit)] = 1
    return float(probs[tuple(sel)].sum())


def register_distribution(state: Statevector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal distribution of the register ``qubits``; ``qubits[l]`` is bit ``l``."""
    n = state.num_qubits
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise StructuralError(f"bad register {list(qubits)} for {n} qubits")
    probs = state.probabilities().reshape((2,) * n)
    keep = [_axis(n, q) for q in qubits]
    drop = tuple(ax for ax in range(n) if ax not in keep)
    reduced = probs.sum(axis=drop) if drop else probs
    kept_sorted = sorted(keep)
    perm = [kept_sorted.index(_axis(n, q)) for q in reversed(qubits)]
    return np.ascontiguousarray(reduced.transpose(perm)).reshape(-1)


def sample_counts(state: Statevector, shots: int, seed: int) -> dict[int, int]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = rng.multinomial(shots, probs)
    nz = np.flatnonzero(counts)
    return {int(i): int(counts[i]) for i in nz}

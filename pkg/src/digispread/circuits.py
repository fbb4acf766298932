"""Circuit builders for the Digital Spreading oracle and its arithmetic baselines.

The DS oracle maps ``|A>|K'>|0>`` to ``|A>|K'>|A + K' >= N>`` where ``K'`` ranges
uniformly over ``[0, N)``; because ``A + K' >= N`` is the same event as ``A > K``
with ``K = N - 1 - K'``, the overflow qubit ends up with probability ``E[A] / N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from digispread.errors import StructuralError
from digispread.qsim import CCX, CX, H, RY, Circuit, Gate, RegisterLayout


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over ``2**n`` basis states, with optional value grid."""

    probs: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        size = probs.size
        if probs.ndim != 1 or size < 2 or size & (size - 1):
            raise StructuralError(f"PMF length must be a power of two >= 2, got {probs.shape}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise StructuralError("PMF entries must be finite and non-negative")
        if abs(probs.sum() - 1.0) >= 1e-12:
            raise StructuralError(f"PMF sums to {probs.sum()!r}, not 1")
        if self.values is not None:
            values = np.asarray(self.values, dtype=float)
            if values.shape != probs.shape:
                raise StructuralError("values must match probs in length")
            object.__setattr__(self, "values", values)

    @classmethod
    def from_weights(cls, weights, values=None) -> Pmf:
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), values)

    @property
    def num_qubits(self) -> int:
        return self.probs.size.bit_length() - 1

    @property
    def num_states(self) -> int:
        return self.probs.size

    def index_mean(self) -> float:
        return float(np.dot(self.probs, np.arange(self.num_states)))


#: The eight-state example distribution with support on |1>, |2>, |4>, |5>.
SEC2_PMF = (0.0, 0.25, 0.25, 0.0, 0.25, 0.25, 0.0, 0.0)


def sec2_pmf() -> Pmf:
    return Pmf(np.array(SEC2_PMF))


def ds_layout(n: int) -> RegisterLayout:
    """value = [0, n), ramp = [n, 2n), carry_in = 2n, target = 2n + 1."""
    return RegisterLayout(value=range(0, n), ramp=range(n, 2 * n), carry_in=2 * n, target=2 * n + 1)


def _require(layout: RegisterLayout, *roles: str) -> None:
    missing = [r for r in roles if getattr(layout, r) is None]
    if missing:
        raise StructuralError(f"layout lacks {', '.join(missing)}")


def _paired_registers(layout: RegisterLayout) -> tuple[list[int], list[int]]:
    _require(layout, "value", "ramp", "carry_in")
    a, b = list(layout.value), list(layout.ramp)
    if len(a) != len(b) or not a:
        raise StructuralError(f"value/ramp widths differ or are empty: {len(a)} vs {len(b)}")
    return a, b


def maj(x: int, y: int, z: int) -> list[Gate]:
    return [CX(z, y), CX(z, x), CCX(x, y, z)]


def uma(x: int, y: int, z: int) -> list[Gate]:
    return [CCX(x, y, z), CX(z, x), CX(x, y)]


def _maj_chain(a: Sequence[int], b: Sequence[int], carry_in: int) -> list[Gate]:
    # the running carry rides on the a-wires; a[-1] ends up holding carry_out
    gates = []
    prev = carry_in
    for ai, bi in zip(a, b):
        gates += maj(prev, bi, ai)
        prev = ai
    return gates


def _uma_chain(a: Sequence[int], b: Sequence[int], carry_in: int) -> list[Gate]:
    gates = []
    for i in reversed(range(len(a))):
        prev = carry_in if i == 0 else a[i - 1]
        gates += uma(prev, b[i], a[i])
    return gates


def build_digital_ramp(layout: RegisterLayout) -> Circuit:
    # The ramp is read directly as K' = N - 1 - K; a uniform superposition is
    # invariant under complementing every bit, so no X gates are needed.
    _require(layout, "ramp")
    if len(layout.ramp) < 1:
        raise StructuralError("ramp register is empty")
    return Circuit(layout.width, [H(q) for q in layout.ramp], layout)


def build_pruned_comparator(layout: RegisterLayout) -> Circuit:
    """``target ^= [value + ramp >= 2**n]`` using only the MAJ half of a Cuccaro adder.

    The MAJ chain is run forward, its carry copied out, then run backwards, so
    value, ramp and carry-in come back unchanged.  Emits ``6n + 1`` gates.
    """
    a, b = _paired_registers(layout)
    _require(layout, "target")
    forward = _maj_chain(a, b, layout.carry_in)
    gates = forward + [CX(a[-1], layout.target)] + forward[::-1]
    return Circuit(layout.width, gates, layout)


def build_full_cuccaro_adder(layout: RegisterLayout) -> Circuit:
    """In-place ``ramp <- value + ramp (mod 2**n)``; carry-out XORed into ``target``.

    When the layout has no target the carry-out gate is dropped (plain modular adder).
    """
    a, b = _paired_registers(layout)
    gates = _maj_chain(a, b, layout.carry_in)
    if layout.target is not None:
        gates.append(CX(a[-1], layout.target))
    gates += _uma_chain(a, b, layout.carry_in)
    return Circuit(layout.width, gates, layout)


def build_full_adder_comparator(layout: RegisterLayout) -> Circuit:
    """Overflow flag computed with the unpruned adder: add, keep the carry, subtract.

    Functionally identical to :func:`build_pruned_comparator`; this is what the
    pruning is measured against when the registers must be restored.
    """
    adder = build_full_cuccaro_adder(layout)
    plain = build_full_cuccaro_adder(
        RegisterLayout(value=layout.value, ramp=layout.ramp, carry_in=layout.carry_in)
    )
    undo = [g.inverse() for g in reversed(plain.gates)]
    return Circuit(layout.width, list(adder.gates) + undo, layout)


def weighted_adder_layout(num_inputs: int, weights: Sequence[int]) -> RegisterLayout:
    """inputs = [0, n), sum = next s, scratch = next s, carry_in last."""
    s = max(1, int(sum(weights)).bit_length())
    n = num_inputs
    return RegisterLayout(
        value=range(0, n),
        sum=range(n, n + s),
        scratch=range(n + s, n + 2 * s),
        carry_in=n + 2 * s,
    )


def build_weighted_adder(weights: Sequence[int], layout: RegisterLayout) -> Circuit:
    """``|x>|s> -> |x>|s + sum_j x_j * weights[j]>`` as a cascade of controlled constant adds.

    For each weight the constant is loaded into the scratch register with CX gates
    controlled by its input qubit, added into the sum register with a Cuccaro adder,
    then unloaded, so scratch returns to |0> after every term.
    """
    _require(layout, "value", "sum", "scratch", "carry_in")
    weights = [int(w) for w in weights]
    if any(w < 0 for w in weights):
        raise StructuralError("weights must be non-negative integers")
    inputs, acc, scratch = list(layout.value), list(layout.sum), list(layout.scratch)
    if len(weights) != len(inputs):
        raise StructuralError(f"{len(weights)} weights for {len(inputs)} input qubits")
    if (1 << len(acc)) <= sum(weights):
        raise StructuralError(f"sum register of width {len(acc)} cannot hold {sum(weights)}")
    if len(scratch) != len(acc):
        raise StructuralError("scratch and sum registers must have equal width")

    adder = _maj_chain(scratch, acc, layout.carry_in) + _uma_chain(scratch, acc, layout.carry_in)
    gates: list[Gate] = []
    for x, w in zip(inputs, weights):
        if w == 0:
            continue
        load = [CX(x, scratch[bit]) for bit in range(len(scratch)) if (w >> bit) & 1]
        gates += load + adder + load
    return Circuit(layout.width, gates, layout)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def uniformly_controlled_ry(angles: Sequence[float], controls: Sequence[int], target: int) -> list[Gate]:
    """RY(angles[p]) on ``target`` when the controls read ``p`` (``controls[l]`` is bit ``l``).

    Gray-code expansion into ``2**k`` RY and ``2**k`` CX gates.
    """
    k = len(controls)
    alphas = np.asarray(angles, dtype=float)
    if alphas.size != 1 << k:
        raise StructuralError(f"need {1 << k} angles for {k} controls")
    if k == 0:
        return [RY(target, alphas[0])]
    size = 1 << k
    gray = [_gray(i) for i in range(size)]
    # sign[p, i] = (-1)^{popcount(p & gray(i))}
    parity = np.array([[bin(p & g).count("1") & 1 for g in gray] for p in range(size)])
    thetas = ((1 - 2 * parity).T @ alphas) / size
    gates = []
    for i in range(size):
        gates.append(RY(target, thetas[i]))
        changed = gray[i] ^ gray[(i + 1) % size]
        gates.append(CX(controls[changed.bit_length() - 1], target))
    return gates


def encoder_angles(probs: np.ndarray) -> list[np.ndarray]:
    """Per tree level ``k``, the RY angles indexed by the prefix on the ``k`` top qubits."""
    n = probs.size.bit_length() - 1
    levels = []
    for k in range(n):
        mass = probs.reshape(1 << k, 2, 1 << (n - 1 - k)).sum(axis=2)
        levels.append(2.0 * np.arctan2(np.sqrt(mass[:, 1]), np.sqrt(mass[:, 0])))
    return levels


def build_amplitude_encoder(pmf: Pmf, layout: RegisterLayout | None = None) -> Circuit:
    """Prepare ``sum_i sqrt(p_i)|i>`` on the value register from ``|0...0>``.

    Binary tree of multiplexed RY rotations: level ``k`` rotates qubit ``n-1-k``
    conditioned on the ``k`` qubits above it.  All gates are RY or CX.
    """
    n = pmf.num_qubits
    if layout is None:
        layout = RegisterLayout(value=range(0, n))
    _require(layout, "value")
    qubits = list(layout.value)
    if len(qubits) != n:
        raise StructuralError(f"value register has {len(qubits)} qubits, PMF needs {n}")
    gates: list[Gate] = []
    for k, angles in enumerate(encoder_angles(pmf.probs)):
        target = qubits[n - 1 - k]
        controls = qubits[n - k:]
        gates += uniformly_controlled_ry(angles, controls, target)
    return Circuit(layout.width, gates, layout)


def build_ds_oracle(pmf: Pmf) -> Circuit:
    """Encoder, ramp and pruned comparator on ``2n + 2`` qubits.

    The target qubit's probability of ``|1>`` is ``sum_i p_i * i / 2**n``.
    """
    layout = ds_layout(pmf.num_qubits)
    encoder = build_amplitude_encoder(pmf, layout)
    return encoder.then(build_digital_ramp(layout), build_pruned_comparator(layout))


def telescoping_count(a: int, n: int) -> int:
    """Number of thresholds ``K`` in ``[0, 2**n)`` with ``a > K``."""
    return sum(1 for k in range(1 << n) if a > k)


def expected_target_probability(pmf: Pmf) -> float:
    return pmf.index_mean() / pmf.num_states
